"""Metric geometry of the Dirichlet and Drury-Arveson spaces."""
from .geodesy import Curve, LengthResult, estimate_M, g_density, polyline_length, radial_length, riemannian_length_dirichlet
from .gregory import (
    CoeffTable,
    EmbeddingVector,
    asymptotic_check,
    embed,
    embedding_isometry_gap,
    gregory_integral,
    gregory_recursion,
    reconstruction_error,
    wendel_sandwich,
)
from .kernels import BallPoint, DiscPoint, KernelKind, KernelSpec, PowerSeries, kernel_diag, kernel_eval, series_reciprocal
from .metrics import (
    MetricId,
    MoebiusMap,
    bergman,
    delta_from_kernel,
    dirichlet_metric,
    moebius_apply,
    pick_two_point,
    pseudohyperbolic,
    weighted_metric_bounds,
)
from .packing import (
    ObstructionReport,
    SeparatedSet,
    circle_asymptotic,
    circle_lattice,
    circle_monotonicity_check,
    distortion_estimate,
    duren_weir_bound,
    greedy_separated,
    obstruction_report,
    slow_growth_envelope,
)

__version__ = "0.1.0"
