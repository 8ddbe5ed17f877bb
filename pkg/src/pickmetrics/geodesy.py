"""Curve lengths in the kernel metrics.

Two routes are available. ``polyline_length`` approximates the partition
supremum sum d(c(t_j), c(t_{j+1})) by dyadic refinement and works for any
metric. For the Dirichlet metric, ``riemannian_length_dirichlet`` integrates
the infinitesimal form sqrt(g(c(t))) |c'(t)| with

    g(z) = (L - |z|^2) / (L^2 (1 - |z|^2)^2),   L = log(1 / (1 - |z|^2)),

which is d^2/dz dz̄ of log k(z, z) and equals 1/2 at the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .metrics import MetricId
from .quadrature import QuadratureError, adaptive_simpson

# below |z| = _G_SEAM the density comes from its Taylor expansion in x = |z|^2
_G_SEAM = 1e-3
_G_TAYLOR = (0.5, 5.0 / 6.0, 9.0 / 8.0, 251.0 / 180.0)

# radial_length switches to the variable s = -log(1 - t) above this radius
_RADIAL_SPLIT = 0.99


@dataclass(frozen=True)
class Curve:
    """A parametrized curve t -> param(t) on [a, b].

    ``param`` must accept a numpy array of parameters. Ball curves return an
    array with a trailing coordinate axis. ``deriv`` is optional; without it
    derivatives come from central differences.
    """

    param: Callable[[np.ndarray], np.ndarray]
    a: float
    b: float
    smooth: bool = True
    deriv: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("curve needs a < b")

    def __call__(self, t):
        return self.param(np.asarray(t, dtype=float))

    @classmethod
    def radial(cls, r: float, angle: float = 0.0) -> "Curve":
        """t -> t e^{i angle} on [0, r]."""
        rot = complex(math.cos(angle), math.sin(angle))
        return cls(lambda t: t * rot, 0.0, r, deriv=lambda t: np.full(np.shape(t), rot))

    @classmethod
    def arc(cls, r: float, theta0: float, theta1: float) -> "Curve":
        """t -> r e^{it} on [theta0, theta1]."""
        return cls(
            lambda t: r * np.exp(1j * t),
            theta0,
            theta1,
            deriv=lambda t: 1j * r * np.exp(1j * t),
        )

    @classmethod
    def segment(cls, z, w) -> "Curve":
        """Straight segment from z to w (disc or ball points)."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        if z.ndim == 0:
            return cls(lambda t: z + t * (w - z), 0.0, 1.0, deriv=lambda t: np.full(np.shape(t), w - z))
        return cls(
            lambda t: z + np.asarray(t)[..., None] * (w - z),
            0.0,
            1.0,
            deriv=lambda t: np.broadcast_to(w - z, np.shape(t) + z.shape),
        )

    @classmethod
    def constant(cls, z) -> "Curve":
        z = np.asarray(z, dtype=complex)
        return cls(
            lambda t: np.broadcast_to(z, np.shape(t) + z.shape).copy(),
            0.0,
            1.0,
            deriv=lambda t: np.zeros(np.shape(t) + z.shape, dtype=complex),
        )


@dataclass
class LengthResult:
    value: float
    refinement_depth: int
    converged: bool
    estimate_gap: float
    history: list[float] = field(default_factory=list, repr=False)


def polyline_length(
    metric: MetricId, c: Curve, tol: float = 1e-8, max_depth: int = 20
) -> LengthResult:
    """Lower bound for the metric length of ``c`` by dyadic partitions.

    Level k uses 2**k equal parameter steps. Refinement stops once the
    increment has been below ``tol`` on two consecutive levels. Each value is
    a partition sum, hence a lower bound for the length, and the sequence is
    non-decreasing up to rounding.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    history: list[float] = []
    quiet = 0
    gap = math.inf
    for k in range(max_depth + 1):
        t = np.linspace(c.a, c.b, 2**k + 1)
        pts = c(t)
        seg = np.atleast_1d(np.asarray(metric.distance(pts[:-1], pts[1:]), dtype=float))
        if not np.all(np.isfinite(seg)):
            raise ValueError("metric returned a non-finite value along the curve")
        total = math.fsum(seg)
        if history:
            gap = total - history[-1]
            quiet = quiet + 1 if abs(gap) < tol else 0
        history.append(total)
        if quiet >= 2:
            return LengthResult(total, k, True, gap, history)
    return LengthResult(history[-1], max_depth, False, gap, history)


def _log_minus_x(x: np.ndarray) -> np.ndarray:
    """log(1/(1-x)) - x without cancellation for small x."""
    out = -np.log1p(-x) - x
    small = x < 0.25
    if np.any(small):
        xs = x[small]
        acc = np.zeros_like(xs)
        for n in range(40, 1, -1):
            acc = (acc + 1.0 / n) * xs
        out[small] = acc * xs  # sum_{n>=2} x^n / n
    return out


def _g_of_x(x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    tiny = x < _G_SEAM**2
    xt = x[tiny]
    out[tiny] = _G_TAYLOR[0] + xt * (_G_TAYLOR[1] + xt * (_G_TAYLOR[2] + xt * _G_TAYLOR[3]))
    xr = x[~tiny]
    L = -np.log1p(-xr)
    out[~tiny] = _log_minus_x(xr) / (L**2 * (1.0 - xr) ** 2)
    return out


def g_density(z):
    """Riemannian density of the Dirichlet metric at z (depends on |z| only)."""
    a = np.abs(np.asarray(z, dtype=complex))
    if np.any(a >= 1.0):
        raise ValueError("point outside the open unit disc")
    out = _g_of_x(a * a)
    return float(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(a))


def _speed(c: Curve, t: np.ndarray) -> np.ndarray:
    if c.deriv is not None:
        d = np.asarray(c.deriv(t))
    else:
        h = max(1e-6, 1e-8 / abs(c.b - c.a))
        tp = np.minimum(t + h, c.b)
        tm = np.maximum(t - h, c.a)
        d = (c(tp) - c(tm)) / (tp - tm).reshape((-1,) + (1,) * (np.ndim(c(t[:1])) - 1))
    d = np.abs(d)
    return d if d.ndim == 1 else np.sqrt(np.sum(d**2, axis=-1))


def riemannian_length_dirichlet(c: Curve, tol: float = 1e-10) -> float:
    """Dirichlet length of a piecewise C^1 disc curve by adaptive quadrature."""
    if not c.smooth:
        raise ValueError("riemannian length needs a curve flagged smooth")

    def integrand(t):
        return np.sqrt(g_density(c(t))) * _speed(c, t)

    value, _ = adaptive_simpson(integrand, c.a, c.b, tol)
    return value


def _radial_tail_integrand(s: np.ndarray) -> np.ndarray:
    # t = 1 - e^{-s}, dt = e^{-s} ds; 1 - t^2 = e^{-s} (2 - e^{-s})
    e = np.exp(-s)
    t = -np.expm1(-s)
    x = t * t
    omx = e * (2.0 - e)
    L = s - np.log(2.0 - e)
    g = (L - x) / (L**2 * omx**2)
    return np.sqrt(g) * e


def radial_length(r: float, tol: float = 1e-10, *, u: float | None = None) -> float:
    """Dirichlet length of the segment [0, r].

    ``u`` may be passed instead of (or together with) ``r`` to give the
    complement 1 - r directly; it is used for the upper limit when present.
    """
    if u is not None:
        r = 1.0 - u
    else:
        u = 1.0 - r
    if not 0.0 < u <= 1.0:
        raise ValueError("radial_length needs 0 <= r < 1")
    if u == 1.0:
        return 0.0

    def head(t):
        return np.sqrt(_g_of_x(t * t))

    if r <= _RADIAL_SPLIT:
        return adaptive_simpson(head, 0.0, r, tol)[0]
    first, _ = adaptive_simpson(head, 0.0, _RADIAL_SPLIT, tol / 2)
    s0 = -math.log1p(-_RADIAL_SPLIT)
    s1 = -math.log(u)
    second, _ = adaptive_simpson(_radial_tail_integrand, s0, s1, tol / 2)
    return first + second


def radial_ratio(r: float | None = None, *, u: float | None = None, tol: float = 1e-10) -> float:
    """radial_length(r) / sqrt(log(1/(1-r)))."""
    if u is None:
        u = 1.0 - r
    return radial_length(1.0 - u, tol, u=u) / math.sqrt(-math.log(u))


def estimate_M(grid: Sequence[float], tol: float = 1e-10) -> float:
    """Empirical constant M with radial_length(r) <= M sqrt(log(1/(1-r))).

    Maximum ratio over ``grid`` times a 5% margin. This is a sample-level
    estimate, not a certified bound.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    if any(not 0.0 < r < 1.0 for r in grid):
        raise ValueError("radii must lie in (0, 1)")
    return 1.05 * max(radial_ratio(r, tol=tol) for r in grid)


__all__ = [
    "Curve",
    "LengthResult",
    "QuadratureError",
    "estimate_M",
    "g_density",
    "polyline_length",
    "radial_length",
    "radial_ratio",
    "riemannian_length_dirichlet",
]
