import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pickmetrics.geodesy import (
    Curve,
    estimate_M,
    g_density,
    polyline_length,
    radial_length,
    radial_ratio,
    riemannian_length_dirichlet,
)
from pickmetrics.kernels import KernelSpec, kernel_diag
from pickmetrics.metrics import MetricId, bergman

G_HALF = 0.80944371642624804782  # g(0.5), mpmath 40 digits


def fd_laplacian_log_k(z: complex, h: float = 1e-3) -> float:
    """d^2/dz dz̄ log k(z, z) = Laplacian / 4, fourth-order central stencil."""
    spec = KernelSpec.dirichlet()

    def f(p):
        return math.log(kernel_diag(spec, p))

    def second(direction):
        vals = [f(z + j * h * direction) for j in (-2, -1, 0, 1, 2)]
        return (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)

    return 0.25 * (second(1.0) + second(1j))


class TestDensity:
    def test_origin(self):
        assert g_density(0) == 0.5

    def test_half(self):
        assert g_density(0.5) == pytest.approx(G_HALF, rel=1e-14)

    def test_taylor_seam_is_continuous(self):
        below = g_density(1e-3 * (1 - 1e-12))
        above = g_density(1e-3 * (1 + 1e-12))
        assert abs(below - above) < 1e-14

    def test_rejects_boundary(self):
        with pytest.raises(ValueError):
            g_density(1.0)

    @pytest.mark.parametrize("r", [0.0, 5e-4, 0.01, 0.2, 0.5, 0.8, 0.9, 0.95])
    def test_matches_finite_difference(self, r):
        z = r * complex(math.cos(0.7), math.sin(0.7))
        g = g_density(z)
        assert abs(fd_laplacian_log_k(z) - g) <= 1e-5 * max(1.0, g)

    def test_vectorized(self):
        r = np.linspace(0, 0.99, 50)
        assert np.allclose(g_density(r), [g_density(float(x)) for x in r], rtol=0, atol=0)

    def test_increasing(self):
        r = np.linspace(0, 0.999, 2000)
        assert np.all(np.diff(g_density(r)) > 0)


class TestPolyline:
    def test_rho_radial_half(self):
        res = polyline_length(MetricId.pseudohyperbolic(1), Curve.radial(0.5))
        assert res.converged
        assert res.value == pytest.approx(math.atanh(0.5), abs=1e-5)

    def test_refinement_is_monotone(self):
        res = polyline_length(MetricId.dirichlet(), Curve.arc(0.6, 0.0, 2.0), tol=1e-9)
        diffs = np.diff(res.history)
        assert np.all(diffs >= -1e-13)

    def test_constant_curve(self):
        res = polyline_length(MetricId.dirichlet(), Curve.constant(0.3 + 0.2j))
        assert res.value == 0.0 and res.converged

    def test_ball_segment(self):
        z, w = np.array([0.1, 0.2j]), np.array([-0.3, 0.1])
        res = polyline_length(MetricId.bergman(2), Curve.segment(z, w))
        # a polyline length dominates the distance between its endpoints
        assert res.value >= bergman(z, w) - 1e-12

    @given(st.floats(0.05, 0.9), st.floats(0, 2 * math.pi))
    def test_bergman_radial_is_geodesic(self, r, angle):
        res = polyline_length(MetricId.bergman(1), Curve.radial(r, angle), tol=1e-7)
        assert res.value == pytest.approx(math.atanh(r), abs=1e-6)
        assert res.value <= math.atanh(r) + 1e-12

    def test_nonconvergence_reported(self):
        res = polyline_length(MetricId.dirichlet(), Curve.radial(0.9), tol=1e-12, max_depth=4)
        assert not res.converged
        assert res.refinement_depth == 4


class TestRiemannian:
    def test_radial_matches_polyline(self):
        c = Curve.radial(0.9)
        riem = riemannian_length_dirichlet(c)
        poly = polyline_length(MetricId.dirichlet(), c).value
        assert riem == pytest.approx(poly, abs=1e-6)
        assert riem == pytest.approx(radial_length(0.9), abs=1e-12)

    def test_numeric_derivative_path(self):
        analytic = Curve.arc(0.7, 0.0, 1.0)
        numeric = Curve(lambda t: 0.7 * np.exp(1j * t), 0.0, 1.0)
        assert riemannian_length_dirichlet(numeric) == pytest.approx(
            riemannian_length_dirichlet(analytic), abs=1e-8
        )

    def test_arc_is_closed_form(self):
        r, theta = 0.8, 1.3
        expected = theta * r * math.sqrt(g_density(r))
        assert riemannian_length_dirichlet(Curve.arc(r, 0.0, theta)) == pytest.approx(expected, rel=1e-12)

    def test_nonsmooth_rejected(self):
        with pytest.raises(ValueError):
            riemannian_length_dirichlet(Curve(lambda t: t, 0.0, 0.5, smooth=False))


class TestRadial:
    def test_zero(self):
        assert radial_length(0.0) == 0.0

    def test_increasing(self):
        us = 10.0 ** -np.arange(1, 13)
        lengths = [radial_length(1 - u, u=u) for u in us]
        assert np.all(np.diff(lengths) > 0)

    def test_split_is_continuous(self):
        a = radial_length(0.99 - 1e-12)
        b = radial_length(0.99 + 1e-12)
        assert abs(a - b) < 1e-10

    def test_u_argument_beats_rounding(self):
        # 1 - 1e-17 rounds to 1.0, but u keeps the information
        assert math.isfinite(radial_length(1.0, u=1e-17))
        with pytest.raises(ValueError):
            radial_length(1.0)

    def test_ratio_below_one_and_increasing(self):
        ratios = [radial_ratio(u=10.0**-k) for k in (4, 6, 8, 10, 12)]
        assert all(r < 1 for r in ratios)
        assert np.all(np.diff(ratios) > 0)

    def test_estimate_M_dominates(self):
        grid = [0.5, 0.9, 0.99, 0.999]
        M = estimate_M(grid)
        for r in grid:
            assert radial_length(r) <= M * math.sqrt(-math.log1p(-r))
        with pytest.raises(ValueError):
            estimate_M([])


def test_density_taylor_coefficients_symbolic():
    sp = pytest.importorskip("sympy")
    from pickmetrics.geodesy import _G_TAYLOR

    x = sp.symbols("x")
    L = -sp.log(1 - x)
    series = sp.series((L - x) / (L**2 * (1 - x) ** 2), x, 0, 4).removeO()
    exact = [sp.nsimplify(series.coeff(x, k)) for k in range(4)]
    assert exact == [sp.Rational(1, 2), sp.Rational(5, 6), sp.Rational(9, 8), sp.Rational(251, 180)]
    assert [float(c) for c in exact] == list(_G_TAYLOR)
