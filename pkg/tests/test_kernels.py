import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pickmetrics.kernels import (
    BallPoint,
    DiscPoint,
    DomainError,
    KernelSpec,
    PowerSeries,
    kernel_diag,
    kernel_eval,
    series_reciprocal,
)

from conftest import ball_points, disc_points

DISC_SPECS = [KernelSpec.hardy(), KernelSpec.dirichlet(), KernelSpec.weighted_dirichlet(0.3)]
ALL_SPECS = DISC_SPECS + [KernelSpec.drury_arveson(1)]

# sum_n 0.25^n / (n+1), mpmath to 40 digits
DIRICHLET_HALF = 1.1507282898071237


def taylor_dirichlet(x, terms=200):
    return sum(x**n / (n + 1) for n in range(terms))


def test_dirichlet_at_origin():
    spec = KernelSpec.dirichlet()
    assert kernel_eval(spec, 0.7 + 0.1j, 0.0) == 1
    assert kernel_eval(spec, 0.0, 0.0) == 1


def test_dirichlet_half_matches_taylor_oracle():
    spec = KernelSpec.dirichlet()
    oracle = taylor_dirichlet(0.25)
    assert kernel_eval(spec, 0.5, 0.5) == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(DIRICHLET_HALF, abs=1e-12)
    assert kernel_diag(spec, 0.5) == pytest.approx(DIRICHLET_HALF, rel=1e-14)


def test_hardy_value():
    assert kernel_eval(KernelSpec.hardy(), 0.5, 0.5) == pytest.approx(4 / 3, rel=1e-15)


def test_weighted_diag():
    assert kernel_diag(KernelSpec.weighted_dirichlet(0.5), 0.6) == pytest.approx(1.25, rel=1e-14)


@pytest.mark.parametrize("x", [1e-9, 3e-5, 1e-4, 0.02 + 0.05j, -0.3j, 0.8 - 0.1j])
def test_dirichlet_matches_series_near_seam(x):
    # z w̄ = x with w = 1
    spec = KernelSpec.dirichlet()
    z = x / 0.999
    got = kernel_eval(spec, z, 0.999)
    assert got == pytest.approx(taylor_dirichlet(complex(x), 2000), rel=1e-13)


def test_domain_errors():
    with pytest.raises(DomainError):
        kernel_eval(KernelSpec.hardy(), 1.0, 0.0)
    with pytest.raises(DomainError):
        kernel_eval(KernelSpec.drury_arveson(2), [0.1, 0.1], [0.1])
    with pytest.raises(DomainError):
        kernel_diag(KernelSpec.drury_arveson(2), [0.8, 0.8])
    with pytest.raises(DomainError):
        DiscPoint(1.0 + 0j)
    with pytest.raises(DomainError):
        BallPoint((0.6, 0.9))


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec.weighted_dirichlet(1.0)
    with pytest.raises(ValueError):
        KernelSpec.drury_arveson(0)


def test_point_types_feed_kernels():
    z = BallPoint((0.3, 0.1j))
    assert z.dim == 2
    val = kernel_eval(KernelSpec.drury_arveson(2), np.asarray(z), np.asarray(z))
    assert val == pytest.approx(1 / (1 - 0.1))
    assert kernel_eval(KernelSpec.hardy(), DiscPoint(0.5), DiscPoint(0.5)) == pytest.approx(4 / 3)


def test_diag_near_boundary_matches_mpmath():
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 40
    for r in [0.5, 0.9, 0.999, 1 - 1e-6, 1 - 1e-8]:
        x = mp.mpf(r) ** 2
        oracle = {
            "hardy": 1 / (1 - x),
            "dirichlet": -mp.log(1 - x) / x,
            "weighted-dirichlet": (1 - x) ** mp.mpf(-0.3),
        }
        for spec in DISC_SPECS:
            assert kernel_diag(spec, r) == pytest.approx(float(oracle[spec.kind.value]), rel=1e-12)


@given(z=disc_points(), w=disc_points())
def test_hermitian_symmetry_disc(z, w):
    for spec in DISC_SPECS:
        a = kernel_eval(spec, z, w)
        b = kernel_eval(spec, w, z)
        assert abs(a - np.conj(b)) <= 1e-14 * max(1.0, abs(a))


@given(z=ball_points(3), w=ball_points(3))
def test_hermitian_symmetry_ball(z, w):
    spec = KernelSpec.drury_arveson(3)
    a = kernel_eval(spec, z, w)
    assert abs(a - np.conj(kernel_eval(spec, w, z))) <= 1e-14 * abs(a)


@given(z=disc_points(), w=disc_points())
def test_gram_2x2_psd(z, w):
    for spec in DISC_SPECS:
        kzz, kww = kernel_diag(spec, z), kernel_diag(spec, w)
        kzw = kernel_eval(spec, z, w)
        assert kzz > 0 and kww > 0
        det = kzz * kww - abs(kzw) ** 2
        assert det >= -1e-10 * kzz * kww


@given(z=ball_points(4), w=ball_points(4))
def test_gram_2x2_psd_ball(z, w):
    spec = KernelSpec.drury_arveson(4)
    kzz, kww = kernel_diag(spec, z), kernel_diag(spec, w)
    det = kzz * kww - abs(kernel_eval(spec, z, w)) ** 2
    assert det >= -1e-10 * kzz * kww


def test_vectorized_eval_matches_scalar(rng):
    z = 0.9 * rng.random(50) * np.exp(2j * np.pi * rng.random(50))
    w = 0.9 * rng.random(50) * np.exp(2j * np.pi * rng.random(50))
    for spec in DISC_SPECS:
        vec = kernel_eval(spec, z, w)
        assert np.allclose(vec, [kernel_eval(spec, a, b) for a, b in zip(z, w)], rtol=1e-15)


class TestSeriesReciprocal:
    def test_identity(self):
        assert series_reciprocal(PowerSeries([1.0])).coeffs == (1.0,)

    def test_log_series(self):
        q = series_reciprocal(PowerSeries([1, 1 / 2, 1 / 3, 1 / 4]))
        assert np.allclose(q.coeffs, [1, -1 / 2, -1 / 12, -1 / 24], atol=1e-15)

    def test_scalar(self):
        assert series_reciprocal(PowerSeries([2, 0, 0])).coeffs == (0.5, 0.0, 0.0)

    def test_product_is_one(self):
        p = PowerSeries([1, 1 / 2, 1 / 3, 1 / 4])
        prod = p * series_reciprocal(p)
        assert np.allclose(prod.coeffs, [1, 0, 0, 0], atol=1e-15)

    def test_zero_constant_term(self):
        with pytest.raises(ZeroDivisionError):
            series_reciprocal(PowerSeries([0.0, 1.0]))

    @given(st.lists(st.floats(-2, 2), min_size=1, max_size=12), st.floats(0.5, 3))
    def test_involution(self, tail, lead):
        p = PowerSeries([lead] + tail)
        back = series_reciprocal(series_reciprocal(p))
        scale = max(1.0, max(abs(c) for c in p.coeffs))
        # error grows with the size of the intermediate coefficients
        inter = max(abs(c) for c in series_reciprocal(p).coeffs)
        assert np.allclose(back.coeffs, p.coeffs, atol=1e-12 * scale * max(1.0, inter) ** 2)

    def test_involution_dirichlet_series(self):
        p = PowerSeries([1 / (n + 1) for n in range(300)])
        back = series_reciprocal(series_reciprocal(p))
        assert np.max(np.abs(np.asarray(back) - np.asarray(p))) <= 1e-12


def test_dirichlet_taylor_coefficients_are_reciprocal_integers():
    xs = np.array([0.1, 0.2, 0.3])
    spec = KernelSpec.dirichlet()
    got = kernel_diag(spec, np.sqrt(xs))
    assert np.allclose(got, [-math.log1p(-x) / x for x in xs], rtol=1e-15)
