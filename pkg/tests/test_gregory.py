import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pickmetrics.gregory import (
    CoeffTable,
    Method,
    asymptotic_check,
    corrected_integral,
    embed,
    embedding_isometry_gap,
    gregory_coefficient,
    gregory_integral,
    gregory_recursion,
    kluyver_integrand,
    reconstruction_bound,
    reconstruction_error,
    tail_bound,
    wendel_bounds,
    wendel_sandwich,
)

from conftest import disc_points

C50 = 0.0007419608956386517087  # mpmath


def exact_coefficients(n_max):
    """c_n from exact rational inversion of sum x^n/(n+1)."""
    p = [Fraction(1, n + 1) for n in range(n_max + 1)]
    q = [Fraction(1)]
    for n in range(1, n_max + 1):
        q.append(-sum(p[j] * q[n - j] for j in range(1, n + 1)))
    return [-x for x in q[1:]]


@pytest.fixture(scope="module")
def table():
    return gregory_recursion(400)


class TestRecursion:
    def test_exact_small(self, table):
        exact = exact_coefficients(12)
        assert exact[:6] == [Fraction(1, 2), Fraction(1, 12), Fraction(1, 24), Fraction(19, 720),
                             Fraction(3, 160), Fraction(863, 60480)]
        for n, c in enumerate(exact, start=1):
            assert table[n] == pytest.approx(float(c), abs=1e-16)

    def test_c50(self, table):
        assert table[50] == pytest.approx(C50, rel=1e-12)

    def test_error_estimate_covers_exact(self):
        t = gregory_recursion(40)
        exact = exact_coefficients(40)
        for n in range(1, 41):
            assert abs(t[n] - float(exact[n - 1])) <= t.err[n - 1] + 1e-18

    def test_nonnegative_and_decreasing(self):
        t = gregory_recursion(10_000)
        assert np.all(t.values >= 0)
        assert np.all(np.diff(t.values) < 0)

    def test_partial_sums_below_one(self, table):
        s = table.partial_sums()
        assert np.all(np.diff(s) > 0)
        assert s[-1] < 1
        # sum c_n = 1 with a tail of order 1/log N
        assert 1 - s[-1] < 1.5 / math.log(table.n_max)

    def test_table_access(self, table):
        with pytest.raises(IndexError):
            table[0]
        with pytest.raises(IndexError):
            table[table.n_max + 1]
        with pytest.raises(ValueError):
            table.values[0] = 1.0
        with pytest.raises(ValueError):
            gregory_recursion(0)

    def test_csv(self):
        text = gregory_recursion(3).to_csv()
        lines = text.splitlines()
        assert lines[0] == "n,c_n,method,err"
        assert lines[1].startswith("1,0.5,recursion,")
        buf = io.StringIO()
        assert gregory_recursion(3).to_csv(buf) is None
        assert buf.getvalue() == text

    def test_table_validation(self):
        with pytest.raises(ValueError):
            CoeffTable(np.ones(3), np.ones(2), Method.RECURSION)


class TestIntegral:
    def test_integrand_endpoints(self):
        assert kluyver_integrand(5, 0.0) == 0.0
        # at t = 1 the product (1 - 1) vanishes for n >= 2
        assert kluyver_integrand(5, 1.0) == 0.0
        assert kluyver_integrand(1, 1.0) == 1.0

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 50, 200])
    def test_matches_recursion(self, n, table):
        assert gregory_integral(n, 1e-13) == pytest.approx(table[n], abs=1e-11)

    def test_dispatch(self, table):
        assert gregory_coefficient(10, table) == table[10]
        assert gregory_coefficient(10) == pytest.approx(table[10], rel=1e-14)
        big = gregory_coefficient(20_000)
        assert 0 < big < gregory_coefficient(10_000)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            gregory_integral(0)


class TestAsymptotics:
    @pytest.mark.parametrize("n", [10, 100, 10**3, 10**4, 10**5, 10**6])
    def test_sandwich_brackets_corrected_integral(self, n):
        lo, hi = wendel_sandwich(n)
        val = corrected_integral(n)
        assert lo <= val <= hi

    @pytest.mark.parametrize("n", [2, 5, 100, 1000, 10_000])
    def test_wendel_brackets_coefficient(self, n):
        lo, hi = wendel_bounds(n)
        c = gregory_coefficient(n)
        assert lo <= c <= hi

    def test_wendel_needs_n_two(self):
        with pytest.raises(ValueError):
            wendel_bounds(1)

    def test_ratio_increases(self):
        ratios = [r for _, r in asymptotic_check([10, 100, 1000, 10_000])]
        assert np.all(np.diff(ratios) > 0)
        assert ratios[-1] < 1


class TestEmbedding:
    def test_tail_bound_dominates(self, table):
        for x in (0.1, 0.49, 0.81):
            for N in (5, 50, 200):
                true_tail = math.fsum(table.values[N:] * x ** np.arange(N + 1, table.n_max + 1))
                assert true_tail <= tail_bound(x, N, float(table.partial_sums()[N - 1]))
        assert tail_bound(0.0, 10, 0.9) == 0.0

    def test_norm_below_one(self, table):
        v = embed(0.9, 300, table)
        assert v.norm2 < 1
        assert v.norm2 <= v.norm2 + v.tail <= 1

    def test_embed_checks(self, table):
        with pytest.raises(ValueError):
            embed(0.5, table.n_max + 1, table)
        with pytest.raises(ValueError):
            embed(0.5, 0, table)

    @given(z=disc_points(0.7), w=disc_points(0.7))
    def test_reconstruction_within_bound(self, z, w):
        t = gregory_recursion(200)
        for N in (20, 80, 200):
            err = reconstruction_error(z, w, N, t)
            assert err <= reconstruction_bound(embed(z, N, t), embed(w, N, t))

    def test_reconstruction_improves_with_N(self, table):
        errs = [reconstruction_error(0.6 + 0.2j, -0.5j, N, table) for N in (5, 10, 20, 40, 80)]
        assert all(b <= a for a, b in zip(errs, errs[1:]))
        assert errs[-1] < 1e-12

    def test_isometry(self, table):
        assert embedding_isometry_gap(0.5, -0.3 + 0.4j, 200, table) < 1e-10
        assert embedding_isometry_gap(0.2, 0.2, 50, table) == 0.0
