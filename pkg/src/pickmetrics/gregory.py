"""Gregory coefficients and the explicit embedding of the disc into the l2 ball.

The coefficients c_n >= 0 are defined by

    sum_{n>=1} c_n x^n = 1 - 1/k(x),   k(x) = log(1/(1-x))/x = sum x^n/(n+1),

so that b(z) = (sqrt(c_1) z, sqrt(c_2) z^2, ...) satisfies
k(z, w) = 1 / (1 - <b(z), b(w)>). They are the absolute values of the
Gregory coefficients and admit the integral representation

    c_n = (1/n!) int_0^1 t (1-t)(2-t)...(n-1-t) dt.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import rgamma

from .kernels import KernelSpec, as_disc, kernel_eval, reciprocal_coeffs
from .metrics import delta_from_kernel, dirichlet_metric
from .quadrature import adaptive_simpson

EPS = np.finfo(float).eps

# recursion is used as ground truth up to this order; the integral beyond
RECURSION_LIMIT = 10_000

# block size (in factors) for the running product at large n
_PRODUCT_BLOCK = 65_536


class Method(enum.Enum):
    RECURSION = "recursion"
    KLUYVER_INTEGRAL = "integral"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class CoeffTable:
    """c_1..c_{n_max} with per-entry absolute error estimates."""

    values: np.ndarray
    err: np.ndarray
    method: Method

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        e = np.asarray(self.err, dtype=float)
        if v.shape != e.shape or v.ndim != 1:
            raise ValueError("values and err must be 1-d arrays of equal length")
        v.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "err", e)

    @property
    def n_max(self) -> int:
        return self.values.size

    def __getitem__(self, n: int) -> float:
        """c_n, 1-based."""
        if not 1 <= n <= self.n_max:
            raise IndexError(f"c_{n} is outside the table (n_max={self.n_max})")
        return float(self.values[n - 1])

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.values)

    def rows(self) -> Iterable[tuple[int, float, str, float]]:
        for n, (c, e) in enumerate(zip(self.values, self.err), start=1):
            yield n, float(c), self.method.value, float(e)

    def to_csv(self, fh=None) -> str | None:
        """Write ``n,c_n,method,err`` with 17 significant digits."""
        out = fh if fh is not None else io.StringIO()
        write_coeff_rows(out, self.rows())
        return None if fh is not None else out.getvalue()


def write_coeff_rows(fh, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "c_n", "method", "err"])
    for n, c, method, e in rows:
        w.writerow([n, f"{c:.17g}", method, f"{e:.17g}"])


def gregory_recursion(n_max: int) -> CoeffTable:
    """c_1..c_{n_max} by inverting the Taylor series of the Dirichlet kernel.

    The error estimate is the standard forward bound for the convolution
    recursion, n * eps * sum_j |p_j| |q_{n-j}|.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    p = 1.0 / np.arange(1, n_max + 2, dtype=float)
    q = reciprocal_coeffs(p)
    mags = np.convolve(p, np.abs(q))[: n_max + 1]
    err = np.arange(n_max + 1) * EPS * mags
    return CoeffTable(-q[1:], err[1:], Method.RECURSION)


def _log_product(n: int, t: np.ndarray) -> np.ndarray:
    """log prod_{j=1}^{n-1} (1 - t/j), accumulated in blocks."""
    acc = np.zeros_like(t)
    for start in range(1, n, _PRODUCT_BLOCK):
        j = np.arange(start, min(n, start + _PRODUCT_BLOCK), dtype=float)
        acc += np.sum(np.log1p(-np.outer(t, 1.0 / j)), axis=1)
    return acc


def kluyver_integrand(n: int, t) -> np.ndarray:
    """t/n * prod_{j=1}^{n-1} (j - t)/j, the integrand of c_n."""
    t = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t)
    with np.errstate(divide="ignore"):
        out = flat / n * np.exp(_log_product(n, flat))
    return out.reshape(t.shape)


def gregory_integral(n: int, tol: float = 1e-13) -> float:
    """c_n from its integral representation, by adaptive Simpson on [0, 1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    value, _ = adaptive_simpson(lambda t: kluyver_integrand(n, t), 0.0, 1.0, tol)
    return value


def gregory_integral_table(n_max: int, tol: float = 1e-13) -> CoeffTable:
    vals = np.array([gregory_integral(n, tol) for n in range(1, n_max + 1)])
    return CoeffTable(vals, np.full(n_max, tol), Method.KLUYVER_INTEGRAL)


def corrected_integral(n: int, tol: float | None = None) -> float:
    """int_0^1 t (n+1)^{-t-1} / Gamma(1-t) dt, asymptotically equal to c_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    L = math.log(n + 1)

    def f(t):
        return t * np.exp(-(t + 1.0) * L) * rgamma(1.0 - t)

    if tol is None:
        tol = 1e-9 / ((n + 1) * L * L)
    return adaptive_simpson(f, 0.0, 1.0, tol)[0]


def wendel_sandwich(n: int) -> tuple[float, float]:
    """Closed-form bounds on ``corrected_integral(n)``.

    Since 1 - t <= 1/Gamma(1-t) <= 1 on [0, 1],

        int t (1-t) a^{-t-1} dt  <=  corrected_integral(n)  <=  int t a^{-t-1} dt

    with a = n + 1. With L = log a both sides integrate by parts:

        upper = (1 - (1+L)/a) / (a L^2)
        lower = upper - (2 - (L^2 + 2L + 2)/a) / (a L^3)
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = n + 1.0
    L = math.log(a)
    upper = -math.expm1(-L) / (a * L * L) - 1.0 / (a * a * L)
    second = (2.0 - (L * L + 2.0 * L + 2.0) / a) / (a * L**3)
    lower = upper - second
    return lower, upper


def wendel_bounds(n: int, tol: float | None = None) -> tuple[float, float]:
    """Bounds on c_n itself from Wendel's inequality, n >= 2.

    Wendel's inequality with x = n - t, s = t gives

        (n-t)^{-t} / n  <=  Gamma(n-t) / Gamma(n+1)  <=  n^{-t} / (n-t),

    and 1 - t <= 1/Gamma(1-t) <= 1, so

        int t (1-t) (n-t)^{-t} / n dt  <=  c_n  <=  int t n^{-t} / (n-t) dt.
    """
    if n < 2:
        raise ValueError("the Wendel bracket needs n >= 2")
    if tol is None:
        tol = 1e-6 / (n * math.log(n) ** 2)
    lo, _ = adaptive_simpson(lambda t: t * (1 - t) * np.exp(-t * np.log(n - t)) / n, 0.0, 1.0, tol)
    hi, _ = adaptive_simpson(lambda t: t * np.exp(-t * math.log(n)) / (n - t), 0.0, 1.0, tol)
    return lo, hi


def gregory_coefficient(n: int, table: CoeffTable | None = None) -> float:
    """c_n from a recursion table when it covers n, else from the integral."""
    if table is not None and n <= table.n_max:
        return table[n]
    if n <= RECURSION_LIMIT:
        return gregory_recursion(n)[n]
    tol = 1e-9 / (n * math.log(n) ** 2)
    return gregory_integral(n, tol)


def asymptotic_check(n_list: Sequence[int]) -> list[tuple[int, float]]:
    """(n, c_n n log(n)^2) for each n; the ratio tends to 1."""
    if any(n < 2 for n in n_list):
        raise ValueError("asymptotic ratios need n >= 2")
    small = [n for n in n_list if n <= RECURSION_LIMIT]
    table = gregory_recursion(max(small)) if small else None
    return [(n, gregory_coefficient(n, table) * n * math.log(n) ** 2) for n in n_list]


@dataclass(frozen=True)
class EmbeddingVector:
    """Truncation b_N(z) of the embedding plus a bound on the omitted mass.

    ``tail`` bounds sum_{n>N} c_n |z|^{2n}, so
    ||coords||^2 <= ||b(z)||^2 <= ||coords||^2 + tail.
    """

    z: complex
    coords: np.ndarray
    tail: float

    @property
    def N(self) -> int:
        return self.coords.size

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.coords) ** 2))


def tail_bound(x: float, N: int, partial_sum: float) -> float:
    """Bound on sum_{n>N} c_n x^n for 0 <= x < 1.

    Two bounds are combined: c_n <= 1/n gives x^{N+1} / ((N+1)(1-x)), and
    sum c_n = 1 gives x^{N+1} (1 - sum_{n<=N} c_n). Neither is sharp.
    """
    if x == 0.0:
        return 0.0
    lead = x ** (N + 1)
    return min(lead / ((N + 1) * (1.0 - x)), lead * max(0.0, 1.0 - partial_sum) + 4 * N * EPS * lead)


def embed(z, N: int, table: CoeffTable) -> EmbeddingVector:
    if N > table.n_max:
        raise ValueError(f"truncation N={N} exceeds the coefficient table (n_max={table.n_max})")
    if N < 1:
        raise ValueError("N must be >= 1")
    z = complex(as_disc(z))
    c = np.clip(table.values[:N], 0.0, None)
    powers = z ** np.arange(1, N + 1)
    coords = np.sqrt(c) * powers
    tail = tail_bound(abs(z) ** 2, N, float(np.sum(c)))
    return EmbeddingVector(z, coords, tail)


def reconstruction_bound(bz: EmbeddingVector, bw: EmbeddingVector) -> float:
    """Bound on |k(z,w) - 1/(1 - <b_N(z), b_N(w)>)| from the two tails.

    The omitted part of <b(z), b(w)> is at most sqrt(tail_z tail_w) by
    Cauchy-Schwarz; with A = <b(z), b(w)> and A_N its truncation,
    |1/(1-A) - 1/(1-A_N)| = |A - A_N| / (|1-A| |1-A_N|).
    A rounding allowance proportional to |k| is added.
    """
    omitted = math.sqrt(bz.tail * bw.tail)
    nz = math.sqrt(bz.norm2 + bz.tail)
    nw = math.sqrt(bw.norm2 + bw.tail)
    an = abs(np.vdot(bw.coords, bz.coords))
    denom = (1.0 - min(nz * nw, 1.0 - 1e-300)) * (1.0 - an)
    k_mag = 1.0 / (1.0 - an)
    rounding = 64 * max(bz.N, 1) * EPS * k_mag * k_mag
    return omitted / denom + rounding


def reconstruction_error(z, w, N: int, table: CoeffTable) -> float:
    bz = embed(z, N, table)
    bw = embed(w, N, table)
    approx = 1.0 / (1.0 - np.vdot(bw.coords, bz.coords))
    exact = kernel_eval(KernelSpec.dirichlet(), bz.z, bw.z)
    return float(abs(exact - approx))


def embedding_isometry_gap(z, w, N: int, table: CoeffTable) -> float:
    """|rho(b_N(z), b_N(w)) - delta_D(z, w)| with rho the Drury-Arveson metric on C^N."""
    bz = embed(z, N, table)
    bw = embed(w, N, table)
    rho = delta_from_kernel(KernelSpec.drury_arveson(N), bz.coords, bw.coords)
    return abs(float(rho) - float(dirichlet_metric(bz.z, bw.z)))
