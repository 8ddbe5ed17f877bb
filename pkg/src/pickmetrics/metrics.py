"""Kernel-induced metrics on the disc and the ball.

delta_K(z, w) = sqrt(1 - |K(z,w)|^2 / (K(z,z) K(w,w)))

For the Drury-Arveson kernel this is the pseudohyperbolic distance
rho(z, w) = ||phi_w(z)||; the Poincare-Bergman distance is atanh(rho).
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field

import numpy as np

from .kernels import (
    DomainError,
    KernelKind,
    KernelSpec,
    as_ball,
    as_disc,
    clog1p,
    inner,
    kernel_diag,
    kernel_eval,
    log_kernel_ratio,
)

CLAMP = 1e-14

# below this modulus the closed Dirichlet formula divides tiny logs; use the
# normalized kernel form instead
_DIRICHLET_SMALL = 1e-8

# near the diagonal (delta^2 below _NEAR) and away from the boundary (|z|, |w|
# at most _SERIES_RADIUS) the Dirichlet metric is summed from a positive series
_NEAR = 1e-2
_SERIES_RADIUS = 0.99


class KernelConsistencyError(ArithmeticError):
    """1 - |k|^2/(k k) came out clearly negative: the kernel values disagree."""


def _unwrap(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _sqrt_clamped(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < -CLAMP):
        raise KernelConsistencyError(f"negative squared distance {s.min():.3e}")
    return np.sqrt(np.clip(s, 0.0, 1.0))


def _same_point(z, w, on_ball):
    eq = np.asarray(z) == np.asarray(w)
    return np.all(eq, axis=-1) if on_ball else eq


def delta_from_kernel(spec: KernelSpec, z, w):
    """Kernel metric delta_K(z, w) in [0, 1]."""
    kzw = kernel_eval(spec, z, w)
    kzz = kernel_diag(spec, z)
    kww = kernel_diag(spec, w)
    s = 1.0 - np.abs(kzw) ** 2 / (kzz * kww)
    s = np.where(_same_point(z, w, spec.on_ball), 0.0, s)
    return _unwrap(_sqrt_clamped(s))


def _phi(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    # ball automorphism phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)
    na = np.linalg.norm(a, axis=-1)
    za = inner(z, a)
    s_a = np.sqrt((1.0 - na) * (1.0 + na))
    # P_a z = <z, e> e with e = a/|a|; dividing by |a|^2 would underflow
    e = a / np.where(na > 0.0, na, 1.0)[..., None]
    pz = inner(z, e)[..., None] * e
    qz = z - pz
    return (a - pz - s_a[..., None] * qz) / (1.0 - za)[..., None]


@dataclass(frozen=True)
class MoebiusMap:
    """The involutive automorphism of the ball exchanging ``center`` and 0."""

    center: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "center", as_ball(self.center))

    @property
    def dim(self) -> int:
        return self.center.shape[-1]

    @property
    def s(self) -> float:
        return float(np.sqrt(1.0 - np.real(inner(self.center, self.center))))

    def __call__(self, z) -> np.ndarray:
        return moebius_apply(self, z)


def moebius_apply(m: MoebiusMap, z) -> np.ndarray:
    z = as_ball(z, m.dim)
    return _phi(m.center, z)


def pseudohyperbolic(z, w):
    """rho(z, w) = ||phi_w(z)|| on the ball (last axis = coordinates)."""
    z = as_ball(z)
    w = as_ball(w, z.shape[-1])
    return _unwrap(np.linalg.norm(_phi(w, z), axis=-1))


def pseudohyperbolic_disc(z, w):
    """|z - w| / |1 - z̄ w| for disc points."""
    z = as_disc(z)
    w = as_disc(w)
    return _unwrap(np.abs(z - w) / np.abs(1.0 - np.conj(z) * w))


def bergman(z, w):
    """Poincare-Bergman distance atanh(rho(z, w))."""
    rho = np.asarray(pseudohyperbolic(z, w))
    if np.any(rho >= 1.0):
        raise OverflowError("points too close to the boundary to resolve: rho rounds to 1")
    return _unwrap(np.arctanh(rho))


@functools.lru_cache(maxsize=1)
def _log_kernel_coeffs(n_max: int) -> np.ndarray:
    """Taylor coefficients h_0..h_{n_max} of log(log(1/(1-x))/x); all h_n > 0 for n >= 1."""
    k = 1.0 / np.arange(1, n_max + 2, dtype=float)
    h = np.zeros(n_max + 1)
    # n h_n = n k_n - sum_{j<n} j h_j k_{n-j}, from h' k = k'
    for n in range(1, n_max + 1):
        j = np.arange(1, n)
        h[n] = (n * k[n] - np.dot(j * h[1:n], k[n - 1:0:-1])) / n
    return h


def _series_terms(q: float) -> int:
    """Smallest N with 2 sum_{n>N} n^2 q^{n-1} below 1e-17, a bound on the relative tail."""
    N = 1
    while True:
        lead = (N + 1) ** 2 * q**N
        ratio = q * ((N + 2) / (N + 1)) ** 2
        if ratio < 1.0 and 2.0 * lead / (1.0 - ratio) < 1e-17:
            return N
        N += 1


def _dirichlet_near_diagonal(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """delta_D^2 from -log(1 - delta^2) = sum_n h_n |z^n - w^n|^2.

    Every term is nonnegative and z^n - w^n comes from the recurrence
    d_{n+1} = z d_n + (z - w) w^n, so nothing cancels and the result is
    accurate to a few ulps even when z and w nearly coincide.
    """
    q = float(max(np.max(np.abs(z)), np.max(np.abs(w)))) ** 2
    N = _series_terms(q)
    h = _log_kernel_coeffs(N)
    step = z - w
    d = step.copy()
    wn = w.copy()
    acc = h[1] * np.abs(d) ** 2
    for n in range(2, N + 1):
        wn_prev = wn
        wn = wn * w
        d = z * d + step * wn_prev
        acc = acc + h[n] * (d.real**2 + d.imag**2)
    return -np.expm1(-acc)


def dirichlet_metric(z, w):
    """Dirichlet-space metric from the closed logarithmic formula.

    If z or w is (numerically) 0, uses the continuous extension through
    k(., 0) = 1, i.e. delta(0, w)^2 = 1 - |w|^2 / log(1/(1-|w|^2)).
    """
    z = np.asarray(as_disc(z), dtype=complex)
    w = np.asarray(as_disc(w), dtype=complex)
    z, w = np.broadcast_arrays(z, w)
    az2 = np.abs(z) ** 2
    aw2 = np.abs(w) ** 2
    small = (np.abs(z) < _DIRICHLET_SMALL) | (np.abs(w) < _DIRICHLET_SMALL)

    zs = np.where(small, 0.5, z)
    ws = np.where(small, 0.5, w)
    num = np.abs(clog1p(-np.conj(zs) * ws)) ** 2
    den = np.log1p(-np.abs(zs) ** 2) * np.log1p(-np.abs(ws) ** 2)
    closed = 1.0 - num / den

    kzw = log_kernel_ratio(np.conj(w) * z)
    ext = 1.0 - np.abs(kzw) ** 2 / (log_kernel_ratio(az2) * log_kernel_ratio(aw2))

    s = np.where(small, ext, closed)
    near = (s < _NEAR) & (np.abs(z) <= _SERIES_RADIUS) & (np.abs(w) <= _SERIES_RADIUS)
    if np.any(near):
        s = np.array(s, dtype=float)
        s[near] = _dirichlet_near_diagonal(z[near], w[near])
    s = np.where(z == w, 0.0, s)
    return _unwrap(_sqrt_clamped(s))


def pick_two_point(spec: KernelSpec, z, w):
    """Largest |lambda| for which phi(z) = lambda, phi(w) = 0 has a contractive
    multiplier solution.

    The Pick matrix [[k_zz (1 - |l|^2), k_zw], [k_wz, k_ww]] is PSD iff its
    diagonal is nonnegative and its determinant is; the determinant is affine
    in |l|^2, so the extremal |l|^2 is det(M(0)) / (k_zz k_ww).
    """
    kzz = kernel_diag(spec, z)
    kww = kernel_diag(spec, w)
    kzw = kernel_eval(spec, z, w)
    kwz = kernel_eval(spec, w, z)
    det0 = kzz * kww - np.real(kzw * kwz)
    lam2 = det0 / (kzz * kww)
    lam2 = np.where(_same_point(z, w, spec.on_ball), 0.0, lam2)
    return _unwrap(_sqrt_clamped(lam2))


def weighted_metric_bounds(a: float, z, w) -> tuple:
    """(sqrt(a) rho, delta_{D_a}, rho) for the weighted Dirichlet kernel (1 - z w̄)^(-a).

    The middle value is the closed form sqrt(1 - (1 - rho^2)^a); it is
    cross-checked against the generic kernel metric.
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"a must lie in (0, 1), got {a}")
    rho = np.asarray(pseudohyperbolic_disc(z, w))
    value = np.sqrt(np.clip(-np.expm1(a * np.log1p(-rho * rho)), 0.0, 1.0))
    via_kernel = np.asarray(delta_from_kernel(KernelSpec.weighted_dirichlet(a), z, w))
    # the kernel route forms 1 - |k|^2/(k k), so its error grows like eps / delta
    tol = 1e-10 * value + 16 * np.finfo(float).eps / np.maximum(value, 1e-300)
    if np.any(np.abs(value - via_kernel) > tol):
        raise KernelConsistencyError("closed form and kernel metric disagree")
    return _unwrap(np.sqrt(a) * rho), _unwrap(value), _unwrap(rho)


class MetricKind(enum.Enum):
    KERNEL_DELTA = "kernel"
    PSEUDOHYPERBOLIC = "pseudohyperbolic"
    BERGMAN = "bergman"


@dataclass(frozen=True)
class MetricId:
    kind: MetricKind
    kernel: KernelSpec | None = None
    d: int | None = None

    def __post_init__(self):
        if self.kind is MetricKind.KERNEL_DELTA:
            if self.kernel is None:
                raise ValueError("kernel metric needs a KernelSpec")
            if self.kernel.on_ball:
                object.__setattr__(self, "d", self.kernel.d)
        elif self.d is None or self.d < 1:
            raise ValueError("ball metrics need d >= 1")

    @classmethod
    def kernel_delta(cls, spec: KernelSpec) -> "MetricId":
        return cls(MetricKind.KERNEL_DELTA, kernel=spec)

    @classmethod
    def dirichlet(cls) -> "MetricId":
        return cls.kernel_delta(KernelSpec.dirichlet())

    @classmethod
    def pseudohyperbolic(cls, d: int = 1) -> "MetricId":
        return cls(MetricKind.PSEUDOHYPERBOLIC, d=d)

    @classmethod
    def bergman(cls, d: int = 1) -> "MetricId":
        return cls(MetricKind.BERGMAN, d=d)

    @property
    def on_ball(self) -> bool:
        return self.d is not None

    def coerce(self, z):
        """Shape point(s) for this metric: ball metrics get a trailing coordinate axis."""
        if not self.on_ball:
            return np.asarray(z, dtype=complex)
        z = np.asarray(z, dtype=complex)
        if self.d == 1 and (z.ndim == 0 or z.shape[-1] != 1):
            z = z[..., None]
        if z.shape[-1] != self.d:
            raise DomainError(f"expected dimension {self.d}, got {z.shape[-1]}")
        return z

    def distance(self, z, w):
        z = self.coerce(z)
        w = self.coerce(w)
        if self.kind is MetricKind.PSEUDOHYPERBOLIC:
            return pseudohyperbolic(z, w)
        if self.kind is MetricKind.BERGMAN:
            return bergman(z, w)
        if self.kernel.kind is KernelKind.DIRICHLET:
            return dirichlet_metric(z, w)
        return delta_from_kernel(self.kernel, z, w)

    def __str__(self):
        if self.kind is MetricKind.KERNEL_DELTA:
            return f"delta[{self.kernel}]"
        return f"{self.kind.value}(d={self.d})"
