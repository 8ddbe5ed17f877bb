"""Points, reproducing kernels and truncated power series.

Four kernels are supported, all complete Pick kernels:

* Hardy            k(z, w) = 1 / (1 - z w̄)
* Dirichlet        k(z, w) = log(1 / (1 - z w̄)) / (z w̄)
* WeightedDirichlet(a)   k(z, w) = (1 - z w̄)^(-a),  0 < a < 1
* DruryArveson(d)  K(z, w) = 1 / (1 - <z, w>)  on the unit ball of C^d

The three disc kernels accept complex scalars or numpy arrays (broadcast
elementwise). Ball points are arrays whose last axis holds the coordinates.

Note on the Dirichlet kernel: its Taylor coefficients are 1/(n+1), i.e.
k(z, w) = sum_n (z w̄)^n / (n + 1). Some texts print (n+1)^n there, which
does not match log(1/(1-x))/x.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# |x| below this uses the Taylor polynomial of log(1/(1-x))/x
_SERIES_CUTOFF = 1e-4


class DomainError(ValueError):
    """A point lies outside the open disc / ball, or dimensions disagree."""


class KernelKind(enum.Enum):
    HARDY = "hardy"
    DIRICHLET = "dirichlet"
    WEIGHTED_DIRICHLET = "weighted-dirichlet"
    DRURY_ARVESON = "drury-arveson"


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind
    a: float | None = None
    d: int | None = None

    def __post_init__(self):
        if self.kind is KernelKind.WEIGHTED_DIRICHLET:
            if self.a is None or not 0.0 < self.a < 1.0:
                raise ValueError(f"weighted Dirichlet needs 0 < a < 1, got a={self.a}")
        elif self.a is not None:
            raise ValueError("parameter a only applies to the weighted Dirichlet kernel")
        if self.kind is KernelKind.DRURY_ARVESON:
            if self.d is None or int(self.d) != self.d or self.d < 1:
                raise ValueError(f"Drury-Arveson needs an integer d >= 1, got d={self.d}")
        elif self.d is not None:
            raise ValueError("parameter d only applies to the Drury-Arveson kernel")

    @classmethod
    def hardy(cls) -> "KernelSpec":
        return cls(KernelKind.HARDY)

    @classmethod
    def dirichlet(cls) -> "KernelSpec":
        return cls(KernelKind.DIRICHLET)

    @classmethod
    def weighted_dirichlet(cls, a: float) -> "KernelSpec":
        return cls(KernelKind.WEIGHTED_DIRICHLET, a=float(a))

    @classmethod
    def drury_arveson(cls, d: int) -> "KernelSpec":
        return cls(KernelKind.DRURY_ARVESON, d=int(d))

    @property
    def on_ball(self) -> bool:
        return self.kind is KernelKind.DRURY_ARVESON

    def __str__(self):
        if self.kind is KernelKind.WEIGHTED_DIRICHLET:
            return f"{self.kind.value}(a={self.a:g})"
        if self.kind is KernelKind.DRURY_ARVESON:
            return f"{self.kind.value}(d={self.d})"
        return self.kind.value


@dataclass(frozen=True)
class DiscPoint:
    value: complex

    def __post_init__(self):
        if not abs(self.value) < 1.0:
            raise DomainError(f"|z| must be < 1, got {self.value!r}")

    def __complex__(self):
        return complex(self.value)


@dataclass(frozen=True)
class BallPoint:
    coords: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(complex(c) for c in self.coords))
        if not self.coords:
            raise DomainError("a ball point needs at least one coordinate")
        if not np.linalg.norm(np.asarray(self.coords)) < 1.0:
            raise DomainError(f"||z|| must be < 1, got {self.coords!r}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype or complex)


def as_disc(z) -> np.ndarray | complex:
    """Validate disc point(s); returns a complex scalar or complex array."""
    if isinstance(z, DiscPoint):
        return complex(z.value)
    arr = np.asarray(z, dtype=complex)
    if np.any(~(np.abs(arr) < 1.0)):
        raise DomainError("point outside the open unit disc")
    return complex(arr) if arr.ndim == 0 else arr


def as_ball(z, d: int | None = None) -> np.ndarray:
    """Validate ball point(s); the last axis holds the coordinates."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if d is not None and arr.shape[-1] != d:
        raise DomainError(f"expected dimension {d}, got {arr.shape[-1]}")
    if np.any(~(np.linalg.norm(arr, axis=-1) < 1.0)):
        raise DomainError("point outside the open unit ball")
    return arr


def inner(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """<z, w> = sum_j z_j conj(w_j) along the last axis."""
    return np.sum(z * np.conj(w), axis=-1)


def clog1p(x):
    """Principal log(1 + x) for complex x, accurate for small |x|."""
    x = np.asarray(x, dtype=complex)
    re, im = x.real, x.imag
    mod = 0.5 * np.log1p(2.0 * re + re * re + im * im)
    arg = np.arctan2(im, 1.0 + re)
    out = mod + 1j * arg
    return complex(out) if out.ndim == 0 else out


def _dirichlet_series(x, terms: int = 6):
    # sum_{n<terms} x^n / (n+1), Horner form
    acc = np.zeros_like(x) + 1.0 / terms
    for n in range(terms - 1, 0, -1):
        acc = acc * x + 1.0 / n
    return acc


def log_kernel_ratio(x):
    """log(1/(1-x))/x for complex or real x in the unit disc, with value 1 at x = 0."""
    x = np.asarray(x)
    small = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(small, 0.5, x)
    if np.iscomplexobj(x):
        far = -clog1p(-safe) / safe
    else:
        far = -np.log1p(-safe) / safe
    out = np.where(small, _dirichlet_series(x), far)
    return out[()] if out.ndim == 0 else out


def kernel_eval(spec: KernelSpec, z, w):
    """Evaluate k(z, w).

    Disc kernels broadcast over array inputs; the Drury-Arveson kernel
    contracts over the last axis.
    """
    if spec.on_ball:
        z = as_ball(z, spec.d)
        w = as_ball(w, spec.d)
        out = 1.0 / (1.0 - inner(z, w))
        return complex(out) if np.ndim(out) == 0 else out

    z = as_disc(z)
    w = as_disc(w)
    x = z * np.conj(w)
    if spec.kind is KernelKind.HARDY:
        out = 1.0 / (1.0 - x)
    elif spec.kind is KernelKind.DIRICHLET:
        out = log_kernel_ratio(np.asarray(x, dtype=complex))
    else:
        out = np.exp(-spec.a * clog1p(-np.asarray(x, dtype=complex)))
    return complex(out) if np.ndim(out) == 0 else out


def kernel_diag(spec: KernelSpec, z):
    """k(z, z) as a positive real, evaluated without cancellation near |z| = 1."""
    if spec.on_ball:
        z = as_ball(z, spec.d)
        m = np.linalg.norm(z, axis=-1)
    else:
        m = np.abs(as_disc(z))
    m = np.asarray(m, dtype=float)
    x = m * m
    # 1 - |z| is exact for |z| >= 1/2, so this keeps full relative accuracy
    omx = (1.0 - m) * (1.0 + m)
    if spec.kind in (KernelKind.HARDY, KernelKind.DRURY_ARVESON):
        out = 1.0 / omx
    elif spec.kind is KernelKind.DIRICHLET:
        out = np.where(x < 0.5, log_kernel_ratio(np.minimum(x, 0.5)), -np.log(omx) / np.maximum(x, 0.5))
    else:
        out = np.exp(-spec.a * np.log(omx))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PowerSeries:
    """Real power series truncated to its first ``order`` coefficients."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("a truncated series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coeffs, dtype=dtype or float)

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        prod = np.convolve(np.asarray(self)[:n], np.asarray(other)[:n])[:n]
        return PowerSeries(prod)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self))


def reciprocal_coeffs(p: Sequence[float] | np.ndarray) -> np.ndarray:
    """Coefficients of 1/p truncated to len(p) terms (array in, array out)."""
    p = np.asarray(p, dtype=float)
    if p[0] == 0.0:
        raise ZeroDivisionError("series has zero constant term")
    n = len(p)
    q = np.zeros(n)
    q[0] = 1.0 / p[0]
    for k in range(1, n):
        # p[1:k+1] against q[k-1::-1]
        q[k] = -np.dot(p[1:k + 1], q[k - 1::-1]) / p[0]
    return q


def series_reciprocal(p: PowerSeries) -> PowerSeries:
    """Formal reciprocal: q with p * q = 1 + O(x^N)."""
    return PowerSeries(reciprocal_coeffs(np.asarray(p)))
