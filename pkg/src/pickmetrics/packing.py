"""Separated sets, packing bounds and the packing obstruction.

A bi-Lipschitz map f from (disc, delta_D) into (B_d, rho) with f(0) = 0 and
constants m <= L would have to squeeze the circle lattice D(r), which has
about pi / sqrt(1 - r) points that are eps-separated for delta_D, into the
ball of radius s(r) = 1 - (1 - r)^(1/(2d+1)). The image points are
(m eps)-separated for rho, and the Duren-Weir bound caps such sets at a
size growing only like (1 - r)^(-d/(2d+1)). ``obstruction_report`` tabulates
both counts and finds the first radius where they cross.

Radii close to 1 are carried through their complement u = 1 - r.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geodesy import estimate_M
from .metrics import MetricId

SQRT_3_4 = math.sqrt(0.75)

# full O(n^2) certification up to this many points; a subsample above
FULL_CHECK_LIMIT = 2000
_PAIR_CHUNK = 200_000


class SeparationError(ValueError):
    """A candidate point set is not eps-separated."""


class ThresholdError(ValueError):
    """Grid radii fall below the empirical thresholds of the argument."""


def _as_points(points, metric: MetricId) -> np.ndarray:
    pts = metric.coerce(np.asarray(points, dtype=complex))
    if metric.on_ball and pts.ndim == 1:
        pts = pts[None, :]
    return pts


def pairwise_min(points: np.ndarray, metric: MetricId) -> float:
    """Minimum distance over all unordered pairs (inf for fewer than 2 points)."""
    n = points.shape[0]
    if n < 2:
        return math.inf
    i, j = np.triu_indices(n, 1)
    best = math.inf
    for start in range(0, i.size, _PAIR_CHUNK):
        sl = slice(start, start + _PAIR_CHUNK)
        d = np.atleast_1d(metric.distance(points[i[sl]], points[j[sl]]))
        best = min(best, float(d.min()))
    return best


@dataclass(frozen=True)
class SeparatedSet:
    """A finite eps-separated point set with its separation certificate.

    ``certificate`` is "full" when every pair was checked and "subsample"
    when only a seeded random subset of FULL_CHECK_LIMIT points was.
    """

    points: np.ndarray = field(repr=False)
    eps: float
    metric: MetricId
    min_pairwise: float
    certificate: str = "full"

    @classmethod
    def certify(cls, points, eps: float, metric: MetricId, seed: int = 0) -> "SeparatedSet":
        pts = _as_points(points, metric)
        n = pts.shape[0]
        if n <= FULL_CHECK_LIMIT:
            sample, how = pts, "full"
        else:
            rng = np.random.default_rng(seed)
            idx = np.sort(rng.choice(n, FULL_CHECK_LIMIT, replace=False))
            sample, how = pts[idx], "subsample"
        dmin = pairwise_min(sample, metric)
        if dmin < eps:
            raise SeparationError(f"minimum pairwise distance {dmin:.6g} < eps={eps:g}")
        pts.setflags(write=False)
        return cls(pts, float(eps), metric, dmin, how)

    def __len__(self):
        return self.points.shape[0]

    def to_csv(self, fh=None) -> str | None:
        """One row per point, ``re,im`` per coordinate."""
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        pts = self.points if self.points.ndim == 2 else self.points[:, None]
        dim = pts.shape[1]
        if dim == 1:
            w.writerow(["re", "im"])
        else:
            w.writerow([f"{p}_{k}" for k in range(1, dim + 1) for p in ("re", "im")])
        for row in pts:
            w.writerow([f"{x:.17g}" for c in row for x in (c.real, c.imag)])
        return None if fh is not None else out.getvalue()


def circle_distance(t, r: float | None = None, *, u: float | None = None):
    """delta_D(r e^{it}, r), evaluated through u = 1 - r.

    Uses 1 - r^2 e^{it} = 2 sin^2(t/2) + v cos t - i (1 - v) sin t with
    v = 1 - r^2 = u (2 - u), which stays accurate as u -> 0.
    """
    if u is None:
        u = 1.0 - r
    if not 0.0 < u < 1.0:
        raise ValueError("need 0 < r < 1")
    t = np.asarray(t, dtype=float)
    v = u * (2.0 - u)
    w = 2.0 * np.sin(0.5 * t) ** 2 + v * np.cos(t) - 1j * (1.0 - v) * np.sin(t)
    with np.errstate(divide="ignore"):
        num = np.abs(np.log(w)) ** 2
    s = np.where(t == 0.0, 0.0, 1.0 - num / math.log(v) ** 2)
    out = np.sqrt(np.clip(s, 0.0, 1.0))
    return float(out) if out.ndim == 0 else out


def circle_gap(r: float | None = None, *, u: float | None = None) -> float:
    """delta_D(r e^{i theta}, r) at the lattice step theta = sqrt(1 - r)."""
    if u is None:
        u = 1.0 - r
    return circle_distance(math.sqrt(u), u=u)


def circle_asymptotic(r_list: Sequence[float] | None = None, *, u_list: Sequence[float] | None = None):
    """[(r, delta(r e^{i theta(r)}, r))]; the values tend to sqrt(3/4)."""
    if u_list is None:
        u_list = [1.0 - r for r in r_list]
    return [(1.0 - u, circle_gap(u=u)) for u in u_list]


def circle_monotonicity_check(r: float | None, n_samples: int = 1000, *, u: float | None = None,
                              tol: float = 1e-12) -> bool:
    """True when t -> delta(r e^{it}, r) is non-decreasing on [0, pi] at the samples."""
    t = np.linspace(0.0, math.pi, n_samples)
    vals = circle_distance(t, r, u=u)
    return bool(np.all(np.diff(vals) >= -tol))


def lattice_threshold(eps: float, k_max: int = 16, per_decade: int = 20) -> float | None:
    """Largest complement u on a log grid (10^-0.05 .. 10^-k_max) beyond which
    circle_gap >= eps at every finer grid point; None if the last point fails.
    """
    if not eps < SQRT_3_4:
        raise ValueError(f"eps must be below sqrt(3/4) = {SQRT_3_4:.7f}")
    us = 10.0 ** -np.linspace(0.0, k_max, k_max * per_decade + 1)[1:]
    ok = np.array([circle_gap(u=u) >= eps for u in us])
    if not ok[-1]:
        return None
    bad = np.nonzero(~ok)[0]
    first_good = 0 if bad.size == 0 else bad[-1] + 1
    return float(us[first_good])


def circle_lattice(r: float | None, eps: float, *, u: float | None = None, seed: int = 0) -> SeparatedSet:
    """The lattice {r e^{ik theta}: 0 <= k <= floor(pi/theta)}, theta = sqrt(1 - r).

    Separation is checked on all adjacent pairs and on all pairs of the
    (sub)sample; fails with SeparationError below the empirical threshold.
    """
    if not eps < SQRT_3_4:
        raise ValueError(f"eps must be below sqrt(3/4) = {SQRT_3_4:.7f}, got {eps}")
    if u is None:
        u = 1.0 - r
    r = 1.0 - u
    if not 0.0 < u < 1.0:
        raise ValueError("need 0 < r < 1")
    theta = math.sqrt(u)
    count = math.floor(math.pi / theta)
    pts = r * np.exp(1j * theta * np.arange(count + 1))
    metric = MetricId.dirichlet()
    adjacent = np.atleast_1d(metric.distance(pts[:-1], pts[1:])) if count else np.array([math.inf])
    if adjacent.min() < eps:
        raise SeparationError(
            f"adjacent lattice points at distance {adjacent.min():.6g} < eps={eps:g} (r={r!r})"
        )
    return SeparatedSet.certify(pts, eps, metric, seed=seed)


def greedy_separated(points, metric: MetricId, eps: float) -> SeparatedSet:
    """First-fit eps-separated subset in input order.

    The result is maximal: every rejected point lies within eps of a kept one.
    Input order is part of the contract.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    pts = _as_points(points, metric)
    keep: list[int] = [0] if pts.shape[0] else []
    for k in range(1, pts.shape[0]):
        acc = pts[keep]
        d = np.atleast_1d(metric.distance(np.broadcast_to(pts[k], acc.shape), acc))
        if d.min() >= eps:
            keep.append(k)
    chosen = pts[keep]
    if chosen.shape[0] > FULL_CHECK_LIMIT:
        return SeparatedSet.certify(chosen, eps, metric)
    dmin = pairwise_min(chosen, metric)
    if dmin < eps:
        raise SeparationError("greedy selection produced a non-separated set")
    chosen.setflags(write=False)
    return SeparatedSet(chosen, float(eps), metric, dmin)


def duren_weir_bound(d: int, r: float, eps: float) -> float:
    """Upper bound (2/eps + 1)^{2d} / (1 - r^2)^d on eps-separated subsets of
    the Euclidean ball of radius r in B_d, for the pseudohyperbolic metric."""
    if d < 1 or not 0.0 <= r < 1.0 or not eps > 0:
        raise ValueError("need d >= 1, 0 <= r < 1, eps > 0")
    return (2.0 / eps + 1.0) ** (2 * d) / (1.0 - r * r) ** d


def slow_growth_envelope(C: float, z_abs: float) -> float:
    """1 - exp(-C sqrt(log(1/(1 - |z|)))), the cap on ||f(z)|| for a
    Lipschitz f with f(0) = 0."""
    if not C > 0 or not 0.0 <= z_abs < 1.0:
        raise ValueError("need C > 0 and 0 <= |z| < 1")
    return -math.expm1(-C * math.sqrt(-math.log1p(-z_abs)))


def envelope_threshold(alpha: float, C: float) -> float:
    """r0 = 1 - exp(-(C/alpha)^2): for |z| >= r0 the envelope is <= 1 - (1-|z|)^alpha."""
    return -math.expm1(-((C / alpha) ** 2))


def envelope_threshold_complement(alpha: float, C: float) -> float:
    """1 - r0, which underflows to 0.0 once (C/alpha)^2 exceeds ~745."""
    return math.exp(-((C / alpha) ** 2))


def distortion_estimate(samples, src: MetricId, dst: MetricId) -> tuple[float, float]:
    """Largest and smallest ratio d_dst(f(x), f(y)) / d_src(x, y) over sample pairs.

    These are sample-level estimates of the Lipschitz constants, not bounds.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    xs = _as_points([s[0] for s in samples], src)
    ys = _as_points(np.stack([np.asarray(s[1], dtype=complex) for s in samples]), dst)
    i, j = np.triu_indices(len(samples), 1)
    dx = np.atleast_1d(src.distance(xs[i], xs[j]))
    if np.any(dx <= 0.0):
        raise ValueError("duplicate source points")
    dy = np.atleast_1d(dst.distance(ys[i], ys[j]))
    ratio = dy / dx
    return float(ratio.max()), float(ratio.min())


@dataclass
class ObstructionRow:
    u: float
    lower: float
    upper: float

    @property
    def r(self) -> float:
        return 1.0 - self.u

    @property
    def crossed(self) -> bool:
        return self.lower > self.upper


@dataclass
class ObstructionReport:
    d: int
    L: float
    m: float
    eps: float
    alpha: float
    rows: list[ObstructionRow]
    M: float
    u_envelope: float
    u_lattice: float | None
    u_crossing: float

    @property
    def star_row(self) -> ObstructionRow | None:
        return next((row for row in self.rows if row.crossed), None)

    @property
    def r_star(self) -> float | None:
        row = self.star_row
        return None if row is None else row.r

    @property
    def u_star(self) -> float | None:
        row = self.star_row
        return None if row is None else row.u

    def tail_slopes(self) -> tuple[float, float]:
        """d log(count) / d log(u) for the lower and upper columns over the last grid step."""
        a, b = self.rows[-2], self.rows[-1]
        du = math.log(b.u) - math.log(a.u)
        return (
            (math.log(b.lower) - math.log(a.lower)) / du,
            (math.log(b.upper) - math.log(a.upper)) / du,
        )

    def to_csv(self, fh=None) -> str | None:
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["u", "r_display", "lower", "upper", "crossed"])
        for row in self.rows:
            w.writerow([
                f"{row.u:.16e}",
                f"{row.r:.17g}",
                f"{row.lower:.17g}",
                f"{row.upper:.17g}",
                "true" if row.crossed else "false",
            ])
        return None if fh is not None else out.getvalue()


def log_grid(k_max: int, k_min: int = 1) -> list[float]:
    """u = 10^-k_min, ..., 10^-k_max."""
    return [10.0 ** -k for k in range(k_min, k_max + 1)]


def _packing_constant(d: int, m: float, eps: float) -> float:
    return (2.0 / (m * eps) + 1.0) ** (2 * d)


def crossing_complement(d: int, m: float = 1.0, eps: float = 0.8) -> float:
    """The complement u at which 1/sqrt(u) equals the packing bound, solved in log u.

    May be far below the double-precision range of r itself (e.g. ~1e-123 for
    d = 6, eps = 0.8), and even below that of u (returns 0.0 on underflow).
    """
    alpha = 1.0 / (2 * d + 1)
    logK = math.log(_packing_constant(d, m, eps))

    def excess(lu):
        # log(lower) - log(upper) as a function of lu = log u
        ua = math.exp(alpha * lu)
        return -0.5 * lu - logK + d * (alpha * lu + math.log(2.0 - ua))

    lo, hi = -1e6, 0.0
    if excess(hi) > 0:
        return 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return math.exp(lo)


def obstruction_report(
    d: int,
    L: float = 1.0,
    m: float = 1.0,
    eps: float = 0.8,
    u_grid: Sequence[float] | None = None,
    *,
    r_grid: Sequence[float] | None = None,
    M: float | None = None,
    strict: bool = False,
) -> ObstructionReport:
    """Tabulate the lattice lower count against the packing upper bound.

    lower(r) = 1/sqrt(1 - r)
    upper(r) = (2/(m eps) + 1)^{2d} / (1 - s(r)^2)^d,  s(r) = 1 - (1-r)^{1/(2d+1)}

    The grid is given by complements ``u_grid`` (preferred) or radii
    ``r_grid``. The empirical thresholds of the argument are reported:
    ``u_envelope`` from the slow-growth envelope with C = 2 L M and
    ``u_lattice`` from the circle-lattice sweep. With ``strict=True`` grid
    points above either threshold raise ThresholdError.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if not (L >= m > 0):
        raise ValueError("need L >= m > 0")
    if not 0 < eps < SQRT_3_4:
        raise ValueError(f"eps must lie in (0, sqrt(3/4)), got {eps}")
    if u_grid is None:
        if r_grid is None:
            u_grid = log_grid(15)
        else:
            u_grid = [1.0 - r for r in r_grid]
    us = sorted((float(u) for u in u_grid), reverse=True)
    if not us or any(not 0.0 < u < 1.0 for u in us):
        raise ValueError("grid radii must lie in (0, 1)")

    alpha = 1.0 / (2 * d + 1)
    if M is None:
        M = estimate_M([1.0 - 10.0**-k for k in range(1, 13)])
    u_env = envelope_threshold_complement(alpha, 2.0 * L * M)
    u_lat = lattice_threshold(eps)
    if strict:
        limit = min(u_env, u_lat if u_lat is not None else 0.0)
        if us[0] > limit:
            raise ThresholdError(
                f"grid starts at u={us[0]:.3g}, above the empirical threshold u={limit:.3g}"
            )

    K = _packing_constant(d, m, eps)
    rows = []
    for u in us:
        ua = u**alpha
        one_minus_s2 = ua * (2.0 - ua)
        rows.append(ObstructionRow(u, u**-0.5, K / one_minus_s2**d))
    return ObstructionReport(
        d=d, L=L, m=m, eps=eps, alpha=alpha, rows=rows, M=M,
        u_envelope=u_env, u_lattice=u_lat, u_crossing=crossing_complement(d, m, eps),
    )
