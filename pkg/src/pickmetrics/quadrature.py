"""Adaptive Simpson quadrature for vectorized integrands."""
from __future__ import annotations

import math
from typing import Callable

import numpy as np


class QuadratureError(RuntimeError):
    """Adaptive refinement did not reach the requested tolerance."""


def adaptive_simpson(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float,
    *,
    initial_panels: int = 8,
    max_depth: int = 40,
    max_evals: int = 2_000_000,
) -> tuple[float, float]:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    All panels that still need work are bisected together, so ``f`` is called
    once per refinement sweep with an array of abscissae. Each panel is
    accepted when |S(left) + S(right) - S(whole)| <= 15 * tol_panel, with the
    tolerance split in proportion to panel width. The accepted panel value
    includes the Richardson correction.

    Returns ``(value, error_estimate)``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    edges = np.linspace(a, b, 2 * initial_panels + 1)
    fv = np.asarray(f(edges), dtype=float)
    nevals = edges.size
    lo, mid, hi = edges[0:-1:2], edges[1::2], edges[2::2]
    flo, fmid, fhi = fv[0:-1:2], fv[1::2], fv[2::2]
    width = hi - lo
    whole = width * (flo + 4.0 * fmid + fhi) / 6.0
    ptol = np.full(lo.shape, tol / initial_panels)

    done_vals: list[np.ndarray] = []
    done_errs: list[np.ndarray] = []
    for _depth in range(max_depth):
        ql = 0.5 * (lo + mid)
        qr = 0.5 * (mid + hi)
        fq = np.asarray(f(np.concatenate([ql, qr])), dtype=float)
        nevals += fq.size
        fql, fqr = fq[: ql.size], fq[ql.size:]
        if not np.all(np.isfinite(fq)):
            raise QuadratureError("integrand returned a non-finite value")
        left = 0.5 * width * (flo + 4.0 * fql + fmid) / 6.0
        right = 0.5 * width * (fmid + 4.0 * fqr + fhi) / 6.0
        diff = left + right - whole
        ok = np.abs(diff) <= 15.0 * ptol
        done_vals.append(left[ok] + right[ok] + diff[ok] / 15.0)
        done_errs.append(np.abs(diff[ok]) / 15.0)
        if ok.all():
            break
        if nevals > max_evals:
            raise QuadratureError(f"evaluation budget {max_evals} exhausted")
        bad = ~ok
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])
        mid = np.concatenate([ql[bad], qr[bad]])
        flo_new = np.concatenate([flo[bad], fmid[bad]])
        fhi = np.concatenate([fmid[bad], fhi[bad]])
        fmid = np.concatenate([fql[bad], fqr[bad]])
        flo = flo_new
        whole = np.concatenate([left[bad], right[bad]])
        ptol = np.concatenate([ptol[bad], ptol[bad]]) * 0.5
        width = hi - lo
    else:
        raise QuadratureError(f"no convergence after {max_depth} bisection levels")

    vals = np.concatenate(done_vals)
    value = math.fsum(vals)
    err = float(np.sum(np.concatenate(done_errs)))
    return sign * value, err
