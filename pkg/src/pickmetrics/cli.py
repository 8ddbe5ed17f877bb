"""Command-line batch runner.

    pickmetrics coeffs --n-max 100 [--method recursion|integral|both]
    pickmetrics metric --kernel dirichlet --z 0.5,0 --w -0.5,0
    pickmetrics length --r 0.9 [--tol 1e-10]
    pickmetrics separate --r 0.999999 --eps 0.8
    pickmetrics obstruct --d 1 --L 1 --m 1 --eps 0.8 --k-max 15
    pickmetrics embed-check --grid 5 --trunc 200

Every command writes one CSV (``--out``, default ``<command>.csv``) and a JSON
summary next to it (``--summary``). Flags may also come from a JSON file
given with ``--config``; flags win. Exit status: 0 all checks passed,
1 some check failed, 2 bad input, 3 numerical non-convergence.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import geodesy, gregory, packing
from .kernels import DomainError, KernelSpec
from .metrics import (
    MetricId,
    bergman,
    delta_from_kernel,
    dirichlet_metric,
    pick_two_point,
    pseudohyperbolic,
    pseudohyperbolic_disc,
    weighted_metric_bounds,
)
from .quadrature import QuadratureError

EXIT_OK, EXIT_CHECKS, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

GLOBAL_KEYS = {"out": str, "summary": str, "seed": int, "config": str}


class ConfigError(ValueError):
    def __init__(self, key: str | None, message: str):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


def _complex_list(text: str) -> list[complex]:
    """'re,im;re,im' -> [complex, complex]."""
    out = []
    for part in str(text).split(";"):
        bits = [b.strip() for b in part.split(",")]
        if len(bits) == 1:
            out.append(complex(float(bits[0]), 0.0))
        elif len(bits) == 2:
            out.append(complex(float(bits[0]), float(bits[1])))
        else:
            raise ValueError(f"cannot read a complex number from {part!r}")
    return out


def _choice(*options: str) -> Callable[[Any], str]:
    def conv(v):
        v = str(v)
        if v not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return v
    return conv


def _positive_int(v) -> int:
    if isinstance(v, float) and not v.is_integer():
        raise ValueError("expected an integer")
    i = int(v)
    if i < 1:
        raise ValueError("expected a positive integer")
    return i


# name -> (converter, default); default None means required
SCHEMAS: dict[str, dict[str, tuple[Callable[[Any], Any], Any]]] = {
    "coeffs": {
        "n_max": (_positive_int, None),
        "method": (_choice("recursion", "integral", "both"), "recursion"),
        "tol": (float, 1e-13),
    },
    "metric": {
        "kernel": (_choice("hardy", "dirichlet", "weighted-dirichlet", "drury-arveson"), None),
        "z": (_complex_list, None),
        "w": (_complex_list, None),
        "a": (float, float("nan")),
    },
    "length": {
        "r": (float, None),
        "tol": (float, 1e-10),
    },
    "separate": {
        "r": (float, None),
        "eps": (float, 0.8),
    },
    "obstruct": {
        "d": (_positive_int, None),
        "L": (float, 1.0),
        "m": (float, 1.0),
        "eps": (float, 0.8),
        "k_max": (_positive_int, 15),
    },
    "embed-check": {
        "grid": (_positive_int, 5),
        "trunc": (_positive_int, 200),
        "radius": (float, 0.7),
    },
}


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any]
    output_path: str
    seed: int = 0
    summary_path: str | None = None

    def __post_init__(self):
        if self.command not in SCHEMAS:
            raise ConfigError(None, f"unknown command {self.command!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        if self.summary_path is None:
            self.summary_path = str(Path(self.output_path).with_suffix(".summary.json"))


@dataclass
class RunSummary:
    command: str
    params: dict[str, Any]
    wall_time: float = 0.0
    checks: dict[str, bool] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK

    @property
    def checks_passed(self) -> int:
        return sum(self.checks.values())

    @property
    def checks_failed(self) -> int:
        return len(self.checks) - self.checks_passed

    def check(self, name: str, ok) -> None:
        self.checks[name] = bool(ok)

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "wall_time": self.wall_time,
            "checks_passed": self.checks_passed,
            "checks_failed": self.checks_failed,
            "checks": self.checks,
            "results": {k: _jsonable(v) for k, v in self.results.items()},
            "artifacts": self.artifacts,
            "exit_code": self.exit_code,
        }
        return json.dumps(doc, indent=2) + "\n"


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, np.generic):
        return v.item()
    return v


def _key(flag: str) -> str:
    return flag.lstrip("-").replace("-", "_")


def parse_config(args: list[str], file: str | os.PathLike | None = None) -> RunConfig:
    """Build a RunConfig from ``[command, --key, value, ...]`` and an optional JSON file."""
    args = list(args)
    if not args:
        raise ConfigError(None, "no command given")
    command, rest = args[0], args[1:]
    if command not in SCHEMAS:
        raise ConfigError(None, f"unknown command {command!r} (expected one of {', '.join(SCHEMAS)})")

    flags: dict[str, str] = {}
    it = iter(range(len(rest)))
    for i in it:
        tok = rest[i]
        if not tok.startswith("--") or len(tok) <= 2:
            raise ConfigError(None, f"unexpected argument {tok!r}")
        key = _key(tok)
        if i + 1 >= len(rest):
            raise ConfigError(key, "flag is missing its value")
        if key in flags:
            raise ConfigError(key, "given more than once")
        flags[key] = rest[i + 1]
        next(it)

    if file is None and "config" in flags:
        file = flags.pop("config")
    else:
        flags.pop("config", None)
    merged: dict[str, Any] = {}
    if file is not None:
        try:
            doc = json.loads(Path(file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {file}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config", "JSON config must be an object")
        if doc.get("command", command) != command:
            raise ConfigError("command", f"config file is for {doc['command']!r}, not {command!r}")
        merged.update({_key(k): v for k, v in doc.items() if k != "command"})
    merged.update(flags)

    schema = SCHEMAS[command]
    # flag names are case-sensitive except that --l / --L both mean L
    for k in list(merged):
        if k not in schema and k not in GLOBAL_KEYS and k.upper() in schema:
            merged[k.upper()] = merged.pop(k)
    params: dict[str, Any] = {}
    for key, raw in merged.items():
        if key in GLOBAL_KEYS:
            continue
        if key not in schema:
            raise ConfigError(key, f"unknown parameter for {command!r}")
        conv = schema[key][0]
        try:
            params[key] = conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, f"invalid value {raw!r}: {exc}") from exc
    for key, (conv, default) in schema.items():
        if key not in params:
            if default is None:
                raise ConfigError(key, "required parameter missing")
            params[key] = default

    try:
        seed = int(merged.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ConfigError("seed", f"invalid value {merged.get('seed')!r}") from exc
    out = str(merged.get("out", f"{command}.csv"))
    return RunConfig(command, params, out, seed, merged.get("summary"))


def _threads() -> int:
    raw = os.environ.get("PICKMETRICS_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _ordered_map(fn, items):
    items = list(items)
    workers = min(_threads(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _csv_writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# each runner writes its CSV to fh and records checks/results on summary

def _run_coeffs(p, fh, summary: RunSummary, seed: int):
    n_max, method = p["n_max"], p["method"]
    tables = []
    if method in ("recursion", "both"):
        tables.append(gregory.gregory_recursion(n_max))
    if method in ("integral", "both"):
        tables.append(gregory.gregory_integral_table(n_max, p["tol"]))
    rows = sorted((r for t in tables for r in t.rows()), key=lambda r: (r[0], r[2]))
    gregory.write_coeff_rows(fh, rows)
    for t in tables:
        name = t.method.value
        summary.check(f"{name}_nonnegative", np.all(t.values >= -1e-15))
        sums = t.partial_sums()
        summary.check(f"{name}_partial_sums_bounded", np.all(sums <= 1 + 1e-12))
        summary.results[f"{name}_partial_sum"] = float(sums[-1])
    if len(tables) == 2:
        diff = float(np.max(np.abs(tables[0].values - tables[1].values)))
        summary.results["max_method_difference"] = diff
        summary.check("methods_agree", diff <= 1e-11)


def _run_metric(p, fh, summary: RunSummary, seed: int):
    kind, z, w = p["kernel"], p["z"], p["w"]
    if len(z) != len(w):
        raise ConfigError("w", "z and w must have the same number of coordinates")
    if kind == "drury-arveson":
        spec = KernelSpec.drury_arveson(len(z))
        zz, ww = np.array(z), np.array(w)
    else:
        if len(z) != 1:
            raise ConfigError("z", f"{kind} kernel takes a single complex coordinate")
        zz, ww = z[0], w[0]
        if kind == "hardy":
            spec = KernelSpec.hardy()
        elif kind == "dirichlet":
            spec = KernelSpec.dirichlet()
        else:
            if math.isnan(p["a"]):
                raise ConfigError("a", "weighted-dirichlet needs --a")
            spec = KernelSpec.weighted_dirichlet(p["a"])

    values = {
        "delta_kernel": float(delta_from_kernel(spec, zz, ww)),
        "pick_two_point": float(pick_two_point(spec, zz, ww)),
    }
    if kind == "dirichlet":
        values["dirichlet_closed_form"] = float(dirichlet_metric(zz, ww))
    elif kind == "hardy":
        values["pseudohyperbolic"] = float(pseudohyperbolic_disc(zz, ww))
    elif kind == "drury-arveson":
        values["pseudohyperbolic"] = float(pseudohyperbolic(zz, ww))
    else:
        lower, val, upper = weighted_metric_bounds(spec.a, zz, ww)
        values.update(weighted_lower=float(lower), weighted_closed_form=float(val), weighted_upper=float(upper))
        summary.check("weighted_bounds", lower <= val + 1e-12 and val <= upper + 1e-12)
    if kind in ("hardy", "drury-arveson"):
        zb, wb = np.atleast_1d(zz), np.atleast_1d(ww)
        try:
            values["bergman"] = float(bergman(zb, wb))
        except OverflowError:
            values["bergman"] = math.inf

    w_ = _csv_writer(fh)
    w_.writerow(["kernel", "quantity", "value"])
    for name, v in values.items():
        w_.writerow([str(spec), name, _fmt(v)])

    ref = values["delta_kernel"]
    tol = 1e-10 if ref <= 1e-4 else 1e-12
    for name in ("pick_two_point", "dirichlet_closed_form", "pseudohyperbolic", "weighted_closed_form"):
        if name in values:
            summary.check(f"{name}_matches_kernel", abs(values[name] - ref) <= tol)
    summary.check("in_unit_interval", 0.0 <= ref <= 1.0)
    summary.results.update(values)


def _run_length(p, fh, summary: RunSummary, seed: int):
    r, tol = p["r"], p["tol"]
    if not 0.0 <= r < 1.0:
        raise ConfigError("r", "must satisfy 0 <= r < 1")
    values = {"radial_length": geodesy.radial_length(r, tol)}
    if r > 0:
        values["ratio_to_sqrt_log"] = values["radial_length"] / math.sqrt(-math.log1p(-r))
        values["riemannian_quadrature"] = geodesy.riemannian_length_dirichlet(geodesy.Curve.radial(r), tol)
        summary.check("quadrature_routes_agree", abs(values["riemannian_quadrature"] - values["radial_length"]) <= 10 * tol)
    if 0 < r <= 0.99:
        res = geodesy.polyline_length(MetricId.dirichlet(), geodesy.Curve.radial(r), tol=1e-8)
        values["polyline_length"] = res.value
        values["polyline_depth"] = res.refinement_depth
        summary.check("polyline_converged", res.converged)
        summary.check("polyline_matches_riemannian", abs(res.value - values["radial_length"]) <= 1e-6)
    w_ = _csv_writer(fh)
    w_.writerow(["quantity", "value"])
    for name, v in values.items():
        w_.writerow([name, _fmt(v) if isinstance(v, float) else v])
    summary.results.update(values)


def _run_separate(p, fh, summary: RunSummary, seed: int):
    r, eps = p["r"], p["eps"]
    if not 0.0 < r < 1.0:
        raise ConfigError("r", "must satisfy 0 < r < 1")
    lattice = packing.circle_lattice(r, eps, seed=seed)
    lattice.to_csv(fh)
    n = len(lattice)
    summary.results.update(size=n, min_pairwise=lattice.min_pairwise, certificate=lattice.certificate)
    summary.check("separated", lattice.min_pairwise >= eps)
    summary.check("count_at_least_inverse_sqrt", n >= 1.0 / math.sqrt(1.0 - r))


def _run_obstruct(p, fh, summary: RunSummary, seed: int):
    d, L, m, eps, k_max = p["d"], p["L"], p["m"], p["eps"], p["k_max"]
    rep = packing.obstruction_report(d, L, m, eps, packing.log_grid(k_max))
    rep.to_csv(fh)
    summary.results.update(
        alpha=rep.alpha, r_star=rep.r_star, u_star=rep.u_star, u_crossing=rep.u_crossing,
        M=rep.M, u_envelope=rep.u_envelope, u_lattice=rep.u_lattice,
    )
    lowers = [row.lower for row in rep.rows]
    summary.check("bounds_positive", all(row.lower > 0 and row.upper > 0 for row in rep.rows))
    summary.check("lower_increasing", all(b > a for a, b in zip(lowers, lowers[1:])))
    if len(rep.rows) >= 2:
        s_lo, s_up = rep.tail_slopes()
        summary.results.update(slope_lower=s_lo, slope_upper=s_up)
        summary.check("slope_lower", abs(s_lo + 0.5) <= 0.02)
        summary.check("slope_upper", abs(s_up + d / (2 * d + 1)) <= 0.02)
    summary.check("crossing_on_grid", rep.r_star is not None)


def _embed_grid(G: int, radius: float) -> list[complex]:
    side = radius / math.sqrt(2.0)
    xs = np.linspace(-side, side, G)
    return [complex(x, y) for y in xs for x in xs]


def _run_embed_check(p, fh, summary: RunSummary, seed: int):
    G, N, R = p["grid"], p["trunc"], p["radius"]
    if not 0 < R < 1:
        raise ConfigError("radius", "must lie in (0, 1)")
    table = gregory.gregory_recursion(N)
    pts = _embed_grid(G, R)
    vecs = {z: gregory.embed(z, N, table) for z in pts}

    def row(pair):
        z, w = pair
        err = gregory.reconstruction_error(z, w, N, table)
        bound = gregory.reconstruction_bound(vecs[z], vecs[w])
        gap = gregory.embedding_isometry_gap(z, w, N, table)
        return z, w, err, bound, gap

    rows = _ordered_map(row, [(z, w) for z in pts for w in pts])
    w_ = _csv_writer(fh)
    w_.writerow(["z_re", "z_im", "w_re", "w_im", "reconstruction_error", "reconstruction_bound", "isometry_gap"])
    for z, w, err, bound, gap in rows:
        w_.writerow([_fmt(z.real), _fmt(z.imag), _fmt(w.real), _fmt(w.imag), _fmt(err), _fmt(bound), _fmt(gap)])
    max_err = max(r[2] for r in rows)
    max_gap = max(r[4] for r in rows)
    summary.results.update(max_reconstruction_error=max_err, max_isometry_gap=max_gap, pairs=len(rows))
    summary.check("error_within_bound", all(r[2] <= r[3] for r in rows))
    summary.check("reconstruction_error", max_err <= 1e-8)
    summary.check("isometry_gap", max_gap <= 1e-6)


RUNNERS = {
    "coeffs": _run_coeffs,
    "metric": _run_metric,
    "length": _run_length,
    "separate": _run_separate,
    "obstruct": _run_obstruct,
    "embed-check": _run_embed_check,
}


def run(config: RunConfig) -> RunSummary:
    """Execute one command; writes the CSV and the JSON summary."""
    summary = RunSummary(config.command, dict(config.params, seed=config.seed))
    start = time.perf_counter()
    out = Path(config.output_path)
    buf = io.StringIO()
    try:
        RUNNERS[config.command](config.params, buf, summary, config.seed)
    except (ConfigError, DomainError, packing.SeparationError, packing.ThresholdError, ValueError) as exc:
        summary.results["error"] = str(exc)
        summary.exit_code = EXIT_INPUT
    except QuadratureError as exc:
        summary.results["error"] = str(exc)
        summary.exit_code = EXIT_NUMERIC
    else:
        summary.exit_code = EXIT_OK if summary.checks_failed == 0 else EXIT_CHECKS

    if summary.exit_code in (EXIT_OK, EXIT_CHECKS):
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            summary.results["error"] = f"cannot write {out}: {exc}"
            summary.exit_code = EXIT_INPUT
        else:
            summary.artifacts.append(str(out))
    summary.wall_time = time.perf_counter() - start
    try:
        with open(config.summary_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(summary.to_json())
        summary.artifacts.append(str(config.summary_path))
    except OSError:
        if summary.exit_code == EXIT_OK:
            summary.exit_code = EXIT_INPUT
    return summary


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__)
        return EXIT_OK if argv else EXIT_INPUT
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    summary = run(config)
    status = "ok" if summary.exit_code == EXIT_OK else f"exit {summary.exit_code}"
    print(
        f"{config.command}: {summary.checks_passed} checks passed, "
        f"{summary.checks_failed} failed ({status}) -> {', '.join(summary.artifacts)}"
    )
    if "error" in summary.results:
        print(f"error: {summary.results['error']}", file=sys.stderr)
    return summary.exit_code


if __name__ == "__main__":
    sys.exit(main())
