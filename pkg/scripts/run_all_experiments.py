"""Run every CLI command once and collect the CSVs and summaries in one directory."""
import argparse
import json
from pathlib import Path

from pickmetrics.cli import parse_config, run

COMMANDS = {
    "coeffs": ["coeffs", "--n-max", "1000", "--method", "recursion"],
    "coeffs_both": ["coeffs", "--n-max", "200", "--method", "both"],
    "metric_dirichlet": ["metric", "--kernel", "dirichlet", "--z", "0.5,0", "--w", "-0.5,0"],
    "metric_ball": ["metric", "--kernel", "drury-arveson", "--z", "0.5,0;0,0", "--w", "0,0;0.5,0"],
    "metric_weighted": ["metric", "--kernel", "weighted-dirichlet", "--a", "0.5", "--z", "0.6", "--w", "0"],
    "length": ["length", "--r", "0.9"],
    "separate": ["separate", "--r", "0.999999", "--eps", "0.8"],
    "embed_check": ["embed-check", "--grid", "5", "--trunc", "200"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k-max", type=int, default=15, help="depth of the obstruction grid")
    args = ap.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    jobs = dict(COMMANDS)
    for d in range(1, 7):
        jobs[f"obstruct_d{d}"] = ["obstruct", "--d", str(d), "--k-max", str(args.k_max)]

    index = {}
    for name, argv in jobs.items():
        cfg = parse_config(argv + ["--out", str(outdir / f"{name}.csv"), "--seed", str(args.seed)])
        s = run(cfg)
        index[name] = {"exit_code": s.exit_code, "failed_checks": [k for k, v in s.checks.items() if not v]}
        print(f"{name:18s} exit {s.exit_code}  {s.checks_passed} passed, {s.checks_failed} failed")
    (outdir / "index.json").write_text(json.dumps(index, indent=2) + "\n")


if __name__ == "__main__":
    main()
