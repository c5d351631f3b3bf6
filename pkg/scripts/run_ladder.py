"""Run a convergence ladder for a catalog model and print the table.

Examples::

    python3 scripts/run_ladder.py metal1
    python3 scripts/run_ladder.py mackey_glass --n 50 --N 8 16 32 64 128 256 512
    python3 scripts/run_ladder.py sir8 --N 2 4 8 16 --refinement 50
"""
from __future__ import annotations

import argparse
import time
from pathlib import Path

import numpy as np

from dde_steps.convergence import LadderSpec, run_ladder
from dde_steps.models import build_problem, certified_profile

DEFAULT_LADDERS = {
    "metal1": [10 * 2**i for i in range(8)],
    "metal2": [10 * 2**i for i in range(8)],
    "mackey_glass": [8 * 2**i for i in range(7)],
    "sir8": [2, 4, 8, 16],
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("model", choices=sorted(DEFAULT_LADDERS))
    ap.add_argument("--N", type=int, nargs="+", help="interval counts per lag window")
    ap.add_argument("--refinement", type=int, default=100)
    ap.add_argument("--n", type=int, help="override the horizon")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, help="directory for ladder.csv and summary.json")
    args = ap.parse_args(argv)

    problem = build_problem(args.model, n=args.n)
    spec = LadderSpec(problem, args.N or DEFAULT_LADDERS[args.model], args.refinement, certified_profile(args.model))
    start = time.perf_counter()
    with np.errstate(all="ignore"):
        report = run_ladder(spec, jobs=args.jobs)
    elapsed = time.perf_counter() - start

    print(f"{args.model}: n={problem.n}, N_ref={report.N_ref}, {elapsed:.1f}s")
    print(f"{'N':>6} {'h':>12} {'sup error':>14}")
    for N, h, err in report.rows:
        print(f"{N:>6} {h:>12.6g} {err:>14.6g}")
    for w in report.warnings:
        print("warning:", w)
    print(f"slope {report.slope}  theoretical {report.theoretical_rate}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "ladder.csv").write_text(report.to_csv())
        (args.out / "summary.json").write_text(report.summary_json())


if __name__ == "__main__":
    main()
