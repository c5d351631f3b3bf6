"""Empirical slope of the Mackey-Glass ladder as a function of the horizon n.

The chaotic attractor amplifies discretization errors exponentially, so the
sup-error saturates at the attractor's diameter once the horizon is long
enough and the fitted slope collapses.
"""
from __future__ import annotations

import argparse

from dde_steps.convergence import LadderSpec, run_ladder
from dde_steps.models import build_problem


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizons", type=int, nargs="+", default=[2, 5, 10, 20, 30, 50])
    ap.add_argument("--N", type=int, nargs="+", default=[8 * 2**i for i in range(7)])
    ap.add_argument("--refinement", type=int, default=100)
    ap.add_argument("--eta", type=float, default=0.1)
    args = ap.parse_args(argv)

    print(f"{'n':>4} {'slope':>8}  errors")
    for n in args.horizons:
        problem = build_problem("mackey_glass", n=n, eta=[args.eta])
        rep = run_ladder(LadderSpec(problem, args.N, args.refinement))
        errs = " ".join(f"{e:.2e}" for _, _, e in rep.rows)
        print(f"{n:>4} {rep.slope:>8.4f}  {errs}")


if __name__ == "__main__":
    main()
