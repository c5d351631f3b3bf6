"""Compare metal-model Euler errors against an independent high-order solve.

A DOP853 method-of-steps integration (dense output carries the delayed
argument between windows) serves as the truth; the Euler sup-error on each
mesh and the local ratios err(N)/err(2N) show how far the ladder is from
its asymptotic regime.
"""
from __future__ import annotations

import argparse

import numpy as np
from scipy.integrate import solve_ivp

from dde_steps.models import build_problem
from dde_steps.stepper import euler_solve_dde


def high_order_solution(problem, rtol=1e-12, atol=1e-12):
    """Piecewise dense solution ``t -> z(t)`` on ``[0, (n+1) tau]``."""
    tau, pieces = problem.tau, []
    prev = lambda t: problem.eta
    y0 = problem.eta.astype(float)
    for j in range(problem.n + 1):
        a, b = j * tau, (j + 1) * tau
        rhs = lambda t, y, prev=prev: problem.rhs(t, y, [np.atleast_1d(prev(t - tau))])
        sol = solve_ivp(rhs, (a, b), y0, method="DOP853", rtol=rtol, atol=atol, dense_output=True)
        pieces.append(sol.sol)
        prev = sol.sol
        y0 = sol.y[:, -1]

    def z(t):
        j = min(int(t // tau), problem.n)
        return pieces[j](t)

    return z


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("model", nargs="?", default="metal1", choices=["metal1", "metal2"])
    ap.add_argument("--N", type=int, nargs="+", default=[20 * 2**i for i in range(7)])
    args = ap.parse_args(argv)

    problem = build_problem(args.model)
    z = high_order_solution(problem)
    errs = []
    for N in args.N:
        traj = euler_solve_dde(problem, N)
        exact = np.array([z(t) for t in traj.times()])
        errs.append(float(np.max(np.abs(traj.states - exact))))
    slope = np.polyfit(np.log10(args.N), -np.log10(errs), 1)[0]
    for i, (N, e) in enumerate(zip(args.N, errs)):
        ratio = errs[i - 1] / e if i else float("nan")
        print(f"N={N:>5}  err={e:.4e}  ratio={ratio:.3f}")
    print(f"slope {slope:.4f}")


if __name__ == "__main__":
    main()
