"""Explicit Euler integrators: the method of steps for constant-lag DDEs and
the plain Euler scheme for an ODE started inside a ball around its initial value."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ConfigurationError, DdeProblem, Mesh, PreconditionError, Trajectory


def lag_offsets(problem: DdeProblem, N: int) -> list[int]:
    """Number of mesh steps spanned by each lag, for ``h = tau / N``.

    Raises ConfigurationError unless every ``lag / h`` is an integer (to one
    ulp) of at least one step.  Lags off the grid would need interpolation of
    past states, which the method of steps does not do.
    """
    offsets = []
    for lag in problem.lags:
        ratio = lag * N / problem.tau
        m = round(ratio)
        if abs(ratio - m) > math.ulp(ratio) or m < 1:
            raise ConfigurationError(
                f"lag {lag} is not a positive integer multiple of h={problem.tau / N}; "
                "variable or off-grid delays are not supported by the method of steps"
            )
        offsets.append(int(m))
    return offsets


def euler_solve_dde(problem: DdeProblem, N: int, tag: str | None = None, role: str = "solution") -> Trajectory:
    """Euler method of steps with ``N`` steps per lag window.

    ``y[m+1] = y[m] + h * f(t_m, y[m], [y[m - o_i] ...])`` where ``o_i`` is the
    step offset of lag ``i`` and indices ``<= 0`` read the history ``eta``.
    On the first non-finite state the integration stops and the returned
    trajectory is flagged with ``diverged_at``.
    """
    mesh = Mesh(problem.tau, N, problem.n)
    offsets = lag_offsets(problem, mesh.N)
    rhs = problem.rhs
    eta = problem.eta
    h = mesh.h
    tau = problem.tau
    N = mesh.N

    states = np.empty((mesh.n_nodes, problem.d))
    states[0] = eta
    y = states[0]
    diverged_at = None
    for m in range(mesh.n_steps):
        j, k = divmod(m, N)
        zs = [states[m - o] if m - o > 0 else eta for o in offsets]
        y = y + h * rhs(j * tau + k * h, y, zs)
        states[m + 1] = y
        if not math.isfinite(y.sum()) and not np.isfinite(y).all():
            diverged_at = m + 1
            states = states[: m + 1]
            break
    return Trajectory(mesh, states, tag=tag or problem.name, role=role, diverged_at=diverged_at)


@dataclass(frozen=True)
class OdeRhs:
    """``g(t, y)`` on the interval ``[a, b]``."""

    fn: Callable[[float, np.ndarray], np.ndarray]
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise PreconditionError(f"need a < b, got [{self.a}, {self.b}]")

    def __call__(self, t, y):
        return self.fn(t, y)


def euler_solve_ode(g: OdeRhs, xi, delta: float, y0, N: int) -> np.ndarray:
    """Euler for ``z' = g(t, z), z(a) = xi`` started from ``y0`` with ``|xi - y0| <= delta``.

    Returns the ``N + 1`` states on ``t_k = a + k (b - a) / N``.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    y = np.atleast_1d(np.array(y0, dtype=float))
    if N < 1 or int(N) != N:
        raise PreconditionError(f"N must be a positive integer, got {N}")
    if delta < 0:
        raise PreconditionError(f"delta must be nonnegative, got {delta}")
    if np.linalg.norm(xi - y) > delta:
        raise PreconditionError(f"start {y} lies outside the ball B({xi}, {delta})")
    h = (g.b - g.a) / N
    out = np.empty((N + 1, y.size))
    out[0] = y
    for k in range(N):
        y = y + h * g(g.a + k * h, y)
        out[k + 1] = y
    return out
