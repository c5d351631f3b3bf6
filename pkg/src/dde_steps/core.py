"""Shared domain types: problems, meshes, trajectories and assumption profiles.

Index convention
----------------
A problem with base lag ``tau`` and horizon ``n`` is solved on ``[0, (n+1)*tau]``.
With ``N`` intervals per lag window the nodes are ``t_k^j = j*tau + k*h`` for
``j = 0..n`` and ``k = 0..N``.  Neighbouring windows share their boundary node,
so states are stored once in a flat array of length ``(n+1)*N + 1`` and node
``(j, k)`` lives at ``j*N + k``.  Negative flat indices address the constant
history.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np


class ConfigurationError(ValueError):
    """A problem or solver setting is inconsistent (e.g. a lag off the grid)."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class HistoryDomainError(IndexError):
    """A lookup reached further back than the declared history window."""


class RhsFunction(Protocol):
    """Right-hand side ``f(t, y, zs)`` of a DDE with ``len(zs)`` delayed arguments."""

    d: int

    def __call__(self, t: float, y: np.ndarray, zs: Sequence[np.ndarray]) -> np.ndarray:
        ...


@dataclass(frozen=True)
class FunctionRhs:
    """Wrap a plain callable ``fn(t, y, zs)`` as an RHS of dimension ``d``."""

    fn: Callable[[float, np.ndarray, Sequence[np.ndarray]], np.ndarray]
    d: int = 1

    def __call__(self, t, y, zs):
        return self.fn(t, y, zs)


@dataclass(frozen=True)
class DdeProblem:
    """``z'(t) = f(t, z(t), z(t - l_1), ..., z(t - l_q))`` with constant history ``eta``.

    ``tau`` is the base lag that sets the window length of the mesh; ``lags``
    defaults to ``[tau]``.
    """

    rhs: RhsFunction
    tau: float
    eta: np.ndarray
    n: int
    lags: tuple[float, ...] = ()
    name: str = "problem"

    def __post_init__(self):
        if not self.tau > 0:
            raise ConfigurationError(f"base lag must be positive, got {self.tau}")
        if int(self.n) != self.n or self.n < 0:
            raise ConfigurationError(f"horizon must be a nonnegative integer, got {self.n}")
        eta = np.array(self.eta, dtype=float).reshape(-1)
        eta.setflags(write=False)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "n", int(self.n))
        lags = tuple(float(lag) for lag in self.lags) or (float(self.tau),)
        if any(not lag > 0 for lag in lags):
            raise ConfigurationError(f"every lag must be positive, got {lags}")
        object.__setattr__(self, "lags", lags)
        d = getattr(self.rhs, "d", eta.size)
        if d != eta.size:
            raise ConfigurationError(f"history has dimension {eta.size}, rhs expects {d}")

    @property
    def d(self) -> int:
        return self.eta.size

    @property
    def max_lag(self) -> float:
        return max(self.lags)

    @property
    def t_end(self) -> float:
        return (self.n + 1) * self.tau


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh with ``N`` intervals per lag window over ``n + 1`` windows."""

    tau: float
    N: int
    n: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ConfigurationError(f"N must be a positive integer, got {self.N}")
        if int(self.n) != self.n or self.n < 0:
            raise ConfigurationError(f"horizon must be a nonnegative integer, got {self.n}")
        if not self.tau > 0:
            raise ConfigurationError(f"tau must be positive, got {self.tau}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return self.tau / self.N

    @property
    def n_nodes(self) -> int:
        return (self.n + 1) * self.N + 1

    @property
    def n_steps(self) -> int:
        return (self.n + 1) * self.N

    def time(self, flat: int) -> float:
        # j*tau + k*h with k < N, so boundary nodes get one canonical value
        j, k = divmod(flat, self.N)
        return j * self.tau + k * self.h

    def node(self, j: int, k: int) -> float:
        return self.time(flatten_index(j, k, self))

    def times(self) -> np.ndarray:
        m = np.arange(self.n_nodes)
        j, k = np.divmod(m, self.N)
        return j * self.tau + k * self.h


def flatten_index(j: int, k: int, mesh: Mesh) -> int:
    """Flat storage index of node ``(j, k)``; ``(j, N)`` and ``(j+1, 0)`` coincide."""
    if not (0 <= j <= mesh.n and 0 <= k <= mesh.N):
        raise IndexError(f"node ({j}, {k}) outside mesh with n={mesh.n}, N={mesh.N}")
    return j * mesh.N + k


def unflatten_index(flat: int, mesh: Mesh) -> tuple[int, int]:
    """Inverse of :func:`flatten_index` choosing ``k < N`` except at the final node."""
    if not 0 <= flat <= mesh.n_steps:
        raise IndexError(f"flat index {flat} outside 0..{mesh.n_steps}")
    if flat == mesh.n_steps:
        return mesh.n, mesh.N
    return divmod(flat, mesh.N)


@dataclass(frozen=True)
class Trajectory:
    """Euler states on a :class:`Mesh`, one row per flat node index.

    If ``diverged_at`` is set, ``states`` holds only the finite prefix and
    ``diverged_at`` is the flat index of the first non-finite state.
    """

    mesh: Mesh
    states: np.ndarray
    tag: str = ""
    role: str = "solution"
    diverged_at: int | None = None

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        states.setflags(write=False)
        object.__setattr__(self, "states", states)
        if self.diverged_at is None and len(states) != self.mesh.n_nodes:
            raise ValueError(f"expected {self.mesh.n_nodes} states, got {len(states)}")

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None

    @property
    def d(self) -> int:
        return self.states.shape[1]

    def times(self) -> np.ndarray:
        return self.mesh.times()[: len(self.states)]

    def segment(self, j: int) -> np.ndarray:
        """View of window ``j`` including both of its boundary nodes."""
        N = self.mesh.N
        return self.states[j * N : (j + 1) * N + 1]

    def max_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.states, axis=1)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(["t"] + [f"x{i}" for i in range(self.d)]) + "\n")
        for t, row in zip(self.times(), self.states):
            buf.write(",".join(format(v, ".17g") for v in (t, *row)) + "\n")
        if self.diverged:
            buf.write(f"# diverged_at={self.diverged_at}\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``(times, states)`` back from :meth:`Trajectory.to_csv` output."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, comments="#", ndmin=2)
    return data[:, 0], data[:, 1:]


def history_lookup(traj_states: np.ndarray, flat: int, eta: np.ndarray, min_flat: int | None = None):
    """State at flat index ``flat``: ``eta`` for ``flat <= 0``, else the stored state.

    ``min_flat`` is the earliest index the history window covers, i.e.
    ``-round(max_lag / h)``.
    """
    if isinstance(traj_states, Trajectory):
        traj_states = traj_states.states
    if min_flat is not None and flat < min_flat:
        raise HistoryDomainError(f"lookup at {flat} precedes history window starting at {min_flat}")
    if flat <= 0:
        return eta
    return traj_states[flat]


@dataclass(frozen=True)
class AssumptionProfile:
    """Constants of the growth, one-sided Lipschitz and Hölder conditions.

    ``K``: linear growth, ``H``: one-sided Lipschitz (may be negative),
    ``L``: Hölder scale, ``alpha``: time exponent, ``betas``/``gammas``:
    state and delayed-state exponents.  Two betas and one gamma is the
    canonical form; longer lists are the generalized form.
    """

    K: float
    H: float
    L: float
    alpha: float
    betas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if not self.K > 0:
            raise PreconditionError(f"K must be positive, got {self.K}")
        if not self.L >= 0:
            raise PreconditionError(f"L must be nonnegative, got {self.L}")
        if not self.betas or not self.gammas:
            raise PreconditionError("betas and gammas must be nonempty")
        for e in (self.alpha, *self.betas, *self.gammas):
            if not 0 < e <= 1:
                raise PreconditionError(f"exponents must lie in (0, 1], got {e}")
        if math.isnan(self.H):
            raise PreconditionError("H must be a real number")

    @property
    def canonical(self) -> bool:
        return len(self.betas) == 2 and len(self.gammas) == 1

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "H": self.H,
            "L": self.L,
            "alpha": self.alpha,
            "betas": list(self.betas),
            "gammas": list(self.gammas),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AssumptionProfile":
        return cls(
            K=float(data["K"]),
            H=float(data.get("H", 0.0)),
            L=float(data.get("L", 1.0)),
            alpha=float(data["alpha"]),
            betas=tuple(data["betas"]),
            gammas=tuple(data["gammas"]),
        )
