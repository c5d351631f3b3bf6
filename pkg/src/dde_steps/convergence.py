"""Empirical order of convergence against a dense-mesh Euler reference.

The exact solutions of the benchmark problems are unknown, so the error of a
coarse run is measured against the same scheme on a mesh ``refinement`` times
finer than the finest coarse mesh.  Coarse nodes are a subset of reference
nodes, so no interpolation is involved.
"""
from __future__ import annotations

import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import theoretical_rate
from .core import AssumptionProfile, ConfigurationError, DdeProblem, Trajectory
from .stepper import euler_solve_dde


class AlignmentError(ValueError):
    """Coarse and reference meshes do not nest."""


class DegenerateFitError(ValueError):
    """Fewer than two usable (N, error) rows, so the slope is undefined."""


class ReferenceDivergedError(RuntimeError):
    """The reference solve produced non-finite states."""


def reference_solution(problem: DdeProblem, N_ref: int) -> Trajectory:
    """Euler solution on the dense mesh, tagged as the reference."""
    traj = euler_solve_dde(problem, N_ref, role="reference")
    if traj.diverged:
        raise ReferenceDivergedError(f"reference solve diverged at node {traj.diverged_at}")
    return traj


def sup_error(coarse: Trajectory, reference: Trajectory) -> float:
    """Max over coarse nodes of the Euclidean distance to the reference at the same time.

    A diverged coarse trajectory has infinite error.
    """
    if coarse.tag != reference.tag:
        raise ValueError(f"trajectories of different problems: {coarse.tag!r} vs {reference.tag!r}")
    cm, rm = coarse.mesh, reference.mesh
    if cm.tau != rm.tau or cm.n != rm.n:
        raise AlignmentError("coarse and reference meshes cover different windows")
    if rm.N % cm.N:
        raise AlignmentError(f"reference N={rm.N} is not a multiple of coarse N={cm.N}")
    if coarse.diverged:
        return math.inf
    r = rm.N // cm.N
    diff = coarse.states - reference.states[:: r]
    return float(np.max(np.linalg.norm(diff, axis=1)))


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    used: int
    warnings: tuple[str, ...] = ()


def fit_rate(rows) -> FitResult:
    """Least-squares line through ``(log10 N, -log10 err)``.

    Rows with zero or non-finite error are skipped (and reported).
    """
    warns = []
    xs, ys = [], []
    for N, err in rows:
        if not math.isfinite(err):
            warns.append(f"N={N}: non-finite error excluded from fit")
        elif err <= 0:
            warns.append(f"N={N}: zero error excluded from fit")
        else:
            xs.append(math.log10(N))
            ys.append(-math.log10(err))
    if len(set(xs)) < 2:
        raise DegenerateFitError(f"need at least two usable rows with distinct N, got {len(xs)}")
    slope, intercept = np.polyfit(np.array(xs), np.array(ys), 1)
    return FitResult(float(slope), float(intercept), len(xs), tuple(warns))


@dataclass(frozen=True)
class LadderSpec:
    """Interval counts to test and the reference multiplier."""

    problem: DdeProblem
    N_values: tuple[int, ...]
    refinement: int = 1000
    profile: AssumptionProfile | None = None

    def __post_init__(self):
        Ns = tuple(int(N) for N in self.N_values)
        object.__setattr__(self, "N_values", Ns)
        if not Ns or any(N < 1 for N in Ns):
            raise ConfigurationError("N_values must be a nonempty list of positive integers")
        if any(b <= a for a, b in zip(Ns, Ns[1:])):
            raise ConfigurationError(f"N_values must be strictly increasing, got {Ns}")
        if int(self.refinement) != self.refinement or self.refinement < 1:
            raise ConfigurationError(f"refinement must be a positive integer, got {self.refinement}")
        for N in Ns:
            if self.N_ref % N:
                raise ConfigurationError(f"N={N} does not divide the reference N={self.N_ref}")

    @property
    def N_ref(self) -> int:
        return int(self.refinement) * max(self.N_values)


@dataclass
class ConvergenceReport:
    rows: list[tuple[int, float, float]]
    slope: float | None
    intercept: float | None
    theoretical_rate: float | None
    warnings: list[str] = field(default_factory=list)
    N_ref: int = 0
    rate_extrapolated: bool = False

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("N,h,sup_error\n")
        for N, h, err in self.rows:
            buf.write(f"{N},{h:.17g},{err:.17g}\n")
        return buf.getvalue()

    def plot_data(self) -> str:
        """Two columns ``log10 N, -log10 err`` for rows with positive finite error."""
        buf = io.StringIO()
        buf.write("# log10N -log10err\n")
        for N, _, err in self.rows:
            if math.isfinite(err) and err > 0:
                buf.write(f"{math.log10(N):.17g} {-math.log10(err):.17g}\n")
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "theoretical_rate": self.theoretical_rate,
            "rate_extrapolated": self.rate_extrapolated,
            "N_ref": self.N_ref,
            "warnings": list(self.warnings),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def _solve_error(args):
    problem, N, reference = args
    return sup_error(euler_solve_dde(problem, N), reference)


def run_ladder(spec: LadderSpec, jobs: int = 1) -> ConvergenceReport:
    """Solve every rung, measure sup-errors against one reference and fit the slope.

    ``jobs > 1`` runs the coarse solves in worker processes (the problem must
    then be picklable); rows are always ordered by N.
    """
    problem = spec.problem
    warns = []
    big_h = [N for N in spec.N_values if problem.tau / N >= 0.5]
    if big_h:
        warns.append(f"h = tau/N >= 1/2 for N in {big_h}; the error theorem assumes h < 1/2")

    reference = reference_solution(problem, spec.N_ref)
    tasks = [(problem, N, reference) for N in spec.N_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            errors = list(pool.map(_solve_error, tasks))
    else:
        errors = [_solve_error(t) for t in tasks]

    rows = [(N, problem.tau / N, err) for N, err in zip(spec.N_values, errors)]
    for N, _, err in rows:
        if not math.isfinite(err):
            warns.append(f"N={N}: coarse solve diverged")

    slope = intercept = None
    if all(err == 0 for _, _, err in rows):
        warns.append("all-zero errors")
    else:
        try:
            fit = fit_rate([(N, err) for N, _, err in rows])
        except DegenerateFitError as exc:
            warns.append(f"degenerate fit: {exc}")
        else:
            slope, intercept = fit.slope, fit.intercept
            warns.extend(fit.warnings)

    rate = extrapolated = None
    if spec.profile is not None:
        r = theoretical_rate(spec.profile, problem.n)
        rate, extrapolated = r.dominant, r.extrapolated
    return ConvergenceReport(
        rows, slope, intercept, rate, warns, N_ref=spec.N_ref, rate_extrapolated=bool(extrapolated)
    )
