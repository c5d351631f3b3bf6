"""Euler method of steps for constant-lag delay differential equations."""
from .bounds import analytic_solution_bounds, euler_trajectory_bound, theoretical_rate
from .convergence import LadderSpec, fit_rate, reference_solution, run_ladder, sup_error
from .core import (
    AssumptionProfile,
    ConfigurationError,
    DdeProblem,
    FunctionRhs,
    Mesh,
    Trajectory,
    flatten_index,
    history_lookup,
)
from .models import build_problem, certified_profile
from .probes import SamplingBox, probe_assumptions
from .stepper import OdeRhs, euler_solve_dde, euler_solve_ode

__all__ = [
    "AssumptionProfile",
    "ConfigurationError",
    "DdeProblem",
    "FunctionRhs",
    "LadderSpec",
    "Mesh",
    "OdeRhs",
    "SamplingBox",
    "Trajectory",
    "analytic_solution_bounds",
    "build_problem",
    "certified_profile",
    "euler_solve_dde",
    "euler_solve_ode",
    "euler_trajectory_bound",
    "fit_rate",
    "flatten_index",
    "history_lookup",
    "probe_assumptions",
    "reference_solution",
    "run_ladder",
    "sup_error",
    "theoretical_rate",
]
