"""Command-line runner: ``dde-steps {solve,ladder,bounds,probe} --config FILE --out DIR``.

Exit codes: 0 ok, 2 configuration error, 3 divergence, 4 degenerate fit.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .convergence import LadderSpec, ReferenceDivergedError, run_ladder
from .core import AssumptionProfile, ConfigurationError, DdeProblem, PreconditionError
from .models import CATALOG, build_problem, certified_profile
from .probes import SamplingBox, probe_assumptions
from .stepper import euler_solve_dde

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_DEGENERATE = 0, 2, 3, 4
COMMANDS = ("solve", "ladder", "bounds", "probe")


@dataclass(frozen=True)
class CustomRhs:
    """RHS given as one Python expression per component.

    Names available: ``t``, ``y``, ``z`` (first delayed state), ``zs``, ``np``, ``math``.
    """

    exprs: tuple[str, ...]
    d: int = 1

    def __post_init__(self):
        if len(self.exprs) != self.d:
            raise ConfigurationError(f"custom rhs needs {self.d} expressions, got {len(self.exprs)}")
        try:
            codes = tuple(compile(e, "<rhs>", "eval") for e in self.exprs)
        except SyntaxError as exc:
            raise ConfigurationError(f"bad rhs expression: {exc}") from exc
        object.__setattr__(self, "_codes", codes)

    def __getstate__(self):
        return {"exprs": self.exprs, "d": self.d}

    def __setstate__(self, state):
        object.__setattr__(self, "exprs", state["exprs"])
        object.__setattr__(self, "d", state["d"])
        self.__post_init__()

    def __call__(self, t, y, zs):
        ns = {"__builtins__": {}, "np": np, "math": math, "abs": abs, "t": t, "y": y, "z": zs[0], "zs": zs}
        return np.array([eval(c, ns) for c in self._codes], dtype=float).reshape(self.d)


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    command: str
    block: dict
    params: dict = field(default_factory=dict)
    tau: float | None = None
    n: int | None = None
    eta: tuple[float, ...] | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        allowed = {"model", "params", "tau", "n", "eta", *COMMANDS}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        present = [c for c in COMMANDS if c in data]
        if len(present) != 1:
            raise ConfigurationError(f"exactly one command block required, found {present}")
        model = data.get("model")
        if model != "custom" and model not in CATALOG:
            raise ConfigurationError(f"unknown model {model!r}; choose 'custom' or one of {sorted(CATALOG)}")
        eta = data.get("eta")
        if eta is not None:
            eta = tuple(float(v) for v in np.atleast_1d(eta))
        cfg = cls(
            model=model,
            command=present[0],
            block=dict(data[present[0]] or {}),
            params=dict(data.get("params") or {}),
            tau=None if data.get("tau") is None else float(data["tau"]),
            n=None if data.get("n") is None else int(data["n"]),
            eta=eta,
        )
        if model == "custom" and (cfg.tau is None or cfg.n is None or cfg.eta is None):
            raise ConfigurationError("custom models need tau, n and eta")
        return cfg

    def to_dict(self) -> dict:
        out = {"model": self.model, "params": self.params, self.command: self.block}
        for key in ("tau", "n"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.eta is not None:
            out["eta"] = list(self.eta)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def problem(self) -> DdeProblem:
        if self.model != "custom":
            return build_problem(self.model, self.params, tau=self.tau, n=self.n, eta=self.eta)
        p = dict(self.params)
        d = int(p.get("d", len(self.eta)))
        exprs = p.get("rhs")
        if exprs is None:
            raise ConfigurationError("custom model needs params.rhs, a list of expressions")
        if isinstance(exprs, str):
            exprs = [exprs]
        rhs = CustomRhs(tuple(str(e) for e in exprs), d)
        return DdeProblem(rhs, self.tau, self.eta, self.n, lags=tuple(p.get("lags", ())), name="custom")

    def profile(self) -> AssumptionProfile | None:
        data = self.block.get("profile")
        if data is not None:
            return AssumptionProfile.from_dict(data)
        if self.model == "custom":
            return None
        return certified_profile(self.model, self.params)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def _require_int(block: dict, key: str) -> int:
    if key not in block:
        raise ConfigurationError(f"command block needs {key!r}")
    return int(block[key])


def cmd_solve(cfg: ExperimentConfig, out: Path, jobs: int = 1) -> int:
    problem = cfg.problem()
    N = _require_int(cfg.block, "N")
    traj = euler_solve_dde(problem, N)
    traj.write_csv(out / "trajectory.csv")
    if traj.diverged:
        print(f"diverged at node {traj.diverged_at} (t={traj.mesh.time(traj.diverged_at):.6g})")
        return EXIT_DIVERGED
    final = " ".join(f"{v:.10g}" for v in traj.states[-1])
    print(f"solved {problem.name}: N={N}, nodes={len(traj.states)}, final=[{final}], max_norm={traj.max_norm():.10g}")
    return EXIT_OK


def cmd_ladder(cfg: ExperimentConfig, out: Path, jobs: int = 1) -> int:
    problem = cfg.problem()
    if "N_values" not in cfg.block:
        raise ConfigurationError("ladder block needs 'N_values'")
    spec = LadderSpec(
        problem,
        tuple(cfg.block["N_values"]),
        refinement=int(cfg.block.get("refinement", 1000)),
        profile=cfg.profile(),
    )
    try:
        report = run_ladder(spec, jobs=jobs)
    except ReferenceDivergedError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DIVERGED
    (out / "ladder.csv").write_text(report.to_csv())
    (out / "summary.json").write_text(report.summary_json())
    (out / "plot.dat").write_text(report.plot_data())
    for w in report.warnings:
        print(f"warning: {w}")
    if report.slope is None:
        print("slope undefined")
        return EXIT_DEGENERATE
    print(f"empirical slope {report.slope:.4f}  theoretical rate {report.theoretical_rate}")
    return EXIT_OK


def cmd_bounds(cfg: ExperimentConfig, out: Path, jobs: int = 1) -> int:
    problem = cfg.problem()
    profile = cfg.profile()
    if profile is None:
        raise ConfigurationError("bounds block needs a 'profile' for this model")
    report = bounds_mod.bounds_report(profile, problem.eta, problem.tau, problem.n)
    (out / "bounds.json").write_text(bounds_mod.dumps_report(report))
    print(f"rate per segment {report['rate_per_segment']}")
    return EXIT_OK


def cmd_probe(cfg: ExperimentConfig, out: Path, jobs: int = 1) -> int:
    problem = cfg.problem()
    profile = cfg.profile()
    if profile is None:
        raise ConfigurationError("probe block needs a declared 'profile' for this model")
    box = SamplingBox.from_dict(cfg.block.get("box", {}))
    report = probe_assumptions(
        problem.rhs,
        profile,
        box,
        samples=int(cfg.block.get("samples", 1000)),
        seed=int(cfg.block.get("seed", 0)),
        n_lags=len(problem.lags),
        chunks=max(1, jobs),
    )
    (out / "probe.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"{report.samples} samples, {report.n_violations} violations, K_est={report.K_est:.6g}, H_est={report.H_est:.6g}")
    return EXIT_OK


HANDLERS = {"solve": cmd_solve, "ladder": cmd_ladder, "bounds": cmd_bounds, "probe": cmd_probe}


def _jobs(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("DDE_STEPS_JOBS")
    return int(env) if env else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dde-steps", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes (default $DDE_STEPS_JOBS or 1)")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if cfg.command != args.command:
            raise ConfigurationError(f"config holds a {cfg.command!r} block but command is {args.command!r}")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(cfg.dumps())
        return HANDLERS[args.command](cfg, out, _jobs(args.jobs))
    except (ConfigurationError, PreconditionError, KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
