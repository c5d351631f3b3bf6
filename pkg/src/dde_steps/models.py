"""Benchmark right-hand sides and their published parameter sets.

Catalog names: ``metal1`` (power-law delayed factor), ``metal2`` (linear
delayed factor), ``mackey_glass`` and ``sir8``.  The four extra metal
parameter sets are shipped as ``metal1_a`` .. ``metal1_d``.
"""
from __future__ import annotations

import copy
import math
import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np

from .core import AssumptionProfile, ConfigurationError, DdeProblem


def sgn(x: float) -> float:
    """Sign with ``sgn(0) = 1``."""
    return 1.0 if x >= 0 else -1.0


def signed_power(y: float, rho: float) -> float:
    """``-sgn(y) |y|^rho``: continuous, decreasing, zero at the origin."""
    return -sgn(y) * abs(y) ** rho


@dataclass(frozen=True)
class MetalModelParams:
    """Dislocation-density type model ``A - B sgn(y)|y| - C sgn(y)|y|^rho Z + D y Z'``.

    ``variant="power"``: ``Z = Z' = |z|^gamma``.
    ``variant="linear"``: ``Z = |z|`` and ``Z' = z``.
    """

    A: float = 1.7137
    B: float = 0.7769
    C: float = 0.5895
    D: float = -0.82615
    rho: float = 0.973
    gamma: float = 0.714
    variant: str = "power"

    def __post_init__(self):
        if min(self.A, self.B, self.C) < 0:
            raise ConfigurationError("A, B, C must be nonnegative")
        if not (0 < self.rho <= 1 and 0 < self.gamma <= 1):
            raise ConfigurationError("rho and gamma must lie in (0, 1]")
        if self.variant not in ("power", "linear"):
            raise ConfigurationError(f"unknown metal variant {self.variant!r}")


@dataclass(frozen=True)
class MetalRhs:
    p: MetalModelParams
    d: int = 1

    def __call__(self, t, y, zs):
        p = self.p
        yv = float(y[0])
        z = float(zs[0][0])
        s = sgn(yv)
        ay = abs(yv)
        if p.variant == "power":
            zf = zd = abs(z) ** p.gamma
        else:
            zf, zd = abs(z), z
        return np.array([p.A - p.B * s * ay - p.C * s * ay**p.rho * zf + p.D * yv * zd])


def metal_rhs(p: MetalModelParams) -> MetalRhs:
    return MetalRhs(p)


def metal_profile(p: MetalModelParams) -> AssumptionProfile:
    """Constants for which the metal models satisfy the growth, one-sided and Hölder bounds.

    The model does not depend on ``t``, so any time exponent works; 1 is used.
    """
    return AssumptionProfile(
        K=p.A + p.B + p.C + abs(p.D),
        H=abs(p.D),
        L=max(p.B + abs(p.D), 2 * p.C, p.C + abs(p.D)),
        alpha=1.0,
        betas=(1.0, p.rho),
        gammas=(p.gamma if p.variant == "power" else 1.0,),
    )


@dataclass(frozen=True)
class MackeyGlassParams:
    a: float = 0.1
    b: float = 0.2
    m: float = 10.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.m > 0):
            raise ConfigurationError("Mackey-Glass parameters must be positive")


@dataclass(frozen=True)
class MackeyGlassRhs:
    p: MackeyGlassParams
    d: int = 1

    def __call__(self, t, y, zs):
        p = self.p
        z = float(zs[0][0])
        return np.array([p.b * z / (1.0 + z**p.m) - p.a * float(y[0])])


def mackey_glass_rhs(p: MackeyGlassParams) -> MackeyGlassRhs:
    return MackeyGlassRhs(p)


@dataclass(frozen=True)
class SirParams:
    """Delayed SIR-type model with symptomatic/asymptomatic and three severity classes.

    State order: ``S, I_s, I_a, F_b, F_g, F_c, R, M``.  Lags ``tau1..tau4``
    feed the infection, severity-split, recovery-from-I and outflow-from-F
    terms.  ``u`` is piecewise constant, equal to ``u_values[i]`` on
    ``(u_breaks[i-1], u_breaks[i]]``; it is left-closed at 0 and held at its
    last value past the final breakpoint.
    """

    beta: float = 0.4517
    eps: float = 0.794
    gamma_b: float = 0.8
    gamma_g: float = 0.15
    gamma_c: float = 0.05
    alpha: float = 0.06
    eta_a: float = 1 / 21
    eta_s: float = 0.8 / 21
    mu_s: float = 0.01 / 21
    mu_b: float = 0.0
    mu_g: float = 0.0
    mu_c: float = 0.4 / 13.5
    r_b: float = 1 / 13.5
    r_g: float = 1 / 13.5
    r_c: float = 0.6 / 13.5
    tau1: float = 5.5
    tau2: float = 7.5
    tau3: float = 21.0
    tau4: float = 13.5
    N_pop: float = 35280000.0
    u_breaks: tuple[float, ...] = (8.0, 18.0, 35.0, 240.0)
    u_values: tuple[float, ...] = (0.2, 0.3, 0.4, 0.8)

    def __post_init__(self):
        object.__setattr__(self, "u_breaks", tuple(float(b) for b in self.u_breaks))
        object.__setattr__(self, "u_values", tuple(float(v) for v in self.u_values))
        rates = [getattr(self, f.name) for f in fields(self) if f.name not in ("u_breaks", "u_values")]
        if min(rates) < 0:
            raise ConfigurationError("SIR rates must be nonnegative")
        if min(self.lags) <= 0:
            raise ConfigurationError("SIR lags must be positive")
        if len(self.u_breaks) != len(self.u_values):
            raise ConfigurationError("u_breaks and u_values must have equal length")
        if not math.isclose(self.gamma_b + self.gamma_g + self.gamma_c, 1.0, rel_tol=1e-12):
            warnings.warn("severity fractions gamma_b + gamma_g + gamma_c do not sum to 1")

    @property
    def lags(self) -> tuple[float, float, float, float]:
        return (self.tau1, self.tau2, self.tau3, self.tau4)

    def u(self, t: float) -> float:
        for brk, val in zip(self.u_breaks, self.u_values):
            if t <= brk:
                return val
        return self.u_values[-1]


@dataclass(frozen=True)
class SirRhs:
    p: SirParams
    d: int = 8

    def __call__(self, t, y, zs):
        p = self.p
        S, Is, Ia, Fb, Fg, Fc, R, M = (float(v) for v in y)
        z1, z2, z3, z4 = zs
        c = 1.0 - p.u(t)
        force = p.beta * c * S * Is / p.N_pop
        force_lag = p.beta * c * float(z1[0]) * float(z1[1]) / p.N_pop
        Is2 = float(z2[1])
        Is3, Ia3 = float(z3[1]), float(z3[2])
        Fb4, Fg4, Fc4 = float(z4[3]), float(z4[4]), float(z4[5])
        return np.array(
            [
                -force,
                p.eps * force_lag - p.alpha * Is - (1 - p.alpha) * (p.mu_s + p.eta_s) * Is,
                (1 - p.eps) * force_lag - p.eta_a * Ia,
                p.alpha * p.gamma_b * Is2 - (p.mu_b + p.r_b) * Fb,
                p.alpha * p.gamma_g * Is2 - (p.mu_g + p.r_g) * Fg,
                p.alpha * p.gamma_c * Is2 - (p.mu_c + p.r_c) * Fc,
                p.eta_s * (1 - p.alpha) * Is3 + p.eta_a * Ia3 + p.r_b * Fb4 + p.r_g * Fg4 + p.r_c * Fc4,
                p.mu_s * (1 - p.alpha) * Is3 + p.mu_b * Fb4 + p.mu_g * Fg4 + p.mu_c * Fc4,
            ]
        )


def sir_rhs(p: SirParams) -> SirRhs:
    return SirRhs(p)


@dataclass(frozen=True)
class Preset:
    """A named model with its default parameters and problem data."""

    kind: str
    params: dict
    tau: float
    n: int
    eta: tuple[float, ...]


_METAL_MAIN = dict(A=1.7137, B=0.7769, C=0.5895, D=-0.82615, rho=0.973, gamma=0.714)

CATALOG: dict[str, Preset] = {
    "metal1": Preset("metal", {**_METAL_MAIN, "variant": "power"}, 9.2603, 5, (0.05854,)),
    "metal2": Preset("metal", {**_METAL_MAIN, "variant": "linear"}, 9.2603, 5, (0.05854,)),
    "metal1_a": Preset(
        "metal", dict(A=3.27, B=5.62, C=9.89, D=-7.31, rho=0.88, gamma=0.89, variant="power"), 1.03, 5, (1.0,)
    ),
    "metal1_b": Preset(
        "metal", dict(A=5.0, B=6.62, C=0.52, D=4.0, rho=0.32, gamma=0.33, variant="power"), 8.55, 5, (0.22,)
    ),
    "metal1_c": Preset(
        "metal", dict(A=5.16, B=0.42, C=3.61, D=-6.74, rho=0.99, gamma=0.11, variant="power"), 5.69, 5, (0.17,)
    ),
    "metal1_d": Preset(
        "metal", dict(A=6.75, B=2.79, C=4.7, D=-0.01, rho=0.86, gamma=0.02, variant="power"), 1.58, 5, (0.31,)
    ),
    "mackey_glass": Preset("mackey_glass", dict(a=0.1, b=0.2, m=10.0), 20.0, 500, (0.1,)),
    "sir8": Preset("sir", {}, 0.5, 480, (35280000.0, 20.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)),
}


def make_params(kind: str, params: dict):
    cls = {"metal": MetalModelParams, "mackey_glass": MackeyGlassParams, "sir": SirParams}[kind]
    known = {f.name for f in fields(cls)}
    unknown = set(params) - known
    if unknown:
        raise ConfigurationError(f"unknown parameters for {kind}: {sorted(unknown)}")
    return cls(**params)


def build_problem(name: str, params: dict | None = None, tau=None, n=None, eta=None) -> DdeProblem:
    """Problem for a catalog model, with optional overrides of its defaults."""
    if name not in CATALOG:
        raise ConfigurationError(f"unknown model {name!r}; choose from {sorted(CATALOG)}")
    preset = CATALOG[name]
    p = make_params(preset.kind, {**copy.deepcopy(preset.params), **(params or {})})
    tau = preset.tau if tau is None else float(tau)
    n = preset.n if n is None else int(n)
    eta = preset.eta if eta is None else eta
    if preset.kind == "metal":
        return DdeProblem(metal_rhs(p), tau, eta, n, name=name)
    if preset.kind == "mackey_glass":
        return DdeProblem(mackey_glass_rhs(p), tau, eta, n, name=name)
    return DdeProblem(sir_rhs(p), tau, eta, n, lags=p.lags, name=name)


def certified_profile(name: str, params: dict | None = None) -> AssumptionProfile | None:
    """Known-valid assumption constants for a catalog model, or None if it has none."""
    preset = CATALOG[name]
    if preset.kind != "metal":
        return None
    return metal_profile(make_params("metal", {**preset.params, **(params or {})}))


def params_dict(p) -> dict:
    out = asdict(p)
    for k, v in out.items():
        if isinstance(v, tuple):
            out[k] = list(v)
    return out
