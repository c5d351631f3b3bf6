"""A-priori constants: solution bounds, Euler trajectory bounds and the
theoretical convergence exponents.

All bounds grow like towers of exponentials in the horizon and overflow to
``inf`` quickly; ``inf`` means "no finite certificate", not an error.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import AssumptionProfile, PreconditionError


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _check(K: float, tau: float, n: int) -> None:
    if not K > 0:
        raise PreconditionError(f"K must be positive, got {K}")
    if not tau > 0:
        raise PreconditionError(f"tau must be positive, got {tau}")
    if n < 0:
        raise PreconditionError(f"n must be nonnegative, got {n}")


@dataclass(frozen=True)
class SolutionBounds:
    K_minus1: float
    K_list: tuple[float, ...]
    Kbar_list: tuple[float, ...]


def analytic_solution_bounds(profile: AssumptionProfile, eta, tau: float, n: int) -> SolutionBounds:
    """Per-window sup bounds ``K_j`` and Lipschitz constants ``Kbar_j`` of the exact solution.

    ``K_0 = (|eta| + K(1+|eta|) tau) exp(K(1+|eta|) tau)``,
    ``K_{j+1} = (K_j + K(1+K_j) tau) exp(K(1+K_j) tau)`` and
    ``Kbar_j = K (1+K_{j-1}) (1+K_j)`` with ``K_{-1} = |eta|``.
    """
    K = profile.K
    _check(K, tau, n)
    eta_norm = float(np.linalg.norm(np.atleast_1d(eta)))
    Ks = []
    prev = eta_norm
    for _ in range(n + 1):
        growth = K * (1.0 + prev) * tau
        prev = (prev + growth) * _exp(growth)
        Ks.append(prev)
    Kbar = []
    before = eta_norm
    for Kj in Ks:
        Kbar.append(K * (1.0 + before) * (1.0 + Kj))
        before = Kj
    return SolutionBounds(eta_norm, tuple(Ks), tuple(Kbar))


def euler_trajectory_bound(profile: AssumptionProfile, eta, tau: float, n: int) -> list[float]:
    """Bounds ``Ktilde_j`` on the Euler iterates in window ``j``, valid for every N.

    Seed ``Ktilde_0 = exp(K(1+|eta|) tau) (1+|eta|)``; then
    ``Ktilde_{j+1} = exp(tau K (1+Ktilde_j)) (Ktilde_j + 1) - 1``.
    """
    K = profile.K
    _check(K, tau, n)
    eta_norm = float(np.linalg.norm(np.atleast_1d(eta)))
    out = [_exp(K * (1.0 + eta_norm) * tau) * (1.0 + eta_norm)]
    for _ in range(n):
        prev = out[-1]
        out.append(_exp(tau * K * (1.0 + prev)) * (prev + 1.0) - 1.0)
    return out


@dataclass(frozen=True)
class RateExponents:
    """Exponents of ``h`` in the error bound of window ``j``.

    ``dominant`` is the smallest exponent, i.e. the guaranteed order.
    ``extrapolated`` marks profiles with more than one delayed-state exponent,
    where the smallest gamma is used in the cascade.
    """

    dominant: float
    terms: tuple[float, ...]
    extrapolated: bool = False


def theoretical_rate(profile: AssumptionProfile, j: int) -> RateExponents:
    r"""Exponent set of the window-``j`` error bound.

    Window 0 gives ``{alpha ^ gamma, beta_i}``.  For ``j >= 1`` the set is the
    union over ``l = 1..j`` of
    ``{gamma^(l-1)/2, gamma^l (alpha ^ gamma), beta_i gamma^l}``.
    """
    if j < 0:
        raise PreconditionError(f"window index must be nonnegative, got {j}")
    gamma = min(profile.gammas)
    a = min(profile.alpha, gamma)
    if j == 0:
        terms = [a, *profile.betas]
    else:
        terms = []
        for l in range(1, j + 1):
            g = gamma**l
            terms.append(0.5 * gamma ** (l - 1))
            terms.append(g * a)
            terms.extend(b * g for b in profile.betas)
    return RateExponents(min(terms), tuple(terms), extrapolated=not profile.canonical)


def rate_per_segment(profile: AssumptionProfile, n: int) -> list[float]:
    return [theoretical_rate(profile, j).dominant for j in range(n + 1)]


def bounds_report(profile: AssumptionProfile, eta, tau: float, n: int) -> dict:
    """JSON-ready summary of every bound for windows ``0..n``."""
    sb = analytic_solution_bounds(profile, eta, tau, n)
    return {
        "K": list(sb.K_list),
        "Kbar": list(sb.Kbar_list),
        "Ktilde": euler_trajectory_bound(profile, eta, tau, n),
        "rate_per_segment": rate_per_segment(profile, n),
        "rate_extrapolated": not profile.canonical,
    }


def dumps_report(report: dict) -> str:
    # inf bounds are written as JSON Infinity
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
