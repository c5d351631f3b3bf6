"""Sampling probes for the growth, one-sided Lipschitz and Hölder conditions.

Probes estimate and falsify; they never certify.  Points come from a scrambled
Halton sequence over a box, so a given seed always produces the same report.
Consecutive points are paired for the two-point conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .core import AssumptionProfile

MAX_WITNESSES = 50
RTOL = 1e-9


@dataclass(frozen=True)
class SamplingBox:
    """Ranges for time, every state component and every delayed-state component."""

    t: tuple[float, float] = (0.0, 1.0)
    y: tuple[float, float] = (-1.0, 1.0)
    z: tuple[float, float] = (-1.0, 1.0)

    @property
    def empty(self) -> bool:
        return any(hi < lo for lo, hi in (self.t, self.y, self.z))

    def to_dict(self) -> dict:
        return {"t": list(self.t), "y": list(self.y), "z": list(self.z)}

    @classmethod
    def from_dict(cls, data: dict) -> "SamplingBox":
        return cls(**{k: tuple(float(v) for v in data[k]) for k in ("t", "y", "z") if k in data})


@dataclass
class ProbeReport:
    """Envelopes over all samples plus violation witnesses of a declared profile.

    ``H_est`` is the smallest one-sided constant consistent with the samples
    under the same weighting as the check (see :func:`one_sided_ok`): the
    largest weighted ratio if any ratio is positive, else the largest raw one.
    ``L_est`` is the Hölder scale needed with the declared exponents.
    ``exponent_est`` holds local Hölder exponents fitted per argument block.
    """

    K_est: float = -math.inf
    H_pos: float = -math.inf
    H_neg: float = -math.inf
    L_est: float = 0.0
    exponent_est: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    n_violations: int = 0
    samples: int = 0

    @property
    def H_est(self) -> float:
        return self.H_pos if self.H_pos > 0 else self.H_neg

    def merge(self, other: "ProbeReport") -> "ProbeReport":
        """Combine reports over disjoint sample sets (associative)."""
        return ProbeReport(
            K_est=max(self.K_est, other.K_est),
            H_pos=max(self.H_pos, other.H_pos),
            H_neg=max(self.H_neg, other.H_neg),
            L_est=max(self.L_est, other.L_est),
            exponent_est=self.exponent_est or other.exponent_est,
            violations=(self.violations + other.violations)[:MAX_WITNESSES],
            n_violations=self.n_violations + other.n_violations,
            samples=self.samples + other.samples,
        )

    def to_dict(self) -> dict:
        return {
            "K_est": _finite_or_none(self.K_est),
            "H_est": _finite_or_none(self.H_est),
            "L_est": _finite_or_none(self.L_est),
            "exponent_est": self.exponent_est,
            "n_violations": self.n_violations,
            "violations": self.violations,
            "samples": self.samples,
        }


def _finite_or_none(x):
    return float(x) if math.isfinite(x) else None


def _le(lhs: float, rhs: float) -> bool:
    return lhs <= rhs + RTOL * (abs(lhs) + abs(rhs))


def one_sided_ok(inner: float, H: float, znorm: float, dy2: float) -> bool:
    """``<dy, df> <= H w(z) |dy|^2`` with ``w = 1 + |z|`` for ``H >= 0`` and ``w = 1`` otherwise.

    For ``H >= 0`` this is the usual weighted condition.  A negative ``H``
    asks for a contraction rate that holds uniformly in ``z``.
    """
    w = 1.0 + znorm if H >= 0 else 1.0
    return _le(inner, H * w * dy2)


def holder_bracket(profile: AssumptionProfile, t1, y1, z1, t2, y2, z2) -> float:
    """Right-hand side of the Hölder condition with ``L = 1``."""
    ny = 1.0 + np.linalg.norm(y1) + np.linalg.norm(y2)
    nz = 1.0 + np.linalg.norm(z1) + np.linalg.norm(z2)
    dy = np.linalg.norm(y1 - y2)
    dz = np.linalg.norm(z1 - z2)
    return (
        ny * nz * abs(t1 - t2) ** profile.alpha
        + nz * sum(dy**b for b in profile.betas)
        + ny * sum(dz**g for g in profile.gammas)
    )


def _points(box: SamplingBox, d: int, q: int, count: int, seed: int) -> np.ndarray:
    dim = 1 + d + d * q
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    u = sampler.random(count)
    lo = np.array([box.t[0]] + [box.y[0]] * d + [box.z[0]] * d * q)
    hi = np.array([box.t[1]] + [box.y[1]] * d + [box.z[1]] * d * q)
    return lo + u * (hi - lo)


def _split(point: np.ndarray, d: int, q: int):
    t = float(point[0])
    y = point[1 : 1 + d]
    zs = [point[1 + d + i * d : 1 + d + (i + 1) * d] for i in range(q)]
    return t, y, zs


def _witness(cond: str, lhs: float, rhs: float, *args) -> dict:
    return {"condition": cond, "lhs": float(lhs), "rhs": float(rhs), "at": [np.asarray(a).tolist() for a in args]}


def probe_assumptions(
    rhs,
    declared: AssumptionProfile,
    box: SamplingBox,
    samples: int,
    seed: int = 0,
    n_lags: int = 1,
    chunks: int = 1,
) -> ProbeReport:
    """Check the declared constants on ``samples`` point pairs drawn from ``box``.

    Every pair ``(p, p')`` contributes the growth check at ``p``, the
    one-sided check for ``y`` vs ``y'`` at ``p``'s time and delayed state, and
    the Hölder check between ``p`` and ``p'``.  ``chunks`` splits the work
    into independent reports that are merged; the result does not depend on it.
    """
    if box.empty or samples < 1:
        return ProbeReport()
    d = rhs.d
    pts = _points(box, d, n_lags, 2 * samples, seed)
    bounds = np.linspace(0, samples, chunks + 1).astype(int)
    report = ProbeReport()
    for a, b in zip(bounds, bounds[1:]):
        report = report.merge(_probe_pairs(rhs, declared, pts[2 * a : 2 * b], d, n_lags))
    report.exponent_est = estimate_exponents(rhs, box, d, n_lags, seed)
    return report


def _probe_pairs(rhs, declared, pts, d, q) -> ProbeReport:
    rep = ProbeReport()
    witnesses = []
    nviol = 0
    for i in range(0, len(pts), 2):
        t1, y1, z1s = _split(pts[i], d, q)
        t2, y2, z2s = _split(pts[i + 1], d, q)
        z1 = np.concatenate(z1s)
        z2 = np.concatenate(z2s)
        f1 = np.asarray(rhs(t1, y1, z1s), dtype=float)
        f2 = np.asarray(rhs(t2, y2, z2s), dtype=float)
        ny1, nz1 = np.linalg.norm(y1), np.linalg.norm(z1)

        # growth
        lhs = np.linalg.norm(f1)
        weight = (1.0 + ny1) * (1.0 + nz1)
        rep.K_est = max(rep.K_est, lhs / weight)
        if not _le(lhs, declared.K * weight):
            nviol += 1
            witnesses.append(_witness("growth", lhs, declared.K * weight, t1, y1, z1))

        # one-sided, at (t1, z1)
        f2s = np.asarray(rhs(t1, y2, z1s), dtype=float)
        dy = y1 - y2
        dy2 = float(dy @ dy)
        if dy2 > 0:
            inner = float(dy @ (f1 - f2s))
            ratio = inner / dy2
            if ratio > 0:
                rep.H_pos = max(rep.H_pos, ratio / (1.0 + nz1))
            else:
                rep.H_neg = max(rep.H_neg, ratio)
            if not one_sided_ok(inner, declared.H, nz1, dy2):
                nviol += 1
                w = 1.0 + nz1 if declared.H >= 0 else 1.0
                witnesses.append(_witness("one_sided", inner, declared.H * w * dy2, t1, y1, y2, z1))

        # Hölder, between the two points
        lhs = np.linalg.norm(f1 - f2)
        bracket = holder_bracket(declared, t1, y1, z1, t2, y2, z2)
        if bracket > 0:
            rep.L_est = max(rep.L_est, lhs / bracket)
        if not _le(lhs, declared.L * bracket):
            nviol += 1
            witnesses.append(_witness("holder", lhs, declared.L * bracket, t1, y1, z1, t2, y2, z2))
        rep.samples += 1

    rep.n_violations = nviol
    rep.violations = witnesses[:MAX_WITNESSES]
    return rep


def estimate_exponents(rhs, box: SamplingBox, d: int, q: int, seed: int, n_base: int = 64) -> dict:
    """Local Hölder exponents of ``rhs`` in ``t``, ``y`` and the delayed state.

    At every base point the increment for offsets ``delta = 2^-k`` is fitted
    in log-log; the smallest slope over base points is reported, clipped to
    ``(0, 1]``.  Base points are Halton points plus copies projected onto the
    zero of the probed block, where power-type terms are least regular.
    Returns ``None`` for a block in which the function does not vary.
    """
    halton = _points(box, d, q, n_base, seed + 1)
    deltas = 2.0 ** -np.arange(4, 16)
    logd = np.log(deltas)
    blocks = {"alpha": [0], "beta": list(range(1, 1 + d)), "gamma": list(range(1 + d, 1 + d + d * q))}
    zero = np.array([box.t[0]] + [np.clip(0.0, *box.y)] * d + [np.clip(0.0, *box.z)] * d * q)
    out = {}
    for name, cols in blocks.items():
        projected = halton.copy()
        projected[:, cols] = zero[cols]
        slopes = []
        for p in np.vstack([halton, projected]):
            t, y, zs = _split(p, d, q)
            f0 = np.asarray(rhs(t, y, zs), dtype=float)
            incs = np.empty(len(deltas))
            for i, delta in enumerate(deltas):
                shifted = p.copy()
                shifted[cols] += delta
                incs[i] = np.linalg.norm(np.asarray(rhs(*_split(shifted, d, q)), dtype=float) - f0)
            if np.all(incs > 0) and np.all(np.isfinite(incs)):
                slopes.append(np.polyfit(logd, np.log(incs), 1)[0])
        out[name] = float(min(max(min(slopes), 1e-3), 1.0)) if slopes else None
    return out
