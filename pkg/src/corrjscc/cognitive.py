"""Distortion region of the generalized cognitive radio channel.

The primary user sends its source uncoded, ``X1 = sqrt(P1/sigma_v1_2) * V1``.
The secondary user, which knows V1, treats ``S = h1*X1`` as known
interference and uses the HDA scheme with analog part
``sqrt(a)*(gamma*V2 + (1-gamma)*S)``. The primary receiver estimates V1
linearly from ``Y1 = X1 + h2*X2 + Z1``.

Outer bounds map rate pairs in the capacity region (known in closed form for
the weak and very-strong interference regimes) to distortions through
``D = sigma^2 * 2**(-2R)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.optimize.elementwise import find_minimum, find_root

from .estimators import effective_interference_kernel, hda_kernel
from .model import (Allocation, ChannelSpec, CognitiveConfig, InfeasibleError, RegimeError, SourceModel,
                    ValidationError)
from .optimizer import Axis, GridSpec, grid_refine, pareto_mask
from .schemes import hda_distortion

__all__ = [
    "Regime",
    "FrontierPoint",
    "RegionFrontier",
    "CoexistenceResult",
    "classify_regime",
    "secondary_model",
    "primary_distortion",
    "secondary_distortion",
    "weak_capacity_bound",
    "very_strong_capacity_bound",
    "outer_region",
    "outer_d2_given_d1",
    "inner_region",
    "frontier_gap",
    "coexistence",
]

RATE_TOL = 1e-12


class Regime(str, enum.Enum):
    WEAK = "weak"
    VERY_STRONG = "very-strong"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FrontierPoint:
    d1: float
    d2: float
    gamma: float = math.nan
    pa: float = math.nan
    rho_x: float = math.nan


@dataclass(frozen=True)
class RegionFrontier:
    points: tuple[FrontierPoint, ...]
    kind: str  # "inner" | "outer"

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if self.kind not in ("inner", "outer"):
            raise ValidationError(f"unknown frontier kind {self.kind!r}")
        d1, d2 = self.arrays()
        if not pareto_mask(d1, d2).all():
            raise ValidationError("frontier contains dominated points")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([p.d1 for p in self.points]), np.array([p.d2 for p in self.points]))

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CoexistenceResult:
    outer: float
    achievable: float
    allocation: Allocation
    rho_x: float
    d1_target: float
    d1_achieved: float


def _frontier(points: list[FrontierPoint], kind: str) -> RegionFrontier:
    if not points:
        return RegionFrontier((), kind)
    d1 = np.array([p.d1 for p in points])
    d2 = np.array([p.d2 for p in points])
    keep = np.flatnonzero(pareto_mask(d1, d2))
    keep = keep[np.lexsort((d2[keep], d1[keep]))]
    return RegionFrontier(tuple(points[i] for i in keep), kind)


# -- regimes and capacity bounds ------------------------------------------------

def classify_regime(cfg: CognitiveConfig) -> Regime:
    if abs(cfg.h2) <= 1.0:
        return Regime.WEAK
    r = math.sqrt(cfg.p1 / cfg.p2)
    if (abs(cfg.h2) >= 1.0
            and abs(cfg.h1 * r + 1.0) >= abs(r + cfg.h2)
            and abs(cfg.h1 * r - 1.0) >= abs(r - cfg.h2)):
        return Regime.VERY_STRONG
    return Regime.OTHER


def _require_regime(cfg: CognitiveConfig, *allowed: Regime) -> Regime:
    regime = classify_regime(cfg)
    if regime not in allowed:
        raise RegimeError(f"configuration is in the {regime} regime; need one of "
                          + ", ".join(str(a) for a in allowed))
    return regime


def _check_rho_x(rho_x) -> None:
    if np.any(np.asarray(rho_x) < 0) or np.any(np.asarray(rho_x) > 1):
        raise ValidationError("rho_x must lie in [0, 1]")


def _weak_rates(cfg: CognitiveConfig, rho_x):
    rho_x = np.asarray(rho_x, dtype=float)
    relay = (1.0 + cfg.h2 * rho_x * math.sqrt(cfg.p2 / cfg.p1)) ** 2
    r1 = 0.5 * np.log2(1.0 + cfg.p1 * relay / (cfg.n1 + (1.0 - rho_x**2) * cfg.h2**2 * cfg.p2))
    r2 = 0.5 * np.log2(1.0 + (1.0 - rho_x**2) * cfg.p2 / cfg.n2)
    return r1, r2


def _very_strong_rates(cfg: CognitiveConfig, rho_x):
    rho_x = np.asarray(rho_x, dtype=float)
    r2 = 0.5 * np.log2(1.0 + (1.0 - rho_x**2) * cfg.p2 / cfg.n2)
    total = cfg.p1 + cfg.h2**2 * cfg.p2 + 2.0 * rho_x * cfg.h2 * math.sqrt(cfg.p1 * cfg.p2)
    rsum = 0.5 * np.log2(1.0 + total / cfg.n1)
    return r2, rsum


def weak_capacity_bound(cfg: CognitiveConfig, rho_x: float) -> tuple[float, float]:
    """``(R1_max, R2_max)`` in bits; the region for fixed ``rho_x`` is a rectangle."""
    _require_regime(cfg, Regime.WEAK)
    _check_rho_x(rho_x)
    r1, r2 = _weak_rates(cfg, rho_x)
    return float(r1), float(r2)


def very_strong_capacity_bound(cfg: CognitiveConfig, rho_x: float) -> tuple[float, float]:
    """``(R2_max, Rsum_max)`` in bits."""
    _require_regime(cfg, Regime.VERY_STRONG)
    _check_rho_x(rho_x)
    r2, rsum = _very_strong_rates(cfg, rho_x)
    return float(r2), float(rsum)


def _d_from_rate(sigma2: float, rate):
    return sigma2 * np.power(2.0, -2.0 * np.asarray(rate, dtype=float))


# -- outer region ---------------------------------------------------------------

def outer_region(cfg: CognitiveConfig, rho_x_points: int = 256, split_points: int = 256) -> RegionFrontier:
    """Pareto-minimal outer bound on the (D1, D2) region.

    In the very-strong regime each ``rho_x`` contributes ``split_points``
    rate pairs along the sum-rate face.
    """
    regime = _require_regime(cfg, Regime.WEAK, Regime.VERY_STRONG)
    rx = np.linspace(0.0, 1.0, rho_x_points)
    s1, s2 = cfg.sigma_v1_2, cfg.sigma_v2_2 * (1.0 - cfg.rho**2)
    pts: list[FrontierPoint] = []
    if regime is Regime.WEAK:
        r1, r2 = _weak_rates(cfg, rx)
        for x, a, b in zip(rx, _d_from_rate(s1, r1), _d_from_rate(s2, r2)):
            pts.append(FrontierPoint(float(a), float(b), rho_x=float(x)))
    else:
        r2max, rsum = _very_strong_rates(cfg, rx)
        frac = np.linspace(0.0, 1.0, split_points)
        for x, r2m, rs in zip(rx, r2max, rsum):
            r2 = frac * min(r2m, rs)
            r1 = rs - r2
            for a, b in zip(_d_from_rate(s1, r1), _d_from_rate(s2, r2)):
                pts.append(FrontierPoint(float(a), float(b), rho_x=float(x)))
    return _frontier(pts, "outer")


def outer_d2_given_d1(cfg: CognitiveConfig, d1_max: float) -> tuple[float, float]:
    """Smallest outer-bound D2 over rate pairs whose D1 is at most ``d1_max``.

    Returns ``(d2, rho_x)``; ``d2`` is ``inf`` when no rate pair in the
    capacity region reaches ``d1_max``.
    """
    regime = _require_regime(cfg, Regime.WEAK, Regime.VERY_STRONG)
    if d1_max >= cfg.sigma_v1_2:
        target = 0.0
    else:
        target = 0.5 * math.log2(cfg.sigma_v1_2 / d1_max)
    s2 = cfg.sigma_v2_2 * (1.0 - cfg.rho**2)
    rx = np.linspace(0.0, 1.0, 4097)

    if regime is Regime.WEAK:
        # R2 falls with rho_x, so the smallest rho_x reaching the R1 target wins.
        r1, _ = _weak_rates(cfg, rx)
        ok = r1 >= target - RATE_TOL
        if not ok.any():
            return math.inf, math.nan
        i = int(np.argmax(ok))
        if i == 0:
            x = 0.0
        else:
            fn = lambda t: float(_weak_rates(cfg, t)[0]) - target
            x = brentq(fn, rx[i - 1], rx[i], xtol=1e-15) if fn(rx[i]) > 0 else rx[i]
        r2 = float(_weak_rates(cfg, x)[1])
        return float(_d_from_rate(s2, r2)), float(x)

    def best_r2(t):
        r2m, rs = _very_strong_rates(cfg, t)
        return np.minimum(r2m, rs - target)

    def crossing(t):
        r2m, rs = _very_strong_rates(cfg, t)
        return float(r2m - (rs - target))

    # The optimum sits on the grid maximum or where the two rate limits cross.
    g = best_r2(rx)
    i = int(np.argmax(g))
    cands = [(float(g[i]), float(rx[i]))]
    for j in (i - 1, i):
        if 0 <= j < rx.size - 1:
            a, b = crossing(rx[j]), crossing(rx[j + 1])
            if a * b < 0:
                x = brentq(crossing, rx[j], rx[j + 1], xtol=1e-15)
                cands.append((float(best_r2(x)), float(x)))
    r2, x = max(cands, key=lambda c: (c[0], -c[1]))
    if r2 < -RATE_TOL:
        return math.inf, math.nan
    return float(_d_from_rate(s2, max(r2, 0.0))), x


# -- proposed scheme ------------------------------------------------------------

def secondary_model(cfg: CognitiveConfig) -> SourceModel:
    """Source/interference description seen by the secondary encoder."""
    if cfg.h1 == 0.0:
        raise ValidationError("h1 must be nonzero: the secondary user sees no interference to exploit")
    return SourceModel(cfg.sigma_v2_2, cfg.h1**2 * cfg.p1, cfg.rho * math.copysign(1.0, cfg.h1))


def _primary_kernel(cfg: CognitiveConfig, gamma, pa):
    gamma = np.asarray(gamma, dtype=float)
    pa = np.asarray(pa, dtype=float)
    m = secondary_model(cfg)
    _, a, _, _ = effective_interference_kernel(m.sigma_v2, m.sigma_s2, m.rho, gamma, pa)
    ra = np.sqrt(a)
    p_h = cfg.p2 - pa
    c1 = 1.0 + (1.0 - gamma) * ra * cfg.h1 * cfg.h2
    sv1, sv2 = math.sqrt(cfg.sigma_v1_2), math.sqrt(cfg.sigma_v2_2)
    e_vy = c1 * math.sqrt(cfg.p1) * sv1 + cfg.h2 * ra * gamma * cfg.rho * sv1 * sv2
    e_y2 = (c1**2 * cfg.p1 + a * cfg.h2**2 * gamma**2 * cfg.sigma_v2_2 + cfg.h2**2 * p_h
            + 2.0 * ra * cfg.h2 * gamma * cfg.rho * math.sqrt(cfg.p1) * sv2 * c1 + cfg.n1)
    return cfg.sigma_v1_2 - e_vy**2 / e_y2


def _secondary_kernel(cfg: CognitiveConfig, gamma, pa):
    m = secondary_model(cfg)
    return hda_kernel(m.sigma_v2, m.sigma_s2, m.rho, cfg.p2, cfg.n2, gamma, pa)


def _check_alloc(cfg: CognitiveConfig, alloc: Allocation) -> None:
    if alloc.pa > cfg.p2:
        raise ValidationError("pa exceeds power budget")


def primary_distortion(cfg: CognitiveConfig, alloc: Allocation) -> float:
    """MSE of the primary receiver's linear estimate of V1 from Y1."""
    _check_alloc(cfg, alloc)
    return float(_primary_kernel(cfg, alloc.gamma, alloc.pa))


def secondary_distortion(cfg: CognitiveConfig, alloc: Allocation) -> float:
    _check_alloc(cfg, alloc)
    return hda_distortion(secondary_model(cfg), ChannelSpec(cfg.p2, cfg.n2), alloc)


def _line_min_d2(cfg: CognitiveConfig, gamma: np.ndarray, d1_max: float, count: int = 65) -> tuple[np.ndarray, np.ndarray]:
    """For each gamma, minimize D2 over pa subject to D1 <= d1_max.

    The pa axis is sampled, sign changes of the constraint are solved for the
    boundary, and interior local minima of D2 are polished by a bracketed
    scalar minimization; both run elementwise over all gammas at once. Returns ``(d2, pa)`` per gamma, with ``d2 = inf`` where no pa is
    feasible.
    """
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    pa = np.linspace(0.0, cfg.p2, count)
    G, PA = np.meshgrid(gamma, pa, indexing="ij")
    feas = _primary_kernel(cfg, G, PA) <= d1_max
    D2 = np.where(feas, _secondary_kernel(cfg, G, PA), np.inf)
    cand_g = [np.arange(gamma.size)]
    k = np.argmin(D2, axis=1)
    cand_pa = [pa[k]]
    cand_d2 = [D2[np.arange(gamma.size), k]]

    # constraint boundary crossings, kept on the feasible side of the bracket
    gi, ki = np.nonzero(feas[:, :-1] != feas[:, 1:])
    if gi.size:
        g = gamma[gi]
        res = find_root(lambda x, gg: _primary_kernel(cfg, gg, x) - d1_max, (pa[ki], pa[ki + 1]),
                        args=(g,), tolerances=dict(xatol=1e-15, xrtol=1e-15))
        lo, hi = np.minimum(res.bracket[0], res.bracket[1]), np.maximum(res.bracket[0], res.bracket[1])
        x = np.where(_primary_kernel(cfg, g, lo) <= d1_max, lo, hi)
        x = np.where(_primary_kernel(cfg, g, res.x) <= d1_max, res.x, x)
        ok = _primary_kernel(cfg, g, x) <= d1_max
        cand_g.append(gi[ok])
        cand_pa.append(x[ok])
        cand_d2.append(_secondary_kernel(cfg, g[ok], x[ok]))

    # interior local minima among feasible samples
    inner = D2[:, 1:-1]
    gi, ki = np.nonzero(np.isfinite(inner) & np.isfinite(D2[:, :-2]) & np.isfinite(D2[:, 2:])
                        & (inner <= D2[:, :-2]) & (inner <= D2[:, 2:]))
    if gi.size:
        g = gamma[gi]
        res = find_minimum(lambda x, gg: _secondary_kernel(cfg, gg, x), (pa[ki], pa[ki + 1], pa[ki + 2]),
                           args=(g,), tolerances=dict(xatol=1e-14, xrtol=1e-14))
        x = res.x
        ok = _primary_kernel(cfg, g, x) <= d1_max
        cand_g.append(gi[ok])
        cand_pa.append(x[ok])
        cand_d2.append(_secondary_kernel(cfg, g[ok], x[ok]))

    cg, cp, cd = (np.concatenate(v) for v in (cand_g, cand_pa, cand_d2))
    best = np.full(gamma.size, np.inf)
    best_pa = np.full(gamma.size, np.nan)
    order = np.lexsort((cp, cd))  # ties towards small pa
    for i in order[::-1]:
        best[cg[i]] = cd[i]
        best_pa[cg[i]] = cp[i]
    return best, best_pa


def _constrained_min_d2(cfg: CognitiveConfig, d1_max: float, count: int = 33,
                        rounds: int = 16) -> tuple[np.ndarray, float]:
    """Minimize D2 subject to D1 <= d1_max; returns ``([pa, gamma], d2)``."""
    grid = GridSpec(axes=(Axis(0.0, 1.0, count),), rounds=rounds, shrink=0.25, tolerance=1e-15)
    x, d2 = grid_refine(lambda g: _line_min_d2(cfg, g[:, 0], d1_max)[0], grid,
                        vectorized=True, inf_is_infeasible=True)
    _, pa = _line_min_d2(cfg, x, d1_max)
    return np.array([float(pa[0]), float(x[0])]), d2


def inner_region(cfg: CognitiveConfig, grid_points: int = 64, refine: bool = True,
                 thresholds: int = 64) -> RegionFrontier:
    """Pareto frontier of (D1, D2) achieved over ``gamma in [0,1]``, ``pa in [0,P2]``.

    A ``grid_points`` x ``grid_points`` grid fixes the range of D1 values.
    With ``refine``, ``thresholds`` evenly spaced D1 limits across that range
    are imposed in turn and D2 is minimized subject to each, which places every
    frontier point on the continuous optimum. Without it the grid's own
    staircase frontier is returned.
    """
    pa = np.linspace(0.0, cfg.p2, grid_points)
    gm = np.linspace(0.0, 1.0, grid_points)
    PA, GM = np.meshgrid(pa, gm, indexing="ij")
    D1 = _primary_kernel(cfg, GM, PA).ravel()
    D2 = _secondary_kernel(cfg, GM, PA).ravel()
    pts = [FrontierPoint(float(a), float(b), float(g), float(p))
           for a, b, g, p in zip(D1, D2, GM.ravel(), PA.ravel())]
    raw = _frontier(pts, "inner")
    if not refine or len(raw) <= 1:
        return raw
    d1_lo, d1_hi = raw.points[0].d1, raw.points[-1].d1
    refined = []
    for t in np.linspace(d1_lo, d1_hi, thresholds):
        x, d2 = _constrained_min_d2(cfg, float(t))
        a, g = float(x[0]), float(x[1])
        refined.append(FrontierPoint(float(_primary_kernel(cfg, g, a)), d2, g, a))
    return _frontier(refined, "inner")


def frontier_gap(inner: RegionFrontier, cfg: CognitiveConfig) -> np.ndarray:
    """Vertical distance from each inner point down to the outer bound at the same D1."""
    return np.array([p.d2 - outer_d2_given_d1(cfg, p.d1)[0] for p in inner.points])


def coexistence(cfg: CognitiveConfig, grid_points: int = 64, rounds: int = 14) -> CoexistenceResult:
    """Secondary distortion when the primary must do as well as without interference.

    The primary constraint is ``D1 <= sigma_v1_2 / (1 + P1/N1)``. The outer
    value optimizes over the capacity region; the achievable value optimizes
    the proposed scheme over ``(gamma, pa)``.
    """
    _require_regime(cfg, Regime.WEAK, Regime.VERY_STRONG)
    target = cfg.sigma_v1_2 / (1.0 + cfg.p1 / cfg.n1)
    outer, rho_x = outer_d2_given_d1(cfg, target)
    try:
        x, d2 = _constrained_min_d2(cfg, target, count=grid_points, rounds=rounds)
    except InfeasibleError as exc:
        raise InfeasibleError(f"no allocation on the grid keeps D1 <= {target:.6g}") from exc
    alloc = Allocation(float(x[1]), float(x[0]))
    return CoexistenceResult(outer=outer, achievable=d2, allocation=alloc, rho_x=rho_x,
                             d1_target=target, d1_achieved=float(_primary_kernel(cfg, alloc.gamma, alloc.pa)))
