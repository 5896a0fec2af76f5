"""Coarse-grid-plus-refinement minimization and Pareto filtering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .model import InfeasibleError, ModelError

__all__ = ["Axis", "GridSpec", "grid_refine", "pareto_filter", "pareto_mask"]


class NonFiniteObjective(ModelError):
    pass


@dataclass(frozen=True)
class Axis:
    lower: float
    upper: float
    count: int = 64

    def __post_init__(self) -> None:
        if not self.lower <= self.upper:
            raise ModelError(f"axis lower {self.lower} > upper {self.upper}")
        if self.count < 2:
            raise ModelError("axis count must be >= 2")


@dataclass(frozen=True)
class GridSpec:
    """Search box plus refinement schedule.

    Each refinement round re-grids a box centred on the incumbent whose
    width is the previous width times ``shrink``; iteration stops after
    ``rounds`` rounds or once a round improves the objective by less than
    ``tolerance``.
    """

    axes: tuple[Axis, ...]
    rounds: int = 6
    shrink: float = 0.2
    tolerance: float = 1e-10

    def __post_init__(self) -> None:
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 3:
            raise ModelError("grid_refine supports 1 to 3 axes")
        if not self.tolerance > 0:
            raise ModelError("tolerance must be positive")
        if not 0 < self.shrink < 1:
            raise ModelError("shrink must lie in (0, 1)")
        if self.rounds < 0:
            raise ModelError("rounds must be >= 0")

    @classmethod
    def box(cls, bounds: Sequence[tuple[float, float]], count: int = 64, **kw: Any) -> "GridSpec":
        return cls(axes=tuple(Axis(lo, hi, count) for lo, hi in bounds), **kw)


def _mesh(lows, highs, counts) -> np.ndarray:
    axes = [np.linspace(lo, hi, c) if hi > lo else np.array([lo]) for lo, hi, c in zip(lows, highs, counts)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _best_index(values: np.ndarray, points: np.ndarray, feasible: np.ndarray) -> Optional[int]:
    idx = np.flatnonzero(feasible)
    if idx.size == 0:
        return None
    v = values[idx]
    ties = idx[v == v.min()]
    if ties.size == 1:
        return int(ties[0])
    # lexicographically smallest coordinates; lexsort keys are last-primary
    order = np.lexsort(points[ties].T[::-1])
    return int(ties[order[0]])


def grid_refine(objective: Callable, grid: GridSpec, *, vectorized: bool = False,
                constraint: Optional[Callable] = None,
                inf_is_infeasible: bool = False) -> tuple[np.ndarray, float]:
    """Minimize ``objective`` over the box of ``grid``.

    Parameters
    ----------
    objective : callable
        With ``vectorized=False`` it maps a coordinate vector of shape ``(k,)``
        to a float. With ``vectorized=True`` it maps an ``(m, k)`` array of
        points to ``m`` values.
    grid : GridSpec
    constraint : callable, optional
        Same calling convention as ``objective``, returning truthy for feasible
        points. Infeasible points are never selected.
    inf_is_infeasible : bool
        Treat ``+inf`` objective values as infeasible points instead of
        aborting. NaN always aborts.

    Returns
    -------
    (argmin, value)
        Ties are broken towards the lexicographically smallest coordinates.
    """

    def evaluate(fn, pts, dtype):
        if vectorized:
            return np.asarray(fn(pts), dtype=dtype).reshape(len(pts))
        return np.array([fn(pt) for pt in pts], dtype=dtype)

    lows = np.array([a.lower for a in grid.axes], dtype=float)
    highs = np.array([a.upper for a in grid.axes], dtype=float)
    counts = [a.count for a in grid.axes]

    def search(lo, hi, incumbent=None):
        pts = _mesh(lo, hi, counts)
        if incumbent is not None:
            pts = np.vstack([pts, incumbent])
        feas = evaluate(constraint, pts, bool) if constraint is not None else np.ones(len(pts), dtype=bool)
        vals = np.full(len(pts), np.inf)
        if feas.any():
            vals[feas] = evaluate(objective, pts[feas], float)
            if inf_is_infeasible:
                feas = feas & (vals != np.inf)
            bad = feas & ~np.isfinite(vals)
            if bad.any():
                raise NonFiniteObjective(f"objective is not finite at {pts[np.flatnonzero(bad)[0]].tolist()}")
        i = _best_index(vals, pts, feas)
        return (None, np.inf) if i is None else (pts[i], float(vals[i]))

    best_x, best_v = search(lows, highs)
    if best_x is None:
        raise InfeasibleError("no feasible point on the coarse grid")
    width = highs - lows
    for _ in range(grid.rounds):
        width = width * grid.shrink
        lo = np.clip(best_x - width / 2, lows, highs)
        hi = np.clip(best_x + width / 2, lows, highs)
        x, v = search(lo, hi, incumbent=best_x)
        improvement = best_v - v
        if x is not None and v <= best_v:
            best_x, best_v = x, v
        if improvement < grid.tolerance:
            break
    return best_x, best_v


def pareto_mask(d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    """Boolean mask of points not dominated by any other point (both minimized).

    ``q`` dominates ``p`` when ``q1 <= p1`` and ``q2 <= p2`` with at least one
    strict inequality; exact duplicates do not dominate each other.
    """
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    n = d1.size
    keep = np.zeros(n, dtype=bool)
    if n == 0:
        return keep
    order = np.lexsort((d2, d1))
    running = np.inf  # min d2 over strictly smaller d1
    i = 0
    while i < n:
        j = i
        x = d1[order[i]]
        while j < n and d1[order[j]] == x:
            j += 1
        group = order[i:j]
        gmin = d2[group[0]]
        if gmin < running:
            keep[group[d2[group] == gmin]] = True
            running = gmin
        i = j
    return keep


def pareto_filter(points: Sequence[tuple]) -> list[tuple]:
    """Keep the Pareto-minimal ``(d1, d2, *payload)`` tuples, ordered by d1.

    Ordering is stable: points with equal d1 keep their input order.
    """
    points = list(points)
    if not points:
        return []
    d1 = np.array([p[0] for p in points], dtype=float)
    d2 = np.array([p[1] for p in points], dtype=float)
    if not (np.isfinite(d1).all() and np.isfinite(d2).all()):
        raise ModelError("pareto_filter requires finite coordinates")
    keep = np.flatnonzero(pareto_mask(d1, d2))
    keep = keep[np.argsort(d1[keep], kind="stable")]
    return [points[i] for i in keep]
