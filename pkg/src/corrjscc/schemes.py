"""Achievable distortion of the four transmission schemes and their optimization
over the analog mixing coefficient and power split."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .estimators import analog_params, d_star_kernel, hda_coefficients, hda_kernel, moment_set
from .model import Allocation, ChannelSpec, DistortionPoint, Scheme, SourceModel, validate
from .optimizer import Axis, GridSpec, grid_refine

log = logging.getLogger(__name__)

__all__ = [
    "SchemeResult",
    "uncoded_distortion",
    "naive_dpc_distortion",
    "digital_dpc_distortion",
    "hda_distortion",
    "scheme_distortion",
    "optimize_scheme",
    "default_grid",
]


@dataclass(frozen=True)
class SchemeResult:
    scheme: Scheme
    best: DistortionPoint
    grid: Optional[list[DistortionPoint]] = None
    # best value restricted to gamma == 1, and whether it matches the overall best
    gamma_one_best: Optional[DistortionPoint] = None
    gamma_one_optimal: Optional[bool] = None
    notes: list[str] = field(default_factory=list)


def uncoded_distortion(model: SourceModel, channel: ChannelSpec) -> float:
    """Scaled source sent at full power; the interference is left untouched."""
    return analog_params(model, channel, Allocation(gamma=1.0, pa=channel.p)).d_star


def naive_dpc_distortion(model: SourceModel, channel: ChannelSpec) -> float:
    """Optimal quantizer plus Costa coding, treating S as independent interference."""
    return model.sigma_v2 / (1.0 + channel.p / channel.n_design)


def digital_dpc_distortion(model: SourceModel, channel: ChannelSpec, alloc: Allocation) -> float:
    d_star = analog_params(model, channel, alloc).d_star
    return d_star / (1.0 + (channel.p - alloc.pa) / channel.n_design)


def hda_distortion(model: SourceModel, channel: ChannelSpec, alloc: Allocation) -> float:
    """MSE of the joint linear estimate of V from the HDA codeword U and Y.

    Uses the design noise throughout; see :mod:`corrjscc.mismatch` for the
    mismatched receiver.
    """
    ch = channel.design()
    ap = analog_params(model, ch, alloc)
    coeffs = hda_coefficients(model, ch, alloc, ap.d_star)
    if coeffs.p_h == 0.0:
        return ap.d_star
    m = moment_set(model, ch, alloc, coeffs)
    g = m.gamma_vec()
    return model.sigma_v2 - float(g @ np.linalg.solve(m.lambda_uy(), g))


def scheme_distortion(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                      scheme: Scheme | str) -> float:
    scheme = Scheme(scheme)
    if scheme is Scheme.UNCODED:
        return uncoded_distortion(model, channel)
    if scheme is Scheme.NAIVE_DPC:
        return naive_dpc_distortion(model, channel)
    if scheme is Scheme.DIGITAL_DPC:
        return digital_dpc_distortion(model, channel, alloc)
    return hda_distortion(model, channel, alloc)


def _kernel(model: SourceModel, channel: ChannelSpec, scheme: Scheme):
    sv2, ss2, rho = model.sigma_v2, model.sigma_s2, model.rho
    p, n = channel.p, channel.n_design

    if scheme is Scheme.DIGITAL_DPC:
        def f(pa, gamma):
            return d_star_kernel(sv2, ss2, rho, p, n, gamma, pa) / (1.0 + (p - pa) / n)
    else:
        def f(pa, gamma):
            return hda_kernel(sv2, ss2, rho, p, n, gamma, pa)
    return f


def default_grid(channel: ChannelSpec, count: int = 64, rounds: int = 6,
                 shrink: float = 0.2, tolerance: float = 1e-10) -> GridSpec:
    """Box over ``(pa, gamma)``; pa comes first so ties favour small pa."""
    return GridSpec(axes=(Axis(0.0, channel.p, count), Axis(0.0, 1.0, count)),
                    rounds=rounds, shrink=shrink, tolerance=tolerance)


def optimize_scheme(model: SourceModel, channel: ChannelSpec, scheme: Scheme | str,
                    grid: Optional[GridSpec] = None, keep_grid: bool = False) -> SchemeResult:
    """Minimize a scheme's distortion over ``gamma in [0,1]`` and ``pa in [0,p]``.

    For the digital DPC and HDA schemes a separate one-dimensional search along
    ``gamma = 1`` is also run, and ``gamma_one_optimal`` records whether it
    matches the two-dimensional optimum to within the refinement tolerance.
    """
    scheme = Scheme(scheme)
    channel = channel.design()
    validate(model, channel, Allocation(1.0, 0.0))

    if scheme in (Scheme.UNCODED, Scheme.NAIVE_DPC):
        alloc = Allocation(1.0, channel.p) if scheme is Scheme.UNCODED else Allocation(1.0, 0.0)
        d = scheme_distortion(model, channel, alloc, scheme)
        return SchemeResult(scheme, DistortionPoint(alloc, d, scheme))

    grid = grid or default_grid(channel)
    f = _kernel(model, channel, scheme)
    x, v = grid_refine(lambda pts: f(pts[:, 0], pts[:, 1]), grid, vectorized=True)
    best_alloc = Allocation(gamma=float(x[1]), pa=float(min(x[0], channel.p)))
    best = DistortionPoint(best_alloc, v, scheme)

    pa_axis = grid.axes[0]
    line = GridSpec(axes=(pa_axis,), rounds=grid.rounds, shrink=grid.shrink, tolerance=grid.tolerance)
    x1, v1 = grid_refine(lambda pts: f(pts[:, 0], 1.0), line, vectorized=True)
    g1 = DistortionPoint(Allocation(1.0, float(min(x1[0], channel.p))), v1, scheme)
    g1_ok = bool(v1 - v <= max(grid.tolerance, 1e-9 * v))
    notes = []
    if not g1_ok:
        msg = f"gamma=1 line is worse than the 2-D optimum by {v1 - v:.3e}"
        log.info(msg)
        notes.append(msg)

    points = None
    if keep_grid:
        pa = np.linspace(pa_axis.lower, pa_axis.upper, pa_axis.count)
        gm = np.linspace(grid.axes[1].lower, grid.axes[1].upper, grid.axes[1].count)
        PA, GM = np.meshgrid(pa, gm, indexing="ij")
        D = f(PA, GM)
        points = [DistortionPoint(Allocation(float(g), float(a)), float(d), scheme)
                  for a, g, d in zip(PA.ravel(), GM.ravel(), D.ravel())]
    return SchemeResult(scheme, best, points, g1, g1_ok, notes)
