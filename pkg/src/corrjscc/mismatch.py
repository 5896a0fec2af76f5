"""Behaviour of the digital DPC and HDA schemes when the channel noise differs
from the value the transmitter designed for.

The transmitter designs for ``channel.n_design``; the receiver sees
``channel.n_actual``. When ``n_actual <= n_design`` both digital and HDA
layers still decode and the receiver exploits the better side information;
otherwise only the estimate from Y survives (:func:`degraded_distortion`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .estimators import analog_params, hda_coefficients, moment_set
from .model import Allocation, ChannelSpec, PreconditionError, Scheme, SourceModel, ValidationError
from .schemes import digital_dpc_distortion, optimize_scheme

__all__ = [
    "WzMismatchInputs",
    "WzMismatchResult",
    "wz_mismatch",
    "wz_mismatch_distortion",
    "design_allocation",
    "digital_dpc_mismatch",
    "hda_mismatch",
    "degraded_distortion",
    "mismatch_distortion",
    "mi_refinement_digital",
    "mi_refinement_hda",
]


@dataclass(frozen=True)
class WzMismatchInputs:
    """Side-information MSE the quantizer was designed for (``d_star``), the
    one the decoder actually has (``d_star_actual``) and the designed
    distortion ``d_design``."""

    d_star: float
    d_star_actual: float
    d_design: float

    def __post_init__(self) -> None:
        if not 0 < self.d_design <= self.d_star:
            raise ValidationError("need 0 < d_design <= d_star")
        if not self.d_star_actual > 0:
            raise ValidationError("d_star_actual must be positive")

    @property
    def alpha_sep(self) -> float:
        return math.sqrt((self.d_star - self.d_design) / self.d_star)


@dataclass(frozen=True)
class WzMismatchResult:
    distortion: float
    # True when the decoder's side information is worse than designed, a
    # regime the closed form was not derived for.
    worse_side_information: bool


def wz_mismatch(inp: WzMismatchInputs) -> WzMismatchResult:
    ds, da, d = inp.d_star, inp.d_star_actual, inp.d_design
    value = ds * da / (ds * da + (ds - da) * d) * d
    return WzMismatchResult(value, worse_side_information=da > ds)


def wz_mismatch_distortion(inp: WzMismatchInputs) -> float:
    """Distortion of a Wyner-Ziv code built for side information of MSE ``d_star``
    when the decoder's side information has MSE ``d_star_actual``."""
    return wz_mismatch(inp).distortion


def design_allocation(model: SourceModel, channel: ChannelSpec, pa: Optional[float] = None,
                      gamma: Optional[float] = None) -> Allocation:
    """Allocation minimizing the matched distortion at the design noise.

    ``pa``/``gamma`` override the optimizer's choice individually.
    """
    if pa is not None and gamma is not None:
        return Allocation(gamma, pa)
    if pa is not None:
        return Allocation(1.0 if gamma is None else gamma, pa)
    best = optimize_scheme(model, channel.design(), Scheme.DIGITAL_DPC).best.allocation
    return Allocation(best.gamma if gamma is None else gamma, best.pa)


def _require_enhancement(channel: ChannelSpec) -> None:
    if channel.n_actual > channel.n_design:
        raise PreconditionError(
            f"n_actual={channel.n_actual} exceeds n_design={channel.n_design}; "
            "the refinement layer does not decode, use degraded_distortion")


def digital_dpc_mismatch(model: SourceModel, channel: ChannelSpec,
                         alloc: Optional[Allocation] = None) -> float:
    """Digital DPC distortion when the actual noise is no larger than designed.

    ``alloc`` defaults to the design-optimal allocation.
    """
    _require_enhancement(channel)
    alloc = alloc or design_allocation(model, channel)
    design = channel.design()
    d_star = analog_params(model, design, alloc).d_star
    d_star_a = analog_params(model, channel, alloc, noise=channel.n_actual).d_star
    d_sep = digital_dpc_distortion(model, design, alloc)
    return wz_mismatch_distortion(WzMismatchInputs(d_star, d_star_a, d_sep))


def hda_mismatch(model: SourceModel, channel: ChannelSpec,
                 alloc: Optional[Allocation] = None) -> float:
    """HDA distortion with coefficients designed at ``n_design`` and the
    receiver's linear estimate formed with the actual ``E[Y^2]``."""
    _require_enhancement(channel)
    alloc = alloc or design_allocation(model, channel)
    design = channel.design()
    ap = analog_params(model, design, alloc)
    coeffs = hda_coefficients(model, design, alloc, ap.d_star)
    if coeffs.p_h == 0.0:
        return analog_params(model, channel, alloc, noise=channel.n_actual).d_star
    m = moment_set(model, channel, alloc, coeffs)
    g = m.gamma_vec()
    return model.sigma_v2 - float(g @ np.linalg.solve(m.lambda_uy(), g))


def degraded_distortion(model: SourceModel, channel: ChannelSpec,
                        alloc: Optional[Allocation] = None) -> float:
    """Estimate from Y alone at the actual noise; identical for both schemes."""
    if not channel.n_actual > channel.n_design:
        raise PreconditionError("degraded_distortion requires n_actual > n_design")
    alloc = alloc or design_allocation(model, channel)
    return analog_params(model, channel, alloc, noise=channel.n_actual).d_star


def mismatch_distortion(model: SourceModel, channel: ChannelSpec, scheme: Scheme | str,
                        alloc: Optional[Allocation] = None) -> float:
    """Dispatch on the sign of the mismatch for either proposed scheme."""
    scheme = Scheme(scheme)
    alloc = alloc or design_allocation(model, channel)
    if channel.n_actual > channel.n_design:
        return degraded_distortion(model, channel, alloc)
    if scheme is Scheme.DIGITAL_DPC:
        return digital_dpc_mismatch(model, channel, alloc)
    if scheme is Scheme.HDA:
        return hda_mismatch(model, channel, alloc)
    raise ValidationError(f"no mismatch model for scheme {scheme}")


def _require_uncorrelated(model: SourceModel) -> None:
    if model.rho != 0.0:
        raise PreconditionError("mutual-information comparison is only defined for rho == 0")


def mi_refinement_digital(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                          d_design: Optional[float] = None) -> float:
    """I(V;T|Y) in bits for the Wyner-Ziv auxiliary ``T = alpha_sep*V + B``.

    ``d_design`` defaults to the matched digital DPC distortion at ``alloc``.
    """
    _require_uncorrelated(model)
    design = channel.design()
    d_star = analog_params(model, design, alloc).d_star
    d_star_a = analog_params(model, channel, alloc, noise=channel.n_actual).d_star
    d = digital_dpc_distortion(model, design, alloc) if d_design is None else d_design
    alpha_sep2 = (d_star - d) / d_star
    return 0.5 * math.log2((alpha_sep2 * d_star_a + d) / d)


def mi_refinement_hda(model: SourceModel, channel: ChannelSpec, alloc: Allocation) -> float:
    """Lower bound on I(V;U|Y) in bits (tight without mismatch)."""
    _require_uncorrelated(model)
    design = channel.design()
    ap = analog_params(model, design, alloc)
    coeffs = hda_coefficients(model, design, alloc, ap.d_star)
    if coeffs.p_h == 0.0:
        return 0.0
    m = moment_set(model, channel, alloc, coeffs)
    cond_var = m.e_u2 - m.e_uy**2 / m.e_y2
    noise = (1.0 - coeffs.alpha) ** 2 * coeffs.p_h + coeffs.alpha**2 * channel.n_actual
    return 0.5 * math.log2(cond_var / noise)
