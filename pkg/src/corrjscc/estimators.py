"""Linear-MMSE building blocks.

The transmitter superimposes an analog part ``X_a = sqrt(a)*(gamma*V + (1-gamma)*S)``
of power ``pa`` on a digital/HDA part of power ``p_h = p - pa``. The receiver sees
``Y = X_h + S' + Z`` with effective interference
``S' = sqrt(a)*gamma*V + (1 + sqrt(a)*(1-gamma))*S``.

The ``*_kernel`` functions broadcast over numpy arrays of ``gamma`` and ``pa``
so that optimizers can evaluate whole grids in one call. The dataclass-returning
functions are the scalar, validated entry points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Allocation, ChannelSpec, DegenerateError, SourceModel, validate

EPS = 1e-12

__all__ = [
    "EPS",
    "AnalogParams",
    "HdaCoefficients",
    "MomentSet",
    "analog_params",
    "hda_coefficients",
    "moment_set",
    "effective_interference_kernel",
    "d_star_kernel",
    "hda_kernel",
]


@dataclass(frozen=True)
class AnalogParams:
    sigma_a2: float
    a: float
    beta: float
    d_star: float


@dataclass(frozen=True)
class HdaCoefficients:
    alpha: float
    kappa: float
    p_h: float


@dataclass(frozen=True)
class MomentSet:
    e_sp2: float
    e_spv: float
    e_u2: float
    e_y2: float
    e_uy: float
    e_vu: float
    e_vy: float

    def lambda_uy(self) -> np.ndarray:
        return np.array([[self.e_u2, self.e_uy], [self.e_uy, self.e_y2]])

    def gamma_vec(self) -> np.ndarray:
        return np.array([self.e_vu, self.e_vy])


def effective_interference_kernel(sv2, ss2, rho, gamma, pa):
    """Return ``(sigma_a2, a, E[S'V], E[S'^2])``.

    Where the mixing direction has (numerically) zero variance the analog
    signal is identically zero whatever its nominal power, so ``a`` is set to 0.
    """
    gamma = np.asarray(gamma, dtype=float)
    pa = np.asarray(pa, dtype=float)
    sv, ss = np.sqrt(sv2), np.sqrt(ss2)
    cvs = rho * sv * ss
    sigma_a2 = gamma**2 * sv2 + (1.0 - gamma) ** 2 * ss2 + 2.0 * gamma * (1.0 - gamma) * cvs
    ok = (pa > 0) & (sigma_a2 > EPS)
    a = np.divide(pa, sigma_a2, out=np.zeros(np.broadcast(pa, sigma_a2).shape), where=ok)
    ra = np.sqrt(a)
    g = ra * gamma
    c = 1.0 + ra * (1.0 - gamma)
    e_spv = g * sv2 + c * cvs
    e_sp2 = g * g * sv2 + c * c * ss2 + 2.0 * g * c * cvs
    return sigma_a2, a, e_spv, e_sp2


def d_star_kernel(sv2, ss2, rho, p, n, gamma, pa):
    """MSE of the linear estimate of V from Y alone, at noise variance ``n``."""
    _, _, e_spv, e_sp2 = effective_interference_kernel(sv2, ss2, rho, gamma, pa)
    e_y2 = (p - np.asarray(pa, dtype=float)) + e_sp2 + n
    return sv2 - e_spv**2 / e_y2


def hda_kernel(sv2, ss2, rho, p, n_design, gamma, pa, n_actual=None):
    """``sigma_v2 - Gamma^T Lambda_UY^{-1} Gamma`` for the HDA auxiliary variable.

    The coefficients alpha, kappa are designed for ``n_design``; only ``E[Y^2]``
    sees ``n_actual``. Where ``p_h == 0`` there is no auxiliary codeword and the
    result is the estimate from Y alone.
    """
    if n_actual is None:
        n_actual = n_design
    pa = np.asarray(pa, dtype=float)
    _, _, e_spv, e_sp2 = effective_interference_kernel(sv2, ss2, rho, gamma, pa)
    p_h = np.maximum(p - pa, 0.0)
    e_y2_design = p_h + e_sp2 + n_design
    d_star = sv2 - e_spv**2 / e_y2_design
    alpha = p_h / (p_h + n_design)
    has_h = p_h > 0
    kappa = np.sqrt(np.divide(p_h**2, (p_h + n_design) * d_star,
                              out=np.zeros(np.broadcast(p_h, d_star).shape), where=has_h))
    e_vu = alpha * e_spv + kappa * sv2
    e_vy = e_spv
    e_u2 = p_h + alpha**2 * e_sp2 + kappa**2 * sv2 + 2.0 * alpha * kappa * e_spv
    e_uy = p_h + alpha * e_sp2 + kappa * e_spv
    e_y2 = p_h + e_sp2 + n_actual
    num = e_vu**2 * e_y2 - 2.0 * e_vu * e_vy * e_uy + e_vy**2 * e_u2
    det = e_u2 * e_y2 - e_uy**2
    quad = np.divide(num, det, out=np.zeros(np.broadcast(num, det).shape), where=has_h)
    y_only = sv2 - e_vy**2 / e_y2
    return np.where(has_h, sv2 - quad, y_only)


def analog_params(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                  noise: float | None = None) -> AnalogParams:
    """Analog scaling, receiver coefficient beta and pre-refinement MSE D*.

    ``noise`` overrides the noise variance (defaults to ``channel.n_design``);
    the mismatch analysis evaluates the same quantities at ``n_actual``.
    """
    validate(model, channel, alloc)
    n = channel.n_design if noise is None else noise
    sigma_a2, a, e_spv, e_sp2 = (float(x) for x in effective_interference_kernel(
        model.sigma_v2, model.sigma_s2, model.rho, alloc.gamma, alloc.pa))
    if alloc.pa > 0 and sigma_a2 <= EPS:
        raise DegenerateError(
            f"analog direction has zero variance (gamma={alloc.gamma}, rho={model.rho}) with pa={alloc.pa}")
    e_y2 = channel.p - alloc.pa + e_sp2 + n
    beta = e_spv / e_y2
    d_star = model.sigma_v2 - beta * e_spv
    return AnalogParams(sigma_a2=sigma_a2, a=a, beta=beta, d_star=max(d_star, 0.0))


def hda_coefficients(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                     d_star: float) -> HdaCoefficients:
    validate(model, channel, alloc)
    p_h = channel.p - alloc.pa
    n = channel.n_design
    if p_h <= 0:
        return HdaCoefficients(alpha=0.0, kappa=0.0, p_h=0.0)
    if d_star <= EPS:
        raise DegenerateError(f"HDA refinement requested with d_star={d_star!r} <= {EPS}")
    alpha = p_h / (p_h + n)
    kappa = math.sqrt(p_h**2 / ((p_h + n) * d_star))
    return HdaCoefficients(alpha=alpha, kappa=kappa, p_h=p_h)


def moment_set(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
               coeffs: HdaCoefficients) -> MomentSet:
    """All second moments of (V, S', U, Y); ``E[Y^2]`` uses ``channel.n_actual``."""
    validate(model, channel, alloc)
    _, _, e_spv, e_sp2 = (float(x) for x in effective_interference_kernel(
        model.sigma_v2, model.sigma_s2, model.rho, alloc.gamma, alloc.pa))
    al, ka, p_h = coeffs.alpha, coeffs.kappa, coeffs.p_h
    sv2 = model.sigma_v2
    return MomentSet(
        e_sp2=e_sp2,
        e_spv=e_spv,
        e_u2=p_h + al**2 * e_sp2 + ka**2 * sv2 + 2.0 * al * ka * e_spv,
        e_y2=p_h + e_sp2 + channel.n_actual,
        e_uy=p_h + al * e_sp2 + ka * e_spv,
        e_vu=al * e_spv + ka * sv2,
        e_vy=e_spv,
    )
