"""Genie-aided outer bounds on the achievable MSE."""

from __future__ import annotations

import math

from .model import ChannelSpec, SourceModel

__all__ = ["outer_bound_1", "outer_bound_2", "combined_outer"]


def outer_bound_1(model: SourceModel, channel: ChannelSpec) -> float:
    """Bound obtained by revealing the interference to the decoder."""
    return model.sigma_v2 * (1.0 - model.rho**2) / (1.0 + channel.p / channel.n_design)


def outer_bound_2(model: SourceModel, channel: ChannelSpec) -> float:
    """Bound obtained by revealing only the innovation of S given V.

    Uses ``|rho|``: for negative correlation the transmitter aligns with -S,
    and the positive-rho expression would exceed achievable distortions.
    """
    coherent = (math.sqrt(channel.p) + abs(model.rho) * model.sigma_s) ** 2
    return model.sigma_v2 / (1.0 + coherent / channel.n_design)


def combined_outer(model: SourceModel, channel: ChannelSpec) -> float:
    return max(outer_bound_1(model, channel), outer_bound_2(model, channel))
