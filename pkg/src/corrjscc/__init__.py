"""Joint source-channel coding of a Gaussian source over an AWGN channel with
transmitter-known interference that is correlated with the source."""

from .model import (Allocation, ChannelSpec, CognitiveConfig, DegenerateError, DistortionPoint,
                    InfeasibleError, ModelError, PreconditionError, RegimeError, Scheme,
                    SourceModel, ValidationError, validate)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "ChannelSpec",
    "CognitiveConfig",
    "DegenerateError",
    "DistortionPoint",
    "InfeasibleError",
    "ModelError",
    "PreconditionError",
    "RegimeError",
    "Scheme",
    "SourceModel",
    "ValidationError",
    "validate",
]
