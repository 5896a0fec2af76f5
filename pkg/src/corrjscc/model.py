"""Value types for a Gaussian source sent over an AWGN channel with
transmitter-known interference that is correlated with the source.

All quantities are dimensionless reals in consistent power units.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

__all__ = [
    "ModelError",
    "ValidationError",
    "DegenerateError",
    "PreconditionError",
    "RegimeError",
    "InfeasibleError",
    "Scheme",
    "SourceModel",
    "ChannelSpec",
    "Allocation",
    "DistortionPoint",
    "CognitiveConfig",
    "validate",
]


class ModelError(ValueError):
    """Base class for every error raised by this package."""


class ValidationError(ModelError):
    pass


class DegenerateError(ModelError):
    """A division by a (numerically) vanishing variance was requested."""


class PreconditionError(ModelError):
    pass


class RegimeError(ModelError):
    pass


class InfeasibleError(ModelError):
    pass


class Scheme(str, enum.Enum):
    UNCODED = "uncoded"
    NAIVE_DPC = "naive-dpc"
    DIGITAL_DPC = "digital-dpc"
    HDA = "hda"

    def __str__(self) -> str:
        return self.value


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class SourceModel:
    """Second-order description of the source V and the interference S.

    ``rho`` is the correlation coefficient between V and S; the pair is
    jointly Gaussian with covariance ``[[sv2, rho*sv*ss], [rho*sv*ss, ss2]]``.
    """

    sigma_v2: float
    sigma_s2: float
    rho: float

    def __post_init__(self) -> None:
        _require(_finite(self.sigma_v2, self.sigma_s2, self.rho), "non-finite source parameter")
        _require(self.sigma_v2 > 0, "sigma_v2 must be positive")
        _require(self.sigma_s2 > 0, "sigma_s2 must be positive")
        _require(-1.0 <= self.rho <= 1.0, "rho out of range")
        # PSD holds whenever the above does; kept as a guard against edits.
        _require(np.linalg.eigvalsh(self.covariance()).min() >= -1e-12 * max(self.sigma_v2, self.sigma_s2),
                 "covariance not positive semidefinite")

    @property
    def sigma_v(self) -> float:
        return math.sqrt(self.sigma_v2)

    @property
    def sigma_s(self) -> float:
        return math.sqrt(self.sigma_s2)

    @property
    def cov_vs(self) -> float:
        return self.rho * self.sigma_v * self.sigma_s

    def covariance(self) -> np.ndarray:
        c = self.cov_vs
        return np.array([[self.sigma_v2, c], [c, self.sigma_s2]])


@dataclass(frozen=True)
class ChannelSpec:
    """Power budget ``p``, design noise ``n_design`` and actual noise ``n_actual``.

    ``n_actual`` defaults to the design value (no mismatch).
    """

    p: float
    n_design: float = 1.0
    n_actual: Optional[float] = None

    def __post_init__(self) -> None:
        if self.n_actual is None:
            object.__setattr__(self, "n_actual", self.n_design)
        _require(_finite(self.p, self.n_design, self.n_actual), "non-finite channel parameter")
        _require(self.p > 0, "p must be positive")
        _require(self.n_design > 0, "n_design must be positive")
        _require(self.n_actual > 0, "n_actual must be positive")

    @classmethod
    def from_snr_db(cls, snr_db: float, n: float = 1.0, actual_snr_db: Optional[float] = None) -> "ChannelSpec":
        """Build a channel with power ``n * 10**(snr_db/10)``.

        The actual noise is chosen so that the same power sees ``actual_snr_db``.
        """
        p = n * 10.0 ** (snr_db / 10.0)
        n_actual = None if actual_snr_db is None else p / 10.0 ** (actual_snr_db / 10.0)
        return cls(p=p, n_design=n, n_actual=n_actual)

    @property
    def matched(self) -> bool:
        return self.n_actual == self.n_design

    def design(self) -> "ChannelSpec":
        return ChannelSpec(self.p, self.n_design)

    def actual(self) -> "ChannelSpec":
        """The matched channel a transmitter knowing ``n_actual`` would design for."""
        return ChannelSpec(self.p, self.n_actual)


@dataclass(frozen=True)
class Allocation:
    """Mixing coefficient ``gamma`` and analog power ``pa``."""

    gamma: float
    pa: float

    def __post_init__(self) -> None:
        _require(_finite(self.gamma, self.pa), "non-finite allocation")
        _require(0.0 <= self.gamma <= 1.0, "gamma out of range")
        _require(self.pa >= 0.0, "pa must be non-negative")


@dataclass(frozen=True)
class DistortionPoint:
    allocation: Allocation
    distortion: float
    scheme: Scheme

    def __post_init__(self) -> None:
        _require(math.isfinite(self.distortion) and self.distortion >= 0.0, "distortion must be finite and >= 0")
        object.__setattr__(self, "scheme", Scheme(self.scheme))


@dataclass(frozen=True)
class CognitiveConfig:
    """Generalized cognitive radio channel with correlated analog sources.

    User 1 (primary) is received as ``Y1 = X1 + h2*X2 + Z1`` and user 2
    (secondary, which knows V1 non-causally) as ``Y2 = h1*X1 + X2 + Z2``.
    """

    p1: float
    p2: float
    h1: float
    h2: float
    n1: float = 1.0
    n2: float = 1.0
    sigma_v1_2: float = 1.0
    sigma_v2_2: float = 1.0
    rho: float = 0.0

    def __post_init__(self) -> None:
        _require(_finite(self.p1, self.p2, self.h1, self.h2, self.n1, self.n2,
                         self.sigma_v1_2, self.sigma_v2_2, self.rho), "non-finite cognitive parameter")
        _require(self.p1 > 0 and self.p2 > 0, "powers must be positive")
        _require(self.n1 > 0 and self.n2 > 0, "noise variances must be positive")
        _require(self.sigma_v1_2 > 0 and self.sigma_v2_2 > 0, "source variances must be positive")
        _require(-1.0 <= self.rho <= 1.0, "rho out of range")

    def with_rho(self, rho: float) -> "CognitiveConfig":
        return replace(self, rho=rho)


def validate(model: SourceModel, channel: ChannelSpec, alloc: Allocation) -> None:
    """Raise :class:`ValidationError` naming the first violated constraint.

    The individual types check themselves on construction; this re-checks
    them (instances may have been built with ``object.__new__``) and adds the
    joint constraint ``pa <= p``.
    """
    _require(-1.0 <= model.rho <= 1.0, "rho out of range")
    _require(model.sigma_v2 > 0, "sigma_v2 must be positive")
    _require(model.sigma_s2 > 0, "sigma_s2 must be positive")
    _require(channel.p > 0, "p must be positive")
    _require(channel.n_design > 0 and channel.n_actual > 0, "noise variances must be positive")
    _require(0.0 <= alloc.gamma <= 1.0, "gamma out of range")
    _require(alloc.pa >= 0.0, "pa must be non-negative")
    _require(alloc.pa <= channel.p, "pa exceeds power budget")
