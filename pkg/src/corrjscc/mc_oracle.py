"""Seeded Monte-Carlo checks of the linear estimators and scheme distortions.

Samples are generated in fixed-size chunks, each drawn from its own
generator spawned off ``SeedSequence(seed)``. Results therefore depend only
on ``(seed, samples)``, not on how many worker threads are used, and partial
sums are combined with :func:`math.fsum` so the reduction order does not
matter either.

The digital and HDA refinement layers are simulated with their Gaussian test
channels rather than with actual codes: the digital layer delivers
``T = alpha_sep*V + B`` with ``B ~ N(0, D)``, and the HDA layer delivers the
encoder-side auxiliary ``U = X_h + alpha*S' + kappa*V``. The receiver then
applies the same linear estimator as the analytic code, so a disagreement
points at the estimation algebra.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .estimators import analog_params, effective_interference_kernel, hda_coefficients, moment_set
from .mismatch import WzMismatchInputs
from .model import (Allocation, ChannelSpec, PreconditionError, Scheme, SourceModel,
                    ValidationError, validate)
from .schemes import digital_dpc_distortion

__all__ = [
    "McConfig",
    "McEstimate",
    "sample_sources",
    "simulate_linear_mmse",
    "simulate_scheme_idealized",
    "simulate_wz_mismatch",
    "sample_moments",
    "OracleCheck",
    "oracle_checks",
    "random_case",
]

CHUNK = 1 << 17


@dataclass(frozen=True)
class McConfig:
    seed: int
    samples: int = 1_000_000
    confidence_k: float = 3.0
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.samples < 10_000:
            raise ValidationError("samples must be at least 10^4")
        if not self.confidence_k > 0:
            raise ValidationError("confidence_k must be positive")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")

    def chunks(self) -> list[tuple[int, np.random.SeedSequence]]:
        """``(size, seed_sequence)`` for every chunk, in a fixed order."""
        sizes = [CHUNK] * (self.samples // CHUNK)
        if self.samples % CHUNK:
            sizes.append(self.samples % CHUNK)
        return list(zip(sizes, np.random.SeedSequence(self.seed).spawn(len(sizes))))


class McEstimate(NamedTuple):
    value: float
    stderr: float

    def z_score(self, reference: float) -> float:
        """Distance to ``reference`` in standard errors."""
        diff = abs(self.value - reference)
        if self.stderr == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.stderr

    def agrees(self, reference: float, k: float = 3.0) -> bool:
        return self.z_score(reference) <= k


def _run(mc: McConfig, chunk_fn: Callable[[np.random.Generator, int], dict[str, np.ndarray]]
         ) -> dict[str, McEstimate]:
    """Evaluate ``chunk_fn`` on every chunk and reduce each named series to
    its sample mean and standard error."""

    def one(item):
        size, ss = item
        out = chunk_fn(np.random.Generator(np.random.PCG64(ss)), size)
        return {k: (float(np.sum(x)), float(np.sum(x * x))) for k, x in out.items()}

    chunks = mc.chunks()
    if mc.workers > 1:
        with ThreadPoolExecutor(mc.workers) as pool:
            parts = list(pool.map(one, chunks))
    else:
        parts = [one(c) for c in chunks]

    n = mc.samples
    result = {}
    for key in parts[0]:
        s1 = math.fsum(p[key][0] for p in parts)
        s2 = math.fsum(p[key][1] for p in parts)
        mean = s1 / n
        var = max((s2 - n * mean * mean) / (n - 1), 0.0)
        result[key] = McEstimate(mean, math.sqrt(var / n))
    return result


def _draw_sources(model: SourceModel, rng: np.random.Generator, size: int):
    """Correlated pair built from V and an independent innovation."""
    v = model.sigma_v * rng.standard_normal(size)
    innovation = math.sqrt(max(1.0 - model.rho**2, 0.0)) * model.sigma_s * rng.standard_normal(size)
    s = model.rho * (model.sigma_s / model.sigma_v) * v + innovation
    return v, s


def sample_sources(model: SourceModel, mc: McConfig) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(v, s)`` arrays chunk by chunk."""
    for size, ss in mc.chunks():
        yield _draw_sources(model, np.random.Generator(np.random.PCG64(ss)), size)


def _analog_path(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                 rng: np.random.Generator, size: int, noise: float):
    """Draw one chunk of ``(v, s', x_h, z)`` where ``s'`` already contains the
    analog signal; ``x_h`` is independent with power ``P - P_a``."""
    v, s = _draw_sources(model, rng, size)
    ap = analog_params(model, channel, alloc)
    x_a = math.sqrt(ap.a) * (alloc.gamma * v + (1.0 - alloc.gamma) * s)
    x_h = math.sqrt(channel.p - alloc.pa) * rng.standard_normal(size)
    z = math.sqrt(noise) * rng.standard_normal(size)
    return v, x_a + s, x_h, z


def simulate_linear_mmse(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                         mc: McConfig, noise: float | None = None) -> McEstimate:
    """Empirical MSE of ``V - beta*Y`` with ``beta`` from the analytic code.

    ``noise`` defaults to the design noise variance.
    """
    validate(model, channel, alloc)
    noise = channel.n_design if noise is None else noise
    beta = analog_params(model, channel, alloc, noise=noise).beta

    def chunk(rng, size):
        v, sp, x_h, z = _analog_path(model, channel, alloc, rng, size, noise)
        return {"e2": (v - beta * (sp + x_h + z)) ** 2}

    return _run(mc, chunk)["e2"]


def _lmmse_weights(cov_obs: np.ndarray, cov_v_obs: np.ndarray) -> np.ndarray:
    return np.linalg.solve(cov_obs, cov_v_obs)


def simulate_scheme_idealized(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                              scheme: Scheme | str, mc: McConfig) -> McEstimate:
    """Empirical distortion of the digital DPC or HDA scheme.

    Coefficients are designed for ``channel.n_design`` and the channel noise is
    drawn with ``channel.n_actual``, which must not exceed the design value.
    With matched noise the targets are the matched distortions; otherwise
    they are the mismatch distortions.
    """
    scheme = Scheme(scheme)
    validate(model, channel, alloc)
    if channel.n_actual > channel.n_design:
        raise PreconditionError("the refinement layer is only simulated for n_actual <= n_design")
    design = channel.design()
    n_a = channel.n_actual

    if scheme is Scheme.DIGITAL_DPC:
        d_star = analog_params(model, design, alloc).d_star
        d = digital_dpc_distortion(model, design, alloc)
        alpha = math.sqrt(max((d_star - d) / d_star, 0.0))
        _, _, e_vy, e_sp2 = effective_interference_kernel(
            model.sigma_v2, model.sigma_s2, model.rho, alloc.gamma, alloc.pa)
        e_vy = float(e_vy)
        e_y2 = float(e_sp2) + channel.p - alloc.pa + n_a
        # Observations (T, Y): T = alpha*V + B is independent of Y given V.
        cov = np.array([[alpha**2 * model.sigma_v2 + d, alpha * e_vy],
                        [alpha * e_vy, e_y2]])
        w = _lmmse_weights(cov, np.array([alpha * model.sigma_v2, e_vy]))

        def chunk(rng, size):
            v, sp, x_h, z = _analog_path(model, channel, alloc, rng, size, n_a)
            t = alpha * v + math.sqrt(d) * rng.standard_normal(size)
            return {"e2": (v - w[0] * t - w[1] * (sp + x_h + z)) ** 2}

        return _run(mc, chunk)["e2"]

    if scheme is not Scheme.HDA:
        raise ValidationError(f"no idealized simulation for scheme {scheme}")
    d_star = analog_params(model, design, alloc).d_star
    coeffs = hda_coefficients(model, design, alloc, d_star)
    if coeffs.p_h == 0.0:
        return simulate_linear_mmse(model, channel, alloc, mc, noise=n_a)
    m = moment_set(model, channel, alloc, coeffs)
    w = _lmmse_weights(m.lambda_uy(), m.gamma_vec())

    def chunk(rng, size):
        v, sp, x_h, z = _analog_path(model, channel, alloc, rng, size, n_a)
        u = x_h + coeffs.alpha * sp + coeffs.kappa * v
        return {"e2": (v - w[0] * u - w[1] * (sp + x_h + z)) ** 2}

    return _run(mc, chunk)["e2"]


def simulate_wz_mismatch(inp: WzMismatchInputs, mc: McConfig, sigma_v2: float = 1.0) -> McEstimate:
    """Wyner-Ziv test channel designed for side-information MSE ``d_star`` and
    decoded with side information of MSE ``d_star_actual``.

    The side information is ``Y = V + W`` with ``W`` scaled so that the MSE of
    V given Y equals ``d_star_actual``.
    """
    if not inp.d_star_actual < sigma_v2:
        raise ValidationError("d_star_actual must be below sigma_v2")
    w_var = sigma_v2 * inp.d_star_actual / (sigma_v2 - inp.d_star_actual)
    alpha, d = inp.alpha_sep, inp.d_design
    cov = np.array([[alpha**2 * sigma_v2 + d, alpha * sigma_v2],
                    [alpha * sigma_v2, sigma_v2 + w_var]])
    w = _lmmse_weights(cov, np.array([alpha * sigma_v2, sigma_v2]))
    sv = math.sqrt(sigma_v2)

    def chunk(rng, size):
        v = sv * rng.standard_normal(size)
        y = v + math.sqrt(w_var) * rng.standard_normal(size)
        t = alpha * v + math.sqrt(d) * rng.standard_normal(size)
        return {"e2": (v - w[0] * t - w[1] * y) ** 2}

    return _run(mc, chunk)["e2"]


def sample_moments(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                   mc: McConfig) -> dict[str, McEstimate]:
    """Empirical counterparts of every :class:`~corrjscc.estimators.MomentSet`
    entry, keyed by field name. Noise is drawn at ``channel.n_actual``."""
    validate(model, channel, alloc)
    design = channel.design()
    d_star = analog_params(model, design, alloc).d_star
    coeffs = hda_coefficients(model, design, alloc, d_star)

    def chunk(rng, size):
        v, sp, x_h, z = _analog_path(model, channel, alloc, rng, size, channel.n_actual)
        y = sp + x_h + z
        u = x_h + coeffs.alpha * sp + coeffs.kappa * v
        return {"e_sp2": sp * sp, "e_spv": sp * v, "e_u2": u * u, "e_y2": y * y,
                "e_uy": u * y, "e_vu": v * u, "e_vy": v * y}

    return _run(mc, chunk)


@dataclass(frozen=True)
class OracleCheck:
    name: str
    analytic: float
    simulated: McEstimate

    @property
    def z(self) -> float:
        return self.simulated.z_score(self.analytic)


def oracle_checks(model: SourceModel, channel: ChannelSpec, alloc: Allocation,
                  mc: McConfig) -> list[OracleCheck]:
    """Compare every analytic distortion for one parameter tuple with its
    simulation: D*, the digital DPC and HDA distortions at the design noise,
    and, when ``n_actual < n_design``, both mismatch distortions."""
    from .mismatch import digital_dpc_mismatch, hda_mismatch
    from .schemes import hda_distortion

    design = channel.design()
    checks = [
        OracleCheck("d_star", analog_params(model, design, alloc).d_star,
                    simulate_linear_mmse(model, design, alloc, mc)),
        OracleCheck("d_sep", digital_dpc_distortion(model, design, alloc),
                    simulate_scheme_idealized(model, design, alloc, Scheme.DIGITAL_DPC, mc)),
        OracleCheck("d_hda", hda_distortion(model, design, alloc),
                    simulate_scheme_idealized(model, design, alloc, Scheme.HDA, mc)),
    ]
    if channel.n_actual < channel.n_design:
        checks += [
            OracleCheck("d_wz_mismatch", digital_dpc_mismatch(model, channel, alloc),
                        simulate_scheme_idealized(model, channel, alloc, Scheme.DIGITAL_DPC, mc)),
            OracleCheck("d_hda_mismatch", hda_mismatch(model, channel, alloc),
                        simulate_scheme_idealized(model, channel, alloc, Scheme.HDA, mc)),
        ]
    return checks


def random_case(rng: np.random.Generator, mismatch: bool = True
                ) -> tuple[SourceModel, ChannelSpec, Allocation]:
    """Draw a valid parameter tuple: variances in [0.1, 10], |rho| <= 0.99,
    design SNR in [0.1, 100] (log-uniform, N = 1), any ``gamma`` and ``pa``.

    With ``mismatch`` the actual noise is drawn in [0.1, 1] times the design
    noise.
    """
    sv2, ss2 = rng.uniform(0.1, 10.0, size=2)
    rho = rng.uniform(-0.99, 0.99)
    p = 10.0 ** rng.uniform(-1.0, 2.0)
    gamma = rng.uniform(0.0, 1.0)
    pa = rng.uniform(0.0, p)
    n_a = rng.uniform(0.1, 1.0) if mismatch else 1.0
    return (SourceModel(float(sv2), float(ss2), float(rho)),
            ChannelSpec(float(p), 1.0, float(n_a)), Allocation(float(gamma), float(pa)))
