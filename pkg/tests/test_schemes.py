import math

import numpy as np
import pytest

from corrjscc.bounds import combined_outer
from corrjscc.model import Allocation, ChannelSpec, Scheme, SourceModel
from corrjscc.schemes import (default_grid, digital_dpc_distortion, hda_distortion, naive_dpc_distortion,
                              optimize_scheme, scheme_distortion, uncoded_distortion)
from oracles import Signals

CH10 = ChannelSpec(10, 1)
COHERENT = 1 / (1 + (math.sqrt(10) + 1) ** 2)


def test_uncoded_examples():
    assert uncoded_distortion(SourceModel(1, 1, 1), CH10) == pytest.approx(COHERENT, rel=1e-12)
    # vanishing interference approaches the interference-free value
    assert uncoded_distortion(SourceModel(1, 1e-12, 0), CH10) == pytest.approx(1 / 11, rel=1e-9)
    assert uncoded_distortion(SourceModel(1, 1, 0), CH10) == pytest.approx(1 - 10 / 12, rel=1e-12)


def test_naive_dpc_examples():
    assert naive_dpc_distortion(SourceModel(1, 1, 0.7), CH10) == pytest.approx(1 / 11)
    assert naive_dpc_distortion(SourceModel(2, 1, 0), ChannelSpec(1, 1)) == pytest.approx(1.0)


def test_digital_dpc_examples():
    for g in (0.0, 0.5, 1.0):
        assert digital_dpc_distortion(SourceModel(1, 1, 0), CH10, Allocation(g, 0)) == pytest.approx(1 / 11)
    m = SourceModel(1, 1, 0.3)
    from corrjscc.estimators import analog_params
    al = Allocation(0.7, 10)
    assert digital_dpc_distortion(m, CH10, al) == analog_params(m, CH10, al).d_star
    # pinned after covariance-oracle and Monte-Carlo agreement
    assert digital_dpc_distortion(m, CH10, Allocation(1, 2)) == pytest.approx(0.08569939679735837, rel=1e-12)


def test_hda_examples():
    assert hda_distortion(SourceModel(1, 1, 0), CH10, Allocation(1, 0)) == pytest.approx(1 / 11, rel=1e-12)
    assert hda_distortion(SourceModel(1, 1, 0.3), CH10, Allocation(1, 2)) == pytest.approx(0.08569939679735837,
                                                                                         rel=1e-12)


def test_against_covariance_oracle():
    rng = np.random.default_rng(5)
    for _ in range(300):
        sv2, ss2 = rng.uniform(0.1, 10, 2)
        rho, g = rng.uniform(-0.99, 0.99), rng.uniform()
        p = 10 ** rng.uniform(-1, 2)
        pa = rng.uniform(0, p)
        m, ch, al = SourceModel(sv2, ss2, rho), ChannelSpec(p, 1), Allocation(g, pa)
        o = Signals(sv2, ss2, rho, p, 1, g, pa)
        assert digital_dpc_distortion(m, ch, al) == pytest.approx(o.d_sep(), rel=1e-10)
        assert hda_distortion(m, ch, al) == pytest.approx(o.hda(), rel=1e-9)
        # the Gaussian test channel reproduces the closed form
        assert o.digital() == pytest.approx(o.d_sep(), rel=1e-9)


def test_dispatch():
    m = SourceModel(1, 1, 0.3)
    al = Allocation(1, 2)
    assert scheme_distortion(m, CH10, al, "hda") == hda_distortion(m, CH10, al)
    assert scheme_distortion(m, CH10, al, Scheme.UNCODED) == uncoded_distortion(m, CH10)
    assert scheme_distortion(m, CH10, al, "naive-dpc") == naive_dpc_distortion(m, CH10)
    with pytest.raises(ValueError):
        scheme_distortion(m, CH10, al, "bogus")


@pytest.mark.parametrize("scheme", [Scheme.DIGITAL_DPC, Scheme.HDA])
def test_optimize_uncorrelated(scheme):
    res = optimize_scheme(SourceModel(1, 1, 0), CH10, scheme)
    assert res.best.distortion == pytest.approx(1 / 11, abs=1e-12)
    assert res.best.allocation.pa == 0


@pytest.mark.parametrize("scheme", [Scheme.DIGITAL_DPC, Scheme.HDA])
def test_optimize_coherent(scheme):
    res = optimize_scheme(SourceModel(1, 1, 1), CH10, scheme)
    assert res.best.distortion == pytest.approx(COHERENT, abs=1e-9)
    assert res.best.allocation.pa == pytest.approx(10)
    assert res.gamma_one_optimal


def test_optimize_beats_baselines():
    m = SourceModel(1, 1, 0.3)
    res = optimize_scheme(m, CH10, Scheme.DIGITAL_DPC)
    base = min(uncoded_distortion(m, CH10), naive_dpc_distortion(m, CH10))
    assert res.best.distortion <= base
    assert res.best.distortion >= combined_outer(m, CH10)


def test_optimize_keep_grid_and_fixed_schemes():
    m = SourceModel(1, 1, 0.3)
    res = optimize_scheme(m, CH10, Scheme.HDA, grid=default_grid(CH10, count=8), keep_grid=True)
    assert len(res.grid) == 64
    assert min(p.distortion for p in res.grid) >= res.best.distortion
    res = optimize_scheme(m, CH10, Scheme.UNCODED)
    assert res.best.allocation == Allocation(1, 10) and res.grid is None


def test_gamma_one_checked_not_assumed():
    # Negative correlation: mixing in -S is better than gamma = 1.
    res = optimize_scheme(SourceModel(1, 1, -0.6), CH10, Scheme.DIGITAL_DPC)
    assert res.gamma_one_optimal is False and res.notes
    assert res.best.distortion < res.gamma_one_best.distortion
    res = optimize_scheme(SourceModel(1, 1, 0.6), CH10, Scheme.DIGITAL_DPC)
    assert res.gamma_one_optimal is True
