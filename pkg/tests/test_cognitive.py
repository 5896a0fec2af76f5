import math

import numpy as np
import pytest

from corrjscc.cognitive import (Regime, RegionFrontier, FrontierPoint, classify_regime, coexistence,
                                frontier_gap, inner_region, outer_d2_given_d1, outer_region,
                                primary_distortion, secondary_distortion, secondary_model,
                                very_strong_capacity_bound, weak_capacity_bound)
from corrjscc.model import Allocation, CognitiveConfig, InfeasibleError, RegimeError, ValidationError
from oracles import cognitive_distortions

WEAK = CognitiveConfig(1, 1, 0.5, 0.5)
STRONG = CognitiveConfig(1, 1, 1.5, 1.5)


def test_classify():
    assert classify_regime(WEAK) is Regime.WEAK
    assert classify_regime(STRONG) is Regime.VERY_STRONG
    # |h1 r + 1| = 1.5 < |r + h2| = 2.01, so the second inequality fails
    assert classify_regime(CognitiveConfig(1, 1, 0.5, 1.01)) is Regime.OTHER


def test_primary_without_analog():
    for g in (0.0, 0.5, 1.0):
        d1 = primary_distortion(WEAK, Allocation(g, 0))
        assert d1 == pytest.approx(1 - 1 / (1 + 0.25 + 1))


def test_primary_relaying_helps():
    base = primary_distortion(WEAK, Allocation(1, 0))
    for pa in (0.1, 0.5, 1.0):
        assert primary_distortion(WEAK, Allocation(0, pa)) < base


def test_primary_reference_value():
    # pinned after agreement with the covariance oracle
    assert primary_distortion(WEAK, Allocation(0.5, 0.5)) == pytest.approx(0.47735435498828693, rel=1e-12)


def test_secondary_examples():
    assert secondary_distortion(WEAK, Allocation(1, 0)) == pytest.approx(0.5)
    cfg = CognitiveConfig(1, 1, 0.5, 0.5, rho=1)
    expected = 1 / (1 + (1 + 0.5) ** 2)
    assert secondary_distortion(cfg, Allocation(1, 1)) == pytest.approx(expected, rel=1e-12)
    assert secondary_distortion(WEAK, Allocation(0.5, 0.5)) == pytest.approx(0.5627527934719375, rel=1e-12)


def test_secondary_model():
    m = secondary_model(CognitiveConfig(2, 1, -0.5, 0.5, rho=0.3))
    assert m.sigma_s2 == pytest.approx(0.5) and m.rho == -0.3
    with pytest.raises(ValidationError):
        secondary_model(CognitiveConfig(1, 1, 0, 0.5))


def test_against_covariance_oracle():
    rng = np.random.default_rng(31)
    for _ in range(300):
        h1, h2 = rng.uniform(-2, 2, 2)
        cfg = CognitiveConfig(rng.uniform(0.1, 5), rng.uniform(0.1, 5), h1, h2, rng.uniform(0.2, 2),
                              rng.uniform(0.2, 2), rng.uniform(0.2, 3), rng.uniform(0.2, 3),
                              rng.uniform(-0.95, 0.95))
        al = Allocation(rng.uniform(), rng.uniform(0, cfg.p2))
        d1, d2 = cognitive_distortions(cfg, al.gamma, al.pa)
        assert primary_distortion(cfg, al) == pytest.approx(d1, rel=1e-10)
        assert secondary_distortion(cfg, al) == pytest.approx(d2, rel=1e-9)


def test_pa_budget():
    with pytest.raises(ValidationError, match="pa exceeds power budget"):
        primary_distortion(WEAK, Allocation(1, 2))


def test_weak_bound_examples():
    r1, r2 = weak_capacity_bound(WEAK, 0)
    assert r1 == pytest.approx(0.5 * math.log2(1 + 1 / 1.25)) and r2 == pytest.approx(0.5)
    r1, r2 = weak_capacity_bound(WEAK, 1)
    assert r2 == 0 and r1 == pytest.approx(0.5 * math.log2(1 + 1.5**2))
    r1, r2 = weak_capacity_bound(WEAK, 0.5)
    assert r1 == pytest.approx(0.5 * math.log2(1 + 1.25**2 / 1.1875), rel=1e-12)
    assert r2 == pytest.approx(0.5 * math.log2(1.75), rel=1e-12)
    with pytest.raises(RegimeError):
        weak_capacity_bound(STRONG, 0)
    with pytest.raises(ValidationError):
        weak_capacity_bound(WEAK, 1.5)


def test_very_strong_bound_examples():
    r2, rs = very_strong_capacity_bound(STRONG, 0)
    assert rs == pytest.approx(0.5 * math.log2(1 + 1 + 2.25)) and r2 == pytest.approx(0.5)
    r2, rs = very_strong_capacity_bound(STRONG, 1)
    assert r2 == 0 and rs == pytest.approx(0.5 * math.log2(1 + 1 + 2.25 + 3))
    with pytest.raises(RegimeError):
        very_strong_capacity_bound(WEAK, 0)


def test_outer_region_endpoints():
    outer = outer_region(WEAK)
    d1, d2 = outer.arrays()
    # rho_x = 0 end: largest D1, smallest D2
    assert d1.max() == pytest.approx(1 / (1 + 1 / 1.25)) and d2.min() == pytest.approx(0.5)
    assert outer_region(WEAK.with_rho(1.0)).arrays()[1].max() == 0
    with pytest.raises(RegimeError):
        outer_region(CognitiveConfig(1, 1, 0.5, 1.01))


def test_outer_d2_given_d1_on_frontier():
    for cfg in (WEAK, STRONG, WEAK.with_rho(0.4)):
        outer = outer_region(cfg)
        d1, d2 = outer.arrays()
        for i in range(0, len(d1), max(1, len(d1) // 12)):
            assert outer_d2_given_d1(cfg, d1[i])[0] <= d2[i] + 1e-9


def test_frontier_validates():
    with pytest.raises(ValidationError):
        RegionFrontier((FrontierPoint(1, 1), FrontierPoint(2, 2)), "inner")
    with pytest.raises(ValidationError):
        RegionFrontier((), "sideways")


def test_inner_region_uncorrelated_weak_is_tight():
    inner = inner_region(WEAK)
    gap = frontier_gap(inner, WEAK)
    assert np.abs(gap).max() < 1e-6
    d1, d2 = inner.arrays()
    assert d2.min() == pytest.approx(0.5, abs=1e-9)


def test_inner_region_correlated_strong_beats_uncorrelated_outer():
    inner = inner_region(STRONG.with_rho(0.5), grid_points=32, thresholds=24)
    assert any(p.d2 < outer_d2_given_d1(STRONG, p.d1)[0] - 1e-6 for p in inner.points)


def test_inner_without_refinement_is_grid_frontier():
    raw = inner_region(WEAK, grid_points=8, refine=False)
    assert all(p.pa in np.linspace(0, 1, 8) for p in raw.points)


def test_coexistence_examples():
    res = coexistence(WEAK)
    assert abs(res.achievable - res.outer) < 1e-6
    assert res.d1_achieved <= res.d1_target + 1e-12
    res = coexistence(STRONG)
    assert res.achievable > res.outer
    with pytest.raises(RegimeError):
        coexistence(CognitiveConfig(1, 1, 0.5, 1.01))


def test_coexistence_infeasible():
    # negative cross gain: the secondary can only hurt the primary
    with pytest.raises(InfeasibleError):
        coexistence(CognitiveConfig(1, 1, 0.5, -0.5))


def test_pa_zero_does_not_meet_coexistence_target():
    # With pa = 0 the secondary's full power lands on the primary as noise.
    target = 1 / (1 + WEAK.p1 / WEAK.n1)
    assert primary_distortion(WEAK, Allocation(1, 0)) > target
