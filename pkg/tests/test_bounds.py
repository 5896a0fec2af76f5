import math

import numpy as np
import pytest

from corrjscc.bounds import combined_outer, outer_bound_1, outer_bound_2
from corrjscc.model import Allocation, ChannelSpec, SourceModel
from corrjscc.schemes import hda_distortion

CH10 = ChannelSpec(10, 1)


def test_bound_1_examples():
    assert outer_bound_1(SourceModel(1, 1, 0), CH10) == pytest.approx(1 / 11)
    assert outer_bound_1(SourceModel(1, 1, 1), CH10) == 0
    assert outer_bound_1(SourceModel(1, 1, 0.3), CH10) == pytest.approx(0.91 / 11)


def test_bound_2_examples():
    assert outer_bound_2(SourceModel(1, 1, 0), CH10) == pytest.approx(1 / 11)
    assert outer_bound_2(SourceModel(1, 1, 1), CH10) == pytest.approx(1 / (1 + (math.sqrt(10) + 1) ** 2))
    assert outer_bound_2(SourceModel(1, 1, 0.3), CH10) == pytest.approx(1 / (1 + (math.sqrt(10) + 0.3) ** 2))
    assert outer_bound_2(SourceModel(1, 1, 0.3), CH10) == pytest.approx(0.07700, abs=1e-5)


def test_combined_examples():
    assert combined_outer(SourceModel(1, 1, 0), CH10) == outer_bound_1(SourceModel(1, 1, 0), CH10)
    assert combined_outer(SourceModel(1, 1, 1), CH10) == outer_bound_2(SourceModel(1, 1, 1), CH10)
    assert combined_outer(SourceModel(1, 1, 0.3), CH10) == pytest.approx(0.08273, abs=1e-5)


def test_bound_2_symmetric_in_rho():
    for r in (0.1, 0.5, 1.0):
        assert outer_bound_2(SourceModel(2, 3, -r), CH10) == outer_bound_2(SourceModel(2, 3, r), CH10)


def test_bounds_below_every_allocation():
    rng = np.random.default_rng(17)
    for _ in range(500):
        sv2, ss2 = rng.uniform(0.1, 10, 2)
        rho = rng.uniform(-1, 1)
        p = 10 ** rng.uniform(-1, 2)
        g, pa = rng.uniform(), rng.uniform(0, p)
        m, ch = SourceModel(sv2, ss2, rho), ChannelSpec(p, 1)
        try:
            d = hda_distortion(m, ch, Allocation(g, pa))
        except ValueError:
            continue
        assert combined_outer(m, ch) <= d * (1 + 1e-12) + 1e-15
