import math

import pytest

from corrjscc.model import (Allocation, ChannelSpec, CognitiveConfig, DistortionPoint, Scheme,
                            SourceModel, ValidationError, validate)


def test_valid_tuple_passes():
    validate(SourceModel(1, 1, 0.3), ChannelSpec(10, 1), Allocation(1, 2))


def test_rho_out_of_range():
    with pytest.raises(ValidationError, match="rho out of range"):
        SourceModel(1, 1, 1.2)


def test_pa_exceeds_budget():
    with pytest.raises(ValidationError, match="pa exceeds power budget"):
        validate(SourceModel(1, 1, 0.3), ChannelSpec(10, 1), Allocation(1, 11))


@pytest.mark.parametrize("kwargs", [dict(sigma_v2=0, sigma_s2=1, rho=0),
                                    dict(sigma_v2=1, sigma_s2=-1, rho=0),
                                    dict(sigma_v2=math.nan, sigma_s2=1, rho=0)])
def test_bad_source(kwargs):
    with pytest.raises(ValidationError):
        SourceModel(**kwargs)


@pytest.mark.parametrize("args", [(0, 1), (1, 0), (1, 1, 0), (math.inf, 1)])
def test_bad_channel(args):
    with pytest.raises(ValidationError):
        ChannelSpec(*args)


@pytest.mark.parametrize("args", [(-0.1, 1), (1.1, 1), (0.5, -1)])
def test_bad_allocation(args):
    with pytest.raises(ValidationError):
        Allocation(*args)


def test_channel_defaults_and_snr():
    ch = ChannelSpec(10)
    assert ch.n_actual == ch.n_design == 1.0 and ch.matched
    ch = ChannelSpec.from_snr_db(10, n=2, actual_snr_db=13)
    assert ch.p == pytest.approx(20)
    assert ch.n_actual == pytest.approx(20 / 10**1.3)
    assert ch.design().matched and ch.actual().n_design == ch.n_actual


def test_covariance():
    m = SourceModel(4, 9, -0.5)
    assert m.cov_vs == pytest.approx(-3)
    assert m.covariance().tolist() == [[4, -3], [-3, 9]]


def test_scheme_tags_and_points():
    assert Scheme("naive-dpc") is Scheme.NAIVE_DPC
    assert str(Scheme.HDA) == "hda"
    p = DistortionPoint(Allocation(1, 0), 0.5, "hda")
    assert p.scheme is Scheme.HDA
    with pytest.raises(ValidationError):
        DistortionPoint(Allocation(1, 0), math.nan, "hda")


def test_cognitive_config():
    cfg = CognitiveConfig(1, 1, 0.5, 0.5)
    assert cfg.with_rho(0.3).rho == 0.3 and cfg.rho == 0
    with pytest.raises(ValidationError):
        CognitiveConfig(0, 1, 0.5, 0.5)
    with pytest.raises(ValidationError):
        CognitiveConfig(1, 1, 0.5, 0.5, rho=-2)
