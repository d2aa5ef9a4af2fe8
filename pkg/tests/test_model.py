import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavity_cz.model import (
    ParameterError,
    PhysicalParams,
    matched_params,
    matching_delta,
    matching_g,
    scattering_phase,
    validate,
)

rates = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


def test_validate_accepts_valid_params():
    p = PhysicalParams(g=1, kappa=2, delta=1, gamma=0)
    assert validate(p) is p


@pytest.mark.parametrize(
    "kwargs, message",
    [
        (dict(g=0, kappa=2, delta=1), "g must be positive"),
        (dict(g=-1, kappa=2, delta=1), "g must be positive"),
        (dict(g=1, kappa=0, delta=1), "kappa must be positive"),
        (dict(g=1, kappa=2, delta=0), "delta must be nonzero"),
        (dict(g=1, kappa=2, delta=1, gamma=-0.1), "gamma must be non-negative"),
        (dict(g=float("nan"), kappa=2, delta=1), "g must be finite"),
    ],
)
def test_validate_rejects(kwargs, message):
    with pytest.raises(ParameterError, match=message):
        validate(PhysicalParams(**kwargs))


def test_uncoupled_allowed_only_on_request():
    p = PhysicalParams(g=0, kappa=1, delta=1)
    assert validate(p, allow_uncoupled=True) is p
    with pytest.raises(ParameterError):
        validate(p)


def test_scattering_phase_matched_point():
    ph = scattering_phase(PhysicalParams(g=1, kappa=2, delta=1))
    assert ph.phi == pytest.approx(math.pi / 4, abs=1e-15)
    assert ph.controlled_phase == pytest.approx(math.pi, abs=1e-15)


def test_scattering_phase_vanishes_without_coupling():
    ph = scattering_phase(PhysicalParams(g=1e-9, kappa=1, delta=1))
    assert abs(ph.phi) < 1e-17
    assert ph.controlled_phase == 4 * ph.phi


def test_scattering_phase_negative_delta():
    ph = scattering_phase(PhysicalParams(g=1, kappa=2, delta=-1))
    assert ph.phi == pytest.approx(-math.pi / 4)
    assert ph.controlled_phase == pytest.approx(-math.pi)


@pytest.mark.parametrize("kappa, delta, g", [(2, 1, 1), (1, 2, 1), (4, 8, 4)])
def test_matching_g(kappa, delta, g):
    assert matching_g(kappa, delta) == pytest.approx(g, rel=1e-15)
    # substituting back gives 2 g^2 / (kappa delta) = 1
    assert 2 * matching_g(kappa, delta) ** 2 / (kappa * delta) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("delta", [0.0, -1.0])
def test_matching_g_requires_positive_delta(delta):
    with pytest.raises(ParameterError):
        matching_g(1.0, delta)


@pytest.mark.parametrize("g, kappa, delta", [(1, 2, 1), (2, 2, 4), (3, 1.5, 12)])
def test_matching_delta(g, kappa, delta):
    assert matching_delta(g, kappa) == pytest.approx(delta, rel=1e-15)
    ph = scattering_phase(PhysicalParams(g=g, kappa=kappa, delta=matching_delta(g, kappa)))
    assert ph.phi == pytest.approx(math.pi / 4, abs=1e-15)


@given(rates, rates)
def test_matching_g_always_gives_quarter_pi(kappa, delta):
    p = PhysicalParams(g=matching_g(kappa, delta), kappa=kappa, delta=delta)
    assert abs(scattering_phase(p).phi - math.pi / 4) < 1e-14


@given(rates, rates, rates)
def test_phase_odd_in_delta_even_in_g(g, kappa, delta):
    plus = scattering_phase(PhysicalParams(g=g, kappa=kappa, delta=delta)).phi
    minus = scattering_phase(PhysicalParams(g=g, kappa=kappa, delta=-delta)).phi
    flipped = scattering_phase(PhysicalParams(g=-g, kappa=kappa, delta=delta)).phi
    assert minus == -plus
    assert flipped == plus


def test_params_dict_round_trip():
    p = PhysicalParams(g=0.5, kappa=1.5, delta=-2.0, gamma=0.01, omega0=3.0)
    assert PhysicalParams.from_dict(p.to_dict()) == p
    with pytest.raises(ParameterError, match="unknown"):
        PhysicalParams.from_dict({"g": 1, "kappa": 1, "delta": 1, "gee": 1})
    with pytest.raises(ParameterError, match="missing"):
        PhysicalParams.from_dict({"g": 1, "kappa": 1})


def test_matched_params_and_ratio():
    p = matched_params(kappa=3.0, delta=0.5)
    assert p.cooperativity_ratio == pytest.approx(1.0)


def test_params_are_immutable():
    p = PhysicalParams(g=1, kappa=1, delta=1)
    with pytest.raises(AttributeError):
        p.g = 2
