"""Queue analytics vs an event-driven FCFS simulation, plus edge cases."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satedge.errors import ConfigurationError
from satedge.queueing import QueueParams, delay_success_prob, served_bits, service_rate_pps

from .oracles import mm1_sojourn_within


def test_service_rate_conversion():
    assert service_rate_pps(8.0e8, 1.0e6) == pytest.approx(800.0)
    assert service_rate_pps(0.0, 1.0e6) == 0.0
    with pytest.raises(ValueError):
        service_rate_pps(1.0, 0.0)


def test_closed_form_known_value():
    # rho=0.5, mu=2, t=1: 1 - exp(-2*0.5*1) = 1 - e^-1
    assert delay_success_prob(1.0, 2.0, 1.0) == pytest.approx(1.0 - math.exp(-1.0))


def test_unstable_and_dead_link_never_meet_bound():
    assert delay_success_prob(2.0, 2.0, 1.0) == 0.0
    assert delay_success_prob(3.0, 2.0, 1.0) == 0.0
    assert delay_success_prob(1.0, 0.0, 1.0) == 0.0


def test_zero_arrivals_reduce_to_service_time_cdf():
    mu, t = 5.0, 0.3
    assert delay_success_prob(0.0, mu, t) == pytest.approx(1.0 - math.exp(-mu * t))


def test_rejects_nonpositive_bound():
    with pytest.raises(ValueError):
        delay_success_prob(1.0, 2.0, 0.0)


@given(
    lam=st.floats(0.0, 10.0),
    mu=st.floats(0.01, 20.0),
    t=st.floats(1e-3, 10.0),
)
@settings(max_examples=200, deadline=None)
def test_probability_bounds_and_monotonicity(lam, mu, t):
    p = delay_success_prob(lam, mu, t)
    assert 0.0 <= p <= 1.0
    # longer bounds can only help
    assert delay_success_prob(lam, mu, t + 1.0) >= p


@pytest.mark.parametrize("rho", [0.3, 0.6, 0.9])
@pytest.mark.parametrize("t_factor", [0.5, 2.0])
def test_against_event_simulation(rho, t_factor):
    mu = 40.0
    lam = rho * mu
    t = t_factor / mu
    analytic = delay_success_prob(lam, mu, t)
    simulated = mm1_sojourn_within(lam, mu, t, n_packets=200_000, seed=7)
    assert abs(analytic - simulated) < 0.01


def test_served_bits_accounting():
    assert served_bits(10.0, 300.0, 1e6, 0.5) == pytest.approx(10.0 * 300.0 * 1e6 * 0.5)
    assert served_bits(10.0, 300.0, 1e6, 0.0) == 0.0
    with pytest.raises(ValueError):
        served_bits(10.0, 300.0, 1e6, 1.5)


def test_queue_params_consistency():
    qp = QueueParams.from_rates(3.0, 4.0)
    assert qp.utilization == pytest.approx(0.75)
    with pytest.raises(ConfigurationError):
        QueueParams(arrival_rate_pps=3.0, service_rate_pps=4.0, utilization=0.5)
