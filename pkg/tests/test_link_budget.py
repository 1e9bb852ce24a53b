"""Link-budget tests: FSPL identity, rain geometry branches, SNR composition."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satedge.link_budget import (
    BOLTZMANN_J_K,
    SPEED_OF_LIGHT_M_S,
    LinkBudgetParams,
    RainModel,
    data_rate_bps,
    free_space_gain,
    propagation_gain,
    rain_gain,
    rain_height_km,
    slant_path_km,
    snr,
)

PARAMS = LinkBudgetParams(
    transmit_power_w=120.0,
    transmit_antenna_gain=25119.0,
    transmit_loss=0.891,
    receive_antenna_gain=1585.0,
    noise_figure=550.0,
    noise_reference_bandwidth_hz=2.0e8,
    carrier_hz=1.4e10,
    channel_bandwidth_hz=2.0e8,
    snr_threshold=4.0,
)

RAIN = RainModel(
    specific_attenuation_alpha=0.0101,
    specific_attenuation_beta=1.276,
    rain_rate_mm_h=5.0,
    antenna_height_km=0.01,
    effective_earth_radius_km=8500.0,
)

# 20*log10(4*pi/c) for distance in metres, frequency in Hz
FSPL_CONSTANT_DB = 20.0 * math.log10(4.0 * math.pi / SPEED_OF_LIGHT_M_S)


def test_free_space_gain_closed_form():
    d_km, f = 24187.010, 1.4e10
    lam = SPEED_OF_LIGHT_M_S / f
    expected = (lam / (4.0 * math.pi * d_km * 1000.0)) ** 2
    assert free_space_gain(d_km, f) == pytest.approx(expected, rel=1e-12)


def test_fspl_db_identity():
    # path loss in dB decomposes into the textbook 20log d + 20log f + const
    for d_km, f in [(1.0, 1e9), (20184.0, 1.4e10), (24187.010, 3e10), (0.5, 2.4e9)]:
        loss_db = -10.0 * math.log10(free_space_gain(d_km, f))
        expected = 20.0 * math.log10(d_km * 1000.0) + 20.0 * math.log10(f) + FSPL_CONSTANT_DB
        assert loss_db == pytest.approx(expected, rel=1e-12)


@given(d_km=st.floats(0.1, 1e5), f=st.floats(1e8, 1e11))
@settings(max_examples=100, deadline=None)
def test_free_space_gain_in_unit_interval(d_km, f):
    g = free_space_gain(d_km, f)
    assert 0.0 < g < 1.0


def test_free_space_gain_monotone():
    assert free_space_gain(2000.0, 1e10) < free_space_gain(1000.0, 1e10)
    assert free_space_gain(1000.0, 2e10) < free_space_gain(1000.0, 1e10)


def test_free_space_gain_rejects_nonpositive():
    with pytest.raises(ValueError):
        free_space_gain(0.0, 1e10)
    with pytest.raises(ValueError):
        free_space_gain(100.0, -1.0)


def test_rain_height_piecewise():
    assert rain_height_km(0.0) == 5.0
    assert rain_height_km(23.0) == 5.0
    assert rain_height_km(-23.0) == 5.0
    assert rain_height_km(43.0) == pytest.approx(5.0 - 0.075 * 20.0)
    assert rain_height_km(-43.0) == pytest.approx(5.0 - 0.075 * 20.0)
    # clamped at zero far poleward
    assert rain_height_km(90.0) == 0.0


def test_slant_path_vertical():
    assert slant_path_km(5.0, 0.0, 90.0, 8500.0) == pytest.approx(5.0)


def test_slant_path_csc_branch():
    got = slant_path_km(5.0, 1.0, 30.0, 8500.0)
    assert got == pytest.approx(4.0 / math.sin(math.radians(30.0)))


def test_slant_path_low_elevation_branch():
    # below 5 degrees the corrected formula applies and is finite
    dh = 5.0
    s = math.sin(math.radians(2.0))
    expected = 2.0 * dh / (math.sqrt(s * s + 2.0 * dh / 8500.0) + s)
    assert slant_path_km(5.0, 0.0, 2.0, 8500.0) == pytest.approx(expected)
    # and continuous-ish at the branch point: both forms agree within a few %
    lo = slant_path_km(5.0, 0.0, 4.999999, 8500.0)
    hi = slant_path_km(5.0, 0.0, 5.000001, 8500.0)
    assert abs(lo - hi) / hi < 0.05


def test_slant_path_antenna_above_rain():
    assert slant_path_km(5.0, 5.0, 45.0, 8500.0) == 0.0
    assert slant_path_km(5.0, 10.7, 45.0, 8500.0) == 0.0


def test_slant_path_rejects_nonpositive_elevation():
    with pytest.raises(ValueError):
        slant_path_km(5.0, 0.0, 0.0, 8500.0)


def test_rain_gain_power_law():
    slant = 10.0
    spec_db = 0.0101 * 5.0**1.276
    assert rain_gain(RAIN, slant) == pytest.approx(10.0 ** (-spec_db * slant / 10.0))


def test_rain_gain_dry_or_zero_path():
    dry = RainModel(
        specific_attenuation_alpha=0.0101,
        specific_attenuation_beta=1.276,
        rain_rate_mm_h=0.0,
        antenna_height_km=0.0,
        effective_earth_radius_km=8500.0,
    )
    assert rain_gain(dry, 25.0) == 1.0
    assert rain_gain(RAIN, 0.0) == 1.0


def test_propagation_gain_flight_above_rain_layer():
    # a cruising aircraft above the rain height sees pure free space
    g = propagation_gain(PARAMS, RAIN, 21000.0, 40.0, 10.0, user_alt_km=10.7)
    assert g == pytest.approx(free_space_gain(21000.0, PARAMS.carrier_hz), rel=1e-12)


def test_propagation_gain_ground_attenuates():
    g_wet = propagation_gain(PARAMS, RAIN, 21000.0, 40.0, 10.0, user_alt_km=0.0)
    g_free = free_space_gain(21000.0, PARAMS.carrier_hz)
    assert g_wet < g_free


def test_snr_composition():
    g = 1e-20
    expected = (120.0 * 25119.0 * 0.891 * 1585.0 * g) / (BOLTZMANN_J_K * 550.0 * 2.0e8)
    assert snr(PARAMS, g) == pytest.approx(expected, rel=1e-12)


def test_worst_case_link_closes():
    # threshold-elevation tropical user in rain still clears the SNR gate
    g = propagation_gain(PARAMS, RAIN, 24187.010, 15.0, 10.0)
    s = snr(PARAMS, g)
    assert s >= PARAMS.snr_threshold
    assert 10.0 * math.log10(s) == pytest.approx(9.916, abs=5e-3)


def test_data_rate_shannon():
    s = 10.0
    assert data_rate_bps(1.0, PARAMS, s) == pytest.approx(2.0e8 * math.log2(11.0))
    assert data_rate_bps(0.25, PARAMS, s) == pytest.approx(0.25 * 2.0e8 * math.log2(11.0))
    assert data_rate_bps(0.0, PARAMS, s) == 0.0


def test_data_rate_rejects_bad_inputs():
    with pytest.raises(ValueError):
        data_rate_bps(1.5, PARAMS, 1.0)
    with pytest.raises(ValueError):
        data_rate_bps(0.5, PARAMS, -0.1)


def test_params_validation():
    with pytest.raises(Exception):
        LinkBudgetParams(
            transmit_power_w=-1.0,
            transmit_antenna_gain=1.0,
            transmit_loss=0.9,
            receive_antenna_gain=1.0,
            noise_figure=500.0,
            noise_reference_bandwidth_hz=1e8,
            carrier_hz=1e10,
            channel_bandwidth_hz=1e8,
        )
    with pytest.raises(Exception):
        LinkBudgetParams(
            transmit_power_w=1.0,
            transmit_antenna_gain=1.0,
            transmit_loss=1.5,
            receive_antenna_gain=1.0,
            noise_figure=500.0,
            noise_reference_bandwidth_hz=1e8,
            carrier_hz=1e10,
            channel_bandwidth_hz=1e8,
        )
