"""Geometry tests: propagation against an independent integrator, elevation behavior."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satedge.constellation import (
    EARTH_RADIUS_KM,
    ConstellationConfig,
    GeodeticPoint,
    ecef_to_eci,
    eci_position,
    eci_to_ecef,
    elevation_angle,
    elevation_from_ecef,
    geodetic_to_ecef,
    gmst_deg,
    propagate,
    slant_range_km,
    visible,
)
from satedge.errors import ConfigurationError

from .oracles import rk4_two_body

CFG = ConstellationConfig()


def test_orbit_radius_and_period():
    assert CFG.orbit_radius_km == pytest.approx(26562.137, abs=1e-3)
    assert CFG.orbital_period_s == pytest.approx(43082.956, abs=1e-2)


def test_mean_motion_matches_definition():
    n = CFG.mean_motion_rad_s
    assert n == pytest.approx(math.sqrt(CFG.mu_km3_s2 / CFG.orbit_radius_km**3), rel=1e-15)


def test_circular_speed_constant_radius():
    for t in (0.0, 1234.5, 20000.0, 43000.0):
        for k in range(CFG.num_satellites):
            x, y, z = eci_position(CFG, k, t)
            r = math.sqrt(x * x + y * y + z * z)
            assert r == pytest.approx(CFG.orbit_radius_km, rel=1e-12)


def test_rk4_period_recurrence():
    # two-body integration of the analytic initial state must come back to it
    r0 = eci_position(CFG, 0, 0.0)
    # velocity: v = n x r with angular momentum along the orbit normal; easier
    # to take a finite-difference seed from the analytic propagator
    h = 1e-3
    r_plus = eci_position(CFG, 0, h)
    r_minus = eci_position(CFG, 0, -h)
    v0 = tuple((a - b) / (2 * h) for a, b in zip(r_plus, r_minus))
    period = CFG.orbital_period_s
    r_end, _ = rk4_two_body(r0, v0, CFG.mu_km3_s2, period, step_s=1.0)
    scale = CFG.orbit_radius_km
    for a, b in zip(r_end, r0):
        assert abs(a - b) / scale < 1e-6


def test_rk4_tracks_analytic_positions():
    r0 = eci_position(CFG, 3, 0.0)
    h = 1e-3
    v0 = tuple(
        (a - b) / (2 * h)
        for a, b in zip(eci_position(CFG, 3, h), eci_position(CFG, 3, -h))
    )
    for t in (300.0, 3000.0, 15000.0):
        r_num, _ = rk4_two_body(r0, v0, CFG.mu_km3_s2, t, step_s=1.0)
        r_ana = eci_position(CFG, 3, t)
        err = max(abs(a - b) for a, b in zip(r_num, r_ana))
        assert err / CFG.orbit_radius_km < 1e-6


def test_phasing_offsets_between_planes():
    # adjacent planes are offset in anomaly by the phasing factor
    t = 777.0
    base = eci_position(CFG, 0, t)
    shifted = eci_position(CFG, 0, t + CFG.orbital_period_s / CFG.num_satellites)
    # satellite 1 sits one phase step ahead in its own (rotated) plane, so its
    # radius matches and its anomaly leads by 360/S degrees
    one = eci_position(CFG, 1, t)
    r_one = math.sqrt(sum(c * c for c in one))
    assert r_one == pytest.approx(CFG.orbit_radius_km, rel=1e-12)
    assert math.dist(base, shifted) > 1.0  # sanity: the step actually moves it


def test_gmst_advances_at_sidereal_rate():
    g0 = gmst_deg(CFG, 0.0)
    g1 = gmst_deg(CFG, 3600.0)
    expected = math.degrees(7.2921150e-5 * 3600.0)
    assert (g1 - g0) % 360.0 == pytest.approx(expected, rel=1e-12)


def test_eci_ecef_round_trip():
    p = (12345.6, -7890.1, 4567.8)
    for g in (0.0, 37.5, 180.0, 359.9):
        back = ecef_to_eci(eci_to_ecef(p, g), g)
        for a, b in zip(back, p):
            assert a == pytest.approx(b, abs=1e-9)


def test_propagate_shape_and_determinism():
    sats = propagate(CFG, 7, 300.0)
    assert [s.sat_id for s in sats] == list(range(8))
    assert all(s.slot == 7 for s in sats)
    again = propagate(CFG, 7, 300.0)
    assert [s.position_ecef_km for s in again] == [s.position_ecef_km for s in sats]


def test_sub_satellite_point_is_exactly_90():
    # place the user directly below the satellite: scale the ECEF vector
    sats = propagate(CFG, 11, 300.0)
    for sat in sats:
        x, y, z = sat.position_ecef_km
        r = math.sqrt(x * x + y * y + z * z)
        user = tuple(c * EARTH_RADIUS_KM / r for c in (x, y, z))
        assert elevation_from_ecef(sat.position_ecef_km, user) == 90.0


def test_antipode_is_exactly_minus_90():
    sat = (26562.137, 0.0, 0.0)
    user = (-EARTH_RADIUS_KM, 0.0, 0.0)
    assert elevation_from_ecef(sat, user) == -90.0


def test_elevation_monotone_in_central_angle():
    # sweep the user along a great circle away from the sub-satellite point:
    # elevation must strictly decrease
    r_sat = CFG.orbit_radius_km
    sat = (r_sat, 0.0, 0.0)
    prev = 91.0
    for i in range(1000):
        psi = math.radians(0.01 + i * (179.8 / 999))
        user = (EARTH_RADIUS_KM * math.cos(psi), EARTH_RADIUS_KM * math.sin(psi), 0.0)
        e = elevation_from_ecef(sat, user)
        assert e < prev
        prev = e


def test_threshold_geometry_numbers():
    # central angle and slant range where elevation crosses 15 degrees
    r_sat = CFG.orbit_radius_km
    lo, hi = 0.0, math.pi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        user = (EARTH_RADIUS_KM * math.cos(mid), EARTH_RADIUS_KM * math.sin(mid), 0.0)
        if elevation_from_ecef((r_sat, 0.0, 0.0), user) > 15.0:
            lo = mid
        else:
            hi = mid
    psi = math.degrees(0.5 * (lo + hi))
    assert psi == pytest.approx(61.5887, abs=2e-4)
    user = (
        EARTH_RADIUS_KM * math.cos(math.radians(psi)),
        EARTH_RADIUS_KM * math.sin(math.radians(psi)),
        0.0,
    )
    assert slant_range_km((r_sat, 0.0, 0.0), user) == pytest.approx(24187.010, abs=0.05)


def test_visible_uses_threshold_inclusively():
    sat = propagate(CFG, 0, 300.0)[0]
    user = GeodeticPoint(0.0, 0.0)
    e = elevation_angle(sat, user, CFG)
    assert visible(sat, user, e, CFG)
    assert not visible(sat, user, e + 1e-9, CFG)


def test_geodetic_to_ecef_poles_and_equator():
    assert geodetic_to_ecef(GeodeticPoint(90.0, 0.0)) == pytest.approx(
        (0.0, 0.0, EARTH_RADIUS_KM), abs=1e-9
    )
    x, y, z = geodetic_to_ecef(GeodeticPoint(0.0, 90.0))
    assert (x, y, z) == pytest.approx((0.0, EARTH_RADIUS_KM, 0.0), abs=1e-9)
    # altitude adds radially
    x2, _, _ = geodetic_to_ecef(GeodeticPoint(0.0, 0.0, alt_km=10.0))
    assert x2 == pytest.approx(EARTH_RADIUS_KM + 10.0, rel=1e-12)


@given(
    lat=st.floats(-90.0, 90.0),
    lon=st.floats(-180.0, 180.0),
    t=st.floats(0.0, 43082.0),
    k=st.integers(0, 7),
)
@settings(max_examples=150, deadline=None)
def test_elevation_always_in_range(lat, lon, t, k):
    sat_eci = eci_position(CFG, k, t)
    sat_ecef = eci_to_ecef(sat_eci, gmst_deg(CFG, t))
    e = elevation_from_ecef(sat_ecef, geodetic_to_ecef(GeodeticPoint(lat, lon)))
    assert -90.0 <= e <= 90.0


def test_config_validation():
    with pytest.raises(ConfigurationError):
        ConstellationConfig(num_satellites=0)
    with pytest.raises(ConfigurationError):
        ConstellationConfig(altitude_km=-1.0)
    with pytest.raises(ConfigurationError):
        GeodeticPoint(91.0, 0.0)
    with pytest.raises(ConfigurationError):
        GeodeticPoint(0.0, 181.0)
