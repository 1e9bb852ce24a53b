"""Rosette constellation propagation and satellite-user geometry.

Satellites fly circular two-body orbits in a symmetric multi-plane shell
(equal RAAN spacing, phased mean anomalies).  Positions are propagated in
an inertial frame and rotated into ECEF with a linear sidereal angle, so
ground tracks drift westward as the Earth turns under the shell.

Elevation uses the spherical-Earth relation

    elev = arctan((cos g - r_user/r_sat) / sqrt(1 - cos^2 g))

where g is the central angle between the user and the sub-satellite
point.  The denominator vanishes when the user sits exactly at the
sub-satellite point; that singular case is +90 degrees by convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError

EARTH_RADIUS_KM = 6378.137
EARTH_MU_KM3_S2 = 398600.4418
# sidereal rotation rate, rad/s
EARTH_ROTATION_RAD_S = 7.2921150e-5


@dataclass(frozen=True)
class ConstellationConfig:
    """Symmetric circular-orbit shell: one satellite per equally spaced plane."""

    num_satellites: int = 8
    altitude_km: float = 20184.0
    inclination_deg: float = 53.0
    raan_spacing_deg: float = 45.0
    phasing_factor: float = 1.0
    epoch_gmst_deg: float = 0.0
    earth_radius_km: float = EARTH_RADIUS_KM
    mu_km3_s2: float = EARTH_MU_KM3_S2

    def __post_init__(self) -> None:
        if self.num_satellites < 1:
            raise ConfigurationError("num_satellites must be >= 1")
        if self.altitude_km <= 0:
            raise ConfigurationError("altitude_km must be > 0")
        if not -90.0 <= self.inclination_deg <= 180.0:
            raise ConfigurationError("inclination_deg out of range")
        if self.earth_radius_km <= 0:
            raise ConfigurationError("earth_radius_km must be > 0")
        if self.mu_km3_s2 <= 0:
            raise ConfigurationError("mu_km3_s2 must be > 0")

    @property
    def orbit_radius_km(self) -> float:
        return self.earth_radius_km + self.altitude_km

    @property
    def mean_motion_rad_s(self) -> float:
        return math.sqrt(self.mu_km3_s2 / self.orbit_radius_km**3)

    @property
    def orbital_period_s(self) -> float:
        return 2.0 * math.pi / self.mean_motion_rad_s


@dataclass(frozen=True)
class GeodeticPoint:
    """Spherical-Earth geodetic location; alt_km also carries antenna height."""

    lat_deg: float
    lon_deg: float
    alt_km: float = 0.0

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ConfigurationError("lat_deg must lie in [-90, 90]")
        if not -180.0 <= self.lon_deg <= 180.0:
            raise ConfigurationError("lon_deg must lie in [-180, 180]")


@dataclass(frozen=True)
class SatelliteState:
    sat_id: int
    position_ecef_km: tuple[float, float, float]
    slot: int


def gmst_deg(config: ConstellationConfig, t_seconds: float) -> float:
    """Greenwich sidereal angle at t seconds past the scenario epoch."""
    return (config.epoch_gmst_deg + math.degrees(EARTH_ROTATION_RAD_S * t_seconds)) % 360.0


def eci_position(config: ConstellationConfig, sat_index: int, t_seconds: float) -> tuple[float, float, float]:
    """Inertial position of one satellite at t seconds past epoch."""
    a = config.orbit_radius_km
    raan = math.radians(sat_index * config.raan_spacing_deg)
    # in-plane phase offset: phasing_factor * 360 / N per plane index
    phase0 = math.radians(sat_index * config.phasing_factor * 360.0 / config.num_satellites)
    u = phase0 + config.mean_motion_rad_s * t_seconds
    inc = math.radians(config.inclination_deg)

    xp = a * math.cos(u)
    yp = a * math.sin(u)
    # rotate orbital plane: Rz(raan) @ Rx(inc) @ (xp, yp, 0)
    x1, y1, z1 = xp, yp * math.cos(inc), yp * math.sin(inc)
    cr, sr = math.cos(raan), math.sin(raan)
    return (x1 * cr - y1 * sr, x1 * sr + y1 * cr, z1)


def eci_to_ecef(position_eci: tuple[float, float, float], gmst_degrees: float) -> tuple[float, float, float]:
    theta = math.radians(gmst_degrees)
    ct, st = math.cos(theta), math.sin(theta)
    x, y, z = position_eci
    return (x * ct + y * st, -x * st + y * ct, z)


def ecef_to_eci(position_ecef: tuple[float, float, float], gmst_degrees: float) -> tuple[float, float, float]:
    return eci_to_ecef(position_ecef, -gmst_degrees)


def propagate(config: ConstellationConfig, slot: int, slot_seconds: float) -> list[SatelliteState]:
    """ECEF states of every satellite at the start of a slot."""
    if slot < 0:
        raise ConfigurationError("slot must be >= 0")
    if slot_seconds <= 0:
        raise ConfigurationError("slot_seconds must be > 0")
    t = slot * slot_seconds
    theta = gmst_deg(config, t)
    states = []
    for k in range(config.num_satellites):
        ecef = eci_to_ecef(eci_position(config, k, t), theta)
        states.append(SatelliteState(sat_id=k, position_ecef_km=ecef, slot=slot))
    return states


def geodetic_to_ecef(point: GeodeticPoint, earth_radius_km: float = EARTH_RADIUS_KM) -> tuple[float, float, float]:
    r = earth_radius_km + point.alt_km
    lat = math.radians(point.lat_deg)
    lon = math.radians(point.lon_deg)
    return (
        r * math.cos(lat) * math.cos(lon),
        r * math.cos(lat) * math.sin(lon),
        r * math.sin(lat),
    )


def elevation_from_ecef(
    sat_ecef_km: tuple[float, float, float], user_ecef_km: tuple[float, float, float]
) -> float:
    """Elevation of the satellite above the user's local horizon, degrees."""
    sx, sy, sz = sat_ecef_km
    ux, uy, uz = user_ecef_km
    r_sat = math.sqrt(sx * sx + sy * sy + sz * sz)
    r_user = math.sqrt(ux * ux + uy * uy + uz * uz)
    if r_sat <= 0 or r_user <= 0:
        raise ConfigurationError("positions must be nonzero")
    cos_g = (sx * ux + sy * uy + sz * uz) / (r_sat * r_user)
    cos_g = max(-1.0, min(1.0, cos_g))
    sin_g = math.sqrt(max(0.0, 1.0 - cos_g * cos_g))
    if sin_g < 1e-7:
        # sub-satellite point (or its antipode): the arctan form is singular.
        # The threshold absorbs rounding in collinear inputs; 1e-7 rad of
        # central angle is under a millimeter of ground offset here.
        return 90.0 if cos_g > 0.0 else -90.0
    return math.degrees(math.atan((cos_g - r_user / r_sat) / sin_g))


def elevation_angle(sat: SatelliteState, user: GeodeticPoint, config: ConstellationConfig) -> float:
    """Elevation of sat as seen by a user on the spherical Earth, degrees."""
    return elevation_from_ecef(sat.position_ecef_km, geodetic_to_ecef(user, config.earth_radius_km))


def visible(
    sat: SatelliteState, user: GeodeticPoint, theta_min_deg: float, config: ConstellationConfig
) -> bool:
    """True iff the satellite clears the minimum elevation for service."""
    return elevation_angle(sat, user, config) >= theta_min_deg


def slant_range_km(
    sat_ecef_km: tuple[float, float, float], user_ecef_km: tuple[float, float, float]
) -> float:
    dx = sat_ecef_km[0] - user_ecef_km[0]
    dy = sat_ecef_km[1] - user_ecef_km[1]
    dz = sat_ecef_km[2] - user_ecef_km[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz)
