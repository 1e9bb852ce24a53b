"""Ground clusters, flight users, and per-user service profiles.

Ground users are fixed population clusters that always demand service;
their arrival rates scale linearly with population around a base rate.
Flight users follow waypoint plans (time, lat, lon, alt) and only demand
service while cruising: at or above the cruise floor with a near-zero
vertical rate.  Activity is evaluated at the slot midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .constellation import GeodeticPoint
from .errors import ConfigurationError

UserKind = Literal["ground", "flight"]

DEFAULT_CRUISE_FLOOR_KM = 8.0
DEFAULT_CLIMB_RATE_THRESHOLD_KM_S = 0.002


@dataclass(frozen=True)
class UserProfile:
    """Service demand six-tuple plus identity."""

    user_id: int
    kind: UserKind
    packet_bits: float
    max_delay_s: float
    min_compute: float             # resource units; shipped scenarios use F_max = 1
    arrival_rate_pps: float
    migration_cost_weight: float   # beta1: utility lost per migration
    service_utility_weight: float  # beta2: utility per served bit

    def __post_init__(self) -> None:
        if self.kind not in ("ground", "flight"):
            raise ConfigurationError("kind must be 'ground' or 'flight'")
        if self.packet_bits <= 0:
            raise ConfigurationError("packet_bits must be > 0")
        if self.max_delay_s <= 0:
            raise ConfigurationError("max_delay_s must be > 0")
        if self.min_compute < 0:
            raise ConfigurationError("min_compute must be >= 0")
        if self.arrival_rate_pps < 0:
            raise ConfigurationError("arrival_rate_pps must be >= 0")
        if self.migration_cost_weight < 0 or self.service_utility_weight < 0:
            raise ConfigurationError("utility weights must be >= 0")


@dataclass(frozen=True)
class GroundCluster:
    name: str
    location: GeodeticPoint
    population: float
    profile: UserProfile | None = None

    def __post_init__(self) -> None:
        if self.population <= 0:
            raise ConfigurationError("population must be > 0")


@dataclass(frozen=True)
class FlightPlan:
    """Waypoint plan for one flight user; waypoints are (t_s, point) pairs."""

    flight_id: int
    waypoints: tuple[tuple[float, GeodeticPoint], ...]
    cruise_floor_km: float = DEFAULT_CRUISE_FLOOR_KM
    climb_rate_threshold_km_s: float = DEFAULT_CLIMB_RATE_THRESHOLD_KM_S
    profile: UserProfile | None = None

    def __post_init__(self) -> None:
        if len(self.waypoints) < 2:
            raise ConfigurationError("waypoints must contain at least two entries")
        times = [t for t, _ in self.waypoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigurationError("waypoint times must be strictly increasing")
        if self.cruise_floor_km <= 0:
            raise ConfigurationError("cruise_floor_km must be > 0")
        if self.climb_rate_threshold_km_s < 0:
            raise ConfigurationError("climb_rate_threshold_km_s must be >= 0")


@dataclass(frozen=True)
class ProfileRanges:
    """Uniform sampling bounds for profile fields, one instance per user kind."""

    packet_bits: tuple[float, float]
    max_delay_s: tuple[float, float]
    min_compute: tuple[float, float]
    migration_cost_weight: tuple[float, float]
    service_utility_weight: tuple[float, float]
    arrival_rate_pps: tuple[float, float] | None = None  # flights draw; ground scales population

    def __post_init__(self) -> None:
        for name in (
            "packet_bits",
            "max_delay_s",
            "min_compute",
            "migration_cost_weight",
            "service_utility_weight",
            "arrival_rate_pps",
        ):
            bounds = getattr(self, name)
            if bounds is None:
                continue
            lo, hi = bounds
            if lo > hi:
                raise ConfigurationError(f"{name} bounds must satisfy lo <= hi")
            if lo < 0:
                raise ConfigurationError(f"{name} bounds must be >= 0")


def arrival_rate(population: float, mean_population: float, base_rate_pps: float) -> float:
    """Cluster packet rate scaled by population share of the mean."""
    if population <= 0 or mean_population <= 0:
        raise ValueError("populations must be > 0")
    if base_rate_pps < 0:
        raise ValueError("base_rate_pps must be >= 0")
    return base_rate_pps * population / mean_population


def wrap_longitude(lon_deg: float) -> float:
    """Wrap to (-180, 180]."""
    w = (lon_deg + 180.0) % 360.0
    return 180.0 if w == 0.0 else w - 180.0


def _interp_lon(lon_a: float, lon_b: float, frac: float) -> float:
    # shorter arc across the date line
    delta = (lon_b - lon_a + 180.0) % 360.0 - 180.0
    return wrap_longitude(lon_a + frac * delta)


def _segment_index(flight: FlightPlan, t_seconds: float) -> int | None:
    times = [t for t, _ in flight.waypoints]
    if t_seconds < times[0] or t_seconds > times[-1]:
        return None
    for i in range(len(times) - 1):
        if t_seconds < times[i + 1]:
            return i
    return len(times) - 2  # exactly at the final waypoint


def position_at(flight: FlightPlan, t_seconds: float) -> GeodeticPoint | None:
    """Interpolated position, or None outside the flight window."""
    i = _segment_index(flight, t_seconds)
    if i is None:
        return None
    (t0, p0), (t1, p1) = flight.waypoints[i], flight.waypoints[i + 1]
    frac = (t_seconds - t0) / (t1 - t0)
    return GeodeticPoint(
        lat_deg=p0.lat_deg + frac * (p1.lat_deg - p0.lat_deg),
        lon_deg=_interp_lon(p0.lon_deg, p1.lon_deg, frac),
        alt_km=p0.alt_km + frac * (p1.alt_km - p0.alt_km),
    )


def vertical_rate_km_s(flight: FlightPlan, t_seconds: float) -> float | None:
    """Altitude slope of the enclosing waypoint segment, or None outside."""
    i = _segment_index(flight, t_seconds)
    if i is None:
        return None
    (t0, p0), (t1, p1) = flight.waypoints[i], flight.waypoints[i + 1]
    return (p1.alt_km - p0.alt_km) / (t1 - t0)


def is_cruising(flight: FlightPlan, t_seconds: float) -> bool:
    """True while level at or above the cruise floor, inside the flight window."""
    point = position_at(flight, t_seconds)
    if point is None:
        return False
    rate = vertical_rate_km_s(flight, t_seconds)
    return point.alt_km >= flight.cruise_floor_km and abs(rate) <= flight.climb_rate_threshold_km_s


def active_users(
    clusters: list[GroundCluster],
    flights: list[FlightPlan],
    slot: int,
    slot_seconds: float,
) -> list[tuple[UserProfile, GeodeticPoint]]:
    """Profiles and positions of every user demanding service this slot.

    Ground clusters are always active; flights only while cruising at the
    slot midpoint.  Profiles must already be materialized.
    """
    if slot < 0 or slot_seconds <= 0:
        raise ValueError("slot must be >= 0 and slot_seconds > 0")
    midpoint = (slot + 0.5) * slot_seconds
    out: list[tuple[UserProfile, GeodeticPoint]] = []
    for cluster in clusters:
        if cluster.profile is None:
            raise ConfigurationError(f"cluster {cluster.name} has no materialized profile")
        out.append((cluster.profile, cluster.location))
    for flight in flights:
        if not is_cruising(flight, midpoint):
            continue
        if flight.profile is None:
            raise ConfigurationError(f"flight {flight.flight_id} has no materialized profile")
        out.append((flight.profile, position_at(flight, midpoint)))
    return out


def _draw(rng: np.random.Generator, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return lo if lo == hi else float(rng.uniform(lo, hi))


def sample_profile(
    rng: np.random.Generator,
    user_id: int,
    kind: UserKind,
    ranges: ProfileRanges,
    arrival_rate_pps: float | None = None,
) -> UserProfile:
    """Draw one profile; field order is fixed so a seed pins the episode."""
    packet_bits = _draw(rng, ranges.packet_bits)
    max_delay_s = _draw(rng, ranges.max_delay_s)
    min_compute = _draw(rng, ranges.min_compute)
    migration_cost_weight = _draw(rng, ranges.migration_cost_weight)
    service_utility_weight = _draw(rng, ranges.service_utility_weight)
    if arrival_rate_pps is None:
        if ranges.arrival_rate_pps is None:
            raise ConfigurationError("arrival_rate_pps bounds required when no rate is supplied")
        arrival_rate_pps = _draw(rng, ranges.arrival_rate_pps)
    return UserProfile(
        user_id=user_id,
        kind=kind,
        packet_bits=packet_bits,
        max_delay_s=max_delay_s,
        min_compute=min_compute,
        arrival_rate_pps=arrival_rate_pps,
        migration_cost_weight=migration_cost_weight,
        service_utility_weight=service_utility_weight,
    )


def materialize(
    clusters: list[GroundCluster],
    flights: list[FlightPlan],
    ground_ranges: ProfileRanges,
    flight_ranges: ProfileRanges,
    base_arrival_rate_pps: float,
    seed: int,
) -> tuple[list[GroundCluster], list[FlightPlan]]:
    """Attach sampled profiles to clusters and flights, deterministically per seed.

    Cluster user ids are their positions in the cluster list; flight ids come
    from the plans.  Cluster arrival rates scale with population; flight rates
    are drawn from the flight ranges.
    """
    rng = np.random.default_rng(seed)
    mean_population = sum(c.population for c in clusters) / len(clusters) if clusters else 1.0
    out_clusters = []
    for index, cluster in enumerate(clusters):
        rate = arrival_rate(cluster.population, mean_population, base_arrival_rate_pps)
        profile = sample_profile(rng, index, "ground", ground_ranges, arrival_rate_pps=rate)
        out_clusters.append(replace(cluster, profile=profile))
    out_flights = []
    for flight in flights:
        profile = sample_profile(rng, flight.flight_id, "flight", flight_ranges)
        out_flights.append(replace(flight, profile=profile))
    return out_clusters, out_flights
