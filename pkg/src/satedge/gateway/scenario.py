"""Scenario files: schema, validation, loading, serialization.

A scenario is a single JSON document with these sections:

    constellation    shell geometry (see ConstellationConfig)
    link_budget      radio chain (see LinkBudgetParams)
    rain             rain attenuation model (see RainModel)
    env              episode and constraint parameters (see EnvConfig)
    profile_ranges   base_arrival_rate_pps + per-kind sampling bounds
    clusters         [{name, lat_deg, lon_deg, population}, ...]
    flights          [{flight_id, cruise_floor_km, climb_rate_threshold_km_s,
                       waypoints: [[t_s, lat_deg, lon_deg, alt_km], ...]}, ...]

Sections with dataclass defaults may omit fields; unknown fields are
rejected so typos fail loudly.  Validation errors name the offending field.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from ..constellation import ConstellationConfig, GeodeticPoint
from ..environment import EnvConfig, PenaltyWeights
from ..errors import ConfigurationError, ScenarioError
from ..link_budget import LinkBudgetParams, RainModel
from ..traffic import FlightPlan, GroundCluster, ProfileRanges


@dataclass(frozen=True)
class Scenario:
    constellation: ConstellationConfig
    link_budget: LinkBudgetParams
    rain: RainModel
    env: EnvConfig
    clusters: tuple[GroundCluster, ...]
    flights: tuple[FlightPlan, ...]
    ground_profile_ranges: ProfileRanges
    flight_profile_ranges: ProfileRanges
    base_arrival_rate_pps: float

    def __post_init__(self) -> None:
        if not self.clusters:
            raise ScenarioError("clusters: at least one cluster is required")
        if self.flight_profile_ranges.arrival_rate_pps is None and self.flights:
            raise ScenarioError("profile_ranges.flight.arrival_rate_pps: required when flights exist")
        ids = [f.flight_id for f in self.flights]
        n = len(self.clusters)
        if len(set(ids)) != len(ids):
            raise ScenarioError("flights: flight_id values must be unique")
        for fid in ids:
            if fid < n:
                raise ScenarioError(
                    f"flights: flight_id {fid} collides with cluster user ids 0..{n - 1}"
                )

    @property
    def user_count(self) -> int:
        return len(self.clusters) + len(self.flights)

    @property
    def max_nodes(self) -> int:
        return self.constellation.num_satellites + self.user_count


def _expect_mapping(raw: Any, path: str) -> dict:
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: expected an object")
    return raw


def _expect_number(raw: Any, path: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ScenarioError(f"{path}: expected a number")
    return float(raw)


def _expect_pair(raw: Any, path: str) -> tuple[float, float]:
    if not isinstance(raw, list) or len(raw) != 2:
        raise ScenarioError(f"{path}: expected [lo, hi]")
    return (_expect_number(raw[0], f"{path}[0]"), _expect_number(raw[1], f"{path}[1]"))


def _build_dataclass(cls: type, raw: Any, path: str, converters: dict[str, Any] | None = None) -> Any:
    """Construct a config dataclass from a JSON object, naming bad fields."""
    raw = _expect_mapping(raw, path)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(raw) - set(fields)
    if unknown:
        raise ScenarioError(f"{path}.{sorted(unknown)[0]}: unknown field")
    kwargs = {}
    for name, value in raw.items():
        field_path = f"{path}.{name}"
        if converters and name in converters:
            kwargs[name] = converters[name](value, field_path)
        elif fields[name].type in ("int", int):
            num = _expect_number(value, field_path)
            if num != int(num):
                raise ScenarioError(f"{field_path}: expected an integer")
            kwargs[name] = int(num)
        else:
            kwargs[name] = _expect_number(value, field_path)
    missing = [
        name
        for name, f in fields.items()
        if name not in kwargs
        and f.default is dataclasses.MISSING
        and f.default_factory is dataclasses.MISSING
    ]
    if missing:
        raise ScenarioError(f"{path}.{missing[0]}: missing required field")
    try:
        return cls(**kwargs)
    except ConfigurationError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _build_ranges(raw: Any, path: str, flight: bool) -> ProfileRanges:
    raw = _expect_mapping(raw, path)
    names = {
        "packet_bits",
        "max_delay_s",
        "min_compute",
        "migration_cost_weight",
        "service_utility_weight",
    }
    if flight:
        names.add("arrival_rate_pps")
    unknown = set(raw) - names
    if unknown:
        raise ScenarioError(f"{path}.{sorted(unknown)[0]}: unknown field")
    missing = names - set(raw)
    if missing:
        raise ScenarioError(f"{path}.{sorted(missing)[0]}: missing required field")
    kwargs = {name: _expect_pair(raw[name], f"{path}.{name}") for name in raw}
    try:
        return ProfileRanges(**kwargs)
    except ConfigurationError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _build_cluster(raw: Any, path: str) -> GroundCluster:
    raw = _expect_mapping(raw, path)
    for name in ("name", "lat_deg", "lon_deg", "population"):
        if name not in raw:
            raise ScenarioError(f"{path}.{name}: missing required field")
    unknown = set(raw) - {"name", "lat_deg", "lon_deg", "population", "alt_km"}
    if unknown:
        raise ScenarioError(f"{path}.{sorted(unknown)[0]}: unknown field")
    if not isinstance(raw["name"], str) or not raw["name"]:
        raise ScenarioError(f"{path}.name: expected a non-empty string")
    try:
        location = GeodeticPoint(
            lat_deg=_expect_number(raw["lat_deg"], f"{path}.lat_deg"),
            lon_deg=_expect_number(raw["lon_deg"], f"{path}.lon_deg"),
            alt_km=_expect_number(raw.get("alt_km", 0.0), f"{path}.alt_km"),
        )
        return GroundCluster(
            name=raw["name"],
            location=location,
            population=_expect_number(raw["population"], f"{path}.population"),
        )
    except ConfigurationError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _build_flight(raw: Any, path: str) -> FlightPlan:
    raw = _expect_mapping(raw, path)
    for name in ("flight_id", "waypoints"):
        if name not in raw:
            raise ScenarioError(f"{path}.{name}: missing required field")
    allowed = {"flight_id", "waypoints", "cruise_floor_km", "climb_rate_threshold_km_s"}
    unknown = set(raw) - allowed
    if unknown:
        raise ScenarioError(f"{path}.{sorted(unknown)[0]}: unknown field")
    fid = _expect_number(raw["flight_id"], f"{path}.flight_id")
    if fid != int(fid) or fid < 0:
        raise ScenarioError(f"{path}.flight_id: expected a nonnegative integer")
    if not isinstance(raw["waypoints"], list):
        raise ScenarioError(f"{path}.waypoints: expected a list")
    waypoints = []
    for i, row in enumerate(raw["waypoints"]):
        wp_path = f"{path}.waypoints[{i}]"
        if not isinstance(row, list) or len(row) != 4:
            raise ScenarioError(f"{wp_path}: expected [t_s, lat_deg, lon_deg, alt_km]")
        t, lat, lon, alt = (_expect_number(v, wp_path) for v in row)
        try:
            waypoints.append((t, GeodeticPoint(lat_deg=lat, lon_deg=lon, alt_km=alt)))
        except ConfigurationError as exc:
            raise ScenarioError(f"{wp_path}: {exc}") from exc
    kwargs: dict[str, Any] = {"flight_id": int(fid), "waypoints": tuple(waypoints)}
    if "cruise_floor_km" in raw:
        kwargs["cruise_floor_km"] = _expect_number(raw["cruise_floor_km"], f"{path}.cruise_floor_km")
    if "climb_rate_threshold_km_s" in raw:
        kwargs["climb_rate_threshold_km_s"] = _expect_number(
            raw["climb_rate_threshold_km_s"], f"{path}.climb_rate_threshold_km_s"
        )
    try:
        return FlightPlan(**kwargs)
    except ConfigurationError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def parse_scenario(raw: Any) -> Scenario:
    """Build a Scenario from decoded JSON, validating every field."""
    raw = _expect_mapping(raw, "scenario")
    required = {"constellation", "link_budget", "rain", "env", "profile_ranges", "clusters", "flights"}
    unknown = set(raw) - required
    if unknown:
        raise ScenarioError(f"{sorted(unknown)[0]}: unknown section")
    missing = required - set(raw)
    if missing:
        raise ScenarioError(f"{sorted(missing)[0]}: missing required section")

    env = _build_dataclass(
        EnvConfig,
        raw["env"],
        "env",
        converters={
            "penalty_component_weights": lambda v, p: _build_dataclass(PenaltyWeights, v, p)
        },
    )
    ranges_raw = _expect_mapping(raw["profile_ranges"], "profile_ranges")
    for name in ("base_arrival_rate_pps", "ground", "flight"):
        if name not in ranges_raw:
            raise ScenarioError(f"profile_ranges.{name}: missing required field")
    unknown = set(ranges_raw) - {"base_arrival_rate_pps", "ground", "flight"}
    if unknown:
        raise ScenarioError(f"profile_ranges.{sorted(unknown)[0]}: unknown field")
    base_rate = _expect_number(ranges_raw["base_arrival_rate_pps"], "profile_ranges.base_arrival_rate_pps")
    if base_rate < 0:
        raise ScenarioError("profile_ranges.base_arrival_rate_pps: must be >= 0")

    if not isinstance(raw["clusters"], list):
        raise ScenarioError("clusters: expected a list")
    if not isinstance(raw["flights"], list):
        raise ScenarioError("flights: expected a list")

    return Scenario(
        constellation=_build_dataclass(ConstellationConfig, raw["constellation"], "constellation"),
        link_budget=_build_dataclass(LinkBudgetParams, raw["link_budget"], "link_budget"),
        rain=_build_dataclass(RainModel, raw["rain"], "rain"),
        env=env,
        clusters=tuple(_build_cluster(c, f"clusters[{i}]") for i, c in enumerate(raw["clusters"])),
        flights=tuple(_build_flight(f, f"flights[{i}]") for i, f in enumerate(raw["flights"])),
        ground_profile_ranges=_build_ranges(ranges_raw["ground"], "profile_ranges.ground", flight=False),
        flight_profile_ranges=_build_ranges(ranges_raw["flight"], "profile_ranges.flight", flight=True),
        base_arrival_rate_pps=base_rate,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario JSON file."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
    return parse_scenario(raw)


def load_bundled(name: str) -> Scenario:
    """Load a scenario shipped with the package ('default' or 'reduced')."""
    ref = resources.files("satedge") / "scenarios" / f"{name}.json"
    try:
        text = ref.read_text()
    except FileNotFoundError as exc:
        raise ScenarioError(f"no bundled scenario named {name!r}") from exc
    return parse_scenario(json.loads(text))


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a bundled scenario (for CLI examples and tests)."""
    return Path(str(resources.files("satedge") / "scenarios" / f"{name}.json"))


def serialize_scenario(scenario: Scenario) -> dict:
    """Scenario back to its JSON document form (load -> serialize round-trips)."""

    def plain(obj: Any) -> dict:
        return dataclasses.asdict(obj)

    ranges_ground = {
        k: list(v)
        for k, v in plain(scenario.ground_profile_ranges).items()
        if v is not None and k != "arrival_rate_pps"
    }
    ranges_flight = {k: list(v) for k, v in plain(scenario.flight_profile_ranges).items() if v is not None}
    return {
        "constellation": plain(scenario.constellation),
        "link_budget": plain(scenario.link_budget),
        "rain": plain(scenario.rain),
        "env": plain(scenario.env),
        "profile_ranges": {
            "base_arrival_rate_pps": scenario.base_arrival_rate_pps,
            "ground": ranges_ground,
            "flight": ranges_flight,
        },
        "clusters": [
            {
                "name": c.name,
                "lat_deg": c.location.lat_deg,
                "lon_deg": c.location.lon_deg,
                "alt_km": c.location.alt_km,
                "population": c.population,
            }
            for c in scenario.clusters
        ],
        "flights": [
            {
                "flight_id": f.flight_id,
                "cruise_floor_km": f.cruise_floor_km,
                "climb_rate_threshold_km_s": f.climb_rate_threshold_km_s,
                "waypoints": [
                    [t, p.lat_deg, p.lon_deg, p.alt_km] for t, p in f.waypoints
                ],
            }
            for f in scenario.flights
        ],
    }
