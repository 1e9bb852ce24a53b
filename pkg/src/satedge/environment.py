"""Slot-stepped service-migration environment and baseline policies.

Each slot the agent submits, for every active user, a satellite choice plus
bandwidth and compute fractions.  The step pipeline is, in order:

1. visibility: a choice below the elevation mask fails and leaves the
   user's service on its previous satellite;
2. beam cap: a satellite keeps its highest-priority users up to the beam
   budget (ties to the lower user id) and evicts the rest;
3. compute gate: an allocation below the user's minimum fails deployment;
4. conservation: surviving bandwidth/compute shares are rescaled so no
   satellite exceeds its caps (breaches are penalized, never executed);
5. service: Shannon rate from the link budget, then M/M/1 delay success
   (an unstable queue serves nothing and counts as a failure);
6. migration: a deployed user whose satellite differs from its previous
   one pays the migration cost; first deployments are free.

Reward is  sum(beta2 * served_bits) - lambda_pen * (sum(beta1 * migrated)
+ penalty), with the penalty computed on the raw submitted action set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Mapping

import numpy as np

from . import constellation as geom
from . import link_budget as link
from . import queueing
from . import traffic
from .errors import ActionError, ConfigurationError, StateError

if TYPE_CHECKING:  # pragma: no cover - import only for annotations
    from .gateway.scenario import Scenario


@dataclass(frozen=True)
class PenaltyWeights:
    beam: float = 5.0
    bandwidth: float = 50.0
    compute: float = 50.0
    visibility: float = 10.0

    def __post_init__(self) -> None:
        if min(self.beam, self.bandwidth, self.compute, self.visibility) < 0:
            raise ConfigurationError("penalty weights must be >= 0")


@dataclass(frozen=True)
class EnvConfig:
    num_slots: int = 60
    slot_seconds: float = 300.0
    theta_min_deg: float = 15.0
    max_beams: int = 24
    bandwidth_cap: float = 1.0     # B_max, fraction of the channel bandwidth
    compute_cap: float = 1.0       # F_max, resource units
    penalty_weight: float = 0.2    # lambda_pen
    penalty_component_weights: PenaltyWeights = field(default_factory=PenaltyWeights)
    app_update_cost: float = 25.0  # tau_app, reported once per episode, never in reward
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_slots < 1:
            raise ConfigurationError("num_slots must be >= 1")
        if self.slot_seconds <= 0:
            raise ConfigurationError("slot_seconds must be > 0")
        if self.max_beams < 1:
            raise ConfigurationError("max_beams must be >= 1")
        if not 0.0 < self.bandwidth_cap <= 1.0:
            raise ConfigurationError("bandwidth_cap must lie in (0, 1]")
        if self.compute_cap <= 0:
            raise ConfigurationError("compute_cap must be > 0")
        if self.penalty_weight < 0:
            raise ConfigurationError("penalty_weight must be >= 0")
        if self.app_update_cost < 0:
            raise ConfigurationError("app_update_cost must be >= 0")


@dataclass(frozen=True)
class SatelliteNode:
    sat_id: int
    position_ecef_km: tuple[float, float, float]
    remaining_bandwidth_ratio: float
    remaining_compute_ratio: float
    remaining_beam_slots: int


@dataclass(frozen=True)
class UserNode:
    user_id: int
    kind: traffic.UserKind
    position_ecef_km: tuple[float, float, float]
    priority: float                # beta2, service utility per bit
    arrival_rate_pps: float
    previous_satellite_id: int | None


@dataclass(frozen=True)
class GraphSnapshot:
    """Observable state for one slot: typed nodes plus visibility edges."""

    slot: int
    satellite_nodes: tuple[SatelliteNode, ...]
    user_nodes: tuple[UserNode, ...]
    edges: tuple[tuple[int, int], ...]  # (user_id, sat_id), elevation >= mask

    def visible_satellites(self, user_id: int) -> list[int]:
        return [s for (u, s) in self.edges if u == user_id]

    @property
    def user_ids(self) -> list[int]:
        return [n.user_id for n in self.user_nodes]


@dataclass(frozen=True)
class ActionSet:
    """Per-user satellite choice and resource fractions for one slot."""

    satellite: dict[int, int]
    bandwidth: dict[int, float]
    compute: dict[int, float]

    def __post_init__(self) -> None:
        if set(self.satellite) != set(self.bandwidth) or set(self.satellite) != set(self.compute):
            raise ActionError("satellite, bandwidth and compute must cover the same users")

    @property
    def user_ids(self) -> list[int]:
        return sorted(self.satellite)


@dataclass(frozen=True)
class UserOutcome:
    served_bits: float
    migrated: bool
    failed: bool
    assigned_satellite: int | None  # satellite hosting the service after the slot
    effective_rate_bps: float
    failure_reason: str | None = None


@dataclass(frozen=True)
class SlotOutcome:
    slot: int
    reward: float
    penalty_total: float
    per_user: dict[int, UserOutcome]
    migrations_count: int
    failures_count: int


@dataclass(frozen=True)
class ConstraintReport:
    """Penalty value plus the exact breach sets behind it."""

    penalty: float
    beam_excess: dict[int, int]          # sat -> choosers beyond the beam budget
    bandwidth_excess: dict[int, float]   # sat -> bandwidth sum beyond B_max
    compute_excess: dict[int, float]     # sat -> compute sum beyond F_max, as a ratio
    invisible_users: frozenset[int]
    undersupplied_users: frozenset[int]  # compute share below the user's minimum
    flagged_users: frozenset[int]        # on a breached satellite or invisible

    @property
    def violations(self) -> frozenset[tuple[str, int]]:
        out: set[tuple[str, int]] = set()
        out.update(("beam", s) for s in self.beam_excess)
        out.update(("bandwidth", s) for s in self.bandwidth_excess)
        out.update(("compute", s) for s in self.compute_excess)
        out.update(("visibility", u) for u in self.invisible_users)
        out.update(("min_compute", u) for u in self.undersupplied_users)
        return frozenset(out)


def migration_indicator(
    previous: Mapping[int, int | None], executed: Mapping[int, int | None]
) -> dict[int, bool]:
    """True per user iff an existing service moved to a different satellite."""
    out = {}
    for user_id in executed:
        prev = previous.get(user_id)
        new = executed[user_id]
        out[user_id] = prev is not None and new is not None and new != prev
    return out


def constraint_penalty(
    actions: ActionSet,
    snapshot: GraphSnapshot,
    config: EnvConfig,
    min_compute: Mapping[int, float] | None = None,
) -> ConstraintReport:
    """Score the raw submitted actions against the system limits.

    Sums run over every chooser of a satellite, visible or not; the penalty
    covers beam count, bandwidth sum, compute sum, and invisible choices.
    A compute share below the user's own minimum is reported but carries no
    penalty term (it fails the user instead).
    """
    edge_set = set(snapshot.edges)
    weights = config.penalty_component_weights
    beam_count: dict[int, int] = {}
    bandwidth_sum: dict[int, float] = {}
    compute_sum: dict[int, float] = {}
    invisible: set[int] = set()
    undersupplied: set[int] = set()

    for user_id in actions.user_ids:
        sat = actions.satellite[user_id]
        beam_count[sat] = beam_count.get(sat, 0) + 1
        bandwidth_sum[sat] = bandwidth_sum.get(sat, 0.0) + actions.bandwidth[user_id]
        compute_sum[sat] = compute_sum.get(sat, 0.0) + actions.compute[user_id]
        if (user_id, sat) not in edge_set:
            invisible.add(user_id)
        if min_compute is not None and user_id in min_compute:
            if actions.compute[user_id] * config.compute_cap < min_compute[user_id]:
                undersupplied.add(user_id)

    beam_excess = {s: n - config.max_beams for s, n in sorted(beam_count.items()) if n > config.max_beams}
    bandwidth_excess = {
        s: total - config.bandwidth_cap
        for s, total in sorted(bandwidth_sum.items())
        if total > config.bandwidth_cap
    }
    # (sum f * F_max - F_max) / F_max reduces to sum f - 1 for fractional shares
    compute_excess = {s: total - 1.0 for s, total in sorted(compute_sum.items()) if total > 1.0}

    penalty = (
        weights.beam * sum(beam_excess.values())
        + weights.bandwidth * sum(bandwidth_excess.values())
        + weights.compute * sum(compute_excess.values())
        + weights.visibility * len(invisible)
    )

    breached_sats = set(beam_excess) | set(bandwidth_excess) | set(compute_excess)
    flagged = {u for u in actions.user_ids if actions.satellite[u] in breached_sats} | invisible
    return ConstraintReport(
        penalty=penalty,
        beam_excess=beam_excess,
        bandwidth_excess=bandwidth_excess,
        compute_excess=compute_excess,
        invisible_users=frozenset(invisible),
        undersupplied_users=frozenset(undersupplied),
        flagged_users=frozenset(flagged),
    )


@dataclass
class _SatUsage:
    bandwidth: float = 0.0
    compute: float = 0.0
    beams: int = 0


class Environment:
    """Deterministic episode engine over one scenario."""

    def __init__(self, scenario: "Scenario") -> None:
        self._scenario = scenario
        self.config: EnvConfig = scenario.env
        self._constellation = scenario.constellation
        self._link = scenario.link_budget
        self._rain = scenario.rain
        self._slot: int | None = None
        self._done = False
        self._clusters: list[traffic.GroundCluster] = []
        self._flights: list[traffic.FlightPlan] = []
        self._profiles: dict[int, traffic.UserProfile] = {}
        self._previous: dict[int, int] = {}
        self._usage: dict[int, _SatUsage] = {}
        self._current: GraphSnapshot | None = None
        self._positions: dict[int, geom.GeodeticPoint] = {}
        self._sats: list[geom.SatelliteState] = []

    # -- observation plumbing ------------------------------------------------

    @property
    def snapshot(self) -> GraphSnapshot:
        if self._current is None:
            raise StateError("reset the environment before reading a snapshot")
        return self._current

    @property
    def profiles(self) -> dict[int, traffic.UserProfile]:
        """Materialized profiles of every potential user in the episode."""
        if self._slot is None:
            raise StateError("reset the environment before reading profiles")
        return dict(self._profiles)

    def min_compute_ratio(self) -> dict[int, float]:
        """Per-user minimum compute share of F_max, for allocation policies."""
        return {u: p.min_compute / self.config.compute_cap for u, p in self.profiles.items()}

    def _build_snapshot(self, slot: int) -> GraphSnapshot:
        cfg = self.config
        self._sats = geom.propagate(self._constellation, slot, cfg.slot_seconds)
        active = traffic.active_users(self._clusters, self._flights, slot, cfg.slot_seconds)
        self._positions = {p.user_id: point for p, point in active}

        sat_nodes = []
        for sat in self._sats:
            usage = self._usage.get(sat.sat_id, _SatUsage())
            sat_nodes.append(
                SatelliteNode(
                    sat_id=sat.sat_id,
                    position_ecef_km=sat.position_ecef_km,
                    remaining_bandwidth_ratio=max(0.0, cfg.bandwidth_cap - usage.bandwidth),
                    remaining_compute_ratio=max(0.0, 1.0 - usage.compute),
                    remaining_beam_slots=max(0, cfg.max_beams - usage.beams),
                )
            )

        user_nodes = []
        edges = []
        for profile, point in active:
            ecef = geom.geodetic_to_ecef(point, self._constellation.earth_radius_km)
            user_nodes.append(
                UserNode(
                    user_id=profile.user_id,
                    kind=profile.kind,
                    position_ecef_km=ecef,
                    priority=profile.service_utility_weight,
                    arrival_rate_pps=profile.arrival_rate_pps,
                    previous_satellite_id=self._previous.get(profile.user_id),
                )
            )
            for sat in self._sats:
                if geom.elevation_from_ecef(sat.position_ecef_km, ecef) >= cfg.theta_min_deg:
                    edges.append((profile.user_id, sat.sat_id))

        return GraphSnapshot(
            slot=slot,
            satellite_nodes=tuple(sat_nodes),
            user_nodes=tuple(user_nodes),
            edges=tuple(edges),
        )

    # -- episode control -----------------------------------------------------

    def reset(self, seed: int | None = None) -> GraphSnapshot:
        """Materialize profiles for the episode seed and return the slot-0 graph."""
        seed = self.config.seed if seed is None else seed
        sc = self._scenario
        self._clusters, self._flights = traffic.materialize(
            sc.clusters,
            sc.flights,
            sc.ground_profile_ranges,
            sc.flight_profile_ranges,
            sc.base_arrival_rate_pps,
            seed,
        )
        self._profiles = {c.profile.user_id: c.profile for c in self._clusters}
        self._profiles.update({f.profile.user_id: f.profile for f in self._flights})
        self._previous = {}
        self._usage = {}
        self._slot = 0
        self._done = False
        self._current = self._build_snapshot(0)
        return self._current

    def _validate_actions(self, actions: ActionSet) -> None:
        active_ids = set(self.snapshot.user_ids)
        submitted = set(actions.satellite)
        if submitted != active_ids:
            missing = sorted(active_ids - submitted)
            extra = sorted(submitted - active_ids)
            raise ActionError(f"actions must cover the active users; missing={missing} extra={extra}")
        sat_ids = {s.sat_id for s in self.snapshot.satellite_nodes}
        for user_id in actions.user_ids:
            if actions.satellite[user_id] not in sat_ids:
                raise ActionError(f"user {user_id}: unknown satellite {actions.satellite[user_id]}")
            b = actions.bandwidth[user_id]
            f = actions.compute[user_id]
            if not 0.0 < b <= 1.0:
                raise ActionError(f"user {user_id}: bandwidth fraction {b} outside (0, 1]")
            if not 0.0 < f <= 1.0:
                raise ActionError(f"user {user_id}: compute fraction {f} outside (0, 1]")

    def step(self, actions: ActionSet) -> tuple[GraphSnapshot, SlotOutcome, bool]:
        """Execute one slot; see the module docstring for the pipeline order."""
        if self._slot is None:
            raise StateError("step before reset")
        if self._done:
            raise StateError("episode done; reset to start a new one")
        self._validate_actions(actions)

        cfg = self.config
        snapshot = self.snapshot
        report = constraint_penalty(
            actions, snapshot, cfg, min_compute={u: self._profiles[u].min_compute for u in actions.user_ids}
        )
        edge_set = set(snapshot.edges)
        user_ids = actions.user_ids

        # 1. visibility gate
        visible_ok = {u: (u, actions.satellite[u]) in edge_set for u in user_ids}

        # 2. beam retention by priority (beta2), ties to the lower user id
        retained: set[int] = set()
        by_sat: dict[int, list[int]] = {}
        for u in user_ids:
            if visible_ok[u]:
                by_sat.setdefault(actions.satellite[u], []).append(u)
        for sat, users in by_sat.items():
            users.sort(key=lambda u: (-self._profiles[u].service_utility_weight, u))
            retained.update(users[: cfg.max_beams])

        # 3. minimum-compute gate on the submitted share
        deployed: dict[int, bool] = {}
        failure_reason: dict[int, str | None] = {}
        for u in user_ids:
            if not visible_ok[u]:
                deployed[u] = False
                failure_reason[u] = "visibility"
            elif u not in retained:
                deployed[u] = False
                failure_reason[u] = "beam"
            elif actions.compute[u] * cfg.compute_cap < self._profiles[u].min_compute:
                deployed[u] = False
                failure_reason[u] = "min_compute"
            else:
                deployed[u] = True
                failure_reason[u] = None

        # 4. conservation: rescale deployed shares so caps are never exceeded
        bandwidth_eff = dict(actions.bandwidth)
        compute_eff = dict(actions.compute)
        for sat in sorted({actions.satellite[u] for u in user_ids if deployed[u]}):
            members = [u for u in user_ids if deployed[u] and actions.satellite[u] == sat]
            b_total = sum(actions.bandwidth[u] for u in members)
            if b_total > cfg.bandwidth_cap:
                scale = cfg.bandwidth_cap / b_total
                for u in members:
                    bandwidth_eff[u] = actions.bandwidth[u] * scale
            f_total = sum(actions.compute[u] for u in members)
            if f_total > 1.0:
                scale = 1.0 / f_total
                for u in members:
                    compute_eff[u] = actions.compute[u] * scale

        # 5. service through the link and queue
        executed: dict[int, int | None] = {}
        served: dict[int, float] = {}
        rates: dict[int, float] = {}
        for u in user_ids:
            profile = self._profiles[u]
            if not deployed[u]:
                executed[u] = self._previous.get(u)
                served[u] = 0.0
                rates[u] = 0.0
                continue
            sat_choice = actions.satellite[u]
            executed[u] = sat_choice
            sat_state = next(s for s in self._sats if s.sat_id == sat_choice)
            point = self._positions[u]
            user_ecef = geom.geodetic_to_ecef(point, self._constellation.earth_radius_km)
            distance = geom.slant_range_km(sat_state.position_ecef_km, user_ecef)
            elevation = geom.elevation_from_ecef(sat_state.position_ecef_km, user_ecef)
            gain = link.propagation_gain(
                self._link, self._rain, distance, elevation, point.lat_deg, point.alt_km
            )
            rate = link.data_rate_bps(bandwidth_eff[u], self._link, link.snr(self._link, gain))
            mu = queueing.service_rate_pps(rate, profile.packet_bits)
            p = queueing.delay_success_prob(profile.arrival_rate_pps, mu, profile.max_delay_s)
            if mu <= 0.0 or profile.arrival_rate_pps >= mu:
                failure_reason[u] = "queue_unstable"
            served[u] = queueing.served_bits(
                profile.arrival_rate_pps, cfg.slot_seconds, profile.packet_bits, p
            )
            rates[u] = rate

        # 6. migration indicator over executed assignments
        migrated = migration_indicator(self._previous, executed)

        # 7. reward, summed in sorted user order for reproducibility
        service_total = sum(self._profiles[u].service_utility_weight * served[u] for u in user_ids)
        migration_total = sum(
            self._profiles[u].migration_cost_weight * (1.0 if migrated[u] else 0.0) for u in user_ids
        )
        reward = service_total - cfg.penalty_weight * (migration_total + report.penalty)

        per_user = {
            u: UserOutcome(
                served_bits=served[u],
                migrated=migrated[u],
                failed=failure_reason[u] is not None,
                assigned_satellite=executed[u],
                effective_rate_bps=rates[u],
                failure_reason=failure_reason[u],
            )
            for u in user_ids
        }
        outcome = SlotOutcome(
            slot=snapshot.slot,
            reward=reward,
            penalty_total=report.penalty,
            per_user=per_user,
            migrations_count=sum(1 for u in user_ids if migrated[u]),
            failures_count=sum(1 for u in user_ids if per_user[u].failed),
        )

        # roll state forward
        for u in user_ids:
            if executed[u] is not None:
                self._previous[u] = executed[u]
        self._usage = {}
        for u in user_ids:
            if deployed[u]:
                usage = self._usage.setdefault(actions.satellite[u], _SatUsage())
                usage.bandwidth += bandwidth_eff[u]
                usage.compute += compute_eff[u]
                usage.beams += 1
        self._slot = snapshot.slot + 1
        self._done = self._slot >= cfg.num_slots
        self._current = self._build_snapshot(self._slot)
        # a user out of the active set releases its service instance
        active_now = set(self._current.user_ids)
        self._previous = {u: s for u, s in self._previous.items() if u in active_now}
        return self._current, outcome, self._done


# -- baseline policies --------------------------------------------------------


def _elevations(snapshot: GraphSnapshot, user: UserNode) -> dict[int, float]:
    return {
        sat.sat_id: geom.elevation_from_ecef(sat.position_ecef_km, user.position_ecef_km)
        for sat in snapshot.satellite_nodes
    }


def _equal_shares(
    choices: dict[int, int],
    snapshot: GraphSnapshot,
    min_compute_ratio: Mapping[int, float] | None,
    bandwidth_cap: float,
) -> tuple[dict[int, float], dict[int, float]]:
    """Equal bandwidth/compute splits per satellite, topping up compute minima.

    When the equal compute share undercuts a user's minimum and the minima fit
    in the budget, deficit users are raised to their minimum and surplus users
    give up slack proportionally.
    """
    by_sat: dict[int, list[int]] = {}
    for u, s in choices.items():
        by_sat.setdefault(s, []).append(u)
    bandwidth: dict[int, float] = {}
    compute: dict[int, float] = {}
    for sat, users in by_sat.items():
        n = len(users)
        for u in users:
            bandwidth[u] = bandwidth_cap / n
            compute[u] = 1.0 / n
        if min_compute_ratio is None:
            continue
        need = {u: min_compute_ratio.get(u, 0.0) for u in users}
        if sum(need.values()) <= 1.0 and any(compute[u] < need[u] for u in users):
            deficit = [u for u in users if compute[u] < need[u]]
            surplus = [u for u in users if compute[u] > need[u]]
            total_deficit = sum(need[u] - compute[u] for u in deficit)
            total_surplus = sum(compute[u] - need[u] for u in surplus)
            scale = (total_surplus - total_deficit) / total_surplus if surplus else 0.0
            for u in deficit:
                compute[u] = need[u]
            for u in surplus:
                compute[u] = need[u] + (compute[u] - need[u]) * scale
    return bandwidth, compute


def random_policy(
    snapshot: GraphSnapshot, rng: np.random.Generator, bandwidth_cap: float = 1.0
) -> ActionSet:
    """Uniform satellite choice among visible; U(0,1] shares rescaled to caps."""
    choices: dict[int, int] = {}
    bandwidth: dict[int, float] = {}
    compute: dict[int, float] = {}
    all_sats = [s.sat_id for s in snapshot.satellite_nodes]
    for user in snapshot.user_nodes:
        options = snapshot.visible_satellites(user.user_id)
        pool = options if options else all_sats
        choices[user.user_id] = int(pool[rng.integers(len(pool))])
        bandwidth[user.user_id] = 1.0 - float(rng.random())  # uniform on (0, 1]
        compute[user.user_id] = 1.0 - float(rng.random())
    by_sat: dict[int, list[int]] = {}
    for u, s in choices.items():
        by_sat.setdefault(s, []).append(u)
    for sat, users in by_sat.items():
        b_total = sum(bandwidth[u] for u in users)
        if b_total > bandwidth_cap:
            for u in users:
                bandwidth[u] = bandwidth[u] * bandwidth_cap / b_total
        f_total = sum(compute[u] for u in users)
        if f_total > 1.0:
            for u in users:
                compute[u] = compute[u] / f_total
    return ActionSet(satellite=choices, bandwidth=bandwidth, compute=compute)


def greedy_policy(
    snapshot: GraphSnapshot,
    min_compute_ratio: Mapping[int, float] | None = None,
    bandwidth_cap: float = 1.0,
) -> ActionSet:
    """Max-elevation visible satellite per user with equal resource shares."""
    choices: dict[int, int] = {}
    for user in snapshot.user_nodes:
        elevations = _elevations(snapshot, user)
        options = snapshot.visible_satellites(user.user_id)
        pool = options if options else list(elevations)
        choices[user.user_id] = max(pool, key=lambda s: (elevations[s], -s))
    bandwidth, compute = _equal_shares(choices, snapshot, min_compute_ratio, bandwidth_cap)
    return ActionSet(satellite=choices, bandwidth=bandwidth, compute=compute)


def sticky_policy(
    snapshot: GraphSnapshot,
    min_compute_ratio: Mapping[int, float] | None = None,
    bandwidth_cap: float = 1.0,
) -> ActionSet:
    """Keep the previous satellite while visible; fall back to the greedy choice."""
    choices: dict[int, int] = {}
    for user in snapshot.user_nodes:
        options = snapshot.visible_satellites(user.user_id)
        prev = user.previous_satellite_id
        if prev is not None and prev in options:
            choices[user.user_id] = prev
            continue
        elevations = _elevations(snapshot, user)
        pool = options if options else ([prev] if prev is not None else list(elevations))
        choices[user.user_id] = max(pool, key=lambda s: (elevations[s], -s))
    bandwidth, compute = _equal_shares(choices, snapshot, min_compute_ratio, bandwidth_cap)
    return ActionSet(satellite=choices, bandwidth=bandwidth, compute=compute)


PolicyFn = Callable[[GraphSnapshot, np.random.Generator], ActionSet]


def make_policy(name: str, env: Environment) -> PolicyFn:
    """Bind a named baseline policy to an environment's static context."""
    cap = env.config.bandwidth_cap
    if name == "random":
        return lambda snapshot, rng: random_policy(snapshot, rng, bandwidth_cap=cap)
    if name == "greedy":
        return lambda snapshot, rng: greedy_policy(snapshot, env.min_compute_ratio(), bandwidth_cap=cap)
    if name == "sticky":
        return lambda snapshot, rng: sticky_policy(snapshot, env.min_compute_ratio(), bandwidth_cap=cap)
    raise ConfigurationError(f"unknown policy {name!r}; expected random, greedy or sticky")
