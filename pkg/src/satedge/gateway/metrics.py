"""Episode metrics: per-slot CSV rows and per-episode summaries.

The CSV column order is fixed and documented by the header row:

    episode,slot,reward,cumulative_reward,failures,active_users,migrations,penalty

Floats are written with repr precision so reading the file back recovers
the exact values; summary totals equal column sums of the row stream.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from ..environment import ActionSet, Environment, GraphSnapshot, make_policy
from ..errors import ConfigurationError
from .scenario import Scenario

CSV_COLUMNS = (
    "episode",
    "slot",
    "reward",
    "cumulative_reward",
    "failures",
    "active_users",
    "migrations",
    "penalty",
)

MIGRATION_INTERVALS = 6

BASELINE_POLICIES = ("random", "greedy", "sticky")


@dataclass(frozen=True)
class MetricsRow:
    episode: int
    slot: int
    reward: float
    cumulative_reward: float
    failures: int
    active_users: int
    migrations: int
    penalty: float


@dataclass(frozen=True)
class EpisodeSummary:
    episode: int
    seed: int
    policy: str
    slots: int
    total_reward: float
    total_penalty: float
    failures: int
    active_user_slots: int
    failure_rate: float
    total_migrations: int
    migrations_ground_avg: float
    migrations_flight_avg: float
    migrations_per_interval: tuple[int, ...]
    deployment_cost: float  # app-update bookkeeping, charged once, never in reward


def interval_index(slot: int, num_slots: int, intervals: int = MIGRATION_INTERVALS) -> int:
    """Which of the equal slot intervals a slot falls in."""
    if not 0 <= slot < num_slots:
        raise ValueError("slot out of range")
    return slot * intervals // num_slots


def run_episode(
    scenario: Scenario,
    policy_name: str,
    seed: int,
    episode: int = 0,
    policy_fn: Callable[[GraphSnapshot, np.random.Generator], ActionSet] | None = None,
    env: Environment | None = None,
) -> tuple[list[MetricsRow], EpisodeSummary]:
    """Run one full episode and collect its metrics.

    policy_name is one of random/greedy/sticky, or 'external' with an
    explicit policy_fn (used by programmatic drivers).
    """
    if env is None:
        env = Environment(scenario)
    if policy_name == "external":
        if policy_fn is None:
            raise ConfigurationError("policy 'external' requires a policy_fn")
        policy = policy_fn
    elif policy_name in BASELINE_POLICIES:
        policy = make_policy(policy_name, env)
    else:
        raise ConfigurationError(
            f"unknown policy {policy_name!r}; expected one of {', '.join(BASELINE_POLICIES)} or external"
        )

    rng = np.random.default_rng(seed)
    snapshot = env.reset(seed)
    profiles = env.profiles

    rows: list[MetricsRow] = []
    cumulative = 0.0
    total_penalty = 0.0
    failures = 0
    migrations = 0
    active_user_slots = 0
    per_user_migrations: dict[int, int] = {}
    per_interval = [0] * MIGRATION_INTERVALS
    num_slots = scenario.env.num_slots

    done = False
    while not done:
        actions = policy(snapshot, rng)
        snapshot, outcome, done = env.step(actions)
        cumulative += outcome.reward
        total_penalty += outcome.penalty_total
        failures += outcome.failures_count
        migrations += outcome.migrations_count
        active_user_slots += len(outcome.per_user)
        for user_id, user_outcome in outcome.per_user.items():
            if user_outcome.migrated:
                per_user_migrations[user_id] = per_user_migrations.get(user_id, 0) + 1
        per_interval[interval_index(outcome.slot, num_slots)] += outcome.migrations_count
        rows.append(
            MetricsRow(
                episode=episode,
                slot=outcome.slot,
                reward=outcome.reward,
                cumulative_reward=cumulative,
                failures=outcome.failures_count,
                active_users=len(outcome.per_user),
                migrations=outcome.migrations_count,
                penalty=outcome.penalty_total,
            )
        )

    ground_ids = [u for u, p in profiles.items() if p.kind == "ground"]
    flight_ids = [u for u, p in profiles.items() if p.kind == "flight"]
    ground_migrations = sum(per_user_migrations.get(u, 0) for u in ground_ids)
    flight_migrations = sum(per_user_migrations.get(u, 0) for u in flight_ids)
    summary = EpisodeSummary(
        episode=episode,
        seed=seed,
        policy=policy_name,
        slots=num_slots,
        total_reward=cumulative,
        total_penalty=total_penalty,
        failures=failures,
        active_user_slots=active_user_slots,
        failure_rate=failures / active_user_slots if active_user_slots else 0.0,
        total_migrations=migrations,
        migrations_ground_avg=ground_migrations / len(ground_ids) if ground_ids else 0.0,
        migrations_flight_avg=flight_migrations / len(flight_ids) if flight_ids else 0.0,
        migrations_per_interval=tuple(per_interval),
        deployment_cost=scenario.env.app_update_cost,
    )
    return rows, summary


def write_metrics_csv(rows: Iterable[MetricsRow], path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.episode,
                    row.slot,
                    repr(row.reward),
                    repr(row.cumulative_reward),
                    row.failures,
                    row.active_users,
                    row.migrations,
                    repr(row.penalty),
                ]
            )


def read_metrics_csv(path: str | Path) -> list[MetricsRow]:
    rows = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ConfigurationError(f"unexpected metrics columns in {path}")
        for record in reader:
            rows.append(
                MetricsRow(
                    episode=int(record["episode"]),
                    slot=int(record["slot"]),
                    reward=float(record["reward"]),
                    cumulative_reward=float(record["cumulative_reward"]),
                    failures=int(record["failures"]),
                    active_users=int(record["active_users"]),
                    migrations=int(record["migrations"]),
                    penalty=float(record["penalty"]),
                )
            )
    return rows


def write_summaries(summaries: Iterable[EpisodeSummary], path: str | Path) -> None:
    payload = {"episodes": [dataclasses.asdict(s) for s in summaries]}
    if payload["episodes"]:
        keys = (
            "total_reward",
            "total_penalty",
            "failure_rate",
            "total_migrations",
            "migrations_ground_avg",
            "migrations_flight_avg",
        )
        payload["aggregate"] = {
            f"mean_{k}": sum(e[k] for e in payload["episodes"]) / len(payload["episodes"]) for k in keys
        }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def summary_path_for(metrics_path: str | Path) -> Path:
    """Companion summary file path for a metrics CSV path."""
    p = Path(metrics_path)
    return p.with_suffix(".summary.json")
