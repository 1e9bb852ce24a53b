"""Rollout collection, advantage estimation and the clipped-surrogate update.

One training iteration = one full episode collected over the wire protocol,
followed by several epochs of minibatched updates.  The three policy heads
(satellite, bandwidth, compute) share normalized advantages; each head gets
its own probability ratio inside the clipped objective.  The critic shares
the encoder and trunk with the actor and regresses on GAE returns.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import torch

from .client import ProtocolError, SimulatorClient
from .encoder import EncoderConfig, GateEncoder, WindowBuffer, normalized_adjacency, window_indices
from .features import FEATURE_DIM, SlotGraph, build_slot_graph
from .policy import HEADS, ActorCritic, PolicyConfig, decisions_to_payload


@dataclass(frozen=True)
class TrainConfig:
    clip_epsilon: float = 0.2
    learning_rate: float = 1e-4
    gamma: float = 0.99
    gae_lambda: float = 0.95
    epochs: int = 10
    minibatch_size: int = 16
    iterations: int = 200
    entropy_coef: float = 0.0
    critic_coef: float = 1.0
    normalize_advantages: bool = True
    # rewards enter GAE and the critic scaled by this factor so the value
    # regression stays the same order as the policy objective; curves and
    # evaluation always report raw environment rewards
    reward_scale: float = 1e-3
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ValueError("clip_epsilon must lie in (0, 1)")
        for name in ("gamma", "gae_lambda"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if min(self.epochs, self.minibatch_size, self.iterations) < 1:
            raise ValueError("epochs, minibatch_size and iterations must be positive")
        if self.learning_rate < 0.0:
            raise ValueError("learning_rate must be nonnegative")


def gae(
    rewards: Sequence[float],
    values: Sequence[float],
    dones: Sequence[bool],
    gamma: float,
    lam: float,
) -> list[float]:
    """Backward-recursed advantages; the value after a done step is 0."""
    if not len(rewards) == len(values) == len(dones):
        raise ValueError("rewards, values and dones must have equal length")
    advantages = [0.0] * len(rewards)
    running = 0.0
    for t in reversed(range(len(rewards))):
        next_value = 0.0 if dones[t] or t + 1 == len(rewards) else values[t + 1]
        delta = rewards[t] + gamma * next_value - values[t]
        running = delta + (0.0 if dones[t] else gamma * lam * running)
        advantages[t] = running
    return advantages


def hybrid_ppo_loss(
    old_log_probs: dict[str, torch.Tensor],
    new_log_probs: dict[str, torch.Tensor],
    advantages: torch.Tensor,
    clip_epsilon: float,
) -> torch.Tensor:
    """Mean over steps of the summed per-head clipped surrogate (maximize)."""
    total = torch.zeros((), dtype=advantages.dtype)
    for head in HEADS:
        ratio = torch.exp(new_log_probs[head] - old_log_probs[head])
        clipped = ratio.clamp(1.0 - clip_epsilon, 1.0 + clip_epsilon)
        total = total + torch.min(ratio * advantages, clipped * advantages).mean()
    return total


def critic_loss(values: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    return 0.5 * torch.mean((values - targets) ** 2)


@dataclass
class Rollout:
    """One episode's raw material for the update phase."""

    adjacency: list[torch.Tensor] = field(default_factory=list)
    features: list[torch.Tensor] = field(default_factory=list)
    masks: list[torch.Tensor] = field(default_factory=list)
    step_users: list[tuple[int, ...]] = field(default_factory=list)
    step_visible: list[dict[int, list[int]]] = field(default_factory=list)
    step_decisions: list[dict[int, Any]] = field(default_factory=list)
    log_probs: dict[str, list[float]] = field(default_factory=lambda: {h: [] for h in HEADS})
    rewards: list[float] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    dones: list[bool] = field(default_factory=list)
    # episode totals for the curves
    migrations: int = 0
    failures: int = 0
    user_slots: int = 0
    penalty: float = 0.0

    def __len__(self) -> int:
        return len(self.rewards)

    def finalize(self, gamma: float, lam: float, reward_scale: float = 1.0) -> tuple[torch.Tensor, torch.Tensor]:
        scaled = [r * reward_scale for r in self.rewards]
        advantages = torch.tensor(gae(scaled, self.values, self.dones, gamma, lam))
        returns = advantages + torch.tensor(self.values)
        return advantages, returns


@dataclass
class IterationStats:
    iteration: int
    reward: float
    cumulative_reward: float
    failures: int
    active_users: int
    migrations: int
    penalty: float
    policy_loss: float
    value_loss: float

    COLUMNS = (
        "iteration", "reward", "cumulative_reward", "failures",
        "active_users", "migrations", "penalty", "policy_loss", "value_loss",
    )


class Trainer:
    """Drives one protocol session and owns the parameters and optimizer."""

    def __init__(
        self,
        client: SimulatorClient,
        train_config: TrainConfig | None = None,
        encoder_config: EncoderConfig | None = None,
        policy_config: PolicyConfig | None = None,
    ) -> None:
        self.client = client
        self.config = train_config or TrainConfig()
        info = client.scenario_info
        self.info = info
        torch.manual_seed(self.config.seed)
        self.encoder = GateEncoder(info["max_nodes"], encoder_config or EncoderConfig())
        roster = [u["user_id"] for u in info["users"]]
        self.policy = ActorCritic(
            self.encoder.config.channels, info["num_satellites"], roster, policy_config
        )
        self.optimizer = torch.optim.Adam(
            list(self.encoder.parameters()) + list(self.policy.parameters()),
            lr=self.config.learning_rate,
        )
        self._adjacency_cache: dict[tuple, torch.Tensor] = {}

    def _graph_tensors(self, graph: SlotGraph) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        key = graph.edges
        adj = self._adjacency_cache.get(key)
        if adj is None:
            adj = normalized_adjacency(graph.edges, self.info["max_nodes"], dtype=torch.get_default_dtype())
            self._adjacency_cache[key] = adj
        x = torch.as_tensor(graph.features, dtype=torch.get_default_dtype())
        mask = torch.as_tensor(graph.mask, dtype=torch.get_default_dtype())
        return adj, x, mask

    @torch.no_grad()
    def collect_rollout(self, seed: int | None = None, deterministic: bool = False) -> Rollout:
        rollout = Rollout()
        observation = self.client.reset(seed)
        window = WindowBuffer(self.encoder.config.window)
        done = False
        while not done:
            graph = build_slot_graph(observation, self.info)
            adj, x, mask = self._graph_tensors(graph)
            vec = self.encoder.flat_embeddings(adj.unsqueeze(0), x.unsqueeze(0), mask.unsqueeze(0))[0]
            window.push(vec)
            z = self.encoder.encode(window.stacked())
            decisions, log_probs, value = self.policy.act(z, graph, deterministic=deterministic)
            observation, outcome, done = self.client.step(decisions_to_payload(decisions))

            rollout.adjacency.append(adj)
            rollout.features.append(x)
            rollout.masks.append(mask)
            rollout.step_users.append(graph.user_ids)
            rollout.step_visible.append(graph.visible)
            rollout.step_decisions.append(decisions)
            for head in HEADS:
                rollout.log_probs[head].append(float(log_probs[head]))
            rollout.rewards.append(outcome["reward"])
            rollout.values.append(value)
            rollout.dones.append(done)
            rollout.migrations += outcome["migrations_count"]
            rollout.failures += outcome["failures_count"]
            rollout.user_slots += len(outcome["per_user"])
            rollout.penalty += outcome["penalty_total"]
        return rollout

    def _encode_all(self, rollout: Rollout) -> torch.Tensor:
        adj = torch.stack(rollout.adjacency)
        x = torch.stack(rollout.features)
        mask = torch.stack(rollout.masks)
        vecs = self.encoder.flat_embeddings(adj, x, mask)
        windows = vecs[window_indices(len(rollout), self.encoder.config.window)]
        return self.encoder.encode(windows)

    def update(self, rollout: Rollout) -> tuple[float, float]:
        cfg = self.config
        advantages, returns = rollout.finalize(cfg.gamma, cfg.gae_lambda, cfg.reward_scale)
        if cfg.normalize_advantages:
            advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)
        old_log_probs = {h: torch.tensor(rollout.log_probs[h]) for h in HEADS}

        last_policy, last_value = 0.0, 0.0
        num_steps = len(rollout)
        for _ in range(cfg.epochs):
            for batch in torch.randperm(num_steps).split(cfg.minibatch_size):
                z = self._encode_all(rollout)
                new_log_probs, values, entropy = self.policy.evaluate(
                    z, rollout.step_users, rollout.step_visible, rollout.step_decisions
                )
                objective = hybrid_ppo_loss(
                    {h: old_log_probs[h][batch] for h in HEADS},
                    {h: new_log_probs[h][batch] for h in HEADS},
                    advantages[batch],
                    cfg.clip_epsilon,
                )
                value_term = critic_loss(values[batch], returns[batch])
                loss = -objective + cfg.critic_coef * value_term - cfg.entropy_coef * entropy
                self.optimizer.zero_grad()
                loss.backward()
                self.optimizer.step()
                last_policy, last_value = float(objective.detach()), float(value_term.detach())
        return last_policy, last_value

    def train(
        self,
        iterations: int | None = None,
        out_dir: str | Path | None = None,
        log_every: int = 0,
    ) -> list[IterationStats]:
        iterations = iterations or self.config.iterations
        curves: list[IterationStats] = []
        try:
            self._train_loop(iterations, curves, log_every)
        except (ProtocolError, OSError):
            # losing the simulator should not lose the training run
            if out_dir is not None:
                self._write_outputs(curves, out_dir)
            raise
        if out_dir is not None:
            self._write_outputs(curves, out_dir)
        return curves

    def _write_outputs(self, curves: list[IterationStats], out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        self.save_checkpoint(out / "checkpoint.pt")
        write_curves(curves, out / "curves.csv")

    def _train_loop(self, iterations: int, curves: list[IterationStats], log_every: int) -> None:
        cumulative = 0.0
        for iteration in range(iterations):
            rollout = self.collect_rollout(seed=self.config.seed + iteration)
            policy_loss, value_loss = self.update(rollout)
            total = sum(rollout.rewards)
            cumulative += total
            curves.append(
                IterationStats(
                    iteration=iteration,
                    reward=total,
                    cumulative_reward=cumulative,
                    failures=rollout.failures,
                    active_users=rollout.user_slots,
                    migrations=rollout.migrations,
                    penalty=rollout.penalty,
                    policy_loss=policy_loss,
                    value_loss=value_loss,
                )
            )
            if log_every and iteration % log_every == 0:
                print(
                    f"iter {iteration}: reward {total:.3f}, migrations {rollout.migrations}, "
                    f"failures {rollout.failures}"
                )

    def evaluate(self, episodes: int, seed: int = 10_000, deterministic: bool = True):
        """Mean episode reward, failure rate and migrations over fresh seeds."""
        rewards, failure_rates, migrations = [], [], []
        for episode in range(episodes):
            rollout = self.collect_rollout(seed=seed + episode, deterministic=deterministic)
            rewards.append(sum(rollout.rewards))
            failure_rates.append(rollout.failures / max(rollout.user_slots, 1))
            migrations.append(rollout.migrations)
        return {
            "episodes": episodes,
            "mean_reward": float(np.mean(rewards)),
            "mean_failure_rate": float(np.mean(failure_rates)),
            "mean_migrations": float(np.mean(migrations)),
        }

    def save_checkpoint(self, path: str | Path) -> None:
        torch.save(
            {
                "encoder": self.encoder.state_dict(),
                "policy": self.policy.state_dict(),
                "encoder_config": asdict(self.encoder.config),
                "policy_config": asdict(self.policy.config),
                "train_config": asdict(self.config),
                "scenario_info": self.info,
            },
            path,
        )

    def load_checkpoint(self, path: str | Path) -> None:
        state = torch.load(path, weights_only=False)
        self.encoder.load_state_dict(state["encoder"])
        self.policy.load_state_dict(state["policy"])


def trainer_from_checkpoint(client: SimulatorClient, path: str | Path) -> Trainer:
    state = torch.load(path, weights_only=False)
    trainer = Trainer(
        client,
        TrainConfig(**state["train_config"]),
        EncoderConfig(**state["encoder_config"]),
        PolicyConfig(**{**state["policy_config"],
                        "trunk_sizes": tuple(state["policy_config"]["trunk_sizes"])}),
    )
    trainer.encoder.load_state_dict(state["encoder"])
    trainer.policy.load_state_dict(state["policy"])
    return trainer


def write_curves(curves: list[IterationStats], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(IterationStats.COLUMNS)
        for row in curves:
            writer.writerow([getattr(row, c) for c in IterationStats.COLUMNS])


def load_train_config(path: str | Path | None) -> tuple[TrainConfig, EncoderConfig, PolicyConfig]:
    """Split one JSON config file into the three config dataclasses."""
    raw: dict[str, Any] = {}
    if path is not None:
        raw = json.loads(Path(path).read_text())
    enc_keys = {f for f in EncoderConfig.__dataclass_fields__}
    pol_keys = {f for f in PolicyConfig.__dataclass_fields__}
    trn_keys = {f for f in TrainConfig.__dataclass_fields__}
    unknown = set(raw) - enc_keys - pol_keys - trn_keys
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    pol_raw = {k: v for k, v in raw.items() if k in pol_keys}
    if "trunk_sizes" in pol_raw:
        pol_raw["trunk_sizes"] = tuple(pol_raw["trunk_sizes"])
    return (
        TrainConfig(**{k: v for k, v in raw.items() if k in trn_keys}),
        EncoderConfig(**{k: v for k, v in raw.items() if k in enc_keys}),
        PolicyConfig(**pol_raw),
    )
