"""Hybrid actor-critic heads over the encoder embedding.

One shared trunk; per-user heads share weights and are told the user apart
by a learned id embedding.  Per active user the policy emits a categorical
satellite choice (logits masked to the visible set unless masking is
disabled), and Beta-distributed bandwidth and compute fractions.  Beta
concentrations go through softplus+1 so the density stays bounded, and raw
samples from [0,1) are mapped to (0,1] by y = 1 - x*(1 - ulp).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .features import SlotGraph

HEADS = ("satellite", "bandwidth", "compute")

# complement of the ulp factor in the (0,1] mapping; its log is the Jacobian
UNIT_SHRINK = 1.0 - 2.0 ** -52
LOG_UNIT_SHRINK = math.log(UNIT_SHRINK)
SAMPLE_EPS = 1e-8


def to_unit_interval(x: torch.Tensor) -> torch.Tensor:
    """[0,1) -> (0,1]."""
    return 1.0 - x * UNIT_SHRINK


def from_unit_interval(y: torch.Tensor) -> torch.Tensor:
    return (1.0 - y) / UNIT_SHRINK


def beta_concentrations(raw: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
    """Two raw head outputs -> (alpha, beta), both > 1."""
    conc = F.softplus(raw) + 1.0
    return conc[..., 0], conc[..., 1]


def beta_log_prob(x: torch.Tensor, alpha: torch.Tensor, beta: torch.Tensor) -> torch.Tensor:
    return torch.distributions.Beta(alpha, beta).log_prob(x)


@dataclass(frozen=True)
class PolicyConfig:
    trunk_sizes: tuple[int, ...] = (1024, 512)
    head_hidden: int = 256
    user_embed: int = 16
    mask_visibility: bool = True


@dataclass
class UserDecision:
    satellite: int
    bandwidth: float        # env-facing value in (0,1]
    compute: float
    raw_bandwidth: float    # Beta draw in [0,1), kept for log-prob replay
    raw_compute: float


class ActorCritic(nn.Module):
    def __init__(
        self,
        embedding_dim: int,
        num_satellites: int,
        user_roster: list[int],
        config: PolicyConfig | None = None,
    ) -> None:
        super().__init__()
        self.config = config or PolicyConfig()
        self.num_satellites = num_satellites
        self.roster_index = {user_id: i for i, user_id in enumerate(user_roster)}

        layers: list[nn.Module] = []
        width = embedding_dim
        for size in self.config.trunk_sizes:
            layers += [nn.Linear(width, size), nn.ReLU()]
            width = size
        self.trunk = nn.Sequential(*layers)

        self.user_embed = nn.Embedding(len(user_roster), self.config.user_embed)
        self.head_shared = nn.Linear(width + self.config.user_embed, self.config.head_hidden)
        self.sat_head = nn.Linear(self.config.head_hidden, num_satellites)
        self.bw_head = nn.Linear(self.config.head_hidden, 2)
        self.cpu_head = nn.Linear(self.config.head_hidden, 2)

        self.value_hidden = nn.Linear(width, self.config.head_hidden)
        self.value_head = nn.Linear(self.config.head_hidden, 1)

    def _head_features(self, trunk_out: torch.Tensor, roster_rows: torch.Tensor) -> torch.Tensor:
        """trunk_out (U, width) aligned with roster_rows (U,) -> (U, hidden)."""
        embedded = self.user_embed(roster_rows)
        return torch.relu(self.head_shared(torch.cat([trunk_out, embedded], dim=-1)))

    def _masked_logits(self, logits: torch.Tensor, visible_sets: list[list[int]]) -> torch.Tensor:
        if not self.config.mask_visibility:
            return logits
        mask = torch.full_like(logits, float("-inf"))
        for row, sats in enumerate(visible_sets):
            if sats:
                mask[row, sats] = 0.0
            else:
                mask[row, :] = 0.0  # blind user: fall back to the full set
        return logits + mask

    def value(self, z: torch.Tensor) -> torch.Tensor:
        trunk_out = self.trunk(z)
        return self.value_head(torch.relu(self.value_hidden(trunk_out))).squeeze(-1)

    def user_distributions(self, z: torch.Tensor, user_ids, visible_sets):
        """Distributions for one slot: z (C,), users in payload order."""
        trunk_out = self.trunk(z.unsqueeze(0))
        rows = torch.tensor([self.roster_index[u] for u in user_ids], dtype=torch.long)
        h = self._head_features(trunk_out.expand(len(user_ids), -1), rows)
        logits = self._masked_logits(self.sat_head(h), visible_sets)
        sat = torch.distributions.Categorical(logits=logits)
        bw = torch.distributions.Beta(*beta_concentrations(self.bw_head(h)))
        cpu = torch.distributions.Beta(*beta_concentrations(self.cpu_head(h)))
        value = self.value_head(torch.relu(self.value_hidden(trunk_out))).squeeze()
        return sat, bw, cpu, value

    @torch.no_grad()
    def act(self, z: torch.Tensor, graph: SlotGraph, deterministic: bool = False):
        """Sample (or take the mode of) one slot's hybrid action.

        Returns (decisions keyed by user id, per-head log-prob sums, value).
        """
        visible_sets = [graph.visible[u] for u in graph.user_ids]
        sat_d, bw_d, cpu_d, value = self.user_distributions(z, graph.user_ids, visible_sets)
        if deterministic:
            sats = sat_d.logits.argmax(dim=-1)
            raw_bw = bw_d.mean
            raw_cpu = cpu_d.mean
        else:
            sats = sat_d.sample()
            raw_bw = bw_d.sample().clamp(SAMPLE_EPS, 1.0 - SAMPLE_EPS)
            raw_cpu = cpu_d.sample().clamp(SAMPLE_EPS, 1.0 - SAMPLE_EPS)

        log_probs = {
            "satellite": sat_d.log_prob(sats).sum(),
            "bandwidth": (bw_d.log_prob(raw_bw) - LOG_UNIT_SHRINK).sum(),
            "compute": (cpu_d.log_prob(raw_cpu) - LOG_UNIT_SHRINK).sum(),
        }
        decisions = {}
        for row, user_id in enumerate(graph.user_ids):
            decisions[user_id] = UserDecision(
                satellite=int(sats[row]),
                bandwidth=float(to_unit_interval(raw_bw[row])),
                compute=float(to_unit_interval(raw_cpu[row])),
                raw_bandwidth=float(raw_bw[row]),
                raw_compute=float(raw_cpu[row]),
            )
        return decisions, log_probs, float(value)

    def evaluate(self, z_batch: torch.Tensor, step_users, step_visible, step_decisions):
        """Re-score stored decisions under current parameters.

        z_batch is (T, C); the step_* sequences hold one entry per step.
        Returns per-head log-prob sums (T,), values (T,) and mean entropy.
        """
        trunk_out = self.trunk(z_batch)

        step_idx, roster_rows, sats, raw_bw, raw_cpu, visible_sets = [], [], [], [], [], []
        for t, users in enumerate(step_users):
            for u in users:
                d = step_decisions[t][u]
                step_idx.append(t)
                roster_rows.append(self.roster_index[u])
                sats.append(d.satellite)
                raw_bw.append(d.raw_bandwidth)
                raw_cpu.append(d.raw_compute)
                visible_sets.append(step_visible[t][u])
        step_idx = torch.tensor(step_idx, dtype=torch.long)
        rows = torch.tensor(roster_rows, dtype=torch.long)
        dtype = z_batch.dtype

        h = self._head_features(trunk_out[step_idx], rows)
        logits = self._masked_logits(self.sat_head(h), visible_sets)
        sat_d = torch.distributions.Categorical(logits=logits)
        bw_d = torch.distributions.Beta(*beta_concentrations(self.bw_head(h)))
        cpu_d = torch.distributions.Beta(*beta_concentrations(self.cpu_head(h)))

        per_user = {
            "satellite": sat_d.log_prob(torch.tensor(sats, dtype=torch.long)),
            "bandwidth": bw_d.log_prob(torch.tensor(raw_bw, dtype=dtype)) - LOG_UNIT_SHRINK,
            "compute": cpu_d.log_prob(torch.tensor(raw_cpu, dtype=dtype)) - LOG_UNIT_SHRINK,
        }
        num_steps = z_batch.shape[0]
        log_probs = {
            head: torch.zeros(num_steps, dtype=dtype).index_add_(0, step_idx, vals)
            for head, vals in per_user.items()
        }
        entropy = (sat_d.entropy() + bw_d.entropy() + cpu_d.entropy()).mean()
        values = self.value_head(torch.relu(self.value_hidden(trunk_out))).squeeze(-1)
        return log_probs, values, entropy


def decisions_to_payload(decisions: dict[int, UserDecision]) -> dict[str, dict[str, float]]:
    """Wire-format step actions: three parallel user-keyed maps."""
    return {
        "satellite": {str(u): d.satellite for u, d in decisions.items()},
        "bandwidth": {str(u): d.bandwidth for u, d in decisions.items()},
        "compute": {str(u): d.compute for u, d in decisions.items()},
    }
