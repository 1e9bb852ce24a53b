"""M/M/1 sojourn-time analytics for per-user service queues.

Each served user is modeled as an M/M/1 queue: Poisson packet arrivals at
lambda packets/s, exponential service at mu = rate / packet_bits packets/s.
The probability that a packet's sojourn time (wait + service) stays within
the user's delay bound is the closed form 1 - exp(-mu (1 - rho) t).  An
unstable queue (rho >= 1) or a dead link (mu = 0) never meets the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError


@dataclass(frozen=True)
class QueueParams:
    arrival_rate_pps: float
    service_rate_pps: float
    utilization: float

    def __post_init__(self) -> None:
        if self.arrival_rate_pps < 0 or self.service_rate_pps < 0:
            raise ConfigurationError("rates must be >= 0")
        if self.service_rate_pps > 0:
            expected = self.arrival_rate_pps / self.service_rate_pps
            if not math.isclose(self.utilization, expected, rel_tol=1e-12, abs_tol=1e-12):
                raise ConfigurationError("utilization must equal arrival/service")

    @classmethod
    def from_rates(cls, arrival_rate_pps: float, service_rate_pps: float) -> "QueueParams":
        rho = arrival_rate_pps / service_rate_pps if service_rate_pps > 0 else math.inf
        return cls(arrival_rate_pps, service_rate_pps, rho)


def service_rate_pps(data_rate_bps: float, packet_bits: float) -> float:
    """Packets the link drains per second at the allocated rate."""
    if data_rate_bps < 0:
        raise ValueError("data_rate_bps must be >= 0")
    if packet_bits <= 0:
        raise ValueError("packet_bits must be > 0")
    return data_rate_bps / packet_bits


def delay_success_prob(arrival_rate_pps: float, service_rate_pps: float, delay_bound_s: float) -> float:
    """P(sojourn <= bound) for a stationary M/M/1 queue; 0 if unstable."""
    if delay_bound_s <= 0:
        raise ValueError("delay_bound_s must be > 0")
    if arrival_rate_pps < 0 or service_rate_pps < 0:
        raise ValueError("rates must be >= 0")
    if service_rate_pps == 0.0:
        return 0.0
    rho = arrival_rate_pps / service_rate_pps
    if rho >= 1.0:
        return 0.0
    return 1.0 - math.exp(-service_rate_pps * (1.0 - rho) * delay_bound_s)


def served_bits(
    arrival_rate_pps: float, slot_seconds: float, packet_bits: float, success_prob: float
) -> float:
    """Expected bits served within the delay bound during one slot."""
    if slot_seconds <= 0:
        raise ValueError("slot_seconds must be > 0")
    if not 0.0 <= success_prob <= 1.0:
        raise ValueError("success_prob must lie in [0, 1]")
    return arrival_rate_pps * slot_seconds * packet_bits * success_prob
