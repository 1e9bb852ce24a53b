"""Turn observation payloads into node feature matrices and graph structure.

Satellite and user records carry different fields, so both are laid out in
one shared feature width with a type indicator and zero padding (the graph
layer expects a single X).  Positions are scaled by the orbit and Earth
radii from the server hello; a user's previous satellite becomes a
normalized index plus a none-flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

FEATURE_DIM = 12

# feature layout, shared by both node types
F_IS_SAT = 0
F_POS = slice(1, 4)
F_SAT_BW = 4
F_SAT_CPU = 5
F_SAT_BEAMS = 6
F_IS_FLIGHT = 7
F_PRIORITY = 8
F_ARRIVAL = 9
F_PREV_SAT = 10
F_NO_PREV = 11

PRIORITY_SCALE = 1e9       # utility weights are per-bit, order 1e-9
ARRIVAL_SCALE = 0.1


@dataclass(frozen=True)
class SlotGraph:
    """One slot's padded graph: features, edges and a presence mask."""

    features: np.ndarray            # (max_nodes, FEATURE_DIM)
    edges: tuple[tuple[int, int], ...]  # node-index pairs, user <-> satellite
    mask: np.ndarray                # (max_nodes,) 1.0 for live nodes
    node_count: int
    user_ids: tuple[int, ...]       # active users, payload order
    visible: dict[int, list[int]]   # user id -> visible satellite ids


def build_slot_graph(observation: dict[str, Any], info: dict[str, Any]) -> SlotGraph:
    """Satellites first (node index == satellite id), then active users."""
    max_nodes = info["max_nodes"]
    num_sats = info["num_satellites"]
    orbit_r = info["orbit_radius_km"]
    earth_r = info["earth_radius_km"]
    max_beams = info["max_beams"]

    sats = observation["satellites"]
    users = observation["users"]
    n = len(sats) + len(users)
    if n > max_nodes:
        raise ValueError(f"{n} nodes exceed the advertised maximum {max_nodes}")

    x = np.zeros((max_nodes, FEATURE_DIM), dtype=np.float64)
    for s in sats:
        row = x[s["sat_id"]]
        row[F_IS_SAT] = 1.0
        row[F_POS] = np.asarray(s["position_ecef_km"]) / orbit_r
        row[F_SAT_BW] = s["remaining_bandwidth_ratio"]
        row[F_SAT_CPU] = s["remaining_compute_ratio"]
        row[F_SAT_BEAMS] = s["remaining_beam_slots"] / max_beams

    user_ids = []
    node_of_user = {}
    for offset, u in enumerate(users):
        idx = num_sats + offset
        node_of_user[u["user_id"]] = idx
        user_ids.append(u["user_id"])
        row = x[idx]
        row[F_POS] = np.asarray(u["position_ecef_km"]) / earth_r
        row[F_IS_FLIGHT] = 1.0 if u["kind"] == "flight" else 0.0
        row[F_PRIORITY] = u["priority"] * PRIORITY_SCALE
        row[F_ARRIVAL] = u["arrival_rate_pps"] * ARRIVAL_SCALE
        prev = u["previous_satellite_id"]
        if prev is None:
            row[F_NO_PREV] = 1.0
        else:
            row[F_PREV_SAT] = (prev + 1) / num_sats

    edges = []
    visible: dict[int, list[int]] = {u: [] for u in user_ids}
    for user_id, sat_id in observation["edges"]:
        edges.append((node_of_user[user_id], sat_id))
        visible[user_id].append(sat_id)

    mask = np.zeros(max_nodes, dtype=np.float64)
    mask[:n] = 1.0
    return SlotGraph(
        features=x,
        edges=tuple(edges),
        mask=mask,
        node_count=n,
        user_ids=tuple(user_ids),
        visible=visible,
    )
