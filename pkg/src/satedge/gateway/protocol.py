"""Line-delimited JSON wire protocol for driving the environment remotely.

Transport is any bidirectional byte stream: the process's stdin/stdout or
a TCP socket.  Every message is one JSON object per line with a "type"
field.  Protocol version 1 flow:

    server -> {"type": "hello", "version": 1, "scenario": {...static info...}}
    client -> {"type": "hello", "version": 1}
    client -> {"type": "reset", "seed": 7}
    server -> {"type": "observation", "observation": {...}}
    client -> {"type": "step", "actions": {"satellite": {"0": 3, ...},
                                            "bandwidth": {"0": 0.4, ...},
                                            "compute":   {"0": 0.2, ...}}}
    server -> {"type": "transition", "observation": {...}, "outcome": {...},
               "done": false}
    client -> {"type": "close"}
    server -> {"type": "close"}

Errors are {"type": "error", "code": ..., "message": ...}; the session
survives every error except a version mismatch, which is answered with an
error and a close.  Unknown fields in well-formed messages are ignored.
Driving an episode over this protocol is observationally identical to
calling Environment in process.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading
from typing import Any, TextIO

from ..environment import ActionSet, Environment, GraphSnapshot, SlotOutcome
from ..errors import ActionError, ProtocolError, StateError
from .scenario import Scenario

PROTOCOL_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROTOCOL = 3


def snapshot_payload(snapshot: GraphSnapshot) -> dict[str, Any]:
    return {
        "slot": snapshot.slot,
        "satellites": [
            {
                "sat_id": node.sat_id,
                "position_ecef_km": list(node.position_ecef_km),
                "remaining_bandwidth_ratio": node.remaining_bandwidth_ratio,
                "remaining_compute_ratio": node.remaining_compute_ratio,
                "remaining_beam_slots": node.remaining_beam_slots,
            }
            for node in snapshot.satellite_nodes
        ],
        "users": [
            {
                "user_id": node.user_id,
                "kind": node.kind,
                "position_ecef_km": list(node.position_ecef_km),
                "priority": node.priority,
                "arrival_rate_pps": node.arrival_rate_pps,
                "previous_satellite_id": node.previous_satellite_id,
            }
            for node in snapshot.user_nodes
        ],
        "edges": [list(edge) for edge in snapshot.edges],
    }


def outcome_payload(outcome: SlotOutcome) -> dict[str, Any]:
    return {
        "slot": outcome.slot,
        "reward": outcome.reward,
        "penalty_total": outcome.penalty_total,
        "migrations_count": outcome.migrations_count,
        "failures_count": outcome.failures_count,
        "per_user": {
            str(user_id): {
                "served_bits": u.served_bits,
                "migrated": u.migrated,
                "failed": u.failed,
                "assigned_satellite": u.assigned_satellite,
                "effective_rate_bps": u.effective_rate_bps,
                "failure_reason": u.failure_reason,
            }
            for user_id, u in outcome.per_user.items()
        },
    }


def hello_payload(scenario: Scenario) -> dict[str, Any]:
    """Static episode facts a remote learner needs before the first reset."""
    users = [{"user_id": i, "kind": "ground"} for i in range(len(scenario.clusters))]
    users += [{"user_id": f.flight_id, "kind": "flight"} for f in scenario.flights]
    return {
        "type": "hello",
        "version": PROTOCOL_VERSION,
        "scenario": {
            "num_satellites": scenario.constellation.num_satellites,
            "satellite_ids": list(range(scenario.constellation.num_satellites)),
            "orbit_radius_km": scenario.constellation.orbit_radius_km,
            "earth_radius_km": scenario.constellation.earth_radius_km,
            "num_slots": scenario.env.num_slots,
            "slot_seconds": scenario.env.slot_seconds,
            "theta_min_deg": scenario.env.theta_min_deg,
            "max_beams": scenario.env.max_beams,
            "bandwidth_cap": scenario.env.bandwidth_cap,
            "compute_cap": scenario.env.compute_cap,
            "penalty_weight": scenario.env.penalty_weight,
            "app_update_cost": scenario.env.app_update_cost,
            "max_nodes": scenario.max_nodes,
            "users": users,
        },
    }


def parse_actions(raw: Any) -> ActionSet:
    """Decode the three parallel user-keyed maps of a step message."""
    if not isinstance(raw, dict):
        raise ActionError("actions must be an object")
    maps = {}
    for name in ("satellite", "bandwidth", "compute"):
        section = raw.get(name)
        if not isinstance(section, dict):
            raise ActionError(f"actions.{name} must be an object keyed by user id")
        decoded = {}
        for key, value in section.items():
            try:
                user_id = int(key)
            except (TypeError, ValueError):
                raise ActionError(f"actions.{name}: bad user id {key!r}") from None
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ActionError(f"actions.{name}[{key}]: expected a number")
            decoded[user_id] = int(value) if name == "satellite" else float(value)
        maps[name] = decoded
    return ActionSet(satellite=maps["satellite"], bandwidth=maps["bandwidth"], compute=maps["compute"])


def _error(code: str, message: str) -> dict[str, Any]:
    return {"type": "error", "code": code, "message": message}


class Session:
    """One protocol session bound to one environment instance."""

    def __init__(self, scenario: Scenario) -> None:
        self._scenario = scenario
        self._env = Environment(scenario)
        self._greeted = False
        self._started = False
        self._done = False

    def hello(self) -> dict[str, Any]:
        return hello_payload(self._scenario)

    def handle_line(self, line: str) -> tuple[list[dict[str, Any]], bool]:
        """Replies for one input line, plus whether the session must end."""
        try:
            message = json.loads(line)
        except json.JSONDecodeError:
            return [_error("bad_message", "input line is not valid JSON")], False
        if not isinstance(message, dict) or not isinstance(message.get("type"), str):
            return [_error("bad_message", "message must be an object with a 'type' field")], False
        kind = message["type"]

        if not self._greeted:
            if kind != "hello":
                return [_error("handshake_required", "send hello before other messages")], False
            version = message.get("version")
            if version != PROTOCOL_VERSION:
                return [
                    _error("version_mismatch", f"server speaks version {PROTOCOL_VERSION}, got {version!r}"),
                    {"type": "close"},
                ], True
            self._greeted = True
            return [], False

        if kind == "hello":
            # idempotent re-greeting; version already checked on first hello
            return [], False
        if kind == "reset":
            seed = message.get("seed")
            if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
                return [_error("bad_message", "reset.seed must be an integer when present")], False
            snapshot = self._env.reset(seed)
            self._started = True
            self._done = False
            return [{"type": "observation", "observation": snapshot_payload(snapshot)}], False
        if kind == "step":
            if not self._started:
                return [_error("not_reset", "reset the environment before stepping")], False
            if self._done:
                return [_error("episode_done", "episode finished; reset to continue")], False
            try:
                actions = parse_actions(message.get("actions"))
                snapshot, outcome, done = self._env.step(actions)
            except ActionError as exc:
                return [_error("bad_actions", str(exc))], False
            except StateError as exc:  # pragma: no cover - session flags guard this
                return [_error("not_reset", str(exc))], False
            self._done = done
            return [
                {
                    "type": "transition",
                    "observation": snapshot_payload(snapshot),
                    "outcome": outcome_payload(outcome),
                    "done": done,
                }
            ], False
        if kind == "close":
            return [{"type": "close"}], True
        return [_error("unknown_type", f"unknown message type {kind!r}")], False


def serve(reader: TextIO, writer: TextIO, scenario: Scenario) -> int:
    """Run one session over text streams; returns a CLI exit code."""
    session = Session(scenario)
    exit_code = EXIT_OK

    def send(payload: dict[str, Any]) -> None:
        writer.write(json.dumps(payload) + "\n")
        writer.flush()

    send(session.hello())
    try:
        for line in reader:
            if not line.strip():
                continue
            replies, finished = session.handle_line(line)
            for reply in replies:
                if reply.get("code") == "version_mismatch":
                    exit_code = EXIT_PROTOCOL
                send(reply)
            if finished:
                break
    except (BrokenPipeError, ConnectionResetError):  # peer vanished; nothing to report
        pass
    return exit_code


class _SessionHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:  # pragma: no cover - exercised via ProtocolServer
        serve(
            _TextReader(self.rfile),
            _TextWriter(self.wfile),
            self.server.scenario,  # type: ignore[attr-defined]
        )


class _TextReader:
    """Line iterator decoding a binary stream as UTF-8."""

    def __init__(self, raw) -> None:
        self._raw = raw

    def __iter__(self):
        for line in self._raw:
            yield line.decode("utf-8", errors="replace")


class _TextWriter:
    def __init__(self, raw) -> None:
        self._raw = raw

    def write(self, text: str) -> None:
        self._raw.write(text.encode("utf-8"))

    def flush(self) -> None:
        self._raw.flush()


class ProtocolServer:
    """Threaded TCP server: one independent session per connection."""

    def __init__(self, scenario: Scenario, host: str = "127.0.0.1", port: int = 0) -> None:
        class _Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = _Server((host, port), _SessionHandler)
        self._server.scenario = scenario  # type: ignore[attr-defined]
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def start(self) -> "ProtocolServer":
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


def parse_listen_address(listen: str) -> tuple[str, int]:
    """Parse a host:port listen spec."""
    host, sep, port = listen.rpartition(":")
    if not sep or not port.isdigit():
        raise ProtocolError(f"bad listen address {listen!r}; expected host:port or 'stdio'")
    return (host or "127.0.0.1", int(port))


def connect_lines(host: str, port: int, timeout: float = 30.0) -> tuple[TextIO, TextIO, socket.socket]:
    """Client helper: text reader/writer over a fresh TCP connection."""
    sock = socket.create_connection((host, port), timeout=timeout)
    reader = sock.makefile("r", encoding="utf-8", newline="\n")
    writer = sock.makefile("w", encoding="utf-8", newline="\n")
    return reader, writer, sock
