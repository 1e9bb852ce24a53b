"""Wire-protocol client for the simulator.

The learner never imports the simulator package; it talks to a `satedge
serve` process over newline-delimited JSON, either by spawning one on stdio
or by connecting to a TCP address.  Message flow (version 1): the server
sends its hello first, the client answers with a hello, then reset/step
until done, then close.
"""

from __future__ import annotations

import json
import socket
import subprocess
from typing import Any

PROTOCOL_VERSION = 1


class ProtocolError(RuntimeError):
    pass


class SimulatorClient:
    """One protocol session; use as a context manager."""

    def __init__(self, reader, writer, proc: subprocess.Popen | None = None, sock=None) -> None:
        self._reader = reader
        self._writer = writer
        self._proc = proc
        self._sock = sock
        self.scenario_info = self._handshake()

    @classmethod
    def spawn(cls, scenario_path: str, command: str = "satedge") -> "SimulatorClient":
        proc = subprocess.Popen(
            [command, "serve", "--scenario", scenario_path, "--listen", "stdio"],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        return cls(proc.stdout, proc.stdin, proc=proc)

    @classmethod
    def connect(cls, host: str, port: int, timeout: float = 30.0) -> "SimulatorClient":
        sock = socket.create_connection((host, port), timeout=timeout)
        reader = sock.makefile("r", encoding="utf-8", newline="\n")
        writer = sock.makefile("w", encoding="utf-8", newline="\n")
        return cls(reader, writer, sock=sock)

    def _handshake(self) -> dict[str, Any]:
        hello = self._read()
        if hello.get("type") != "hello":
            raise ProtocolError(f"expected server hello, got {hello.get('type')!r}")
        if hello.get("version") != PROTOCOL_VERSION:
            raise ProtocolError(f"server speaks protocol version {hello.get('version')!r}")
        self._send({"type": "hello", "version": PROTOCOL_VERSION})
        return hello["scenario"]

    def _send(self, payload: dict[str, Any]) -> None:
        self._writer.write(json.dumps(payload) + "\n")
        self._writer.flush()

    def _read(self) -> dict[str, Any]:
        line = self._reader.readline()
        if not line:
            raise ProtocolError("server closed the connection")
        return json.loads(line)

    def _read_reply(self, expected: str) -> dict[str, Any]:
        reply = self._read()
        if reply.get("type") == "error":
            raise ProtocolError(f"{reply.get('code')}: {reply.get('message')}")
        if reply.get("type") != expected:
            raise ProtocolError(f"expected {expected!r}, got {reply.get('type')!r}")
        return reply

    def reset(self, seed: int | None = None) -> dict[str, Any]:
        msg: dict[str, Any] = {"type": "reset"}
        if seed is not None:
            msg["seed"] = seed
        self._send(msg)
        return self._read_reply("observation")["observation"]

    def step(self, actions: dict[str, dict[str, Any]]) -> tuple[dict, dict, bool]:
        self._send({"type": "step", "actions": actions})
        reply = self._read_reply("transition")
        return reply["observation"], reply["outcome"], reply["done"]

    def close(self) -> None:
        try:
            self._send({"type": "close"})
            self._read_reply("close")
        except (ProtocolError, ValueError, OSError):
            pass  # best effort; the transport may already be gone
        finally:
            if self._sock is not None:
                self._sock.close()
            if self._proc is not None:
                if self._proc.stdin:
                    try:
                        self._proc.stdin.close()
                    except OSError:
                        pass  # closing flushes, which can hit a dead pipe
                self._proc.wait(timeout=10)

    def __enter__(self) -> "SimulatorClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
