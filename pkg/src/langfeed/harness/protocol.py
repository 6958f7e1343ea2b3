"""Line-delimited JSON wire protocol exposing environments to external agents.

One session owns one environment handle.  Every request line receives exactly
one response line.  Observation responses carry only agent-channel data:
never reward, never info.  See docs/protocol.md for the frame schema.
"""

from __future__ import annotations

import json
import socket
import socketserver
import sys
import threading
import uuid
from typing import Any, BinaryIO, Optional

from ..core import (
    EnvConfig,
    Environment,
    EnvironmentError_,
    ObservationBundle,
    make,
)

PROTOCOL_ERROR_CODES = (
    "bad_frame",
    "bad_request",
    "unknown_env",
    "unsupported_instruction_type",
    "unsupported_feedback_type",
    "no_session",
    "not_reset",
    "episode_over",
    "internal",
)


class BindFailureError(OSError):
    """Could not bind the requested listen address."""


def observation_response(
    bundle: ObservationBundle, terminated: bool = False, truncated: bool = False
) -> dict[str, Any]:
    """Agent-channel frame: bundle text plus episode-end flags only."""
    return {
        "type": "observation",
        "observation": bundle.observation,
        "instruction": bundle.instruction,
        "feedback": bundle.feedback,
        "terminated": terminated,
        "truncated": truncated,
        "done": terminated or truncated,
    }


def error_response(code: str, message: str) -> dict[str, Any]:
    return {"type": "error", "code": code, "message": message}


class Session:
    """Protocol state machine for one client."""

    def __init__(self) -> None:
        self.env: Optional[Environment] = None
        self.session_id: Optional[str] = None
        self.closed = False

    def handle_line(self, line: str) -> dict[str, Any]:
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            return error_response("bad_frame", f"unparseable frame: {exc}")
        if not isinstance(request, dict) or "op" not in request:
            return error_response("bad_frame", "frame must be an object with an 'op' field")
        op = request.get("op")
        try:
            if op == "make":
                return self._handle_make(request)
            if op == "reset":
                return self._handle_reset(request)
            if op == "step":
                return self._handle_step(request)
            if op == "close":
                self.closed = True
                return {"type": "ok", "session_id": self.session_id}
            return error_response("bad_request", f"unknown op {op!r}")
        except EnvironmentError_ as exc:
            return error_response(exc.code, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            return error_response("internal", f"{type(exc).__name__}: {exc}")

    def _handle_make(self, request: dict[str, Any]) -> dict[str, Any]:
        raw = request.get("config")
        if not isinstance(raw, dict):
            return error_response("bad_request", "make requires a 'config' object")
        try:
            config = EnvConfig.from_dict(raw)
        except (KeyError, ValueError, TypeError) as exc:
            return error_response("bad_request", f"bad config: {exc}")
        self.env = make(config)
        self.session_id = uuid.uuid4().hex
        return {"type": "ok", "session_id": self.session_id}

    def _handle_reset(self, request: dict[str, Any]) -> dict[str, Any]:
        if self.env is None:
            return error_response("no_session", "call make before reset")
        seed = request.get("seed")
        if seed is not None and (not isinstance(seed, int) or seed < 0):
            return error_response("bad_request", "seed must be a non-negative integer")
        bundle = self.env.reset(seed)
        return observation_response(bundle)

    def _handle_step(self, request: dict[str, Any]) -> dict[str, Any]:
        if self.env is None:
            return error_response("no_session", "call make before step")
        action = request.get("action")
        if not isinstance(action, str):
            return error_response("bad_request", "step requires a string 'action'")
        outcome = self.env.step(action)
        return observation_response(outcome.bundle, outcome.terminated, outcome.truncated)


def serve_stream(reader: BinaryIO, writer: BinaryIO) -> None:
    """Run one session over byte streams (stdio mode)."""
    session = Session()
    for raw in reader:
        line = raw.decode("utf-8", errors="replace").strip()
        if not line:
            continue
        response = session.handle_line(line)
        writer.write((json.dumps(response, sort_keys=True) + "\n").encode("utf-8"))
        writer.flush()
        if session.closed:
            break


class _SessionHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        serve_stream(self.rfile, self.wfile)


class _ThreadingTCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class ProtocolServer:
    """TCP server running isolated sessions, one per connection."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        try:
            self._server = _ThreadingTCPServer((host, port), _SessionHandler)
        except OSError as exc:
            raise BindFailureError(f"cannot bind {host}:{port}: {exc}") from exc
        self.host, self.port = self._server.server_address[:2]
        self._thread: Optional[threading.Thread] = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self._server.serve_forever()

    def shutdown(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self) -> "ProtocolServer":
        self.start()
        return self

    def __exit__(self, *exc: Any) -> None:
        self.shutdown()


def parse_listen_spec(spec: str) -> tuple[str, Optional[str], int]:
    """'stdio' | 'tcp:host:port' | 'host:port' -> (mode, host, port)."""
    if spec == "stdio":
        return ("stdio", None, 0)
    text = spec[4:] if spec.startswith("tcp:") else spec
    host, _, port_text = text.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"bad listen spec {spec!r}; use 'stdio' or 'tcp:<host>:<port>'")
    return ("tcp", host, int(port_text))


def serve(listen_spec: str) -> None:
    """Blocking entry point for the CLI."""
    mode, host, port = parse_listen_spec(listen_spec)
    if mode == "stdio":
        serve_stream(sys.stdin.buffer, sys.stdout.buffer)
        return
    server = ProtocolServer(host or "127.0.0.1", port)
    print(f"READY {server.host} {server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


class ProtocolClient:
    """Minimal in-repo client used by tests and remote-agent evaluation."""

    def __init__(self, host: str, port: int, timeout: float = 30.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._file = self._sock.makefile("rwb")

    def request(self, payload: dict[str, Any]) -> dict[str, Any]:
        self._file.write((json.dumps(payload) + "\n").encode("utf-8"))
        self._file.flush()
        line = self._file.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return json.loads(line.decode("utf-8"))

    def close(self) -> None:
        try:
            self._file.close()
        finally:
            self._sock.close()

    def __enter__(self) -> "ProtocolClient":
        return self

    def __exit__(self, *exc: Any) -> None:
        self.close()
