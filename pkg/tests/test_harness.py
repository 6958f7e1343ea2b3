"""Wire protocol, evaluation runner, interactive loop, CLI plumbing."""

from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

import langfeed as lf
from langfeed.harness.agents import make_agent
from langfeed.harness.evaluate import (
    evaluate,
    report_from_transcripts,
    scripted_session,
)
from langfeed.harness.play import interactive_play
from langfeed.harness.protocol import (
    ProtocolClient,
    ProtocolServer,
    Session,
    parse_listen_spec,
)

from conftest import SCRIPTED_ACTIONS


def test_parse_listen_spec():
    assert parse_listen_spec("stdio") == ("stdio", None, 0)
    assert parse_listen_spec("tcp:127.0.0.1:9000") == ("tcp", "127.0.0.1", 9000)
    assert parse_listen_spec("localhost:81") == ("tcp", "localhost", 81)
    with pytest.raises(ValueError):
        parse_listen_spec("nonsense")


def _make_frame(env_id: str, seed: int) -> dict:
    return {
        "op": "make",
        "config": {"env_id": env_id, "seed": seed},
    }


def test_session_lifecycle_and_errors():
    session = Session()
    # step before make
    resp = session.handle_line(json.dumps({"op": "step", "action": "north"}))
    assert resp["type"] == "error" and resp["code"] == "no_session"
    # malformed frame does not kill the session
    resp = session.handle_line("this is not json")
    assert resp["type"] == "error" and resp["code"] == "bad_frame"
    # unknown env surfaces its error code
    resp = session.handle_line(json.dumps(_make_frame("bogus", 0)))
    assert resp["type"] == "error" and resp["code"] == "unknown_env"
    # good make / reset / step
    resp = session.handle_line(json.dumps(_make_frame("gridworld", 1)))
    assert resp["type"] == "ok" and resp["session_id"]
    resp = session.handle_line(json.dumps({"op": "step", "action": "north"}))
    assert resp["type"] == "error" and resp["code"] == "not_reset"
    resp = session.handle_line(json.dumps({"op": "reset", "seed": 1}))
    assert resp["type"] == "observation" and resp["feedback"] == ""
    resp = session.handle_line(json.dumps({"op": "step", "action": "north"}))
    assert resp["type"] == "observation"
    resp = session.handle_line(json.dumps({"op": "close"}))
    assert resp["type"] == "ok" and session.closed


def test_session_unsupported_combinations():
    session = Session()
    resp = session.handle_line(
        json.dumps({"op": "make", "config": {"env_id": "parking", "feedback": "fp"}})
    )
    assert resp["type"] == "error" and resp["code"] == "unsupported_feedback_type"
    resp = session.handle_line(
        json.dumps({"op": "make", "config": {"env_id": "poem", "instruction_type": "c"}})
    )
    assert resp["type"] == "error" and resp["code"] == "unsupported_instruction_type"


def test_observation_frames_never_leak_reward_or_info():
    session = Session()
    session.handle_line(json.dumps(_make_frame("optimization", 2)))
    frames = [session.handle_line(json.dumps({"op": "reset", "seed": 2}))]
    for action in SCRIPTED_ACTIONS["optimization"]:
        frame = session.handle_line(json.dumps({"op": "step", "action": action}))
        frames.append(frame)
        if frame.get("done"):
            break
    allowed = {"type", "observation", "instruction", "feedback", "terminated", "truncated", "done"}
    for frame in frames:
        assert frame["type"] == "observation"
        assert set(frame) <= allowed
        text = json.dumps(frame)
        assert '"reward"' not in text and '"info"' not in text


def test_step_after_done_gives_episode_over_error():
    session = Session()
    session.handle_line(json.dumps(_make_frame("poem", 3)))
    session.handle_line(json.dumps({"op": "reset"}))
    first = session.handle_line(json.dumps({"op": "step", "action": "hello"}))
    assert first["done"] is True
    resp = session.handle_line(json.dumps({"op": "step", "action": "hello"}))
    assert resp["type"] == "error" and resp["code"] == "episode_over"


def _run_over_wire(client: ProtocolClient, env_id: str, seed: int, actions: list[str]):
    """Mirror of scripted_session driven through the TCP protocol."""
    assert client.request(_make_frame(env_id, seed))["type"] == "ok"
    episodes = []
    current = None
    first = True
    for action in actions:
        if current is None:
            frame = client.request({"op": "reset", **({"seed": seed} if first else {})})
            first = False
            current = {"reset": frame, "steps": []}
        frame = client.request({"op": "step", "action": action})
        current["steps"].append(frame)
        if frame["done"]:
            episodes.append(current)
            current = None
    if current is not None:
        episodes.append(current)
    client.request({"op": "close"})
    return episodes


@pytest.mark.parametrize("env_id", sorted(SCRIPTED_ACTIONS))
def test_wire_matches_in_process(env_id):
    actions = SCRIPTED_ACTIONS[env_id]
    with ProtocolServer() as server:
        with ProtocolClient(server.host, server.port) as client:
            wire_episodes = _run_over_wire(client, env_id, 42, actions)
    local_episodes = scripted_session(env_id, 42, actions)
    assert len(wire_episodes) == len(local_episodes)
    for wire, local in zip(wire_episodes, local_episodes):
        assert wire["reset"]["observation"] == local.reset_bundle.observation
        assert wire["reset"]["instruction"] == local.reset_bundle.instruction
        assert wire["reset"]["feedback"] == ""
        for frame, (_, outcome) in zip(wire["steps"], local.steps):
            assert frame["observation"] == outcome.bundle.observation
            assert frame["instruction"] == outcome.bundle.instruction
            assert frame["feedback"] == outcome.bundle.feedback
            assert frame["terminated"] == outcome.terminated
            assert frame["truncated"] == outcome.truncated


def test_sessions_isolated_when_interleaved():
    with ProtocolServer() as server:
        a = ProtocolClient(server.host, server.port)
        b = ProtocolClient(server.host, server.port)
        a.request(_make_frame("gridworld", 1))
        b.request(_make_frame("gridworld", 2))
        ra = [a.request({"op": "reset", "seed": 1})]
        rb = [b.request({"op": "reset", "seed": 2})]
        for action in ["north", "east", "south", "west"]:
            ra.append(a.request({"op": "step", "action": action}))
            rb.append(b.request({"op": "step", "action": action}))
        a.close()
        b.close()
    serial_a = scripted_session("gridworld", 1, ["north", "east", "south", "west"])[0]
    serial_b = scripted_session("gridworld", 2, ["north", "east", "south", "west"])[0]
    assert ra[0]["instruction"] == serial_a.reset_bundle.instruction
    assert rb[0]["instruction"] == serial_b.reset_bundle.instruction
    for frame, (_, outcome) in zip(ra[1:], serial_a.steps):
        assert frame["feedback"] == outcome.bundle.feedback
    for frame, (_, outcome) in zip(rb[1:], serial_b.steps):
        assert frame["feedback"] == outcome.bundle.feedback


def test_stdio_serve_subprocess_roundtrip():
    requests = "\n".join(
        [
            json.dumps(_make_frame("poem", 9)),
            json.dumps({"op": "reset", "seed": 9}),
            json.dumps({"op": "step", "action": "a poem"}),
            json.dumps({"op": "close"}),
        ]
    )
    proc = subprocess.run(
        [sys.executable, "-m", "langfeed.harness.cli", "serve", "--listen", "stdio"],
        input=requests.encode("utf-8"),
        capture_output=True,
        timeout=60,
    )
    lines = [json.loads(l) for l in proc.stdout.decode().strip().splitlines()]
    assert [l["type"] for l in lines] == ["ok", "observation", "observation", "ok"]


def test_evaluate_deterministic_and_report_regenerates():
    report1, sessions1 = evaluate("gridworld", "random", n_episodes=4, seed_base=7)
    report2, sessions2 = evaluate("gridworld", "random", n_episodes=4, seed_base=7)
    assert report1.to_json() == report2.to_json()
    regenerated = report_from_transcripts("gridworld", "random", sessions1, report1.seeds)
    assert regenerated.to_json() == report1.to_json()


def test_evaluate_success_rates_extremes():
    report, _ = evaluate("poem", "garbage", n_episodes=5, seed_base=0)
    assert report.success_rate == 0.0
    config = lf.EnvConfig(env_id="gridworld", instruction_type=lf.InstructionType.COMPLETE)
    report, _ = evaluate("gridworld", "fp_follower", n_episodes=10, seed_base=0, config=config)
    assert report.success_rate == 1.0


def test_make_agent_unknown_id():
    with pytest.raises(ValueError):
        make_agent("no_such_agent", env_id="gridworld")


def _fake_agent_server(action: str, delay: float = 0.0):
    """A one-connection external agent answering every message with a fixed action."""
    import socket
    import threading
    import time as _time

    listener = socket.socket()
    listener.bind(("127.0.0.1", 0))
    listener.listen(1)
    port = listener.getsockname()[1]

    def serve():
        conn, _ = listener.accept()
        f = conn.makefile("rwb")
        try:
            for line in f:
                if delay:
                    _time.sleep(delay)
                f.write((json.dumps({"action": action}) + "\n").encode())
                f.flush()
        except (BrokenPipeError, ConnectionResetError, ValueError, OSError):
            pass

    thread = threading.Thread(target=serve, daemon=True)
    thread.start()
    return port


def test_endpoint_agent_drives_episodes():
    port = _fake_agent_server("north")
    report, sessions = evaluate(
        "gridworld", f"tcp:127.0.0.1:{port}", n_episodes=1, seed_base=3, timeout=10.0
    )
    assert report.agent_id.startswith("tcp:")
    assert all(action == "north" for action, _ in sessions[0][0].steps)


def test_endpoint_agent_timeout():
    from langfeed.harness.agents import AgentTimeoutError, EndpointAgent

    port = _fake_agent_server("north", delay=2.0)
    agent = EndpointAgent(f"tcp:127.0.0.1:{port}", timeout=0.3)
    bundle = lf.make(lf.EnvConfig(env_id="gridworld", seed=0)).reset()
    with pytest.raises(AgentTimeoutError):
        agent.act(bundle)
    agent.close()


def test_interactive_play_loop_and_eof():
    lines_in = iter(["north", "east"])
    printed: list[str] = []

    def fake_input(prompt: str) -> str:
        try:
            return next(lines_in)
        except StopIteration:
            raise EOFError

    interactive_play(
        lf.EnvConfig(env_id="gridworld", seed=5),
        input_fn=fake_input,
        print_fn=printed.append,
    )
    text = "\n".join(printed)
    assert "You are in the" in text
    assert "(session closed)" in text or "(episode" in text
    assert "reward" not in text  # masked unless debug


def test_interactive_play_debug_reveals_reward():
    printed: list[str] = []

    def one_action(prompt: str) -> str:
        return "hello poem"

    interactive_play(
        lf.EnvConfig(env_id="poem", seed=5),
        input_fn=one_action,
        print_fn=printed.append,
        debug=True,
    )
    assert any("reward" in line for line in printed)


def test_cli_validate_assets_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "langfeed.harness.cli", "validate-assets"],
        capture_output=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert b"template bank" in proc.stdout
