"""Scripted baseline agents.

These act purely on agent-channel text: they parse instructions and feedback
through template slot extraction, so they double as end-to-end checks that
the emitted feedback actually carries what it claims to carry.
"""

from __future__ import annotations

import json
import re
import socket
from typing import Optional

import numpy as np

from ..core import EnvConfig, ObservationBundle, make
from ..templates import NoTemplateMatchesError, TemplateBank, default_bank


class AgentTimeoutError(TimeoutError):
    """External agent missed its per-step deadline."""


class Agent:
    """Text-in, text-out policy driven by ObservationBundles."""

    name = "agent"

    def begin(self, bundle: ObservationBundle) -> None:
        """Called with the reset bundle at the start of every episode."""

    def act(self, bundle: ObservationBundle) -> str:
        raise NotImplementedError

    def observe(self, bundle: ObservationBundle) -> None:
        """Called with every step-outcome bundle, including episode-ending
        ones that never reach ``act`` (horizon-1 rounds deliver their
        feedback here)."""

    def close(self) -> None:
        """Release any resources (sockets, helper envs)."""


def _feedback_lines(bundle: ObservationBundle) -> list[str]:
    return [line for line in bundle.feedback.split("\n") if line]


def _extract_from_lines(
    bank: TemplateBank, lines: list[str], env_id: str, kind: str, event: str
) -> Optional[dict[str, str]]:
    for line in lines:
        try:
            return bank.extract_slots(line, env_id, kind, event)
        except NoTemplateMatchesError:
            continue
    return None


class RandomAgent(Agent):
    """Samples syntactically plausible actions from a private helper env."""

    name = "random"

    def __init__(self, env_id: str, seed: int = 0):
        self.rng = np.random.default_rng(seed)
        self._helper = make(EnvConfig(env_id=env_id, seed=seed))
        self._helper.reset()

    def act(self, bundle: ObservationBundle) -> str:
        return self._helper.sample_action(self.rng)


class GarbageAgent(Agent):
    """Constant nonsense reply; a floor for any success metric."""

    name = "garbage"

    def __init__(self, env_id: str = "", seed: int = 0):
        pass

    def act(self, bundle: ObservationBundle) -> str:
        return "xyzzy plugh qwertyuiop !!"


class FpFollowerAgent(Agent):
    """Gridworld walker that obeys the future-positive suggestion.

    The reset bundle carries no feedback, so the first move comes from the
    route included in complete-mode instructions; afterwards every move is
    the direction extracted from the latest fp feedback line.
    """

    name = "fp_follower"

    def __init__(self, env_id: str = "gridworld", seed: int = 0):
        self.bank = default_bank()
        self._pending_path: list[str] = []

    def begin(self, bundle: ObservationBundle) -> None:
        self._pending_path = []
        try:
            slots = self.bank.extract_slots(
                bundle.instruction, "gridworld", "instruction", "complete"
            )
            self._pending_path = [p.strip() for p in slots["path"].split(",") if p.strip()]
        except NoTemplateMatchesError:
            pass

    def act(self, bundle: ObservationBundle) -> str:
        slots = _extract_from_lines(
            self.bank, _feedback_lines(bundle), "gridworld", "fp", "suggest"
        )
        if slots is not None:
            return slots["direction"]
        if self._pending_path:
            return self._pending_path.pop(0)
        return "north"


class EpsilonGreedyBanditAgent(Agent):
    """Tracks empirical payouts parsed from r feedback; explores with prob eps."""

    name = "epsilon_greedy"

    def __init__(self, env_id: str = "bandit", seed: int = 0, epsilon: float = 0.1):
        self.bank = default_bank()
        self.rng = np.random.default_rng(seed)
        self.epsilon = epsilon
        self.labels: list[str] = []
        self.totals: dict[str, float] = {}
        self.counts: dict[str, int] = {}

    def begin(self, bundle: ObservationBundle) -> None:
        for event in ("basic", "complete"):
            try:
                slots = self.bank.extract_slots(
                    bundle.instruction.split("\n")[0], "bandit", "instruction", event
                )
                self.labels = [a.strip() for a in slots["actions"].split(",") if a.strip()]
                break
            except NoTemplateMatchesError:
                continue

    def observe(self, bundle: ObservationBundle) -> None:
        slots = _extract_from_lines(self.bank, _feedback_lines(bundle), "bandit", "r", "payout")
        if slots is None:
            return
        arm, payout = slots["arm"], float(slots["payout"])
        self.totals[arm] = self.totals.get(arm, 0.0) + payout
        self.counts[arm] = self.counts.get(arm, 0) + 1

    def act(self, bundle: ObservationBundle) -> str:
        if not self.labels:
            return "1"
        unseen = [a for a in self.labels if a not in self.counts]
        if unseen:
            return unseen[0]
        if self.rng.random() < self.epsilon:
            return self.labels[int(self.rng.integers(len(self.labels)))]
        return max(self.labels, key=lambda a: self.totals[a] / self.counts[a])


_POINT_RE = re.compile(
    r"x = \(([-+]?\d+\.?\d*(?:[eE][-+]?\d+)?), ([-+]?\d+\.?\d*(?:[eE][-+]?\d+)?)\)"
)
_DIRECTION_STEP = {"increase": 1.0, "decrease": -1.0, "hold": 0.0}


class SignDescentAgent(Agent):
    """Moves each coordinate along the direction fp suggests.

    The first proposal re-submits the starting point (no feedback exists
    yet); later proposals adjust the point reported in the observation.
    The step size follows the slope rating broadcast with the suggestion:
    a fixed full-step raw sign descent oscillates across narrow valleys, so
    steps are scaled down so that every move provably descends on the
    bundled convex functions (their curvature stays below 18, and the
    "gentle" rating bounds the gradient 1-norm below by 1e-3).
    """

    name = "sign_descent"

    # Fractions of the box width; safe while step < 2*||grad||_1 / (L*2).
    STEEP_STEP = 0.05 / 20  # slope >= 1
    GENTLE_STEP = 0.05 / 20_000  # slope in [1e-3, 1)

    def __init__(self, env_id: str = "optimization", seed: int = 0):
        self.bank = default_bank()
        self.width = 0.0

    def begin(self, bundle: ObservationBundle) -> None:
        slots = self.bank.extract_slots(
            bundle.instruction, "optimization", "instruction", "basic"
        )
        self.width = float(slots["high"]) - float(slots["low"])

    def _current_point(self, bundle: ObservationBundle) -> Optional[tuple[float, float]]:
        m = _POINT_RE.search(bundle.observation)
        if m is None:
            return None
        return float(m.group(1)), float(m.group(2))

    def act(self, bundle: ObservationBundle) -> str:
        point = self._current_point(bundle)
        if point is None:
            return "0, 0"
        x, y = point
        slots = _extract_from_lines(
            self.bank, _feedback_lines(bundle), "optimization", "fp", "direction"
        )
        if slots is not None:
            factor = self.STEEP_STEP if slots["slope"] == "steep" else self.GENTLE_STEP
            eta = factor * self.width
            x += eta * _DIRECTION_STEP[slots["dir_x"]]
            y += eta * _DIRECTION_STEP[slots["dir_y"]]
        return f"{x:.6f}, {y:.6f}"


class EndpointAgent(Agent):
    """Proxy to an external agent speaking line-delimited JSON over TCP.

    We send {"type": "begin"|"act", "observation", "instruction", "feedback"}
    and expect {"action": "..."} within the per-step deadline.
    """

    name = "endpoint"

    def __init__(self, endpoint: str, timeout: float = 30.0):
        text = endpoint[4:] if endpoint.startswith("tcp:") else endpoint
        host, _, port = text.rpartition(":")
        self.timeout = timeout
        self._sock = socket.create_connection((host, int(port)), timeout=timeout)
        self._file = self._sock.makefile("rwb")

    def _roundtrip(self, payload: dict) -> dict:
        try:
            self._file.write((json.dumps(payload) + "\n").encode("utf-8"))
            self._file.flush()
            line = self._file.readline()
        except socket.timeout as exc:
            raise AgentTimeoutError(f"agent missed the {self.timeout}s deadline") from exc
        if not line:
            raise ConnectionError("agent endpoint closed the connection")
        return json.loads(line.decode("utf-8"))

    def begin(self, bundle: ObservationBundle) -> None:
        self._roundtrip({"type": "begin", **bundle.to_dict()})

    def act(self, bundle: ObservationBundle) -> str:
        reply = self._roundtrip({"type": "act", **bundle.to_dict()})
        return str(reply.get("action", ""))

    def close(self) -> None:
        try:
            self._file.close()
        finally:
            self._sock.close()


SCRIPTED_AGENTS = {
    "random": RandomAgent,
    "garbage": GarbageAgent,
    "fp_follower": FpFollowerAgent,
    "epsilon_greedy": EpsilonGreedyBanditAgent,
    "sign_descent": SignDescentAgent,
}


def make_agent(agent_id: str, env_id: str, seed: int = 0, timeout: float = 30.0) -> Agent:
    """Instantiate a scripted agent by id, or an endpoint proxy for tcp:..."""
    if agent_id.startswith("tcp:") or (":" in agent_id and agent_id not in SCRIPTED_AGENTS):
        return EndpointAgent(agent_id, timeout=timeout)
    if agent_id not in SCRIPTED_AGENTS:
        raise ValueError(
            f"unknown agent {agent_id!r}; scripted agents: {', '.join(sorted(SCRIPTED_AGENTS))}"
        )
    return SCRIPTED_AGENTS[agent_id](env_id=env_id, seed=seed)
