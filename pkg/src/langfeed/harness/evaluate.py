"""Evaluation runner: drives agents over seeded sessions and scores them.

Scoring happens entirely on the evaluation channel (hidden rewards and info);
the agent only ever receives ObservationBundles.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Optional

from ..core import EnvConfig, EpisodeTranscript, make, run_episode
from ..envs.bandit import regret as bandit_regret
from .agents import Agent, make_agent


@dataclass
class EvalReport:
    """Pure function of the recorded transcripts."""

    env_id: str
    agent_id: str
    n_sessions: int
    rounds_per_session: int
    seeds: list[int]
    episode_rewards: list[float]
    success_rate: Optional[float]
    regret: Optional[float]
    transcript_digests: list[str] = field(default_factory=list)

    @property
    def n_episodes(self) -> int:
        return len(self.episode_rewards)

    def to_dict(self) -> dict[str, Any]:
        return {
            "env_id": self.env_id,
            "agent_id": self.agent_id,
            "n_sessions": self.n_sessions,
            "rounds_per_session": self.rounds_per_session,
            "n_episodes": self.n_episodes,
            "seeds": self.seeds,
            "episode_rewards": self.episode_rewards,
            "success_rate": self.success_rate,
            "regret": self.regret,
            "transcript_digests": self.transcript_digests,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _episode_success(transcript: EpisodeTranscript) -> Optional[bool]:
    if not transcript.steps:
        return None
    info = transcript.steps[-1][1].info
    if "success" not in info:
        return None
    return bool(info["success"])


def report_from_transcripts(
    env_id: str,
    agent_id: str,
    sessions: list[list[EpisodeTranscript]],
    seeds: list[int],
) -> EvalReport:
    episodes = [t for session in sessions for t in session]
    rewards = [t.cumulative_reward for t in episodes]
    successes = [s for s in (_episode_success(t) for t in episodes) if s is not None]
    success_rate = (sum(successes) / len(successes)) if successes else None

    total_regret: Optional[float] = None
    if env_id.startswith("bandit"):
        total_regret = sum(bandit_regret(session) for session in sessions)

    digests = [
        hashlib.sha256(t.to_json().encode("utf-8")).hexdigest() for t in episodes
    ]
    return EvalReport(
        env_id=env_id,
        agent_id=agent_id,
        n_sessions=len(sessions),
        rounds_per_session=max((len(s) for s in sessions), default=0),
        seeds=list(seeds),
        episode_rewards=rewards,
        success_rate=success_rate,
        regret=total_regret,
        transcript_digests=digests,
    )


def run_agent_episode(env: Any, agent: Agent, seed: Optional[int]) -> EpisodeTranscript:
    """One reset-to-done episode with the agent in the loop."""
    bundle = env.reset(seed)
    agent.begin(bundle)
    transcript = EpisodeTranscript(config=env.config, reset_bundle=bundle)
    for _ in range(env.horizon + 1):
        action = agent.act(bundle)
        outcome = env.step(action)
        transcript.steps.append((str(action), outcome))
        bundle = outcome.bundle
        agent.observe(bundle)
        if outcome.done:
            break
    return transcript


def evaluate(
    env_id: str,
    agent: str | Agent,
    n_episodes: int,
    seed_base: int = 0,
    rounds: int = 1,
    config: Optional[EnvConfig] = None,
    agent_seed: int = 0,
    timeout: float = 30.0,
) -> tuple[EvalReport, list[list[EpisodeTranscript]]]:
    """Run ``n_episodes`` sessions seeded seed_base..seed_base+n-1.

    Each session runs ``rounds`` episodes on one handle: the first reset uses
    the session seed, later resets continue the session (multi-round envs
    keep their latent state that way).  A fresh agent is built per session so
    learning happens within sessions, not across seeds.
    """
    seeds = [seed_base + i for i in range(n_episodes)]
    sessions: list[list[EpisodeTranscript]] = []
    agent_id = agent if isinstance(agent, str) else agent.name

    for seed in seeds:
        cfg = config or EnvConfig(env_id=env_id, seed=seed)
        env = make(cfg)
        if isinstance(agent, str):
            session_agent = make_agent(agent, env_id=env_id, seed=agent_seed, timeout=timeout)
        else:
            session_agent = agent
        session = []
        try:
            for round_idx in range(rounds):
                session.append(
                    run_agent_episode(env, session_agent, seed if round_idx == 0 else None)
                )
        finally:
            if isinstance(agent, str):
                session_agent.close()
        sessions.append(session)

    report = report_from_transcripts(env_id, agent_id, sessions, seeds)
    return report, sessions


def scripted_transcript(env_id: str, seed: int, actions: list[str]) -> EpisodeTranscript:
    """Fixed-action episode used by determinism and differential checks."""
    env = make(EnvConfig(env_id=env_id, seed=seed))
    return run_episode(env, actions, seed=seed)


def scripted_session(
    env_id: str,
    seed: int,
    actions: list[str],
    config: Optional[EnvConfig] = None,
) -> list[EpisodeTranscript]:
    """Feed a fixed action script through one handle, resetting as episodes end.

    The first reset uses the session seed; later resets continue the session.
    Every action in the script is consumed exactly once, so two runs with the
    same script are comparable transcript-for-transcript.
    """
    env = make(config or EnvConfig(env_id=env_id, seed=seed))
    transcripts: list[EpisodeTranscript] = []
    current: Optional[EpisodeTranscript] = None
    for action in actions:
        if current is None:
            bundle = env.reset(seed if not transcripts else None)
            current = EpisodeTranscript(config=env.config, reset_bundle=bundle)
        outcome = env.step(action)
        current.steps.append((str(action), outcome))
        if outcome.done:
            transcripts.append(current)
            current = None
    if current is not None:
        transcripts.append(current)
    return transcripts
