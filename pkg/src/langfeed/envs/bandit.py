"""Verbalized multi-armed slot machines with latent arm-order permutation.

Each registered problem is a fixed catalogue entry with 2 or 10 arms paying
Bernoulli or Gaussian rewards.  An episode is a single pull; learning happens
over a session of episodes that share the hidden reward parameters (except
for the problem that redraws them every round).
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from ..core import (
    AtomicFeedbackType,
    EnvConfig,
    Environment,
    EpisodeTranscript,
    FeedbackSet,
    InstructionType,
    register_env,
)
from ..templates import default_bank

ARM_LABELS = string.ascii_uppercase  # display labels A, B, C, ...


@dataclass(frozen=True)
class ArmSpec:
    """One arm's payout distribution."""

    label: str
    kind: str  # "bernoulli" | "gaussian"
    mean: float
    stddev: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "bernoulli":
            if not 0.0 <= self.mean <= 1.0:
                raise ValueError(f"bernoulli parameter must be in [0,1], got {self.mean}")
        elif self.kind == "gaussian":
            if not np.isfinite(self.mean) or self.stddev < 0:
                raise ValueError("gaussian arm needs a finite mean and stddev >= 0")
        else:
            raise ValueError(f"unknown arm kind {self.kind!r}")

    def sample(self, rng: np.random.Generator) -> float:
        if self.kind == "bernoulli":
            return 1.0 if rng.random() < self.mean else 0.0
        return float(self.mean + self.stddev * rng.standard_normal())


@dataclass(frozen=True)
class BanditSpec:
    """A named problem: its arm sampler and per-episode redraw policy."""

    name: str
    n_arms: int
    draw_arms: Callable[[np.random.Generator], list[ArmSpec]]
    redraw_each_episode: bool = False

    def __post_init__(self) -> None:
        if self.n_arms not in (2, 10):
            raise ValueError("problems carry either 2 or 10 arms")


def _fixed_bernoulli(name: str, probs: list[float]) -> BanditSpec:
    arms = [ArmSpec(ARM_LABELS[i], "bernoulli", p) for i, p in enumerate(probs)]
    return BanditSpec(name=name, n_arms=len(probs), draw_arms=lambda rng: list(arms))


def _random_bernoulli(rng: np.random.Generator) -> list[ArmSpec]:
    return [ArmSpec(ARM_LABELS[i], "bernoulli", float(rng.uniform())) for i in range(10)]


def _random_gaussian(rng: np.random.Generator) -> list[ArmSpec]:
    return [
        ArmSpec(ARM_LABELS[i], "gaussian", float(rng.standard_normal()), 1.0)
        for i in range(10)
    ]


def _random_uniform_payout(rng: np.random.Generator) -> list[ArmSpec]:
    # Deterministic payout: each pull returns exactly the latent value.
    return [ArmSpec(ARM_LABELS[i], "gaussian", float(rng.uniform()), 0.0) for i in range(10)]


CATALOGUE: dict[str, BanditSpec] = {
    spec.name: spec
    for spec in [
        _fixed_bernoulli("two_armed_deterministic", [1.0, 0.0]),
        _fixed_bernoulli("two_armed_high_low", [0.8, 0.2]),
        _fixed_bernoulli("two_armed_high_high", [0.9, 0.8]),
        _fixed_bernoulli("two_armed_low_low", [0.2, 0.1]),
        BanditSpec("ten_armed_random_fixed", 10, _random_bernoulli),
        BanditSpec("ten_armed_random_random", 10, _random_bernoulli, redraw_each_episode=True),
        BanditSpec("ten_armed_gaussian", 10, _random_gaussian),
        BanditSpec("ten_armed_uniform", 10, _random_uniform_payout),
    ]
}

PRACTICAL_LOG_LIMIT = 20


def best_arm_index(arms: list[ArmSpec]) -> int:
    """Index of the arm with maximal true mean; ties go to the lowest index."""
    means = [a.mean for a in arms]
    return int(np.argmax(means))


class BanditEnv(Environment):
    """One-pull-per-episode lever game; sessions share the hidden payouts."""

    supported_instruction_types = frozenset(
        {InstructionType.BASIC, InstructionType.PRACTICAL, InstructionType.COMPLETE}
    )
    default_horizon = 1

    def __init__(self, config: EnvConfig, spec: BanditSpec):
        super().__init__(config)
        self.env_id = config.env_id
        self.spec = spec
        self.bank = default_bank()
        self.arms: list[ArmSpec] = []
        self.permutation: list[int] = []  # arm index -> display position
        self.pull_counts: list[int] = []
        self.payout_sums: list[float] = []
        self.feedback_log: list[str] = []
        self._instruction = ""

    # -- session / episode setup ------------------------------------------

    def _begin_session(self, latent_rng: np.random.Generator) -> None:
        self.arms = self.spec.draw_arms(latent_rng)
        self.permutation = [int(i) for i in latent_rng.permutation(self.spec.n_arms)]
        self.pull_counts = [0] * self.spec.n_arms
        self.payout_sums = [0.0] * self.spec.n_arms
        self.feedback_log = []

    def _begin_episode(self, latent_rng: np.random.Generator) -> tuple[str, str]:
        if self.spec.redraw_each_episode:
            self.arms = self.spec.draw_arms(latent_rng)
        self._instruction = self._build_instruction()
        observation = f"A row of {self.spec.n_arms} levers stands in front of you."
        return observation, self._instruction

    def _display_order(self) -> list[int]:
        """Arm indices in the order they are shown to the agent."""
        order = [0] * self.spec.n_arms
        for arm_idx, pos in enumerate(self.permutation):
            order[pos] = arm_idx
        return order

    def _action_list_text(self) -> str:
        return ", ".join(self.arms[i].label for i in self._display_order())

    def _render(self, kind: str, event: str, **slots: str) -> str:
        return self.bank.render(
            "bandit", kind, event, slots, rng=self.rng, randomize=self.config.randomize_text
        )

    def _build_instruction(self) -> str:
        slots = {"task_name": self.spec.name, "actions": self._action_list_text()}
        if self.config.instruction_type is InstructionType.COMPLETE:
            slots["best"] = self.arms[best_arm_index(self.arms)].label
            return self._render("instruction", "complete", **slots)
        base = self._render("instruction", "basic", **slots)
        if self.config.instruction_type is InstructionType.PRACTICAL:
            log = "\n".join(self.feedback_log[-PRACTICAL_LOG_LIMIT:]) or "(none yet)"
            return base + "\n" + self._render("instruction", "practical_log", log=log)
        return base

    def _current_instruction(self) -> str:
        return self._instruction

    # -- stepping ----------------------------------------------------------

    def _parse_action(self, action: str) -> Optional[int]:
        """Map action text to an arm index, or None if it names no arm."""
        text = action.strip().lower()
        labels = {arm.label.lower(): i for i, arm in enumerate(self.arms)}
        if text in labels:
            return labels[text]
        display = self._display_order()
        try:
            pos = int(text)
            if 1 <= pos <= self.spec.n_arms:
                return display[pos - 1]
        except ValueError:
            pass
        # Tolerate phrasing like "pull lever B" or "arm 3".
        tokens = [t.strip(".,!?:;\"'") for t in text.split()]
        for token in tokens:
            if token in labels:
                return labels[token]
        for token in tokens:
            if token.isdigit() and 1 <= int(token) <= self.spec.n_arms:
                return display[int(token) - 1]
        return None

    def _step_impl(
        self, action: str, feedback: FeedbackSet
    ) -> tuple[str, float, bool, dict[str, Any]]:
        arm_idx = self._parse_action(action)
        true_means = [a.mean for a in self.arms]
        best_idx = best_arm_index(self.arms)
        info: dict[str, Any] = {
            "true_means": true_means,
            "best_arm": self.arms[best_idx].label,
            "best_mean": true_means[best_idx],
        }

        if arm_idx is None:
            shown = action.strip()[:40] or "(empty)"
            feedback.put(
                AtomicFeedbackType.HN,
                self._render("hn", "malformed", action=shown, valid=self._action_list_text()),
            )
            info["malformed"] = True
            info["chosen_mean"] = min(true_means)
            return "The levers sit untouched; your reply named none of them.", 0.0, False, info

        arm = self.arms[arm_idx]
        reward = arm.sample(self.rng)
        self.pull_counts[arm_idx] += 1
        self.payout_sums[arm_idx] += reward
        info["chosen_arm"] = arm.label
        info["chosen_mean"] = true_means[arm_idx]

        feedback.put(
            AtomicFeedbackType.R,
            self._render("r", "payout", arm=arm.label, payout=f"{reward:.3f}"),
        )
        if arm_idx == best_idx:
            feedback.put(AtomicFeedbackType.HP, self._render("hp", "optimal", arm=arm.label))
        else:
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "suboptimal", arm=arm.label))
        feedback.put(AtomicFeedbackType.FP, self._render("fp", "best", arm=self.arms[best_idx].label))

        pulled = [i for i, c in enumerate(self.pull_counts) if c > 0]
        empirical = {i: self.payout_sums[i] / self.pull_counts[i] for i in pulled}
        worst_idx = min(pulled, key=lambda i: (empirical[i], i))
        feedback.put(AtomicFeedbackType.FN, self._render("fn", "worst", arm=self.arms[worst_idx].label))

        observation = f"You pulled lever {arm.label}."
        return observation, reward, True, info

    def _record_feedback(self, rendered: str) -> None:
        if rendered:
            self.feedback_log.append(rendered)

    def sample_action(self, rng: np.random.Generator) -> str:
        return self.arms[int(rng.integers(self.spec.n_arms))].label


def regret(transcripts: list[EpisodeTranscript]) -> float:
    """Total true-mean gap accumulated over a session's pulls.

    Malformed pulls waste the round and are charged the worst arm's gap.
    """
    total = 0.0
    for transcript in transcripts:
        for _, outcome in transcript.steps:
            info = outcome.info
            total += info["best_mean"] - info["chosen_mean"]
    return total


def _register() -> None:
    def factory_for(name: str) -> Any:
        return lambda config: BanditEnv(config, CATALOGUE[name])

    register_env("bandit", factory_for("two_armed_high_low"))
    for name in CATALOGUE:
        register_env(f"bandit/{name}", factory_for(name))


_register()
