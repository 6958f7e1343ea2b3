"""Environment interaction contract: make/reset/step, feedback taxonomy, channel split.

Every environment in this package emits a per-step :class:`ObservationBundle`
(observation text, instruction text, rendered feedback) on the agent channel,
and a :class:`StepOutcome` (bundle + scalar reward + flags + info) on the
evaluation channel.  The reward and info never appear in agent-facing
serializations; they exist purely so that runs can be scored afterwards.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np


class InstructionType(enum.Enum):
    """How much task information the instruction text carries."""

    BASIC = "b"
    PRACTICAL = "p"
    COMPLETE = "c"

    @classmethod
    def parse(cls, text: str) -> "InstructionType":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown instruction type {text!r}; expected one of b, p, c")


class AtomicFeedbackType(enum.Enum):
    """The five atomic feedback channels a teacher can speak on.

    R verbalizes instantaneous performance; HP/HN explain a past action
    (positive/negative); FP/FN suggest or warn about future actions.
    """

    R = "r"
    HP = "hp"
    HN = "hn"
    FP = "fp"
    FN = "fn"

    @classmethod
    def parse(cls, text: str) -> "AtomicFeedbackType":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown feedback type {text!r}")


ALL_FEEDBACK_TYPES = frozenset(AtomicFeedbackType)

# Canonical ordering used whenever feedback pieces are joined into one string.
FEEDBACK_ORDER = (
    AtomicFeedbackType.R,
    AtomicFeedbackType.HP,
    AtomicFeedbackType.HN,
    AtomicFeedbackType.FP,
    AtomicFeedbackType.FN,
)


class SelectorMode(enum.Enum):
    ALL = "a"
    MIX = "m"
    NONE = "n"
    SUBSET = "subset"


@dataclass(frozen=True)
class FeedbackSelector:
    """Which atomic feedback types the teacher is allowed to emit.

    ``ALL`` enables every type the environment supports, ``MIX`` samples a
    random non-empty subset each step, ``NONE`` silences the teacher, and
    ``SUBSET`` pins an explicit set (which must be supported by the env).
    """

    mode: SelectorMode
    subset: frozenset[AtomicFeedbackType] = frozenset()

    def __post_init__(self) -> None:
        if self.mode is SelectorMode.SUBSET and not self.subset:
            raise ValueError("subset selector requires a non-empty set of feedback types")
        if self.mode is not SelectorMode.SUBSET and self.subset:
            raise ValueError(f"selector mode {self.mode} does not take a subset")

    @classmethod
    def all(cls) -> "FeedbackSelector":
        return cls(SelectorMode.ALL)

    @classmethod
    def mix(cls) -> "FeedbackSelector":
        return cls(SelectorMode.MIX)

    @classmethod
    def none(cls) -> "FeedbackSelector":
        return cls(SelectorMode.NONE)

    @classmethod
    def of(cls, *types: AtomicFeedbackType) -> "FeedbackSelector":
        return cls(SelectorMode.SUBSET, frozenset(types))

    @classmethod
    def parse(cls, text: str) -> "FeedbackSelector":
        """Parse ``a``, ``m``, ``n``, or a comma list like ``r,hp,fn``."""
        text = text.strip()
        if text == "a":
            return cls.all()
        if text == "m":
            return cls.mix()
        if text == "n":
            return cls.none()
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError(f"cannot parse feedback selector {text!r}")
        return cls.of(*(AtomicFeedbackType.parse(p) for p in parts))

    def spec_string(self) -> str:
        if self.mode is SelectorMode.SUBSET:
            return ",".join(t.value for t in FEEDBACK_ORDER if t in self.subset)
        return self.mode.value


def effective_feedback_types(
    selector: FeedbackSelector,
    supported: frozenset[AtomicFeedbackType],
    rng: np.random.Generator,
) -> frozenset[AtomicFeedbackType]:
    """Resolve the selector against the env's supported set for one step.

    MIX includes each supported type independently with probability 1/2 and
    resamples until the result is non-empty, so no step silently degrades to
    no feedback.
    """
    if selector.mode is SelectorMode.NONE:
        return frozenset()
    if not supported:
        raise ValueError("supported feedback set must be non-empty unless selector is NONE")
    if selector.mode is SelectorMode.ALL:
        return supported
    if selector.mode is SelectorMode.SUBSET:
        return selector.subset & supported
    # MIX: independent coin per supported type, resample-if-empty.
    ordered = sorted(supported, key=lambda t: t.value)
    while True:
        chosen = frozenset(t for t in ordered if rng.random() < 0.5)
        if chosen:
            return chosen


class FeedbackSet(dict):
    """Keyed collection of atomic feedback strings for one step.

    Maps :class:`AtomicFeedbackType` to a single string; absent or empty
    entries mean the teacher said nothing on that channel.
    """

    def put(self, kind: AtomicFeedbackType, text: str) -> None:
        if kind in self and self[kind]:
            raise ValueError(f"feedback type {kind.value} already set for this step")
        self[kind] = text

    def nonempty_types(self) -> frozenset[AtomicFeedbackType]:
        return frozenset(k for k, v in self.items() if v)

    def render(self) -> str:
        """Join the non-empty pieces in canonical order, one per line."""
        pieces = [self[k] for k in FEEDBACK_ORDER if self.get(k)]
        return "\n".join(pieces)


@dataclass(frozen=True)
class ObservationBundle:
    """The agent-visible triple for one step."""

    observation: str
    instruction: str
    feedback: str

    def to_dict(self) -> dict[str, str]:
        return {
            "observation": self.observation,
            "instruction": self.instruction,
            "feedback": self.feedback,
        }

    def to_json(self) -> str:
        """Agent-channel serialization: never contains reward or info."""
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class StepOutcome:
    """Full record of one step.  Only ``bundle`` may reach the agent."""

    bundle: ObservationBundle
    reward: float
    terminated: bool
    truncated: bool
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def done(self) -> bool:
        return self.terminated or self.truncated

    def agent_view(self) -> dict[str, Any]:
        """What the agent channel is allowed to see for this step."""
        view: dict[str, Any] = self.bundle.to_dict()
        view["terminated"] = self.terminated
        view["truncated"] = self.truncated
        view["done"] = self.done
        return view

    def to_dict(self) -> dict[str, Any]:
        return {
            "bundle": self.bundle.to_dict(),
            "reward": self.reward,
            "terminated": self.terminated,
            "truncated": self.truncated,
            "info": self.info,
        }


@dataclass(frozen=True)
class EnvConfig:
    """Everything needed to reproduce an environment run."""

    env_id: str
    instruction_type: InstructionType = InstructionType.BASIC
    feedback: FeedbackSelector = field(default_factory=FeedbackSelector.all)
    randomize_text: bool = True
    randomize_latent: bool = True
    seed: int = 0
    horizon_override: Optional[int] = None

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.horizon_override is not None and self.horizon_override < 1:
            raise ValueError("horizon_override must be a positive integer")

    def to_dict(self) -> dict[str, Any]:
        return {
            "env_id": self.env_id,
            "instruction_type": self.instruction_type.value,
            "feedback": self.feedback.spec_string(),
            "randomize_text": self.randomize_text,
            "randomize_latent": self.randomize_latent,
            "seed": self.seed,
            "horizon_override": self.horizon_override,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EnvConfig":
        return cls(
            env_id=data["env_id"],
            instruction_type=InstructionType.parse(data.get("instruction_type", "b")),
            feedback=FeedbackSelector.parse(data.get("feedback", "a")),
            randomize_text=bool(data.get("randomize_text", True)),
            randomize_latent=bool(data.get("randomize_latent", True)),
            seed=int(data.get("seed", 0)),
            horizon_override=data.get("horizon_override"),
        )


@dataclass
class EpisodeTranscript:
    """Ordered record of one episode, for determinism tests and scoring."""

    config: EnvConfig
    reset_bundle: ObservationBundle
    steps: list[tuple[str, StepOutcome]] = field(default_factory=list)

    @property
    def cumulative_reward(self) -> float:
        return sum(outcome.reward for _, outcome in self.steps)

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "reset_bundle": self.reset_bundle.to_dict(),
            "steps": [
                {"action": action, "outcome": outcome.to_dict()}
                for action, outcome in self.steps
            ],
            "cumulative_reward": self.cumulative_reward,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# Errors


class EnvironmentError_(Exception):
    """Base class for contract violations surfaced to callers."""

    code = "env_error"


class UnknownEnvError(EnvironmentError_):
    code = "unknown_env"


class UnsupportedInstructionTypeError(EnvironmentError_):
    code = "unsupported_instruction_type"


class UnsupportedFeedbackTypeError(EnvironmentError_):
    code = "unsupported_feedback_type"


class NotResetError(EnvironmentError_):
    code = "not_reset"


class EpisodeOverError(EnvironmentError_):
    code = "episode_over"


# ---------------------------------------------------------------------------
# Environment base


class Environment:
    """Base for all environments: guards, horizon, feedback gating, RNG.

    Subclasses implement ``_begin_session``, ``_begin_episode`` and
    ``_step_impl``; the base class owns the reset/step contract.  A handle is
    single-threaded: no concurrent reset/step on the same instance.
    """

    env_id: str = ""
    supported_instruction_types: frozenset[InstructionType] = frozenset({InstructionType.BASIC})
    supported_feedback_types: frozenset[AtomicFeedbackType] = ALL_FEEDBACK_TYPES
    default_horizon: int = 1

    # Latent draw used when randomize_latent is off: a fixed canonical seed so
    # every reset of every config sees the identical hidden state.
    CANONICAL_LATENT_SEED = 1234567

    def __init__(self, config: EnvConfig):
        self.validate_config(config)
        self.config = config
        self.horizon = config.horizon_override or self.default_horizon
        self._rng: Optional[np.random.Generator] = None
        self._episode_active = False
        self._was_reset = False
        self._step_count = 0
        self._last_info: dict[str, Any] = {}

    @classmethod
    def validate_config(cls, config: EnvConfig) -> None:
        if config.instruction_type not in cls.supported_instruction_types:
            supported = ", ".join(sorted(t.value for t in cls.supported_instruction_types))
            raise UnsupportedInstructionTypeError(
                f"{config.env_id} supports instruction types {{{supported}}}, "
                f"not {config.instruction_type.value!r}"
            )
        if config.feedback.mode is SelectorMode.SUBSET:
            extra = config.feedback.subset - cls.supported_feedback_types
            if extra:
                names = ", ".join(sorted(t.value for t in extra))
                raise UnsupportedFeedbackTypeError(
                    f"{config.env_id} does not support feedback types {{{names}}}"
                )

    # -- randomness -------------------------------------------------------

    @property
    def rng(self) -> np.random.Generator:
        if self._rng is None:
            raise NotResetError("environment must be reset before use")
        return self._rng

    def _latent_rng(self) -> np.random.Generator:
        """RNG for hidden-state draws, honoring the randomize_latent flag."""
        if self.config.randomize_latent:
            return self.rng
        return np.random.default_rng(self.CANONICAL_LATENT_SEED)

    # -- lifecycle --------------------------------------------------------

    def reset(self, seed: Optional[int] = None) -> ObservationBundle:
        """Start a new episode.

        An explicit ``seed`` (or the very first reset, which falls back to the
        config seed) starts a fresh session: the RNG is rebuilt and the hidden
        state redrawn.  A bare ``reset()`` afterwards continues the session,
        letting multi-round environments keep latent state across episodes.
        """
        new_session = seed is not None or self._rng is None
        if new_session:
            if seed is None:
                seed = self.config.seed
            self._rng = np.random.default_rng(seed)
            self._begin_session(self._latent_rng())
        self._step_count = 0
        self._episode_active = True
        self._was_reset = True
        self._last_info = {}
        observation, instruction = self._begin_episode(self._latent_rng())
        if not instruction:
            raise AssertionError("instruction must be non-empty on the reset bundle")
        return ObservationBundle(observation=observation, instruction=instruction, feedback="")

    def step(self, action: str) -> StepOutcome:
        if not self._was_reset:
            raise NotResetError("step called before reset")
        if not self._episode_active:
            raise EpisodeOverError("episode is over; call reset")
        self._step_count += 1
        feedback = FeedbackSet()
        observation, reward, terminated, info = self._step_impl(str(action), feedback)
        truncated = False
        if not terminated and self._step_count >= self.horizon:
            truncated = True
        if terminated or truncated:
            self._episode_active = False

        effective = effective_feedback_types(
            self.config.feedback, self.supported_feedback_types, self.rng
        )
        gated = FeedbackSet()
        for kind, text in feedback.items():
            if kind in effective and text:
                gated[kind] = text
        bundle = ObservationBundle(
            observation=observation,
            instruction=self._current_instruction(),
            feedback=gated.render(),
        )
        info.setdefault("feedback_pieces", {k.value: v for k, v in gated.items()})
        info.setdefault("effective_feedback", sorted(t.value for t in effective))
        self._last_info = info
        self._record_feedback(bundle.feedback)
        return StepOutcome(
            bundle=bundle,
            reward=float(reward),
            terminated=terminated,
            truncated=truncated,
            info=info,
        )

    @property
    def step_count(self) -> int:
        return self._step_count

    @property
    def last_info(self) -> dict[str, Any]:
        """Evaluation-channel peek at the most recent step's info."""
        return self._last_info

    # -- hooks ------------------------------------------------------------

    def _begin_session(self, latent_rng: np.random.Generator) -> None:
        """Draw per-session hidden state.  Called on seeded resets."""

    def _begin_episode(self, latent_rng: np.random.Generator) -> tuple[str, str]:
        """Set up one episode; return (observation, instruction)."""
        raise NotImplementedError

    def _step_impl(
        self, action: str, feedback: FeedbackSet
    ) -> tuple[str, float, bool, dict[str, Any]]:
        """Apply the action; return (observation, reward, terminated, info).

        Implementations write candidate feedback for every supported type into
        ``feedback``; the base class applies the selector gating afterwards.
        """
        raise NotImplementedError

    def _current_instruction(self) -> str:
        """Instruction text attached to step bundles (may grow for 'p')."""
        raise NotImplementedError

    def _record_feedback(self, rendered: str) -> None:
        """Called with each step's gated feedback text; used for 'p' logs."""

    def sample_action(self, rng: np.random.Generator) -> str:
        """A syntactically plausible random action, for baseline agents."""
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Registry


_REGISTRY: dict[str, Callable[[EnvConfig], Environment]] = {}


def register_env(env_id: str, factory: Callable[[EnvConfig], Environment]) -> None:
    if env_id in _REGISTRY:
        raise ValueError(f"environment id {env_id!r} already registered")
    _REGISTRY[env_id] = factory


def registered_envs() -> list[str]:
    return sorted(_REGISTRY)


def make(config: EnvConfig) -> Environment:
    """Instantiate a registered environment in the unreset state."""
    factory = _REGISTRY.get(config.env_id)
    if factory is None:
        raise UnknownEnvError(
            f"no environment registered under {config.env_id!r}; "
            f"known ids: {', '.join(registered_envs())}"
        )
    return factory(config)


def run_episode(
    env: Environment,
    actions: Sequence[str],
    seed: Optional[int] = None,
) -> EpisodeTranscript:
    """Drive one episode with a scripted action sequence and record it.

    Stops at episode end or when the script runs out, whichever comes first.
    """
    reset_bundle = env.reset(seed)
    transcript = EpisodeTranscript(config=env.config, reset_bundle=reset_bundle)
    for action in actions:
        outcome = env.step(action)
        transcript.steps.append((str(action), outcome))
        if outcome.done:
            break
    return transcript
