"""Language-feedback simulation environments.

Sequential decision tasks that speak to the agent in natural language:
an instruction describes the goal, and procedurally synthesized feedback
(performance, hindsight explanations, future suggestions) replaces the
reward signal, which stays hidden on an evaluation-only channel.
"""

from langfeed.core import (
    ALL_FEEDBACK_TYPES,
    AtomicFeedbackType,
    EnvConfig,
    Environment,
    EpisodeOverError,
    EpisodeTranscript,
    FeedbackSelector,
    FeedbackSet,
    InstructionType,
    NotResetError,
    ObservationBundle,
    StepOutcome,
    UnknownEnvError,
    UnsupportedFeedbackTypeError,
    UnsupportedInstructionTypeError,
    effective_feedback_types,
    make,
    registered_envs,
    run_episode,
)
from langfeed.templates import TemplateBank, default_bank, load_bank

# Importing the env modules registers every environment id.
from langfeed.envs import bandit, gridworld, optimization, parking, poem, recommend  # noqa: F401

__all__ = [
    "ALL_FEEDBACK_TYPES",
    "AtomicFeedbackType",
    "EnvConfig",
    "Environment",
    "EpisodeOverError",
    "EpisodeTranscript",
    "FeedbackSelector",
    "FeedbackSet",
    "InstructionType",
    "NotResetError",
    "ObservationBundle",
    "StepOutcome",
    "TemplateBank",
    "UnknownEnvError",
    "UnsupportedFeedbackTypeError",
    "UnsupportedInstructionTypeError",
    "default_bank",
    "effective_feedback_types",
    "load_bank",
    "make",
    "registered_envs",
    "run_episode",
]

__version__ = "0.1.0"
