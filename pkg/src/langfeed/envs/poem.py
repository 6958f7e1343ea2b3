"""Syllable- and line-constrained poem writing with per-line feedback.

Lines are verified against a pinned pronunciation dictionary; a line counts
as satisfied when ANY combination of its words' pronunciation variants sums
to the target (benefit of the doubt for ambiguous words).  Out-of-vocabulary
words fall back to a vowel-group heuristic.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..core import (
    AtomicFeedbackType,
    EnvConfig,
    Environment,
    FeedbackSet,
    register_env,
)
from ..templates import default_bank

DEFAULT_DICT_PATH = Path(__file__).parent.parent / "assets" / "cmudict.txt"
DICT_PATH_ENV_VAR = "LANGFEED_CMUDICT"

VOWEL_LETTERS = set("aeiouy")
_STRESS_RE = re.compile(r"[A-Z]+[012]$")


class EmptyWordError(ValueError):
    """Word is empty after normalization."""


@dataclass(frozen=True)
class PoemConstraint:
    """Required line count and per-line syllable targets."""

    line_syllables: tuple[int, ...]
    strict_line_count: bool = True

    def __post_init__(self) -> None:
        if not self.line_syllables or any(s < 1 for s in self.line_syllables):
            raise ValueError("line_syllables must be a non-empty list of positive integers")

    @property
    def n_lines(self) -> int:
        return len(self.line_syllables)

    def pattern_text(self) -> str:
        return "-".join(str(s) for s in self.line_syllables)


HAIKU = PoemConstraint((5, 7, 5))
TANKA = PoemConstraint((5, 7, 5, 7, 7))


def heuristic_syllables(word: str) -> int:
    """Cheap fallback for out-of-vocabulary words.

    Counts maximal vowel-letter groups (a, e, i, o, u, y), subtracts a
    trailing silent-e group, floors at 1.
    """
    word = word.lower()
    groups = re.findall(r"[aeiouy]+", word)
    count = len(groups)
    if count > 1 and word.endswith("e") and groups[-1] == "e":
        count -= 1
    return max(count, 1)


def normalize_word(word: str) -> str:
    return "".join(ch for ch in word.lower() if ch.isalpha() or ch == "'").strip("'")


class SyllableLexicon:
    """word -> set of possible syllable counts, from pronunciation variants."""

    def __init__(self, entries: dict[str, frozenset[int]]):
        self._entries = entries

    @classmethod
    def from_file(cls, path: Optional[Path] = None) -> "SyllableLexicon":
        if path is None:
            override = os.environ.get(DICT_PATH_ENV_VAR)
            path = Path(override) if override else DEFAULT_DICT_PATH
        entries: dict[str, set[int]] = {}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith(";;;"):
                continue
            head, *phones = line.split()
            word = re.sub(r"\(\d+\)$", "", head).lower()
            count = sum(1 for p in phones if _STRESS_RE.fullmatch(p))
            if count < 1:
                raise ValueError(f"dictionary entry {head!r} has no vowel phonemes")
            entries.setdefault(word, set()).add(count)
        return cls({w: frozenset(c) for w, c in entries.items()})

    def __contains__(self, word: str) -> bool:
        return normalize_word(word) in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def words(self) -> list[str]:
        return sorted(self._entries)

    def counts(self, word: str) -> frozenset[int]:
        """Possible syllable counts for one word (dictionary or heuristic)."""
        norm = normalize_word(word)
        if not norm:
            raise EmptyWordError(f"no letters left in {word!r} after normalization")
        found = self._entries.get(norm)
        if found is None and "'" in norm:
            found = self._entries.get(norm.replace("'", ""))
        if found is not None:
            return found
        return frozenset({heuristic_syllables(norm)})


def syllable_counts(lexicon: SyllableLexicon, word: str) -> frozenset[int]:
    return lexicon.counts(word)


def split_words(line: str) -> list[str]:
    return [w for w in re.split(r"[^A-Za-z']+", line) if normalize_word(w)]


@dataclass(frozen=True)
class LineReport:
    """Verification result for one line against one syllable target."""

    target: int
    achievable: bool
    min_count: int
    max_count: int
    chosen: int

    @property
    def counts(self) -> tuple[int, int]:
        return (self.min_count, self.max_count)


def check_line(lexicon: SyllableLexicon, line: str, target: int) -> LineReport:
    """Subset-sum check: can some choice of per-word counts hit the target?"""
    if target < 1:
        raise ValueError("target must be a positive integer")
    words = split_words(line)
    if not words:
        return LineReport(target=target, achievable=False, min_count=0, max_count=0, chosen=0)
    sums = {0}
    lo = hi = 0
    for word in words:
        counts = lexicon.counts(word)
        sums = {s + c for s in sums for c in counts}
        lo += min(counts)
        hi += max(counts)
    chosen = min(sums, key=lambda s: (abs(s - target), s))
    return LineReport(
        target=target,
        achievable=target in sums,
        min_count=lo,
        max_count=hi,
        chosen=chosen,
    )


def _count_phrase(report: LineReport) -> str:
    if report.min_count == report.max_count:
        return str(report.min_count)
    return f"{report.min_count}-{report.max_count}"


@dataclass
class PoemJudgement:
    """Everything the teacher derives from one submission."""

    reports: list[LineReport]
    n_given: int
    n_required: int
    strict: bool

    @property
    def satisfied_lines(self) -> list[int]:
        return [i for i, r in enumerate(self.reports) if r.achievable]

    @property
    def violated_lines(self) -> list[int]:
        return [i for i, r in enumerate(self.reports) if not r.achievable]

    @property
    def count_violations(self) -> int:
        if self.n_given == self.n_required:
            return 0
        if not self.strict and self.n_given > self.n_required:
            return 0
        return abs(self.n_given - self.n_required)

    @property
    def violations(self) -> int:
        return len(self.violated_lines) + self.count_violations

    @property
    def reward(self) -> float:
        return max(self.n_required - self.violations, 0) / self.n_required

    @property
    def success(self) -> bool:
        return self.violations == 0


def judge_poem(lexicon: SyllableLexicon, constraint: PoemConstraint, poem: str) -> PoemJudgement:
    lines = [l.strip() for l in poem.splitlines()]
    while lines and not lines[0]:
        lines.pop(0)
    while lines and not lines[-1]:
        lines.pop()
    reports = [
        check_line(lexicon, line, target)
        for line, target in zip(lines, constraint.line_syllables)
    ]
    return PoemJudgement(
        reports=reports,
        n_given=len(lines),
        n_required=constraint.n_lines,
        strict=constraint.strict_line_count,
    )


_shared_lexicon: Optional[SyllableLexicon] = None


def default_lexicon() -> SyllableLexicon:
    global _shared_lexicon
    if _shared_lexicon is None:
        _shared_lexicon = SyllableLexicon.from_file()
    return _shared_lexicon


class PoemEnv(Environment):
    """Single-attempt poem submission; sessions allow repeated tries."""

    default_horizon = 1

    def __init__(self, config: EnvConfig, constraint: PoemConstraint):
        super().__init__(config)
        self.env_id = config.env_id
        self.constraint = constraint
        self.lexicon = default_lexicon()
        self.bank = default_bank()
        self._instruction = ""

    def _render(self, kind: str, event: str, **slots: str) -> str:
        return self.bank.render(
            "poem", kind, event, slots, rng=self.rng, randomize=self.config.randomize_text
        )

    def _begin_episode(self, latent_rng: np.random.Generator) -> tuple[str, str]:
        self._instruction = self._render(
            "instruction",
            "basic",
            n_lines=str(self.constraint.n_lines),
            pattern=self.constraint.pattern_text(),
        )
        return "A blank page awaits your poem.", self._instruction

    def _current_instruction(self) -> str:
        return self._instruction

    def _step_impl(
        self, action: str, feedback: FeedbackSet
    ) -> tuple[str, float, bool, dict[str, Any]]:
        judgement = judge_poem(self.lexicon, self.constraint, action)
        reports = judgement.reports
        targets = self.constraint.line_syllables

        satisfied_score = max(judgement.n_required - judgement.violations, 0)
        feedback.put(
            AtomicFeedbackType.R,
            self._render(
                "r", "score", satisfied=str(satisfied_score), required=str(judgement.n_required)
            ),
        )

        if judgement.satisfied_lines:
            lines_text = ", ".join(str(i + 1) for i in judgement.satisfied_lines)
            feedback.put(AtomicFeedbackType.HP, self._render("hp", "lines_ok", lines=lines_text))

        detail_clauses = []
        if judgement.count_violations:
            detail_clauses.append(
                f"the poem has {judgement.n_given} lines but must have {judgement.n_required}"
            )
        for i in judgement.violated_lines:
            r = reports[i]
            detail_clauses.append(
                f"line {i + 1} counts {_count_phrase(r)} syllables but needs {r.target}"
            )
        if detail_clauses:
            feedback.put(
                AtomicFeedbackType.HN,
                self._render("hn", "violations", details="; ".join(detail_clauses)),
            )

        if judgement.count_violations:
            feedback.put(
                AtomicFeedbackType.FP,
                self._render("fp", "line_count", n_lines=str(judgement.n_required)),
            )
            feedback.put(
                AtomicFeedbackType.FN,
                self._render(
                    "fn",
                    "repeat",
                    pattern_desc=(
                        f"a {judgement.n_given}-line submission when "
                        f"{judgement.n_required} lines are required"
                    ),
                ),
            )
        elif judgement.violated_lines:
            first = judgement.violated_lines[0]
            r = reports[first]
            delta = r.target - r.chosen
            change = f"add {delta} syllables" if delta > 0 else f"remove {-delta} syllables"
            if abs(delta) == 1:
                change = change[:-1]
            feedback.put(
                AtomicFeedbackType.FP,
                self._render("fp", "adjust", line=str(first + 1), change=change),
            )
            feedback.put(
                AtomicFeedbackType.FN,
                self._render(
                    "fn",
                    "repeat",
                    pattern_desc=f"a {r.chosen}-syllable line {first + 1}",
                ),
            )

        info: dict[str, Any] = {
            "success": judgement.success,
            "n_given": judgement.n_given,
            "n_required": judgement.n_required,
            "violated_lines": [i + 1 for i in judgement.violated_lines],
            "satisfied_lines": [i + 1 for i in judgement.satisfied_lines],
            "reports": [
                {
                    "target": r.target,
                    "achievable": r.achievable,
                    "min": r.min_count,
                    "max": r.max_count,
                    "chosen": r.chosen,
                }
                for r in reports
            ],
            "targets": list(targets),
        }
        observation = f"You submitted {judgement.n_given} lines."
        return observation, judgement.reward, judgement.success, info

    def sample_action(self, rng: np.random.Generator) -> str:
        words = self.lexicon.words()
        lines = []
        for _ in self.constraint.line_syllables:
            picks = rng.choice(len(words), size=int(rng.integers(2, 6)))
            lines.append(" ".join(words[int(i)] for i in picks))
        return "\n".join(lines)


def _register() -> None:
    register_env("poem", lambda config: PoemEnv(config, HAIKU))
    register_env("poem/haiku", lambda config: PoemEnv(config, HAIKU))
    register_env("poem/tanka", lambda config: PoemEnv(config, TANKA))


_register()
