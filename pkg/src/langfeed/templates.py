"""Paraphrase template bank: slot filling, seeded selection, inverse extraction.

Instruction and feedback strings are produced from hand-curated template
groups.  A group is keyed by (env_id, kind, event) and holds 4 to 20
semantically equivalent surface forms sharing one slot set, so a fixed
message can be phrased many ways without changing its information content.

Asset file format (UTF-8): ``[group <env_id> <kind> <event>]`` header lines,
one template per line below the header, ``{slot}`` placeholder syntax,
literal braces escaped as ``{{`` / ``}}``.  Blank lines and ``#`` comments
are ignored.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

VALID_KINDS = ("instruction", "r", "hp", "hn", "fp", "fn")

MIN_GROUP_SIZE = 4
MAX_GROUP_SIZE = 20

DEFAULT_TEMPLATE_DIR = Path(__file__).parent / "assets" / "templates"
TEMPLATE_DIR_ENV_VAR = "LANGFEED_TEMPLATE_DIR"


class TemplateError(Exception):
    """Base class for template bank problems."""


class TemplateSyntaxError(TemplateError):
    """Malformed pattern or asset file."""


class UnknownGroupError(TemplateError):
    """No group registered under (env_id, kind, event)."""


class MissingSlotError(TemplateError):
    """Render called with a slot map that does not match the group."""


class NoTemplateMatchesError(TemplateError):
    """Extraction failed: the text was not produced by this group."""


GroupKey = tuple[str, str, str]


def _tokenize(pattern: str) -> list[tuple[str, str]]:
    """Split a pattern into ('lit', text) and ('slot', name) tokens.

    Raises TemplateSyntaxError on orphan braces or empty slot names.
    """
    tokens: list[tuple[str, str]] = []
    buf: list[str] = []
    i = 0
    n = len(pattern)
    while i < n:
        ch = pattern[i]
        if ch == "{":
            if i + 1 < n and pattern[i + 1] == "{":
                buf.append("{")
                i += 2
                continue
            end = pattern.find("}", i + 1)
            if end == -1:
                raise TemplateSyntaxError(f"unclosed brace in template: {pattern!r}")
            name = pattern[i + 1 : end]
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
                raise TemplateSyntaxError(f"bad slot name {name!r} in template: {pattern!r}")
            if buf:
                tokens.append(("lit", "".join(buf)))
                buf = []
            tokens.append(("slot", name))
            i = end + 1
            continue
        if ch == "}":
            if i + 1 < n and pattern[i + 1] == "}":
                buf.append("}")
                i += 2
                continue
            raise TemplateSyntaxError(f"orphan closing brace in template: {pattern!r}")
        buf.append(ch)
        i += 1
    if buf:
        tokens.append(("lit", "".join(buf)))
    return tokens


@dataclass(frozen=True)
class Template:
    """One surface form: a pattern with named slots."""

    id: str
    pattern: str
    env_id: str
    kind: str
    event: str

    def __post_init__(self) -> None:
        if self.kind not in VALID_KINDS:
            raise TemplateSyntaxError(f"invalid template kind {self.kind!r}")
        tokens = _tokenize(self.pattern)
        names = [name for tag, name in tokens if tag == "slot"]
        if len(names) != len(set(names)):
            raise TemplateSyntaxError(f"repeated slot in template: {self.pattern!r}")
        for a, b in zip(tokens, tokens[1:]):
            if a[0] == "slot" and b[0] == "slot":
                raise TemplateSyntaxError(
                    f"adjacent slots without separator in template: {self.pattern!r}"
                )
        object.__setattr__(self, "_tokens", tokens)
        object.__setattr__(self, "_slots", frozenset(names))

    @property
    def slots(self) -> frozenset[str]:
        return self._slots  # type: ignore[attr-defined]

    def fill(self, values: dict[str, str]) -> str:
        parts = []
        for tag, text in self._tokens:  # type: ignore[attr-defined]
            parts.append(values[text] if tag == "slot" else text)
        return "".join(parts)

    def match(self, rendered: str) -> Optional[dict[str, str]]:
        """Invert ``fill``: recover slot values, or None if no match."""
        regex_parts = []
        for tag, text in self._tokens:  # type: ignore[attr-defined]
            if tag == "lit":
                regex_parts.append(re.escape(text))
            else:
                regex_parts.append(f"(?P<{text}>.+?)")
        m = re.fullmatch("".join(regex_parts), rendered, flags=re.DOTALL)
        if m is None:
            return None
        return dict(m.groupdict())


class TemplateBank:
    """Immutable-after-load collection of template groups."""

    def __init__(self, templates: Iterable[Template], validate_sizes: bool = True):
        self._groups: dict[GroupKey, list[Template]] = {}
        for t in templates:
            self._groups.setdefault((t.env_id, t.kind, t.event), []).append(t)
        for key, group in self._groups.items():
            slot_sets = {g.slots for g in group}
            if len(slot_sets) != 1:
                raise TemplateSyntaxError(
                    f"group {key} mixes slot sets: {sorted(map(sorted, slot_sets))}"
                )
            if validate_sizes and not (MIN_GROUP_SIZE <= len(group) <= MAX_GROUP_SIZE):
                raise TemplateSyntaxError(
                    f"group {key} has {len(group)} templates; "
                    f"expected {MIN_GROUP_SIZE}..{MAX_GROUP_SIZE}"
                )

    def group_keys(self) -> list[GroupKey]:
        return sorted(self._groups)

    def group(self, env_id: str, kind: str, event: str) -> list[Template]:
        key = (env_id, kind, event)
        if key not in self._groups:
            raise UnknownGroupError(f"no template group {key}")
        return list(self._groups[key])

    def group_slots(self, env_id: str, kind: str, event: str) -> frozenset[str]:
        return self.group(env_id, kind, event)[0].slots

    def render(
        self,
        env_id: str,
        kind: str,
        event: str,
        slots: dict[str, str],
        rng: Optional[np.random.Generator] = None,
        randomize: bool = True,
    ) -> str:
        """Fill one template of the group, chosen by ``rng`` when randomizing.

        With ``randomize=False`` (or no rng) template index 0 is the canonical
        fixed phrasing.
        """
        group = self.group(env_id, kind, event)
        declared = group[0].slots
        given = frozenset(slots)
        if declared - given:
            missing = ", ".join(sorted(declared - given))
            raise MissingSlotError(f"group {(env_id, kind, event)} is missing slots: {missing}")
        if given - declared:
            extra = ", ".join(sorted(given - declared))
            raise MissingSlotError(f"group {(env_id, kind, event)} got unknown slots: {extra}")
        if randomize and rng is not None:
            template = group[int(rng.integers(len(group)))]
        else:
            template = group[0]
        return template.fill({k: str(v) for k, v in slots.items()})

    def extract_slots(self, rendered: str, env_id: str, kind: str, event: str) -> dict[str, str]:
        """Recover the slot values from a string produced by this group."""
        for template in self.group(env_id, kind, event):
            values = template.match(rendered)
            if values is not None:
                return values
        raise NoTemplateMatchesError(
            f"text does not match any template in group {(env_id, kind, event)}: {rendered!r}"
        )

    def extract_any(self, rendered: str, env_id: str, kind: str) -> Optional[tuple[str, dict[str, str]]]:
        """Try every event group of (env_id, kind); return (event, slots) or None."""
        for key in self.group_keys():
            if key[0] != env_id or key[1] != kind:
                continue
            try:
                return key[2], self.extract_slots(rendered, *key)
            except NoTemplateMatchesError:
                continue
        return None


def parse_template_file(path: Path) -> list[Template]:
    templates: list[Template] = []
    current: Optional[tuple[str, str, str]] = None
    index = 0
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("[group"):
            m = re.fullmatch(r"\[group\s+(\S+)\s+(\S+)\s+(\S+)\]", line.strip())
            if m is None:
                raise TemplateSyntaxError(f"{path.name}:{lineno}: bad group header {line!r}")
            current = (m.group(1), m.group(2), m.group(3))
            index = 0
            continue
        if current is None:
            raise TemplateSyntaxError(f"{path.name}:{lineno}: template before any group header")
        env_id, kind, event = current
        templates.append(
            Template(
                id=f"{env_id}.{kind}.{event}.{index}",
                pattern=line,
                env_id=env_id,
                kind=kind,
                event=event,
            )
        )
        index += 1
    return templates


def load_bank(directory: Optional[Path] = None) -> TemplateBank:
    """Load and validate every ``*.txt`` bank file in a directory."""
    if directory is None:
        override = os.environ.get(TEMPLATE_DIR_ENV_VAR)
        directory = Path(override) if override else DEFAULT_TEMPLATE_DIR
    templates: list[Template] = []
    for path in sorted(Path(directory).glob("*.txt")):
        templates.extend(parse_template_file(path))
    if not templates:
        raise TemplateError(f"no template files found under {directory}")
    return TemplateBank(templates)


_default_bank: Optional[TemplateBank] = None


def default_bank() -> TemplateBank:
    """The bundled bank, loaded once per process."""
    global _default_bank
    if _default_bank is None:
        _default_bank = load_bank()
    return _default_bank
