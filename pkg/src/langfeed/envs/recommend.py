"""Simulated viewer with a sampled preference profile over a bundled catalog.

The agent replies with one or more titles; each is matched against the
catalog by normalized title and judged field by field (media type, year
range, genre overlap, age rating).
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

DEFAULT_CATALOG_PATH = Path(__file__).parent.parent / "assets" / "catalog.txt"
CATALOG_PATH_ENV_VAR = "LANGFEED_CATALOG"

MEDIA_TYPES = ("movie", "tv_show")
RATINGS = ("family_friendly", "r_rated")
GENRES = (
    "Action", "Comedy", "Documentary", "Drama", "Horror",
    "Romance", "Sci-Fi", "Thriller", "Animation", "Fantasy",
)
YEAR_RANGES: dict[str, tuple[int, int]] = {
    "eighties": (1980, 1989),
    "nineties": (1990, 1999),
    "two_thousands": (2000, 2009),
    "recent": (2010, 2025),
}

_MEDIA_TEXT = {"movie": "movie", "tv_show": "TV show"}
_RANGE_TEXT = {
    "eighties": "80s",
    "nineties": "90s",
    "two_thousands": "2000s",
    "recent": "recent years",
}
_RATING_TEXT = {"family_friendly": "family-friendly", "r_rated": "R-rated"}


class EmptyRecommendationError(ValueError):
    """Recommendation list was empty."""


def year_range_of(year: int) -> Optional[str]:
    for name, (lo, hi) in YEAR_RANGES.items():
        if lo <= year <= hi:
            return name
    return None


def normalize_title(title: str) -> str:
    """Lowercase, drop punctuation, strip a leading article, squeeze spaces."""
    text = re.sub(r"[^a-z0-9\s]", " ", title.lower())
    words = text.split()
    if words and words[0] in ("a", "an", "the"):
        words = words[1:]
    return " ".join(words)


@dataclass(frozen=True)
class CatalogItem:
    title: str
    media_type: str
    year: int
    genres: frozenset[str]
    rating: str

    def __post_init__(self) -> None:
        if self.media_type not in MEDIA_TYPES:
            raise ValueError(f"bad media type {self.media_type!r}")
        if self.rating not in RATINGS:
            raise ValueError(f"bad rating {self.rating!r}")
        if not 1970 <= self.year <= 2025:
            raise ValueError(f"year {self.year} outside [1970, 2025]")


class Catalog:
    """Immutable title-indexed item collection."""

    def __init__(self, items: list[CatalogItem]):
        self.items = items
        self._by_title: dict[str, CatalogItem] = {}
        for item in items:
            key = normalize_title(item.title)
            if key in self._by_title:
                raise ValueError(f"duplicate normalized title {key!r}")
            self._by_title[key] = item

    @classmethod
    def from_file(cls, path: Optional[Path] = None) -> "Catalog":
        if path is None:
            override = os.environ.get(CATALOG_PATH_ENV_VAR)
            path = Path(override) if override else DEFAULT_CATALOG_PATH
        items = []
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            title, media, year, genres, rating = line.split("|")
            items.append(
                CatalogItem(
                    title=title,
                    media_type=media,
                    year=int(year),
                    genres=frozenset(genres.split(",")),
                    rating=rating,
                )
            )
        return cls(items)

    def match(self, recommendation: str) -> Optional[CatalogItem]:
        """Exact normalized-title lookup."""
        if not recommendation.strip():
            return None
        return self._by_title.get(normalize_title(recommendation))


@dataclass(frozen=True)
class PreferenceProfile:
    media_type: str
    year_range: str
    genres: frozenset[str]
    age_restriction: str

    @classmethod
    def sample(cls, rng: np.random.Generator) -> "PreferenceProfile":
        media = MEDIA_TYPES[int(rng.integers(len(MEDIA_TYPES)))]
        years = sorted(YEAR_RANGES)[int(rng.integers(len(YEAR_RANGES)))]
        n_genres = int(rng.integers(1, 4))
        picks = rng.choice(len(GENRES), size=n_genres, replace=False)
        genres = frozenset(GENRES[int(i)] for i in picks)
        age = RATINGS[int(rng.integers(len(RATINGS)))]
        return cls(media_type=media, year_range=years, genres=genres, age_restriction=age)

    def to_dict(self) -> dict[str, Any]:
        return {
            "media_type": self.media_type,
            "year_range": self.year_range,
            "genres": sorted(self.genres),
            "age_restriction": self.age_restriction,
        }


def item_violations(profile: PreferenceProfile, item: Optional[CatalogItem]) -> list[str]:
    """Which preference fields an item breaks; ["unknown"] if unmatched."""
    if item is None:
        return ["unknown"]
    violations = []
    if item.media_type != profile.media_type:
        violations.append("media_type")
    if year_range_of(item.year) != profile.year_range:
        violations.append("year_range")
    if not (item.genres & profile.genres):
        violations.append("genre")
    if item.rating != profile.age_restriction:
        violations.append("age")
    return violations


def evaluate_items(
    profile: PreferenceProfile, items: list[Optional[CatalogItem]]
) -> tuple[list[list[str]], float]:
    """Per-item violation lists and the satisfied fraction."""
    if not items:
        raise EmptyRecommendationError("at least one recommendation is required")
    violation_lists = [item_violations(profile, item) for item in items]
    satisfied = sum(1 for v in violation_lists if not v)
    return violation_lists, satisfied / len(items)


def split_recommendations(action: str) -> list[str]:
    """Split agent text into candidate titles (newlines or semicolons)."""
    parts = re.split(r"[\n;]+", action)
    titles = []
    for part in parts:
        text = part.strip()
        text = re.sub(r"^(?:[-*•]|\d+[.)])\s*", "", text)
        text = text.strip().strip('"').strip()
        if text:
            titles.append(text)
    return titles


_VIOLATION_PHRASES = {
    "media_type": "the wrong kind of screen entertainment",
    "year_range": "the wrong era",
    "genre": "none of my genres",
    "age": "the wrong age rating",
}


class RecoMovieEnv(Environment):
    """One recommendation list per episode; judged item by item."""

    default_horizon = 1

    def __init__(self, config: EnvConfig):
        super().__init__(config)
        self.env_id = config.env_id
        self.catalog = default_catalog()
        self.bank = default_bank()
        self.profile: Optional[PreferenceProfile] = None
        self._instruction = ""

    def _render(self, kind: str, event: str, **slots: str) -> str:
        return self.bank.render(
            "reco_movie", kind, event, slots, rng=self.rng, randomize=self.config.randomize_text
        )

    def _begin_episode(self, latent_rng: np.random.Generator) -> tuple[str, str]:
        self.profile = PreferenceProfile.sample(latent_rng)
        self._instruction = self._render(
            "instruction",
            "basic",
            media_type=_MEDIA_TEXT[self.profile.media_type],
            years=_RANGE_TEXT[self.profile.year_range],
            genres=", ".join(sorted(self.profile.genres)),
            age=_RATING_TEXT[self.profile.age_restriction],
        )
        return "The viewer is waiting for your recommendations.", self._instruction

    def _current_instruction(self) -> str:
        return self._instruction

    def _matching_titles(self) -> list[str]:
        assert self.profile is not None
        return sorted(
            item.title for item in self.catalog.items if not item_violations(self.profile, item)
        )

    def _step_impl(
        self, action: str, feedback: FeedbackSet
    ) -> tuple[str, float, bool, dict[str, Any]]:
        assert self.profile is not None
        titles = split_recommendations(action)

        # De-duplicate after normalization; only unique items are judged.
        unique_titles: list[str] = []
        seen: set[str] = set()
        for t in titles:
            key = normalize_title(t)
            if key and key not in seen:
                seen.add(key)
                unique_titles.append(t)

        info: dict[str, Any] = {"profile": self.profile.to_dict()}

        if not unique_titles:
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "empty"))
            info["success"] = False
            info["n_items"] = 0
            return "No readable titles arrived.", 0.0, False, info

        items = [self.catalog.match(t) for t in unique_titles]
        violation_lists, reward = evaluate_items(self.profile, items)
        success = all(not v for v in violation_lists)
        satisfied_titles = [
            (items[i].title if items[i] else unique_titles[i])
            for i in range(len(items))
            if not violation_lists[i]
        ]

        feedback.put(
            AtomicFeedbackType.R,
            self._render(
                "r", "score", satisfied=str(len(satisfied_titles)), total=str(len(items))
            ),
        )
        if satisfied_titles:
            feedback.put(
                AtomicFeedbackType.HP,
                self._render("hp", "good_items", titles="; ".join(satisfied_titles)),
            )

        detail_clauses = []
        for title, item, violations in zip(unique_titles, items, violation_lists):
            if not violations:
                continue
            if violations == ["unknown"]:
                detail_clauses.append(f'"{title}" [unknown title]')
            else:
                shown = item.title if item else title
                detail_clauses.append(f'"{shown}" [wrong {", wrong ".join(violations)}]')
        if detail_clauses:
            feedback.put(
                AtomicFeedbackType.HN,
                self._render("hn", "violations", details="; ".join(detail_clauses)),
            )
            matching = self._matching_titles()
            feedback.put(
                AtomicFeedbackType.FP, self._render("fp", "suggest", title=matching[0])
            )
            first_violation = next(v for v in violation_lists if v)
            trait = (
                "titles I cannot find anywhere"
                if first_violation == ["unknown"]
                else _VIOLATION_PHRASES[first_violation[0]]
            )
            feedback.put(AtomicFeedbackType.FN, self._render("fn", "avoid", trait=trait))

        info.update(
            {
                "success": success,
                "n_items": len(items),
                "violations": violation_lists,
                "titles": unique_titles,
                "matched": [item.title if item else None for item in items],
            }
        )
        observation = f"You recommended {len(items)} unique titles."
        return observation, reward, success, info

    def sample_action(self, rng: np.random.Generator) -> str:
        n = int(rng.integers(1, 4))
        picks = rng.choice(len(self.catalog.items), size=n, replace=False)
        return "; ".join(self.catalog.items[int(i)].title for i in picks)


_shared_catalog: Optional[Catalog] = None


def default_catalog() -> Catalog:
    global _shared_catalog
    if _shared_catalog is None:
        _shared_catalog = Catalog.from_file()
    return _shared_catalog


register_env("reco_movie", RecoMovieEnv)
