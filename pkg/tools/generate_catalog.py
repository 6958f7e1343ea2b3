#!/usr/bin/env python3
"""Regenerate the bundled viewing catalog asset.

Deterministic: running this script always reproduces the committed file.
Coverage rule: for every (media type, year range, rating) cell and every
genre, the catalog holds at least 5 items carrying that genre, so any
sampled preference profile has matching items.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

OUT_PATH = Path(__file__).parent.parent / "src" / "langfeed" / "assets" / "catalog.txt"

MEDIA_TYPES = ["movie", "tv_show"]
RATINGS = ["family_friendly", "r_rated"]
GENRES = [
    "Action", "Comedy", "Documentary", "Drama", "Horror",
    "Romance", "Sci-Fi", "Thriller", "Animation", "Fantasy",
]
YEAR_RANGES = {
    "eighties": (1980, 1989),
    "nineties": (1990, 1999),
    "two_thousands": (2000, 2009),
    "recent": (2010, 2025),
}
MIN_PER_CELL_GENRE = 5

ADJECTIVES = [
    "Crimson", "Silent", "Broken", "Golden", "Midnight", "Electric", "Hollow",
    "Savage", "Gentle", "Frozen", "Burning", "Forgotten", "Hidden", "Iron",
    "Velvet", "Scarlet", "Wandering", "Shattered", "Quiet", "Restless",
    "Crooked", "Pale", "Wicked", "Lonely", "Emerald", "Rusty", "Neon",
    "Ancient", "Distant", "Bitter", "Glass", "Paper", "Marble", "Thorny",
    "Steady", "Feral", "Amber", "Obsidian", "Weary", "Luminous",
]
NOUNS = [
    "Harbor", "Empire", "Garden", "Covenant", "Horizon", "Letters", "Hunters",
    "Kingdom", "Symphony", "Protocol", "Orchard", "Labyrinth", "Carnival",
    "Outpost", "Vendetta", "Paradox", "Monsoon", "Pilgrims", "Arcade",
    "Meridian", "Sanctuary", "Reckoning", "Lanterns", "Voyage", "Masquerade",
    "Frontier", "Cipher", "Requiem", "Bazaar", "Atlas", "Detour", "Mirage",
    "Undertow", "Parliament", "Menagerie", "Gambit", "Thicket", "Beacon",
    "Crossing", "Tribunal", "Aviary", "Foundry", "Almanac", "Causeway",
    "Junction", "Spire", "Cellar", "Prairie", "Archive", "Delta",
]
PLACES = [
    "Avalon", "Brooklyn", "Calcutta", "Dunmore", "Eastport", "Falmouth",
    "Galway", "Havana", "Istanbul", "Juneau", "Kyoto", "Lisbon", "Marrakesh",
    "Nairobi", "Odessa", "Patagonia", "Quebec", "Reykjavik", "Salem",
    "Tangier", "Utrecht", "Verona", "Winslow", "Yukon", "Zanzibar",
]
NAMES = [
    "Abernathy", "Calloway", "Delacroix", "Fairbanks", "Greenwood",
    "Hawthorne", "Kavanagh", "Lockwood", "Mercer", "Northgate", "Okafor",
    "Pemberton", "Quimby", "Rosewater", "Sterling", "Thackeray", "Underhill",
    "Vance", "Whitfield", "Yarrow",
]


def normalize_title(title: str) -> str:
    import re

    text = re.sub(r"[^a-z0-9\s]", " ", title.lower())
    words = text.split()
    if words and words[0] in ("a", "an", "the"):
        words = words[1:]
    return " ".join(words)


def make_title(rng: np.random.Generator) -> str:
    adj = ADJECTIVES[int(rng.integers(len(ADJECTIVES)))]
    noun = NOUNS[int(rng.integers(len(NOUNS)))]
    place = PLACES[int(rng.integers(len(PLACES)))]
    name = NAMES[int(rng.integers(len(NAMES)))]
    patterns = [
        f"The {adj} {noun}",
        f"{adj} {noun}",
        f"{noun} of {place}",
        f"The {noun} of {name}",
        f"{name}'s {noun}",
        f"{adj} {noun} of {place}",
        f"A {adj} {noun}",
        f"{place} {noun}",
    ]
    return patterns[int(rng.integers(len(patterns)))]


def generate() -> list[str]:
    rng = np.random.default_rng(20240501)
    seen: set[str] = set()
    records: list[tuple[str, str, int, tuple[str, ...], str]] = []

    def fresh_title() -> str:
        while True:
            title = make_title(rng)
            key = normalize_title(title)
            if key not in seen:
                seen.add(key)
                return title

    for media in MEDIA_TYPES:
        for range_name, (lo, hi) in YEAR_RANGES.items():
            for rating in RATINGS:
                counts = {g: 0 for g in GENRES}
                for genre in GENRES:
                    while counts[genre] < MIN_PER_CELL_GENRE:
                        genres = [genre]
                        if rng.random() < 0.5:
                            other = GENRES[int(rng.integers(len(GENRES)))]
                            if other != genre:
                                genres.append(other)
                        year = int(rng.integers(lo, hi + 1))
                        records.append(
                            (fresh_title(), media, year, tuple(sorted(genres)), rating)
                        )
                        for g in genres:
                            counts[g] += 1

    # A handful of pre-1980 titles: they belong to no year range and exist
    # to exercise negative feedback paths.
    for _ in range(12):
        media = MEDIA_TYPES[int(rng.integers(2))]
        rating = RATINGS[int(rng.integers(2))]
        genre = GENRES[int(rng.integers(len(GENRES)))]
        year = int(rng.integers(1970, 1980))
        records.append((fresh_title(), media, year, (genre,), rating))

    lines = [
        f"{title}|{media}|{year}|{','.join(genres)}|{rating}"
        for title, media, year, genres, rating in records
    ]
    return lines


def main() -> int:
    lines = generate()
    OUT_PATH.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} records to {OUT_PATH}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
