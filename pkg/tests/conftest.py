"""Shared fixtures: fixed action scripts and base environment ids."""

from __future__ import annotations

import pytest

BASE_ENV_IDS = ["bandit", "poem", "reco_movie", "optimization", "parking", "gridworld"]

HAIKU_OK = "an old silent pond\na frog jumps into the pond\nsplash silence again"

# Syntactically plausible fixed scripts, including one malformed entry each.
SCRIPTED_ACTIONS: dict[str, list[str]] = {
    "bandit": ["A", "2", "B", "not a lever", "1", "B", "A", "2"],
    "poem": [HAIKU_OK, "one lonely line", HAIKU_OK + "\nextra line", "moon over water"],
    "reco_movie": [
        "The Savage Empire; Totally Made Up Title",
        "Nothing I Know",
        "The Savage Empire\nReykjavik Protocol",
    ],
    "optimization": ["0.5, 0.5", "1 1", "not a point", "-0.2 0.3", "0.1, -0.1", "99 99"],
    "parking": [
        "throttle=0.6, steering=0.1",
        "0.4 -0.2",
        "steer hard!",
        "throttle=-0.3, steering=0.0",
        "1.0, 0.5",
        "throttle=0.2, steering=-0.1",
    ],
    "gridworld": ["north", "east", "south", "sideways", "west", "north", "east", "south"],
}


@pytest.fixture(scope="session")
def bank():
    from langfeed.templates import default_bank

    return default_bank()


@pytest.fixture(scope="session")
def lexicon():
    from langfeed.envs.poem import default_lexicon

    return default_lexicon()


@pytest.fixture(scope="session")
def catalog():
    from langfeed.envs.recommend import default_catalog

    return default_catalog()
