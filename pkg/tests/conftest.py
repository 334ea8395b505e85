"""Shared fixtures: the reference roster, demo data, and a small fitted run."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from lineuplab.boxscore import (
    Observation,
    Panel,
    RosterEntry,
    build_panel,
    parse_boxscores,
    parse_roster,
)
from lineuplab.sampler import SamplerConfig, run_sampler

# nine-player reference roster: three women, classification total spread
# wide enough that every cap regime bites
REFERENCE_ROSTER = (
    RosterEntry(1, "Annabel Breuer", 1.5, True),
    RosterEntry(2, "Correy Rossi", 2.0, False),
    RosterEntry(3, "Dejon Green", 3.5, False),
    RosterEntry(4, "Dirk Passivan", 4.5, False),
    RosterEntry(5, "Lucas Jung", 1.0, False),
    RosterEntry(6, "Natalie Passivan", 4.5, True),
    RosterEntry(7, "Patrick Dorner", 3.5, False),
    RosterEntry(8, "Svenja Erni", 3.5, True),
    RosterEntry(9, "Walter Vlaanderen", 4.5, False),
)


@pytest.fixture(scope="session")
def reference_roster():
    return list(REFERENCE_ROSTER)


def _data_text(name: str) -> str:
    return (resources.files("lineuplab") / "data" / name).read_text()


@pytest.fixture(scope="session")
def demo_roster():
    return parse_roster(_data_text("roster.csv"))


@pytest.fixture(scope="session")
def demo_rows():
    return parse_boxscores(_data_text("boxscores.csv"))


@pytest.fixture(scope="session")
def demo_panel(demo_rows, demo_roster):
    panel, mapping = build_panel(demo_rows, demo_roster, "WIN_SCORE")
    assert mapping == {i: i for i in range(1, 10)}
    return panel


TINY_CONFIG = SamplerConfig(chains=2, burn_in=200, iterations=400, thin=2, seed=11)


@pytest.fixture(scope="session")
def tiny_config():
    return TINY_CONFIG


@pytest.fixture(scope="session")
def demo_sample(demo_panel):
    """One small fitted sample shared by predictive/analytics/service tests."""
    return run_sampler(demo_panel, TINY_CONFIG)


def make_flat_panel(values, metric="EFF", roster=None, homes=None) -> Panel:
    """Single-player panel with one observation per match; test scaffolding."""
    roster = roster or [RosterEntry(1, "Solo", 2.0, False)]
    homes = homes or [False] * len(values)
    obs = tuple(
        Observation(1, j + 1, float(v), bool(h))
        for j, (v, h) in enumerate(zip(values, homes))
    )
    return Panel(tuple(roster), obs, metric, len(values))
