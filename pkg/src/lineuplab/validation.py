"""Small argument-checking helpers shared by the CLI, the HTTP service, and the estimator."""

from __future__ import annotations

from collections.abc import Iterable

from .boxscore import METRICS

PROFILES = ("desk", "paper")


def check_metric(metric: str) -> str:
    """Return the canonical (upper-case) metric name or raise ValueError."""
    if not isinstance(metric, str):
        raise ValueError(f"metric must be a string, got {type(metric).__name__}")
    canonical = metric.strip().upper()
    if canonical not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {', '.join(METRICS)}")
    return canonical


def check_metrics(metrics: Iterable[str] | None) -> tuple[str, ...]:
    """Canonicalize a metric list, preserving order and dropping duplicates.

    ``None`` or an empty iterable means "all metrics".
    """
    if metrics is None:
        return METRICS
    seen: list[str] = []
    for metric in metrics:
        canonical = check_metric(metric)
        if canonical not in seen:
            seen.append(canonical)
    if not seen:
        return METRICS
    return tuple(seen)


def check_profile(profile: str) -> str:
    if not isinstance(profile, str) or profile.lower() not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; expected one of {', '.join(PROFILES)}")
    return profile.lower()


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def check_player_indices(values: Iterable[int], name: str, n_players: int | None = None) -> frozenset[int]:
    """Validate a collection of 1-based player indices."""
    out = set()
    for value in values:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"{name} entries must be integers, got {value!r}")
        if value < 1:
            raise ValueError(f"{name} entries must be >= 1, got {value}")
        if n_players is not None and value > n_players:
            raise ValueError(f"{name} entry {value} is out of range for a {n_players}-player roster")
        out.add(value)
    return frozenset(out)


def check_positive_int(value: int, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return value
