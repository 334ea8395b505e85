"""Posterior probabilities over optimal line-ups.

All probabilities are plain Monte-Carlo frequencies over the S per-draw
optima: the probability of a line-up is its count divided by S, inclusion
and joint probabilities count membership the same way, and conditionals are
quotients of those counts. No smoothing is applied anywhere, so the chain
rule holds on the same counting base.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import UndefinedConditionalError
from .optimizer import (
    Lineup,
    RosterEntry,
    RuleSet,
    SelectionConstraints,
    solve_posterior,
)
from .predictive import MatchScenario, PredictiveSample


@dataclass(frozen=True)
class LineupPosterior:
    """The multiset of per-draw optimal line-ups with derived frequencies."""

    solutions: tuple[tuple[int, Lineup], ...]
    metric: str
    scenario: MatchScenario
    constraints: SelectionConstraints = field(default_factory=SelectionConstraints)
    lineup_probs: dict[Lineup, float] = field(init=False, compare=False)

    def __post_init__(self):
        if not self.solutions:
            raise ValueError("a line-up posterior needs at least one solution")
        sizes = {len(lineup) for _, lineup in self.solutions}
        if len(sizes) != 1:
            raise ValueError(f"solutions mix team sizes {sorted(sizes)}")
        counts = Counter(lineup for _, lineup in self.solutions)
        total = len(self.solutions)
        object.__setattr__(
            self, "lineup_probs", {l: c / total for l, c in counts.items()}
        )

    @property
    def size(self) -> int:
        return len(self.solutions)

    @property
    def team_size(self) -> int:
        return len(self.solutions[0][1])

    def count_containing(self, players) -> int:
        """How many solutions contain every player in ``players``."""
        wanted = {int(p) for p in players}
        if not wanted:
            return self.size
        if len(wanted) > self.team_size:
            return 0
        return sum(
            1 for _, lineup in self.solutions
            if wanted.issubset(lineup.members)
        )


def monte_carlo_se(p: float, n: int) -> float:
    """Binomial standard error of a frequency estimate."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return math.sqrt(p * (1.0 - p) / n)


def lineup_probabilities(post: LineupPosterior) -> list[tuple[Lineup, float]]:
    """Line-ups by descending probability, ties by lexicographic members."""
    return sorted(post.lineup_probs.items(), key=lambda kv: (-kv[1], kv[0]))


def inclusion_probability(post: LineupPosterior, i: int) -> float:
    """Fraction of solutions whose line-up contains player i."""
    if i < 1:
        raise ValueError(f"player index {i} must be >= 1")
    return post.count_containing({i}) / post.size


def joint_probability(post: LineupPosterior, players) -> float:
    """Fraction of solutions containing all of ``players``.

    An empty set is vacuously certain; a set larger than the team size is
    logically impossible and yields 0.
    """
    return post.count_containing(players) / post.size


def conditional_probability(post: LineupPosterior, targets, given) -> float:
    """P(all targets in the line-up | all of ``given`` in the line-up).

    Returned as the count quotient count(targets ∪ given) / count(given),
    a single correctly-rounded division of the same counts that
    joint_probability divides by the solution total. Because all three
    estimates share one counting base and none is smoothed, the chain rule
    conditional · P(given) = P(targets ∪ given) holds exactly as rational
    arithmetic on those counts; the floats are their nearest doubles.
    """
    count_given = post.count_containing(given)
    if count_given == 0:
        raise UndefinedConditionalError(
            f"conditioning set {sorted(set(given))} appears in no solution"
        )
    both = set(targets) | set(given)
    return post.count_containing(both) / count_given


def inclusion_table(post: LineupPosterior, roster: list[RosterEntry]):
    """Per-player inclusion probabilities with Monte-Carlo standard errors."""
    rows = []
    for entry in roster:
        p = inclusion_probability(post, entry.index)
        rows.append({
            "index": entry.index,
            "name": entry.name,
            "classification": entry.classification,
            "is_female": entry.is_female,
            "probability": p,
            "se": monte_carlo_se(p, post.size),
        })
    return rows


def completion_table(post: LineupPosterior, roster: list[RosterEntry],
                     given) -> list[dict]:
    """Conditional inclusion of each remaining player given a partial squad.

    Candidates are every roster player outside ``given``, ranked by the
    probability that they complete the optimal line-up when all of
    ``given`` are in it.
    """
    given = {int(p) for p in given}
    n_given = post.count_containing(given)
    rows = []
    for entry in roster:
        if entry.index in given:
            continue
        p = conditional_probability(post, {entry.index}, given)
        rows.append({
            "index": entry.index,
            "name": entry.name,
            "classification": entry.classification,
            "is_female": entry.is_female,
            "probability": p,
            "se": monte_carlo_se(p, n_given),
        })
    rows.sort(key=lambda r: (-r["probability"], r["index"]))
    return rows


def resolve_absence(
    pred: PredictiveSample,
    roster: list[RosterEntry],
    rules: RuleSet,
    banned,
    engine: str = "branch_and_bound",
) -> LineupPosterior:
    """Absent-player analysis by re-solving every draw without the absentees.

    This is the exact answer to "who plays if these players cannot": the
    optimizer is re-run per draw on the reduced pool.
    """
    constraints = SelectionConstraints(banned=frozenset(banned))
    return solve_posterior(pred, roster, rules, constraints, engine=engine)


def renormalize_absence(post: LineupPosterior, banned) -> LineupPosterior:
    """Absent-player analysis by discarding solutions that use the absentees.

    Cheaper than re-solving but approximate: draws whose optimum used a
    banned player are dropped rather than re-optimized, which conditions on
    the original optimum avoiding them. Exposed so the gap to
    resolve_absence is measurable.
    """
    banned = {int(p) for p in banned}
    kept = tuple(
        (s, lineup) for s, lineup in post.solutions
        if not banned & set(lineup.members)
    )
    if not kept:
        raise UndefinedConditionalError(
            f"every solution uses a player from {sorted(banned)}; "
            "nothing to renormalize"
        )
    constraints = SelectionConstraints(
        pinned=post.constraints.pinned,
        banned=post.constraints.banned | frozenset(banned),
    )
    return LineupPosterior(
        solutions=kept,
        metric=post.metric,
        scenario=post.scenario,
        constraints=constraints,
    )
