"""Per-draw line-up selection under classification caps.

The decision problem: pick exactly ``team_size`` players maximizing the sum
of their predicted values, subject to a cap on the sum of their
classification points. Under IWBF rules the cap is flat. Under RBBL rules
the base cap is 14.5 and each woman in the line-up raises it by 1.5, so the
cap depends on the line-up's female count; the search is stratified over
female counts so each stratum is a plain cardinality-capped knapsack.

Two solver engines share one contract and must agree bit-for-bit, ties
included: exhaustive enumeration (the reference) and branch-and-bound. Both
compute a candidate's objective by summing values in ascending member order,
so equal-sum ties resolve identically, and the branch-and-bound prunes only
when a bound falls below the incumbent by a safety margin, which keeps
tie candidates alive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .boxscore import RosterEntry
from .errors import InfeasibleError
from .predictive import PredictiveSample

RULE_MODES = ("IWBF", "RBBL")


def _default_rbbl_caps() -> dict[int, float]:
    # base 14.5 plus a 1.5-point allowance for each woman on court
    return {count: 14.5 + 1.5 * count for count in range(6)}


@dataclass(frozen=True, eq=True)
class RuleSet:
    """Classification cap regime for a five-player line-up.

    ``rbbl_caps`` maps female count to cap; the largest key acts as
    "this many or more". The default map extends the per-woman allowance
    up to an all-female line-up.
    """

    mode: str = "RBBL"
    iwbf_cap: float = 14.0
    rbbl_caps: dict[int, float] = field(default_factory=_default_rbbl_caps)
    team_size: int = 5

    def __post_init__(self):
        if self.mode not in RULE_MODES:
            raise ValueError(f"mode must be one of {RULE_MODES}, got {self.mode!r}")
        if self.iwbf_cap <= 0:
            raise ValueError("iwbf_cap must be strictly positive")
        if self.team_size < 1:
            raise ValueError("team_size must be >= 1")
        if not self.rbbl_caps:
            raise ValueError("rbbl_caps must not be empty")
        for count, cap in self.rbbl_caps.items():
            if count < 0:
                raise ValueError("female counts in rbbl_caps must be >= 0")
            if cap <= 0:
                raise ValueError("caps in rbbl_caps must be strictly positive")

    def __hash__(self):
        return hash((self.mode, self.iwbf_cap,
                     tuple(sorted(self.rbbl_caps.items())), self.team_size))


def capacity_for(female_count: int, rules: RuleSet) -> float:
    """Cap on the summed classification points for a given female count."""
    if female_count < 0:
        raise ValueError("female_count must be >= 0")
    if rules.mode == "IWBF":
        return rules.iwbf_cap
    if female_count in rules.rbbl_caps:
        return rules.rbbl_caps[female_count]
    top = max(rules.rbbl_caps)
    if female_count > top:
        return rules.rbbl_caps[top]
    raise ValueError(f"rbbl_caps has no entry for {female_count} women")


@dataclass(frozen=True, order=True)
class Lineup:
    """A set of exactly team_size player indices, stored sorted."""

    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(int(i) for i in self.members))
        object.__setattr__(self, "members", members)
        if len(set(members)) != len(members):
            raise ValueError(f"line-up members must be distinct, got {members}")
        if members and members[0] < 1:
            raise ValueError("player indices are 1-based")

    def __contains__(self, index: int) -> bool:
        return index in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class SelectionConstraints:
    """Players forced into (pinned) or excluded from (banned) the line-up."""

    pinned: frozenset[int] = frozenset()
    banned: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "pinned", frozenset(int(i) for i in self.pinned))
        object.__setattr__(self, "banned", frozenset(int(i) for i in self.banned))
        overlap = self.pinned & self.banned
        if overlap:
            raise ValueError(
                f"players {sorted(overlap)} cannot be both pinned and banned"
            )


def class_sum(lineup: Lineup, roster: list[RosterEntry]) -> float:
    return float(sum(roster[i - 1].classification for i in lineup.members))


def female_count(lineup: Lineup, roster: list[RosterEntry]) -> int:
    return sum(1 for i in lineup.members if roster[i - 1].is_female)


def _check_constraints(constraints: SelectionConstraints, n: int,
                       team_size: int) -> None:
    for name, indices in (("pinned", constraints.pinned),
                          ("banned", constraints.banned)):
        out = [i for i in indices if not 1 <= i <= n]
        if out:
            raise ValueError(f"{name} indices {sorted(out)} outside roster 1..{n}")
    if len(constraints.pinned) > team_size:
        raise ValueError(
            f"{len(constraints.pinned)} pinned players exceed team size {team_size}"
        )


def enumerate_valid_lineups(
    roster: list[RosterEntry],
    rules: RuleSet,
    constraints: SelectionConstraints | None = None,
) -> list[Lineup]:
    """All feasible line-ups in lexicographic member order.

    Returns an empty list when nothing is feasible; callers that require
    feasibility raise on that.
    """
    constraints = constraints or SelectionConstraints()
    n = len(roster)
    if n < rules.team_size:
        raise ValueError(f"roster of {n} cannot field {rules.team_size} players")
    _check_constraints(constraints, n, rules.team_size)

    pinned = sorted(constraints.pinned)
    pool = [i for i in range(1, n + 1)
            if i not in constraints.banned and i not in constraints.pinned]
    free_slots = rules.team_size - len(pinned)
    if free_slots > len(pool):
        return []

    out = []
    for extra in combinations(pool, free_slots):
        members = tuple(sorted(pinned + list(extra)))
        women = sum(1 for i in members if roster[i - 1].is_female)
        total = sum(roster[i - 1].classification for i in members)
        if total <= capacity_for(women, rules):
            out.append(Lineup(members))
    out.sort()
    return out


def _canonical_objective(values: np.ndarray, members: tuple[int, ...]) -> float:
    # ascending-member summation; both engines must use exactly this
    total = 0.0
    for i in members:
        total += float(values[i - 1])
    return total


def _better(obj: float, members: tuple[int, ...],
            best_obj: float, best_members: tuple[int, ...] | None) -> bool:
    if best_members is None or obj > best_obj:
        return True
    return obj == best_obj and members < best_members


def _solve_enumeration(values, roster, rules, constraints):
    best_obj = -math.inf
    best_members = None
    for lineup in enumerate_valid_lineups(roster, rules, constraints):
        obj = _canonical_objective(values, lineup.members)
        if _better(obj, lineup.members, best_obj, best_members):
            best_obj, best_members = obj, lineup.members
    return best_members


def _solve_branch_and_bound(values, roster, rules, constraints):
    n = len(roster)
    team_size = rules.team_size
    pinned = tuple(sorted(constraints.pinned))
    pool = [i for i in range(1, n + 1)
            if i not in constraints.banned and i not in constraints.pinned]
    free_slots = team_size - len(pinned)
    if free_slots > len(pool):
        return None
    # explore high-value players first so the incumbent tightens early
    pool.sort(key=lambda i: (-float(values[i - 1]), i))
    pool_values = [float(values[i - 1]) for i in pool]
    prefix = [0.0]
    for v in pool_values:
        prefix.append(prefix[-1] + v)
    classes = [roster[i - 1].classification for i in pool]

    pinned_value = sum(float(values[i - 1]) for i in pinned)
    pinned_class = sum(roster[i - 1].classification for i in pinned)
    pinned_women = sum(1 for i in pinned if roster[i - 1].is_female)
    loosest = max(capacity_for(w, rules) for w in range(team_size + 1))

    best: list = [-math.inf, None]

    def visit(members: tuple[int, ...]) -> None:
        women = pinned_women + sum(1 for i in members if roster[i - 1].is_female)
        total = pinned_class + sum(roster[i - 1].classification for i in members)
        if total > capacity_for(women, rules):
            return
        full = tuple(sorted(pinned + members))
        obj = _canonical_objective(values, full)
        if _better(obj, full, best[0], best[1]):
            best[0], best[1] = obj, full

    def descend(pos: int, chosen: tuple[int, ...], value_so_far: float,
                class_so_far: float) -> None:
        slots = free_slots - len(chosen)
        if slots == 0:
            visit(chosen)
            return
        remaining = len(pool) - pos
        if remaining < slots:
            return
        # value bound: best remaining values fill the open slots
        bound = value_so_far + (prefix[pos + slots] - prefix[pos])
        if best[1] is not None:
            slack = 1e-9 * (1.0 + abs(best[0]))
            if bound < best[0] - slack:
                return
        # capacity bound against the loosest cap on this branch
        smallest = sorted(classes[pos:])[:slots]
        if class_so_far + sum(smallest) > loosest:
            return
        for k in range(pos, len(pool) - slots + 1):
            descend(k + 1, chosen + (pool[k],),
                    value_so_far + pool_values[k], class_so_far + classes[k])

    descend(0, (), pinned_value, pinned_class)
    return best[1]


ENGINES = {
    "enumeration": _solve_enumeration,
    "branch_and_bound": _solve_branch_and_bound,
}


def solve_single(
    values,
    roster: list[RosterEntry],
    rules: RuleSet,
    constraints: SelectionConstraints | None = None,
    engine: str = "branch_and_bound",
) -> Lineup:
    """The feasible line-up maximizing the summed values.

    Ties resolve to the lexicographically smallest member tuple. Both
    engines return identical line-ups on identical inputs.
    """
    constraints = constraints or SelectionConstraints()
    values = np.asarray(values, dtype=float)
    if values.shape != (len(roster),):
        raise ValueError(
            f"expected {len(roster)} values, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("player values must all be finite")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {sorted(ENGINES)}")
    _check_constraints(constraints, len(roster), rules.team_size)

    members = ENGINES[engine](values, roster, rules, constraints)
    if members is None:
        raise InfeasibleError(
            "no line-up satisfies the classification caps with "
            f"pinned={sorted(constraints.pinned)} banned={sorted(constraints.banned)}"
        )
    return Lineup(members)


def solve_posterior(
    pred: PredictiveSample,
    roster: list[RosterEntry],
    rules: RuleSet,
    constraints: SelectionConstraints | None = None,
    engine: str = "branch_and_bound",
):
    """Solve one line-up problem per predictive draw.

    Returns a LineupPosterior over the S per-draw optima, draw indices
    retained in order. The feasible set does not depend on the draw, so
    infeasibility is detected once and reported with the draw count.
    """
    from .analytics import LineupPosterior

    constraints = constraints or SelectionConstraints()
    if pred.n_players != len(roster):
        raise ValueError(
            f"predictive matrix has {pred.n_players} players, roster has {len(roster)}"
        )
    if not enumerate_valid_lineups(roster, rules, constraints):
        raise InfeasibleError(
            f"no feasible line-up under the active constraints; "
            f"all {pred.n_draws} draws affected"
        )
    solutions = tuple(
        (s, solve_single(pred.values[s], roster, rules, constraints, engine))
        for s in range(pred.n_draws)
    )
    return LineupPosterior(
        solutions=solutions,
        metric=pred.metric,
        scenario=pred.scenario,
        constraints=constraints,
    )
