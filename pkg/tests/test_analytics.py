"""Probability queries over the lineup posterior."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lineuplab.analytics import (
    LineupPosterior,
    completion_table,
    conditional_probability,
    inclusion_probability,
    inclusion_table,
    joint_probability,
    lineup_probabilities,
    monte_carlo_se,
    renormalize_absence,
    resolve_absence,
)
from lineuplab.errors import UndefinedConditionalError
from lineuplab.optimizer import Lineup, RuleSet, SelectionConstraints
from lineuplab.predictive import MatchScenario

from _oracles import REFERENCE_ROSTER

ROSTER = list(REFERENCE_ROSTER)
SCENARIO = MatchScenario(match_index=19)

L_A = Lineup((1, 2, 4, 7, 9))
L_B = Lineup((1, 2, 4, 6, 9))
L_C = Lineup((2, 3, 4, 7, 9))


def posterior_from_counts(counts: dict[Lineup, int]) -> LineupPosterior:
    solutions = []
    s = 0
    for lineup, count in counts.items():
        for _ in range(count):
            solutions.append((s, lineup))
            s += 1
    return LineupPosterior(tuple(solutions), "EFF", SCENARIO)


THREE = posterior_from_counts({L_A: 1830, L_B: 690, L_C: 480})


class TestCounts:
    def test_lineup_probs_are_frequencies(self):
        assert THREE.lineup_probs[L_A] == 1830 / 3000
        assert THREE.lineup_probs[L_B] == 690 / 3000
        assert THREE.size == 3000

    def test_count_containing(self):
        assert THREE.count_containing({1}) == 2520
        assert THREE.count_containing({1, 6}) == 690
        assert THREE.count_containing(()) == 3000
        assert THREE.count_containing({1, 2, 3, 4, 5, 6}) == 0

    def test_mixed_team_sizes_rejected(self):
        rules = RuleSet(team_size=2)
        with pytest.raises(ValueError):
            LineupPosterior(((0, Lineup((1, 2))), (1, L_A)), "EFF", SCENARIO)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            LineupPosterior((), "EFF", SCENARIO)


class TestProbabilities:
    def test_inclusion(self):
        assert inclusion_probability(THREE, 1) == 2520 / 3000
        assert inclusion_probability(THREE, 6) == 690 / 3000
        assert inclusion_probability(THREE, 5) == 0.0

    def test_inclusion_index_validated(self):
        with pytest.raises(ValueError):
            inclusion_probability(THREE, 0)

    def test_joint(self):
        assert joint_probability(THREE, {1, 6}) == 690 / 3000
        assert joint_probability(THREE, {2, 4, 9}) == 1.0
        assert joint_probability(THREE, ()) == 1.0

    def test_conditional_fraction(self):
        # 690 of the 2520 lineups containing player 1 also contain player 6
        assert conditional_probability(THREE, {6}, {1}) == pytest.approx(690 / 2520)

    def test_conditional_of_empty_targets(self):
        assert conditional_probability(THREE, (), {1}) == 1.0

    def test_undefined_conditional(self):
        with pytest.raises(UndefinedConditionalError):
            conditional_probability(THREE, {6}, {5})

    def test_sorted_lineup_probabilities(self):
        ranked = lineup_probabilities(THREE)
        assert [lu for lu, _ in ranked] == [L_A, L_B, L_C]
        probs = [p for _, p in ranked]
        assert probs == sorted(probs, reverse=True)

    def test_monte_carlo_se(self):
        assert monte_carlo_se(0.5, 100) == pytest.approx(0.05)
        assert monte_carlo_se(0.0, 10) == 0.0
        assert monte_carlo_se(1.0, 10) == 0.0


class TestChainRuleExact:
    # The chain rule conditional * P(given) = P(targets | given ... union)
    # is exact over the shared counting base: every returned float must be
    # the correctly rounded ratio of the same three counts, and those counts
    # satisfy the identity in exact rational arithmetic. A float product
    # identity is unattainable (counts (1, 26, 0, 7) admit no double c with
    # c * (27/34) == 1/34), so exactness is asserted with Fraction.

    @staticmethod
    def assert_chain_rule_exact(post, targets, given):
        targets = set(targets)
        given = set(given)
        c_g = post.count_containing(given)
        c_tg = post.count_containing(targets | given)
        s = post.size
        cond = conditional_probability(post, targets, given)
        assert cond == c_tg / c_g
        assert joint_probability(post, given) == c_g / s
        assert joint_probability(post, targets | given) == c_tg / s
        assert Fraction(c_tg, c_g) * Fraction(c_g, s) == Fraction(c_tg, s)
        assert 0.0 <= cond <= 1.0

    def test_awkward_small_counts(self):
        post = posterior_from_counts({L_B: 1, L_A: 2, L_C: 2})
        self.assert_chain_rule_exact(post, {6}, {1})

    def test_reference_counts(self):
        self.assert_chain_rule_exact(THREE, {6}, {1})

    def test_no_double_rounding_through_size(self):
        # 690/2520 differs in the last ulp from (690/3000)/(2520/3000); the
        # count quotient is the single correctly rounded division
        cond = conditional_probability(THREE, {6}, {1})
        assert cond == 690 / 2520

    @given(st.integers(0, 40), st.integers(0, 40), st.integers(0, 40),
           st.integers(0, 40))
    @settings(max_examples=300, deadline=None)
    def test_chain_rule_holds_for_all_count_patterns(self, n_both, n_g_only,
                                                     n_t_only, n_neither):
        # four disjoint lineup types: {1,6} both, 1 only, 6 only, neither
        counts = {}
        if n_both:
            counts[L_B] = n_both                      # contains 1 and 6
        if n_g_only:
            counts[L_A] = n_g_only                    # contains 1, not 6
        if n_t_only:
            counts[Lineup((2, 3, 4, 6, 9))] = n_t_only  # contains 6, not 1
        if n_neither:
            counts[L_C] = n_neither
        if not counts:
            return
        post = posterior_from_counts(counts)
        if post.count_containing({1}) == 0:
            with pytest.raises(UndefinedConditionalError):
                conditional_probability(post, {6}, {1})
            return
        self.assert_chain_rule_exact(post, {6}, {1})

    def test_subset_targets_exactly_one(self):
        assert conditional_probability(THREE, {1}, {1, 2}) == 1.0
        assert conditional_probability(THREE, set(), {4}) == 1.0


class TestTables:
    def test_inclusion_table_sums_to_team_size(self):
        rows = inclusion_table(THREE, ROSTER)
        assert len(rows) == 9
        total = math.fsum(r["probability"] for r in rows)
        assert abs(total - 5.0) < 1e-9

    def test_inclusion_table_se(self):
        rows = inclusion_table(THREE, ROSTER)
        by_index = {r["index"]: r for r in rows}
        p = 2520 / 3000
        assert by_index[1]["se"] == pytest.approx(monte_carlo_se(p, 3000))

    def test_completion_excludes_given_and_sorts(self):
        rows = completion_table(THREE, ROSTER, {1})
        assert all(r["index"] != 1 for r in rows)
        probs = [r["probability"] for r in rows]
        assert probs == sorted(probs, reverse=True)
        by_index = {r["index"]: r for r in rows}
        assert by_index[6]["probability"] == pytest.approx(690 / 2520)
        assert by_index[6]["se"] == pytest.approx(
            monte_carlo_se(690 / 2520, 2520))

    def test_completion_of_absent_player_undefined(self):
        with pytest.raises(UndefinedConditionalError):
            completion_table(THREE, ROSTER, {5})


class TestAbsence:
    def make_pred(self, matrix):
        import numpy as np

        from lineuplab.predictive import PredictiveSample

        return PredictiveSample(
            values=np.asarray(matrix, dtype=float),
            scenario=SCENARIO,
            panel_fingerprint="x",
            player_names=tuple(e.name for e in ROSTER),
            metric="EFF",
            seed=0,
        )

    def test_resolve_re_solves_every_draw(self):
        import numpy as np

        rng = np.random.Generator(np.random.Philox(key=21))
        matrix = rng.normal(np.linspace(0, 2, 9), 0.4, size=(60, 9))
        pred = self.make_pred(matrix)
        post = resolve_absence(pred, ROSTER, RuleSet(), banned={9})
        assert post.size == 60
        assert all(9 not in lu for _, lu in post.solutions)
        assert post.constraints.banned == frozenset({9})

    def test_renormalize_drops_and_rescales(self):
        post = renormalize_absence(THREE, banned={6})
        assert post.size == 3000 - 690
        assert set(post.lineup_probs) == {L_A, L_C}
        assert post.lineup_probs[L_A] == 1830 / 2310

    def test_renormalize_everything_banned(self):
        narrow = posterior_from_counts({L_A: 10})
        with pytest.raises(UndefinedConditionalError):
            renormalize_absence(narrow, banned={4})
