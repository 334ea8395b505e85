"""Next-match simulation by the composition method."""

import numpy as np
import pytest

from lineuplab.errors import StaleSampleError
from lineuplab.predictive import MatchScenario, predict_match
from lineuplab.sampler import PosteriorSample, SamplerConfig


def constant_sample(panel, s=200, **values):
    """PosteriorSample whose every draw is the same hand-picked state."""
    defaults = dict(beta0=0.0, beta_W=0.0, beta_C=0.0, beta_H=0.0, beta1=0.0,
                    sigma=1e-12, sigma0=1e-12, sigma0m=1e-12, sigma1=1e-12)
    defaults.update(values)
    n, m = panel.n_players, panel.match_count
    scalars = {k: np.full(s, v, dtype=float) for k, v in defaults.items()}
    blocks = {"b0": np.zeros((s, n)), "b1": np.zeros((s, n)),
              "b0m": np.zeros((s, m))}
    config = SamplerConfig(chains=1, burn_in=0, iterations=s, thin=1, seed=0)
    return PosteriorSample(scalars, blocks, np.zeros(s, dtype=int),
                           np.arange(s), panel.fingerprint, config)


class TestScenario:
    def test_default_resolves_to_next_match(self):
        assert MatchScenario().resolve(18).match_index == 19
        assert MatchScenario(match_index=5).resolve(18).match_index == 5

    def test_match_index_validation(self):
        with pytest.raises(ValueError):
            MatchScenario(match_index=0)


class TestPredictMatch:
    def test_shape_and_metadata(self, demo_panel, demo_sample):
        pred = predict_match(demo_sample, demo_panel, seed=3)
        assert pred.values.shape == (demo_sample.size, demo_panel.n_players)
        assert pred.player_names == tuple(e.name for e in demo_panel.roster)
        assert pred.metric == demo_panel.metric
        assert pred.scenario.match_index == demo_panel.match_count + 1

    def test_stale_sample_rejected(self, demo_panel, demo_sample, demo_rows,
                                   demo_roster):
        from lineuplab.boxscore import build_panel

        other_panel, _ = build_panel(demo_rows, demo_roster, "EFF")
        with pytest.raises(StaleSampleError):
            predict_match(demo_sample, other_panel)

    def test_deterministic_in_seed(self, demo_panel, demo_sample):
        a = predict_match(demo_sample, demo_panel, seed=7)
        b = predict_match(demo_sample, demo_panel, seed=7)
        c = predict_match(demo_sample, demo_panel, seed=8)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_variance_free_limit_returns_intercept(self, demo_panel):
        sample = constant_sample(demo_panel, beta0=2.0)
        pred = predict_match(sample, demo_panel, seed=0)
        assert np.allclose(pred.values, 2.0, atol=1e-9)

    def test_home_effect_isolated(self, demo_panel):
        sample = constant_sample(demo_panel, beta_H=1.0)
        home = predict_match(sample, demo_panel, MatchScenario(home=True), seed=0)
        away = predict_match(sample, demo_panel, MatchScenario(home=False), seed=0)
        assert np.allclose(home.values - away.values, 1.0, atol=1e-9)

    def test_slope_uses_scenario_match_index(self, demo_panel):
        sample = constant_sample(demo_panel, beta1=0.5)
        early = predict_match(sample, demo_panel, MatchScenario(match_index=2), seed=0)
        late = predict_match(sample, demo_panel, MatchScenario(match_index=10), seed=0)
        assert np.allclose(late.values - early.values, 0.5 * 8, atol=1e-8)

    def test_shared_effect_moves_all_players_together(self, demo_panel):
        sample = constant_sample(demo_panel, sigma0m=2.0)
        pred = predict_match(sample, demo_panel,
                             MatchScenario(shared_match_effect=True), seed=1)
        # noise is off, so each row is exactly the common new-match effect
        spread = pred.values.max(axis=1) - pred.values.min(axis=1)
        assert np.allclose(spread, 0.0, atol=1e-9)
        assert pred.values.std() > 0.5  # the effect itself does vary by draw

    def test_per_player_effect_decorrelates(self, demo_panel):
        sample = constant_sample(demo_panel, sigma0m=2.0)
        pred = predict_match(sample, demo_panel,
                             MatchScenario(shared_match_effect=False), seed=1)
        spread = pred.values.max(axis=1) - pred.values.min(axis=1)
        assert np.median(spread) > 1.0

    def test_female_and_class_covariates_enter(self, demo_panel):
        sample = constant_sample(demo_panel, beta_W=1.0, beta_C=2.0)
        pred = predict_match(sample, demo_panel, seed=0)
        for k, entry in enumerate(demo_panel.roster):
            expected = 1.0 * entry.is_female + 2.0 * entry.classification
            assert pred.values[:, k] == pytest.approx(expected, abs=1e-8)

    def test_monte_carlo_mean_matches_analytic_average(self, demo_panel,
                                                        demo_sample):
        pred = predict_match(demo_sample, demo_panel, seed=42)
        j = pred.scenario.match_index
        s = demo_sample.size
        for k, entry in enumerate(demo_panel.roster):
            mu = (demo_sample.scalars["beta0"]
                  + demo_sample.blocks["b0"][:, k]
                  + demo_sample.scalars["beta_W"] * entry.is_female
                  + demo_sample.scalars["beta_C"] * entry.classification
                  + (demo_sample.scalars["beta1"]
                     + demo_sample.blocks["b1"][:, k]) * j)
            tol = 3.0 * pred.values[:, k].std(ddof=1) / np.sqrt(s)
            assert abs(pred.values[:, k].mean() - mu.mean()) < tol
