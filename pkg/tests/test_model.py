"""Linear predictor, likelihood, and prior density."""

import math

import numpy as np
import pytest
from scipy import stats

from lineuplab.boxscore import Observation, Panel, RosterEntry
from lineuplab.model import (
    PanelArrays,
    ParameterDraw,
    PriorSpec,
    check_dimensions,
    linear_predictor,
    log_likelihood,
    log_prior,
)

ROSTER = (
    RosterEntry(1, "Ada", 2.5, True),
    RosterEntry(2, "Ben", 4.0, False),
)
OBS = (
    Observation(1, 1, 0.4, True),
    Observation(1, 2, 0.1, False),
    Observation(2, 1, 0.9, True),
    Observation(2, 3, -0.2, False),
)
PANEL = Panel(ROSTER, OBS, "EFF", 3)


def make_draw(**overrides):
    base = dict(
        beta0=0.2, beta_W=0.3, beta_C=0.05, beta_H=0.1, beta1=0.01,
        sigma=0.5, sigma0=1.0, sigma0m=1.0, sigma1=0.1,
        b0=np.array([0.4, -0.3]), b1=np.array([0.02, -0.01]),
        b0m=np.array([0.1, -0.2, 0.05]),
    )
    base.update(overrides)
    return ParameterDraw(**base)


class TestLinearPredictor:
    def test_hand_computed_mean(self):
        draw = make_draw()
        # player 1 (female, class 2.5) at home match 2:
        # 0.2 + 0.4 + (-0.2) + 0.3 + 0.05*2.5 + 0.1 + (0.01 + 0.02)*2
        expected = 0.2 + 0.4 - 0.2 + 0.3 + 0.125 + 0.1 + 0.03 * 2
        assert linear_predictor(draw, PANEL, 1, 2, True) == pytest.approx(expected, abs=1e-12)

    def test_away_drops_home_coefficient(self):
        draw = make_draw()
        at_home = linear_predictor(draw, PANEL, 2, 1, True)
        away = linear_predictor(draw, PANEL, 2, 1, False)
        assert at_home - away == pytest.approx(draw.beta_H)

    def test_slope_advances_with_match_number(self):
        draw = make_draw()
        step = (linear_predictor(draw, PANEL, 1, 3, False)
                - linear_predictor(draw, PANEL, 1, 2, False))
        assert step == pytest.approx(draw.beta1 + draw.b1[0] + draw.b0m[2] - draw.b0m[1])

    def test_future_match_requires_effect(self):
        draw = make_draw()
        with pytest.raises(IndexError):
            linear_predictor(draw, PANEL, 1, 4, False)
        value = linear_predictor(draw, PANEL, 1, 4, False, match_effect=0.0)
        assert math.isfinite(value)

    def test_all_zero_parameters_give_zero(self):
        draw = make_draw(beta0=0.0, beta_W=0.0, beta_C=0.0, beta_H=0.0,
                         beta1=0.0, b0=np.zeros(2), b1=np.zeros(2),
                         b0m=np.zeros(3))
        for i in (1, 2):
            for j in (1, 2, 3):
                assert linear_predictor(draw, PANEL, i, j, False) == 0.0

    def test_intercept_plus_classification(self):
        draw = make_draw(beta0=1.0, beta_W=0.0, beta_C=2.0, beta_H=0.0,
                         beta1=0.0, b0=np.zeros(2), b1=np.zeros(2),
                         b0m=np.zeros(3))
        # player 2 has classification 4.0 here; use a 4.5 roster variant
        roster45 = (RosterEntry(1, "Ada", 2.5, True), RosterEntry(2, "Ben", 4.5, False))
        panel45 = Panel(roster45, OBS, "EFF", 3)
        assert linear_predictor(draw, panel45, 2, 2, False) == pytest.approx(10.0)

    def test_slope_times_match_number(self):
        draw = make_draw(beta0=0.0, beta_W=0.0, beta_C=0.0, beta_H=0.0,
                         beta1=0.1, b0=np.zeros(2),
                         b1=np.array([-0.05, 0.0]), b0m=np.zeros(18))
        panel18 = Panel(PANEL.roster,
                        tuple(Observation(1, j, 0.0, False) for j in range(1, 19)),
                        "EFF", 18)
        assert linear_predictor(draw, panel18, 1, 18, False) == pytest.approx(0.9)

    def test_out_of_range_player(self):
        with pytest.raises(IndexError):
            linear_predictor(make_draw(), PANEL, 3, 1, False)
        with pytest.raises(IndexError):
            linear_predictor(make_draw(), PANEL, 0, 1, False)


class TestLikelihood:
    def test_matches_scipy_normal(self):
        draw = make_draw()
        arrays = PanelArrays.from_panel(PANEL)
        mu = arrays.mean_vector(draw)
        expected = stats.norm.logpdf(arrays.y, mu, draw.sigma).sum()
        assert log_likelihood(draw, PANEL) == pytest.approx(expected, rel=1e-12)

    def test_mean_vector_agrees_with_pointwise(self):
        draw = make_draw()
        arrays = PanelArrays.from_panel(PANEL)
        mu = arrays.mean_vector(draw)
        for k, obs in enumerate(PANEL.observations):
            point = linear_predictor(draw, PANEL, obs.player_index,
                                     obs.match_index, obs.home)
            assert mu[k] == pytest.approx(point, abs=1e-12)

    def test_dimension_mismatch(self):
        draw = make_draw(b0=np.zeros(3), b1=np.zeros(3))
        with pytest.raises(ValueError):
            check_dimensions(draw, PANEL)


class TestPrior:
    def test_outside_scale_support_is_minus_inf(self):
        spec = PriorSpec()
        assert log_prior(make_draw(sigma=10.0), spec) == -math.inf
        assert log_prior(make_draw(sigma=10.5), spec) == -math.inf

    def test_gaussian_parts_match_scipy(self):
        draw = make_draw()
        spec = PriorSpec()
        expected = -4.0 * math.log(spec.scale_upper)
        for name in ("beta0", "beta_W", "beta_C", "beta_H", "beta1"):
            expected += stats.norm.logpdf(getattr(draw, name), 0, spec.fixed_effect_sd)
        expected += stats.norm.logpdf(draw.b0, 0, draw.sigma0).sum()
        expected += stats.norm.logpdf(draw.b1, 0, draw.sigma1).sum()
        expected += stats.norm.logpdf(draw.b0m, 0, draw.sigma0m).sum()
        assert log_prior(draw, spec) == pytest.approx(expected, rel=1e-12)

    def test_nonpositive_scale_rejected_at_construction(self):
        with pytest.raises(ValueError):
            make_draw(sigma=0.0)
        with pytest.raises(ValueError):
            make_draw(sigma0=-1.0)
