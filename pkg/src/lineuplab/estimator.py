"""scikit-learn style facade over the fit / predict / optimize pipeline.

``LineupSelector`` wires the panel builder, the Gibbs sampler, the posterior
predictive simulator, and the lineup optimizer into a single estimator with
the usual ``fit`` / ``predict`` / ``get_params`` surface, so it can be cloned,
grid-searched, or embedded in tooling that expects that protocol.
"""

from __future__ import annotations

import warnings

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .analytics import LineupPosterior, inclusion_table
from .boxscore import BoxScoreRow, RosterEntry, build_panel
from .diagnostics import (
    PitTable,
    convergence_table,
    convergence_warnings,
    cross_validated_pit,
)
from .optimizer import RuleSet, SelectionConstraints, solve_posterior
from .predictive import MatchScenario, PredictiveSample, predict_match
from .sampler import SamplerConfig, run_sampler
from .validation import check_metric, check_player_indices, check_profile, check_seed


class LineupSelector(BaseEstimator):
    """Fit the longitudinal performance model and pick lineups from it.

    Parameters mirror the CLI: ``metric`` selects the per-minute response,
    ``profile`` picks the sampler schedule ("desk" is short, "paper" is the
    long production schedule), and ``burn_in`` / ``iterations`` / ``thin``
    override individual schedule fields when given. ``rules`` defaults to the
    RBBL rule set. ``X`` for :meth:`fit` is a ``(rows, roster)`` pair as
    produced by ``parse_boxscores`` and ``parse_roster``.
    """

    def __init__(
        self,
        metric: str = "WIN_SCORE",
        profile: str = "desk",
        chains: int = 3,
        seed: int = 0,
        burn_in: int | None = None,
        iterations: int | None = None,
        thin: int | None = None,
        min_season_minutes: float = 40.0,
        rules: RuleSet | None = None,
        home: bool = False,
        match_index: int | None = None,
        shared_match_effect: bool = True,
        engine: str = "branch_and_bound",
    ):
        self.metric = metric
        self.profile = profile
        self.chains = chains
        self.seed = seed
        self.burn_in = burn_in
        self.iterations = iterations
        self.thin = thin
        self.min_season_minutes = min_season_minutes
        self.rules = rules
        self.home = home
        self.match_index = match_index
        self.shared_match_effect = shared_match_effect
        self.engine = engine

    def _sampler_config(self) -> SamplerConfig:
        profile = check_profile(self.profile)
        overrides = {"chains": self.chains, "seed": check_seed(self.seed)}
        for name in ("burn_in", "iterations", "thin"):
            value = getattr(self, name)
            if value is not None:
                overrides[name] = value
        factory = SamplerConfig.desk if profile == "desk" else SamplerConfig.paper
        return factory(**overrides)

    def _scenario(self) -> MatchScenario:
        return MatchScenario(
            home=self.home,
            match_index=self.match_index,
            shared_match_effect=self.shared_match_effect,
        )

    @staticmethod
    def _unpack(X) -> tuple[list[BoxScoreRow], list[RosterEntry]]:
        if isinstance(X, dict):
            try:
                return list(X["rows"]), list(X["roster"])
            except KeyError as exc:
                raise TypeError("dict input must have 'rows' and 'roster' keys") from exc
        if isinstance(X, (tuple, list)) and len(X) == 2:
            rows, roster = X
            return list(rows), list(roster)
        raise TypeError(
            "X must be a (rows, roster) pair or a {'rows': ..., 'roster': ...} dict"
        )

    def fit(self, X, y=None) -> "LineupSelector":
        """Build the observation panel and draw from the posterior.

        Sets ``panel_``, ``mapping_`` (original index -> panel index),
        ``sample_``, ``convergence_``, and ``warnings_``. Convergence
        warnings are also emitted via ``warnings.warn``.
        """
        rows, roster = self._unpack(X)
        metric = check_metric(self.metric)
        panel, mapping = build_panel(
            rows, roster, metric, min_season_minutes=self.min_season_minutes
        )
        sample = run_sampler(panel, self._sampler_config())
        self.panel_ = panel
        self.mapping_ = mapping
        self.sample_ = sample
        self.convergence_ = convergence_table(sample)
        self.warnings_ = convergence_warnings(self.convergence_)
        for message in self.warnings_:
            warnings.warn(message, stacklevel=2)
        return self

    def _check_fitted(self):
        if not hasattr(self, "sample_"):
            raise NotFittedError(
                "this LineupSelector instance is not fitted yet; call fit first"
            )

    def predict(self, X=None, seed: int | None = None) -> PredictiveSample:
        """Simulate every player's per-minute performance in the next match.

        ``X`` is ignored; the scenario comes from the constructor parameters.
        """
        self._check_fitted()
        predictive_seed = check_seed(self.seed if seed is None else seed)
        return predict_match(self.sample_, self.panel_, self._scenario(), seed=predictive_seed)

    def optimal_lineups(
        self,
        pinned=(),
        banned=(),
        seed: int | None = None,
    ) -> LineupPosterior:
        """Solve the lineup problem for every posterior draw."""
        self._check_fitted()
        predictive = self.predict(seed=seed)
        n = self.panel_.n_players
        constraints = SelectionConstraints(
            pinned=check_player_indices(pinned, "pinned", n),
            banned=check_player_indices(banned, "banned", n),
        )
        rules = self.rules if self.rules is not None else RuleSet()
        return solve_posterior(
            predictive, self.panel_.roster, rules, constraints, engine=self.engine
        )

    def inclusion(self, pinned=(), banned=(), seed: int | None = None) -> list[dict]:
        """Per-player probability of appearing in the optimal lineup."""
        posterior = self.optimal_lineups(pinned=pinned, banned=banned, seed=seed)
        return inclusion_table(posterior, self.panel_.roster)

    def pit(self) -> PitTable:
        """Leave-one-out calibration check for the fitted model."""
        self._check_fitted()
        return cross_validated_pit(self.sample_, self.panel_)
