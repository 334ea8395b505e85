"""Posterior predictive simulation of one hypothetical future match.

Prediction uses the composition method: for each retained posterior draw,
first simulate the unknowns of the new match (its random effect), then
simulate each player's per-minute value from the sampling model given that
draw. Pooling across draws integrates over parameter uncertainty.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .boxscore import Panel
from .errors import StaleSampleError
from .sampler import PosteriorSample


@dataclass(frozen=True)
class MatchScenario:
    """The hypothetical match: venue, slope index, and effect sharing.

    ``match_index`` of None means the first unplayed match (M + 1). When
    ``shared_match_effect`` is set, one new-match random effect is drawn per
    posterior draw and applied to every player; otherwise each player gets an
    independent draw of it.
    """

    home: bool = False
    match_index: int | None = None
    shared_match_effect: bool = True

    def __post_init__(self):
        if self.match_index is not None and self.match_index < 1:
            raise ValueError("match_index must be >= 1")

    def resolve(self, match_count: int) -> "MatchScenario":
        """Fill in the default match index once M is known."""
        if self.match_index is not None:
            return self
        return replace(self, match_index=match_count + 1)


@dataclass(frozen=True)
class PredictiveSample:
    """S x N matrix of simulated per-minute values for the next match."""

    values: np.ndarray
    scenario: MatchScenario
    panel_fingerprint: str
    player_names: tuple[str, ...]
    metric: str
    seed: int

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("predictive values must be an S x N matrix")
        if self.values.shape[1] != len(self.player_names):
            raise ValueError(
                f"predictive matrix has {self.values.shape[1]} columns, "
                f"roster has {len(self.player_names)} players"
            )
        if self.scenario.match_index is None:
            raise ValueError("scenario must carry a resolved match index")

    @property
    def n_draws(self) -> int:
        return self.values.shape[0]

    @property
    def n_players(self) -> int:
        return self.values.shape[1]


def predict_match(
    sample: PosteriorSample,
    panel: Panel,
    scenario: MatchScenario | None = None,
    seed: int = 0,
) -> PredictiveSample:
    """Simulate every player's per-minute value in one future match.

    For each posterior draw s the new match contributes a fresh random
    effect from N(0, sigma0m(s)^2); by default a single effect is shared by
    all players because the scenario is one match. Player i's value is then
    drawn from N(mu_i(s), sigma(s)^2), with mu_i(s) the linear predictor
    evaluated at the scenario's match index and venue. The result is
    bit-reproducible given (sample, scenario, seed).
    """
    if scenario is None:
        scenario = MatchScenario()
    if sample.panel_fingerprint != panel.fingerprint:
        raise StaleSampleError(
            "posterior sample was fit to a different panel "
            f"({sample.panel_fingerprint[:12]}... != {panel.fingerprint[:12]}...)"
        )
    scenario = scenario.resolve(panel.match_count)

    n_draws = sample.size
    n = sample.n_players
    female = np.array([float(e.is_female) for e in panel.roster])
    classification = np.array([e.classification for e in panel.roster])

    rng = np.random.Generator(np.random.Philox(key=seed))
    effect_shape = (n_draws, 1) if scenario.shared_match_effect else (n_draws, n)
    new_effect = rng.standard_normal(effect_shape) * sample.scalars["sigma0m"][:, None]

    j = float(scenario.match_index)
    mu = (
        sample.scalars["beta0"][:, None]
        + sample.blocks["b0"]
        + new_effect
        + sample.scalars["beta_W"][:, None] * female[None, :]
        + sample.scalars["beta_C"][:, None] * classification[None, :]
        + sample.scalars["beta_H"][:, None] * float(scenario.home)
        + (sample.scalars["beta1"][:, None] + sample.blocks["b1"]) * j
    )
    noise = rng.standard_normal((n_draws, n)) * sample.scalars["sigma"][:, None]
    return PredictiveSample(
        values=mu + noise,
        scenario=scenario,
        panel_fingerprint=panel.fingerprint,
        player_names=tuple(e.name for e in panel.roster),
        metric=panel.metric,
        seed=seed,
    )
