"""Mixed-model state and log-densities.

The longitudinal model is a Gaussian mixed linear model for per-minute
performance y_ij of player i at match j:

    y_ij ~ N(mu_ij, sigma^2)
    mu_ij = beta0 + b0[i] + b0m[j] + beta_W * female_i + beta_C * class_i
            + beta_H * home_j + (beta1 + b1[i]) * j

with independent normal random effects b0[i] ~ N(0, sigma0^2),
b1[i] ~ N(0, sigma1^2), b0m[j] ~ N(0, sigma0m^2). Priors are wide normals on
the five fixed effects and uniform(0, upper) on the four scale parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boxscore import Panel

FIXED_EFFECTS = ("beta0", "beta_W", "beta_C", "beta_H", "beta1")
SCALES = ("sigma", "sigma0", "sigma0m", "sigma1")

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class PriorSpec:
    """Independent minimally-informative priors."""

    fixed_effect_sd: float = 10.0
    scale_upper: float = 10.0

    def __post_init__(self):
        if self.fixed_effect_sd <= 0 or self.scale_upper <= 0:
            raise ValueError("prior hyperparameters must be strictly positive")


@dataclass(frozen=True)
class ParameterDraw:
    """One joint state of fixed effects, scales, and random effects."""

    beta0: float
    beta_W: float
    beta_C: float
    beta_H: float
    beta1: float
    sigma: float
    sigma0: float
    sigma0m: float
    sigma1: float
    b0: np.ndarray   # length N player intercepts
    b1: np.ndarray   # length N player slopes
    b0m: np.ndarray  # length M match effects

    def __post_init__(self):
        for name in SCALES:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if len(self.b0) != len(self.b1):
            raise ValueError("b0 and b1 must have equal length")

    @property
    def n_players(self) -> int:
        return len(self.b0)

    @property
    def n_matches(self) -> int:
        return len(self.b0m)


@dataclass(frozen=True)
class PanelArrays:
    """Panel unpacked into aligned numpy arrays (0-based index vectors)."""

    player: np.ndarray      # int, 0-based, per observation
    match: np.ndarray       # int, 0-based, per observation
    y: np.ndarray           # metric per minute
    home: np.ndarray        # 0/1 float per observation
    match_number: np.ndarray  # 1-based match index as float (slope covariate)
    female: np.ndarray      # 0/1 float per player
    classification: np.ndarray  # per player
    n_players: int
    n_matches: int
    home_by_match: np.ndarray = field(default=None)  # 0/1 float per match

    @classmethod
    def from_panel(cls, panel: Panel) -> "PanelArrays":
        player = np.array([o.player_index - 1 for o in panel.observations])
        match = np.array([o.match_index - 1 for o in panel.observations])
        y = np.array([o.value for o in panel.observations], dtype=float)
        home = np.array([float(o.home) for o in panel.observations])
        home_by_match = np.zeros(panel.match_count)
        home_by_match[match] = home
        return cls(
            player=player,
            match=match,
            y=y,
            home=home,
            match_number=(match + 1).astype(float),
            female=np.array([float(e.is_female) for e in panel.roster]),
            classification=np.array([e.classification for e in panel.roster]),
            n_players=panel.n_players,
            n_matches=panel.match_count,
            home_by_match=home_by_match,
        )

    def mean_vector(self, draw: ParameterDraw) -> np.ndarray:
        """mu for every observation under the given draw."""
        return (
            draw.beta0
            + draw.b0[self.player]
            + draw.b0m[self.match]
            + draw.beta_W * self.female[self.player]
            + draw.beta_C * self.classification[self.player]
            + draw.beta_H * self.home
            + (draw.beta1 + draw.b1[self.player]) * self.match_number
        )


def check_dimensions(draw: ParameterDraw, panel: Panel) -> None:
    if draw.n_players != panel.n_players or draw.n_matches != panel.match_count:
        raise ValueError(
            f"draw is sized for {draw.n_players} players / {draw.n_matches} "
            f"matches, panel has {panel.n_players} / {panel.match_count}"
        )


def linear_predictor(
    draw: ParameterDraw,
    panel: Panel,
    i: int,
    j: int,
    home: bool,
    match_effect: float | None = None,
) -> float:
    """Mean performance of player i at match j.

    For j beyond the fitted matches the caller must supply the new match's
    random effect via ``match_effect`` (there is no fitted b0m for it).
    """
    check_dimensions(draw, panel)
    if not 1 <= i <= panel.n_players:
        raise IndexError(f"player index {i} out of range 1..{panel.n_players}")
    if j < 1:
        raise IndexError(f"match index {j} must be >= 1")
    if match_effect is None:
        if j > panel.match_count:
            raise IndexError(
                f"match index {j} exceeds fitted matches "
                f"({panel.match_count}); pass match_effect for a new match"
            )
        match_effect = float(draw.b0m[j - 1])
    entry = panel.roster[i - 1]
    return (
        draw.beta0
        + float(draw.b0[i - 1])
        + match_effect
        + draw.beta_W * float(entry.is_female)
        + draw.beta_C * entry.classification
        + draw.beta_H * float(home)
        + (draw.beta1 + float(draw.b1[i - 1])) * j
    )


def gaussian_logpdf(x, mean, sd):
    z = (np.asarray(x) - mean) / sd
    return -0.5 * (_LOG_2PI + z * z) - np.log(sd)


def log_likelihood(draw: ParameterDraw, panel: Panel,
                   arrays: PanelArrays | None = None) -> float:
    """Sum of Gaussian log-densities over all panel observations."""
    if draw.sigma <= 0:
        raise ValueError("sigma must be strictly positive")
    check_dimensions(draw, panel)
    if arrays is None:
        arrays = PanelArrays.from_panel(panel)
    mu = arrays.mean_vector(draw)
    return float(np.sum(gaussian_logpdf(arrays.y, mu, draw.sigma)))


def log_prior(draw: ParameterDraw, prior: PriorSpec) -> float:
    """Joint log-density of priors and random-effect distributions.

    Returns -inf when any scale falls outside its uniform support rather
    than raising.
    """
    for name in SCALES:
        value = getattr(draw, name)
        if not 0.0 < value < prior.scale_upper:
            return float("-inf")
    total = -4.0 * math.log(prior.scale_upper)
    for name in FIXED_EFFECTS:
        total += float(gaussian_logpdf(getattr(draw, name), 0.0,
                                       prior.fixed_effect_sd))
    total += float(np.sum(gaussian_logpdf(draw.b0, 0.0, draw.sigma0)))
    total += float(np.sum(gaussian_logpdf(draw.b1, 0.0, draw.sigma1)))
    total += float(np.sum(gaussian_logpdf(draw.b0m, 0.0, draw.sigma0m)))
    return total
