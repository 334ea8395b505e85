"""Posterior lineup selection for classification-capped wheelchair basketball.

The pipeline: parse box scores into a per-minute longitudinal panel, fit a
Bayesian mixed model by MCMC, simulate every player's performance in a
hypothetical next match, solve one capacity-constrained selection problem
per posterior draw, and summarize the resulting distribution over lineups.
"""

from .analytics import (
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
from .boxscore import (
    METRICS,
    BoxScoreRow,
    Observation,
    Panel,
    RosterEntry,
    build_panel,
    compute_eff,
    compute_pir,
    compute_win_score,
    parse_boxscores,
    parse_roster,
)
from .diagnostics import (
    ConvergenceRow,
    PitTable,
    convergence_table,
    convergence_warnings,
    cross_validated_pit,
    effective_sample_size,
    ks_uniform,
    predictive_mixture_cdf,
    split_rhat,
)
from .errors import (
    DataValidationError,
    EmptyPanelError,
    InfeasibleError,
    LineupLabError,
    SamplingError,
    SchemaError,
    StaleSampleError,
    UndefinedConditionalError,
)
from .estimator import LineupSelector
from .model import ParameterDraw, PriorSpec, linear_predictor, log_likelihood, log_prior
from .optimizer import (
    Lineup,
    RuleSet,
    SelectionConstraints,
    capacity_for,
    class_sum,
    enumerate_valid_lineups,
    female_count,
    solve_posterior,
    solve_single,
)
from .predictive import MatchScenario, PredictiveSample, predict_match
from .runstore import FitResult, RunStore, derive_run_id
from .sampler import PosteriorSample, SamplerConfig, run_sampler

__version__ = "0.1.0"

__all__ = [
    "BoxScoreRow",
    "ConvergenceRow",
    "DataValidationError",
    "EmptyPanelError",
    "FitResult",
    "InfeasibleError",
    "Lineup",
    "LineupLabError",
    "LineupPosterior",
    "LineupSelector",
    "METRICS",
    "MatchScenario",
    "Observation",
    "Panel",
    "ParameterDraw",
    "PitTable",
    "PosteriorSample",
    "PredictiveSample",
    "PriorSpec",
    "RosterEntry",
    "RuleSet",
    "RunStore",
    "SamplerConfig",
    "SamplingError",
    "SchemaError",
    "SelectionConstraints",
    "StaleSampleError",
    "UndefinedConditionalError",
    "build_panel",
    "capacity_for",
    "class_sum",
    "completion_table",
    "compute_eff",
    "compute_pir",
    "compute_win_score",
    "conditional_probability",
    "convergence_table",
    "convergence_warnings",
    "cross_validated_pit",
    "derive_run_id",
    "effective_sample_size",
    "enumerate_valid_lineups",
    "female_count",
    "inclusion_probability",
    "inclusion_table",
    "joint_probability",
    "ks_uniform",
    "linear_predictor",
    "lineup_probabilities",
    "log_likelihood",
    "log_prior",
    "monte_carlo_se",
    "parse_boxscores",
    "parse_roster",
    "predict_match",
    "predictive_mixture_cdf",
    "renormalize_absence",
    "resolve_absence",
    "run_sampler",
    "solve_posterior",
    "solve_single",
    "split_rhat",
    "__version__",
]
