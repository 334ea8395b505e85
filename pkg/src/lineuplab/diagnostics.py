"""Model checking and chain health.

Two concerns live here. Cross-validated PIT values estimate, for every panel
observation, the probability that a replicate drawn from the model given all
other data falls at or below what was actually observed; under a
well-specified model those values are uniform on (0, 1). They are computed
by self-normalized importance sampling over the posterior draws, with
weights equal to the reciprocal conditional density of the held-out
observation. Chain health is summarized by split R-hat and rank-normalized
effective sample size per scalar parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import ndtr

from .boxscore import Panel
from .errors import StaleSampleError
from .model import PanelArrays
from .sampler import PosteriorSample

_LOG_2PI = math.log(2.0 * math.pi)

# entries whose importance weights concentrate this badly are unreliable
ESS_FLAG_FRACTION = 0.01


def _draw_means(sample: PosteriorSample, arrays: PanelArrays) -> np.ndarray:
    """Observation means for every draw, shape (S, n_obs)."""
    return (
        sample.scalars["beta0"][:, None]
        + sample.blocks["b0"][:, arrays.player]
        + sample.blocks["b0m"][:, arrays.match]
        + sample.scalars["beta_W"][:, None] * arrays.female[arrays.player][None, :]
        + sample.scalars["beta_C"][:, None]
        * arrays.classification[arrays.player][None, :]
        + sample.scalars["beta_H"][:, None] * arrays.home[None, :]
        + (sample.scalars["beta1"][:, None] + sample.blocks["b1"][:, arrays.player])
        * arrays.match_number[None, :]
    )


def _normalized_weights(sample, arrays):
    """Self-normalized importance weights 1/f(y_ij | draw) per observation.

    Returns (mu, sigma, w) with w scaled so each column's maximum is 1;
    normalization constants cancel in the self-normalized estimator.
    """
    mu = _draw_means(sample, arrays)
    sigma = sample.scalars["sigma"][:, None]
    with np.errstate(over="ignore", invalid="ignore"):
        z = (arrays.y[None, :] - mu) / sigma
        log_w = 0.5 * (_LOG_2PI + z * z) + np.log(sigma)
        log_w -= log_w.max(axis=0, keepdims=True)
        return mu, sigma, np.exp(log_w)


@dataclass(frozen=True)
class PitTable:
    """Cross-validated PIT per observation, with reliability bookkeeping."""

    pit: dict[tuple[int, int], float]
    ess: dict[tuple[int, int], float]
    flagged: frozenset[tuple[int, int]]
    order: tuple[tuple[int, int], ...]
    n_draws: int

    def pooled(self, include_flagged: bool = False) -> np.ndarray:
        keys = self.order if include_flagged else [
            k for k in self.order if k not in self.flagged
        ]
        return np.array([self.pit[k] for k in keys], dtype=float)

    def by_match(self, include_flagged: bool = False) -> dict[int, list[float]]:
        grouped: dict[int, list[float]] = {}
        for (i, j) in self.order:
            if not include_flagged and (i, j) in self.flagged:
                continue
            grouped.setdefault(j, []).append(self.pit[(i, j)])
        return grouped


def cross_validated_pit(sample: PosteriorSample, panel: Panel) -> PitTable:
    """Leave-one-out PIT for every observation via importance sampling.

    Entries whose effective importance sample size falls below
    ESS_FLAG_FRACTION of the draw count (or whose weights degenerate to
    non-finite values) are flagged rather than trusted.
    """
    if sample.panel_fingerprint != panel.fingerprint:
        raise StaleSampleError(
            "posterior sample was fit to a different panel than the one "
            "being checked"
        )
    arrays = PanelArrays.from_panel(panel)
    mu, sigma, w = _normalized_weights(sample, arrays)
    z = (arrays.y[None, :] - mu) / sigma

    with np.errstate(invalid="ignore", divide="ignore"):
        w_sum = w.sum(axis=0)
        pit_values = (w * ndtr(z)).sum(axis=0) / w_sum
        ess_values = w_sum**2 / (w**2).sum(axis=0)

    n_draws = sample.size
    pit: dict[tuple[int, int], float] = {}
    ess: dict[tuple[int, int], float] = {}
    flagged = set()
    order = []
    for k, obs in enumerate(panel.observations):
        key = (obs.player_index, obs.match_index)
        order.append(key)
        p, e = float(pit_values[k]), float(ess_values[k])
        pit[key] = p
        ess[key] = e
        if not (math.isfinite(p) and math.isfinite(e)) or e < n_draws * ESS_FLAG_FRACTION:
            flagged.add(key)
    return PitTable(
        pit=pit, ess=ess, flagged=frozenset(flagged),
        order=tuple(order), n_draws=n_draws,
    )


def predictive_mixture_cdf(sample: PosteriorSample, panel: Panel,
                           at) -> np.ndarray:
    """The PIT estimator evaluated at counterfactual observation values.

    Weights stay frozen at the actually observed data, so for each
    observation this is a proper (non-decreasing) CDF of the counterfactual
    value ``at``.
    """
    if sample.panel_fingerprint != panel.fingerprint:
        raise StaleSampleError("posterior sample does not match this panel")
    arrays = PanelArrays.from_panel(panel)
    mu, sigma, w = _normalized_weights(sample, arrays)
    at = np.broadcast_to(np.asarray(at, dtype=float), arrays.y.shape)
    z_at = (at[None, :] - mu) / sigma
    return (w * ndtr(z_at)).sum(axis=0) / w.sum(axis=0)


def _split_halves(chains) -> np.ndarray:
    arrays = [np.asarray(c, dtype=float) for c in chains]
    if len(arrays) < 1:
        raise ValueError("need at least one chain")
    length = len(arrays[0])
    if any(len(c) != length for c in arrays):
        raise ValueError("chains must have equal length")
    if length < 4:
        raise ValueError("need at least 4 draws per chain")
    half = (length // 2 * 2) // 2
    halves = []
    for c in arrays:
        halves.append(c[:half])
        halves.append(c[half:2 * half])
    return np.stack(halves)


def split_rhat(chains) -> float:
    """Split-chain potential scale reduction factor.

    Each chain is cut in half so within-chain drift shows up as
    between-chain disagreement. Constant traces define R-hat as 1.0.
    """
    halves = _split_halves(chains)
    n = halves.shape[1]
    within = halves.var(axis=1, ddof=1).mean()
    between_over_n = halves.mean(axis=1).var(ddof=1)
    if within == 0.0:
        return 1.0 if between_over_n == 0.0 else math.inf
    var_plus = (n - 1) / n * within + between_over_n
    return float(math.sqrt(var_plus / within))


def zero_variance(chains) -> bool:
    """True when every draw across all chains is the same value."""
    pooled = np.concatenate([np.asarray(c, dtype=float) for c in chains])
    return bool(np.all(pooled == pooled[0]))


def _autocovariance(x: np.ndarray) -> np.ndarray:
    n = len(x)
    centered = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    spectrum = np.fft.rfft(centered, size)
    acov = np.fft.irfft(spectrum * np.conjugate(spectrum), size)[:n]
    return acov / n


def effective_sample_size(chains) -> float:
    """Bulk effective sample size on rank-normalized split chains.

    Autocorrelation sums use the initial positive monotone sequence over
    paired lags, which truncates the noisy tail of the autocorrelation
    estimate. Constant traces return the raw draw count.
    """
    halves = _split_halves(chains)
    m, n = halves.shape
    total = m * n
    if np.all(halves == halves.flat[0]):
        return float(total)

    ranks = stats.rankdata(halves, method="average").reshape(halves.shape)
    z = stats.norm.ppf((ranks - 0.375) / (halves.size + 0.25))

    within = z.var(axis=1, ddof=1).mean()
    between_over_n = z.mean(axis=1).var(ddof=1) if m > 1 else 0.0
    var_plus = (n - 1) / n * within + between_over_n
    if var_plus == 0.0:
        return float(total)

    acov = np.mean([_autocovariance(z[c]) for c in range(m)], axis=0)
    rho = 1.0 - (within - acov) / var_plus
    rho[0] = 1.0

    pair_sums = []
    k = 0
    while 2 * k + 1 < len(rho):
        pair = rho[2 * k] + rho[2 * k + 1]
        if pair <= 0.0:
            break
        if pair_sums and pair > pair_sums[-1]:
            pair = pair_sums[-1]
        pair_sums.append(pair)
        k += 1
    tau = max(2.0 * sum(pair_sums) - 1.0, 1.0 / math.log10(total + 10.0))
    return float(total / tau)


@dataclass(frozen=True)
class ConvergenceRow:
    parameter: str
    rhat: float
    ess: float
    zero_variance: bool = False


def convergence_table(sample: PosteriorSample) -> list[ConvergenceRow]:
    """Split R-hat and bulk ESS for every scalar column of the sample."""
    rows = []
    for name in sample.column_names():
        traces = sample.by_chain(name)
        flat = zero_variance(traces)
        rows.append(ConvergenceRow(
            parameter=name,
            rhat=1.0 if flat else split_rhat(traces),
            ess=float(sample.size) if flat else effective_sample_size(traces),
            zero_variance=flat,
        ))
    return rows


def convergence_warnings(rows: list[ConvergenceRow],
                         rhat_limit: float = 1.05,
                         ess_floor: float = 100.0) -> list[str]:
    warnings = []
    for row in rows:
        if row.zero_variance:
            warnings.append(f"{row.parameter}: trace has zero variance")
            continue
        if row.rhat > rhat_limit:
            warnings.append(
                f"{row.parameter}: split R-hat {row.rhat:.3f} exceeds {rhat_limit}"
            )
        if row.ess < ess_floor:
            warnings.append(
                f"{row.parameter}: effective sample size {row.ess:.0f} "
                f"below {ess_floor:.0f}"
            )
    return warnings


def ks_uniform(values) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov test of values against U(0, 1)."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one value")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("values must lie within [0, 1]")
    result = stats.kstest(arr, "uniform")
    return float(result.statistic), float(result.pvalue)
