"""Metropolis-within-Gibbs sampler for the mixed performance model.

Every location parameter (fixed effects and random-effect coordinates) has a
Gaussian full conditional because both likelihood and priors are Gaussian, so
those are updated with exact Gibbs draws. The four standard-deviation
parameters carry uniform priors, whose full conditionals are proportional to

    sigma ** -n * exp(-ss / (2 sigma^2))   on (0, upper)

with n the number of governed terms and ss their sum of squares; these are
updated by shrinkage slice sampling over the bounded support, which needs no
tuning.

Coordinate-wise Gibbs mixes poorly across the flat directions that trade the
intercepts off against random-effect means (the likelihood only sees their
sums), so each sweep also applies exact translation updates along those
directions: sampling t from its Gaussian conditional and moving, e.g., beta0
-> beta0 + t, b0 -> b0 - t leaves every observation mean unchanged and the
posterior invariant, while letting the weakly identified split mix in one
step.

Chains run on independent Philox substreams, so identical (panel, config,
seed) reproduces bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boxscore import Panel
from .errors import EmptyPanelError, SamplingError
from .model import FIXED_EFFECTS, SCALES, PanelArrays, ParameterDraw, PriorSpec

RNG_ALGORITHM = "philox4x64"

BLOCKS = ("b0", "b1", "b0m")
CLAMPABLE = FIXED_EFFECTS + SCALES + BLOCKS

# scale parameter -> random-effect block it governs (sigma governs residuals)
_SCALE_OF_BLOCK = {"b0": "sigma0", "b1": "sigma1", "b0m": "sigma0m"}

DESK_PROFILE = {"burn_in": 5000, "iterations": 5000, "thin": 5}
PAPER_PROFILE = {"burn_in": 300_000, "iterations": 100_000, "thin": 100}


@dataclass(frozen=True)
class SamplerConfig:
    chains: int = 3
    burn_in: int = PAPER_PROFILE["burn_in"]
    iterations: int = PAPER_PROFILE["iterations"]
    thin: int = PAPER_PROFILE["thin"]
    seed: int = 0
    prior: PriorSpec = field(default_factory=PriorSpec)

    def __post_init__(self):
        if self.chains < 1:
            raise ValueError("chains must be >= 1")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.iterations < 1 or self.iterations % self.thin != 0:
            raise ValueError("iterations must be a positive multiple of thin")

    @property
    def draws_per_chain(self) -> int:
        return self.iterations // self.thin

    @classmethod
    def desk(cls, **overrides) -> "SamplerConfig":
        return cls(**{**DESK_PROFILE, **overrides})

    @classmethod
    def paper(cls, **overrides) -> "SamplerConfig":
        return cls(**{**PAPER_PROFILE, **overrides})


class PosteriorSample:
    """Thinned post-burn-in draws from all chains, stored column-wise."""

    def __init__(self, scalars: dict[str, np.ndarray],
                 blocks: dict[str, np.ndarray],
                 chain_id: np.ndarray, iteration: np.ndarray,
                 panel_fingerprint: str, config: SamplerConfig):
        self.scalars = scalars
        self.blocks = blocks
        self.chain_id = chain_id
        self.iteration = iteration
        self.panel_fingerprint = panel_fingerprint
        self.config = config
        self.rng_algorithm = RNG_ALGORITHM
        self._validate()

    def _validate(self):
        if self.size < 1:
            raise ValueError("posterior sample is empty")
        upper = self.config.prior.scale_upper
        for name in SCALES:
            col = self.scalars[name]
            if not (np.all(col > 0) and np.all(col < upper)):
                raise ValueError(f"{name} draws violate (0, {upper}) support")

    @property
    def size(self) -> int:
        return len(self.chain_id)

    @property
    def n_players(self) -> int:
        return self.blocks["b0"].shape[1]

    @property
    def n_matches(self) -> int:
        return self.blocks["b0m"].shape[1]

    def draw(self, s: int) -> ParameterDraw:
        return ParameterDraw(
            **{name: float(self.scalars[name][s]) for name in FIXED_EFFECTS},
            **{name: float(self.scalars[name][s]) for name in SCALES},
            b0=self.blocks["b0"][s].copy(),
            b1=self.blocks["b1"][s].copy(),
            b0m=self.blocks["b0m"][s].copy(),
        )

    @property
    def draws(self) -> list[ParameterDraw]:
        return [self.draw(s) for s in range(self.size)]

    def column_names(self) -> list[str]:
        names = list(FIXED_EFFECTS) + list(SCALES)
        names += [f"b0[{i + 1}]" for i in range(self.n_players)]
        names += [f"b1[{i + 1}]" for i in range(self.n_players)]
        names += [f"b0m[{j + 1}]" for j in range(self.n_matches)]
        return names

    def column(self, name: str) -> np.ndarray:
        if name in self.scalars:
            return self.scalars[name]
        if "[" in name and name.endswith("]"):
            block, idx = name[:-1].split("[")
            return self.blocks[block][:, int(idx) - 1]
        raise KeyError(name)

    def by_chain(self, name: str) -> list[np.ndarray]:
        col = self.column(name)
        return [col[self.chain_id == c]
                for c in range(self.config.chains)]


class _ChainState:
    """Mutable working state for one chain; keeps mu in sync with updates."""

    __slots__ = ("values", "b0", "b1", "b0m", "mu")

    def __init__(self, draw: ParameterDraw, arrays: PanelArrays):
        self.values = {name: getattr(draw, name)
                       for name in FIXED_EFFECTS + SCALES}
        self.b0 = np.array(draw.b0, dtype=float)
        self.b1 = np.array(draw.b1, dtype=float)
        self.b0m = np.array(draw.b0m, dtype=float)
        self.refresh_mu(arrays)

    def refresh_mu(self, arrays: PanelArrays):
        self.mu = (
            self.values["beta0"]
            + self.b0[arrays.player]
            + self.b0m[arrays.match]
            + self.values["beta_W"] * arrays.female[arrays.player]
            + self.values["beta_C"] * arrays.classification[arrays.player]
            + self.values["beta_H"] * arrays.home
            + (self.values["beta1"] + self.b1[arrays.player]) * arrays.match_number
        )

    def to_draw(self) -> ParameterDraw:
        return ParameterDraw(
            **self.values,
            b0=self.b0.copy(), b1=self.b1.copy(), b0m=self.b0m.copy(),
        )


class _Workspace:
    """Quantities that stay constant over a run."""

    def __init__(self, arrays: PanelArrays, prior: PriorSpec):
        self.arrays = arrays
        self.prior = prior
        n, m = arrays.n_players, arrays.n_matches
        pidx, midx = arrays.player, arrays.match
        self.n_obs = len(arrays.y)

        self.fixed_covariates = {
            "beta0": np.ones(self.n_obs),
            "beta_W": arrays.female[pidx],
            "beta_C": arrays.classification[pidx],
            "beta_H": arrays.home,
            "beta1": arrays.match_number,
        }
        self.fixed_sxx = {k: float(v @ v)
                          for k, v in self.fixed_covariates.items()}

        self.obs_per_player = np.bincount(pidx, minlength=n).astype(float)
        self.obs_per_match = np.bincount(midx, minlength=m).astype(float)
        self.sj2_per_player = np.bincount(
            pidx, weights=arrays.match_number ** 2, minlength=n)

        self.women = np.flatnonzero(arrays.female > 0)
        self.home_matches = np.flatnonzero(arrays.home_by_match > 0)
        self.match_numbers = np.arange(1, m + 1, dtype=float)
        self.sum_match_sq = float(self.match_numbers @ self.match_numbers)
        self.sum_class_sq = float(arrays.classification @ arrays.classification)


def initial_state(panel: Panel, prior: PriorSpec,
                  rng: np.random.Generator) -> ParameterDraw:
    """Overdispersed starting point: N(0,1) fixed effects, scales uniform on
    (0.1, upper/2), random effects drawn from their priors."""
    fixed = {name: float(rng.standard_normal()) for name in FIXED_EFFECTS}
    scales = {name: float(rng.uniform(0.1, prior.scale_upper / 2.0))
              for name in SCALES}
    n, m = panel.n_players, panel.match_count
    return ParameterDraw(
        **fixed, **scales,
        b0=rng.normal(0.0, scales["sigma0"], size=n),
        b1=rng.normal(0.0, scales["sigma1"], size=n),
        b0m=rng.normal(0.0, scales["sigma0m"], size=m),
    )


def _chain_rng(seed: int, chain: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(chain))


def _slice_scale(rng, current: float, n_terms: float, ss: float,
                 upper: float, name: str) -> float:
    """Shrinkage slice update on (0, upper) for one scale parameter."""
    if ss <= 0.0:
        raise SamplingError(
            f"degenerate full conditional for {name}: zero sum of squares "
            f"(clamp {name} when its governed terms are clamped to zero)")

    def logf(s):
        if not 0.0 < s < upper:
            return -math.inf
        return -n_terms * math.log(s) - ss / (2.0 * s * s)

    here = logf(current)
    if not math.isfinite(here):
        raise SamplingError(f"non-finite log-density at {name}={current!r}")
    level = here - rng.standard_exponential()
    lo, hi = 0.0, upper
    while True:
        cand = rng.uniform(lo, hi)
        if logf(cand) > level:
            return cand
        if cand < current:
            lo = cand
        else:
            hi = cand


def _sweep(state: _ChainState, ws: _Workspace, rng: np.random.Generator,
           clamp: dict) -> None:
    arrays = ws.arrays
    tau2 = ws.prior.fixed_effect_sd ** 2
    y = arrays.y

    # --- fixed effects, one exact conjugate draw each ---
    sig2 = state.values["sigma"] ** 2
    for name in FIXED_EFFECTS:
        if name in clamp:
            continue
        x = ws.fixed_covariates[name]
        old = state.values[name]
        e = y - state.mu
        sum_xr = float(x @ e) + old * ws.fixed_sxx[name]
        prec = 1.0 / tau2 + ws.fixed_sxx[name] / sig2
        mean = sum_xr / sig2 / prec
        new = mean + rng.standard_normal() / math.sqrt(prec)
        state.values[name] = new
        state.mu += (new - old) * x

    # --- random-effect blocks; coordinates are conditionally independent
    # within a block (each observation touches exactly one player and one
    # match), so each block updates in a single vectorized draw ---
    if "b0" not in clamp:
        s02 = state.values["sigma0"] ** 2
        e = y - state.mu
        se = np.bincount(arrays.player, weights=e, minlength=arrays.n_players)
        rsum = se + ws.obs_per_player * state.b0
        prec = 1.0 / s02 + ws.obs_per_player / sig2
        mean = rsum / sig2 / prec
        new = mean + rng.standard_normal(arrays.n_players) / np.sqrt(prec)
        state.mu += (new - state.b0)[arrays.player]
        state.b0 = new

    if "b1" not in clamp:
        s12 = state.values["sigma1"] ** 2
        e = y - state.mu
        se = np.bincount(arrays.player, weights=e * arrays.match_number,
                         minlength=arrays.n_players)
        rsum = se + ws.sj2_per_player * state.b1
        prec = 1.0 / s12 + ws.sj2_per_player / sig2
        mean = rsum / sig2 / prec
        new = mean + rng.standard_normal(arrays.n_players) / np.sqrt(prec)
        state.mu += (new - state.b1)[arrays.player] * arrays.match_number
        state.b1 = new

    if "b0m" not in clamp:
        s0m2 = state.values["sigma0m"] ** 2
        e = y - state.mu
        se = np.bincount(arrays.match, weights=e, minlength=arrays.n_matches)
        rsum = se + ws.obs_per_match * state.b0m
        prec = 1.0 / s0m2 + ws.obs_per_match / sig2
        mean = rsum / sig2 / prec
        new = mean + rng.standard_normal(arrays.n_matches) / np.sqrt(prec)
        state.mu += (new - state.b0m)[arrays.match]
        state.b0m = new

    _translation_moves(state, ws, rng, clamp, tau2)

    # --- scales by slice sampling; ss terms are fixed within each update ---
    upper = ws.prior.scale_upper
    if "sigma" not in clamp:
        resid = y - state.mu
        state.values["sigma"] = _slice_scale(
            rng, state.values["sigma"], ws.n_obs, float(resid @ resid),
            upper, "sigma")
    if "sigma0" not in clamp:
        state.values["sigma0"] = _slice_scale(
            rng, state.values["sigma0"], arrays.n_players,
            float(state.b0 @ state.b0), upper, "sigma0")
    if "sigma0m" not in clamp:
        state.values["sigma0m"] = _slice_scale(
            rng, state.values["sigma0m"], arrays.n_matches,
            float(state.b0m @ state.b0m), upper, "sigma0m")
    if "sigma1" not in clamp:
        state.values["sigma1"] = _slice_scale(
            rng, state.values["sigma1"], arrays.n_players,
            float(state.b1 @ state.b1), upper, "sigma1")


def _translation_moves(state: _ChainState, ws: _Workspace,
                       rng: np.random.Generator, clamp: dict,
                       tau2: float) -> None:
    """Exact Gibbs draws along likelihood-flat directions (mu is unchanged)."""
    arrays = ws.arrays
    s0_2 = state.values["sigma0"] ** 2
    s1_2 = state.values["sigma1"] ** 2
    s0m2 = state.values["sigma0m"] ** 2

    def shift(prec, mean):
        return mean + rng.standard_normal() / math.sqrt(prec)

    if "beta0" not in clamp and "b0" not in clamp:
        prec = 1.0 / tau2 + arrays.n_players / s0_2
        t = shift(prec, (-state.values["beta0"] / tau2
                         + float(np.sum(state.b0)) / s0_2) / prec)
        state.values["beta0"] += t
        state.b0 -= t

    if "beta0" not in clamp and "b0m" not in clamp:
        prec = 1.0 / tau2 + arrays.n_matches / s0m2
        t = shift(prec, (-state.values["beta0"] / tau2
                         + float(np.sum(state.b0m)) / s0m2) / prec)
        state.values["beta0"] += t
        state.b0m -= t

    if "beta1" not in clamp and "b1" not in clamp:
        prec = 1.0 / tau2 + arrays.n_players / s1_2
        t = shift(prec, (-state.values["beta1"] / tau2
                         + float(np.sum(state.b1)) / s1_2) / prec)
        state.values["beta1"] += t
        state.b1 -= t

    if "beta_W" not in clamp and "b0" not in clamp and len(ws.women):
        prec = 1.0 / tau2 + len(ws.women) / s0_2
        t = shift(prec, (-state.values["beta_W"] / tau2
                         + float(np.sum(state.b0[ws.women])) / s0_2) / prec)
        state.values["beta_W"] += t
        state.b0[ws.women] -= t

    if "beta_C" not in clamp and "b0" not in clamp and ws.sum_class_sq > 0:
        prec = 1.0 / tau2 + ws.sum_class_sq / s0_2
        t = shift(prec, (-state.values["beta_C"] / tau2
                         + float(arrays.classification @ state.b0) / s0_2) / prec)
        state.values["beta_C"] += t
        state.b0 -= t * arrays.classification

    if "beta_H" not in clamp and "b0m" not in clamp and len(ws.home_matches):
        prec = 1.0 / tau2 + len(ws.home_matches) / s0m2
        t = shift(prec, (-state.values["beta_H"] / tau2
                         + float(np.sum(state.b0m[ws.home_matches])) / s0m2) / prec)
        state.values["beta_H"] += t
        state.b0m[ws.home_matches] -= t

    if "beta1" not in clamp and "b0m" not in clamp:
        prec = 1.0 / tau2 + ws.sum_match_sq / s0m2
        t = shift(prec, (-state.values["beta1"] / tau2
                         + float(ws.match_numbers @ state.b0m) / s0m2) / prec)
        state.values["beta1"] += t
        state.b0m -= t * ws.match_numbers


def _normalize_clamp(clamp: dict | None, n: int, m: int) -> dict:
    if not clamp:
        return {}
    out = {}
    for name, value in clamp.items():
        if name not in CLAMPABLE:
            raise ValueError(f"unknown clamp target {name!r}")
        if name in BLOCKS:
            size = m if name == "b0m" else n
            out[name] = np.broadcast_to(
                np.asarray(value, dtype=float), (size,)).copy()
        else:
            out[name] = float(value)
    for block, scale in _SCALE_OF_BLOCK.items():
        if block in out and scale not in out and not np.any(out[block]):
            raise ValueError(
                f"clamping {block} to zero requires clamping {scale} as well")
    return out


def _apply_clamp(state: _ChainState, clamp: dict) -> None:
    for name, value in clamp.items():
        if name in BLOCKS:
            setattr(state, name, value.copy())
        else:
            state.values[name] = value


def run_sampler(panel: Panel, config: SamplerConfig,
                clamp: dict | None = None) -> PosteriorSample:
    """Draw a thinned posterior sample for the panel.

    ``clamp`` fixes named parameters (or whole random-effect blocks) at given
    values and skips their updates; it exists for reduced-model runs and
    oracle tests.
    """
    if panel.n_observations == 0:
        raise EmptyPanelError("cannot sample from an empty panel")
    arrays = PanelArrays.from_panel(panel)
    clamp = _normalize_clamp(clamp, arrays.n_players, arrays.n_matches)
    ws = _Workspace(arrays, config.prior)

    per_chain = config.draws_per_chain
    total = config.chains * per_chain
    scalars = {name: np.empty(total) for name in FIXED_EFFECTS + SCALES}
    blocks = {
        "b0": np.empty((total, arrays.n_players)),
        "b1": np.empty((total, arrays.n_players)),
        "b0m": np.empty((total, arrays.n_matches)),
    }
    chain_id = np.empty(total, dtype=int)
    iteration = np.empty(total, dtype=int)

    pos = 0
    for chain in range(config.chains):
        rng = _chain_rng(config.seed, chain)
        state = _ChainState(initial_state(panel, config.prior, rng), arrays)
        _apply_clamp(state, clamp)
        state.refresh_mu(arrays)
        for sweep in range(1, config.burn_in + config.iterations + 1):
            _sweep(state, ws, rng, clamp)
            kept = sweep - config.burn_in
            if kept > 0 and kept % config.thin == 0:
                for name in FIXED_EFFECTS + SCALES:
                    scalars[name][pos] = state.values[name]
                blocks["b0"][pos] = state.b0
                blocks["b1"][pos] = state.b1
                blocks["b0m"][pos] = state.b0m
                chain_id[pos] = chain
                iteration[pos] = sweep
                pos += 1
        if not np.isfinite(state.mu).all():
            raise SamplingError("non-finite observation mean at end of chain")

    return PosteriorSample(
        scalars=scalars, blocks=blocks, chain_id=chain_id,
        iteration=iteration, panel_fingerprint=panel.fingerprint,
        config=config,
    )
