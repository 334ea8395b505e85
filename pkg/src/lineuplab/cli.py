"""Command-line entry points.

Subcommands mirror the analysis pipeline: ``fit`` draws from the posterior
and persists a run directory, ``optimize`` simulates the next match and
solves the per-draw lineup problem, ``report`` prints a saved report, and
``serve`` exposes completed runs over HTTP.

Exit codes: 0 on success, 2 for usage or input-validation problems, 3 for
runtime failures such as an infeasible lineup problem or a sampler fault.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from collections import Counter
from datetime import datetime, timezone
from pathlib import Path

import click
import tomli

from .analytics import completion_table, inclusion_table, monte_carlo_se
from .boxscore import build_panel, parse_boxscores, parse_roster
from .diagnostics import convergence_table, convergence_warnings, cross_validated_pit
from .errors import (
    DataValidationError,
    EmptyPanelError,
    InfeasibleError,
    LineupLabError,
    ReferenceError_,
    SamplingError,
    SchemaError,
    StaleSampleError,
    UndefinedConditionalError,
)
from .optimizer import (
    RuleSet,
    SelectionConstraints,
    class_sum,
    enumerate_valid_lineups,
    female_count,
    solve_posterior,
)
from .predictive import MatchScenario, predict_match
from .runstore import (
    FitResult,
    RunStore,
    derive_run_id,
    rules_dict,
    scenario_dict,
)
from .sampler import SamplerConfig, run_sampler
from .validation import check_metrics, check_player_indices, check_profile, check_seed

USAGE_EXIT = 2
RUNTIME_EXIT = 3

_USAGE_ERRORS = (
    SchemaError,
    DataValidationError,
    ReferenceError_,
    EmptyPanelError,
)
_RUNTIME_ERRORS = (
    SamplingError,
    InfeasibleError,
    UndefinedConditionalError,
    StaleSampleError,
)
_GENERIC_USAGE = (
    ValueError,
    FileNotFoundError,
    FileExistsError,
    NotADirectoryError,
    IsADirectoryError,
    KeyError,
    tomli.TOMLDecodeError,
)


def _fail(code: int, exc: BaseException):
    message = str(exc) or type(exc).__name__
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _USAGE_ERRORS as exc:
            _fail(USAGE_EXIT, exc)
        except _RUNTIME_ERRORS as exc:
            _fail(RUNTIME_EXIT, exc)
        except LineupLabError as exc:
            _fail(RUNTIME_EXIT, exc)
        except _GENERIC_USAGE as exc:
            _fail(USAGE_EXIT, exc)

    return wrapper


def _load_settings(config_path: Path | None) -> dict:
    if config_path is None:
        return {}
    with open(config_path, "rb") as fh:
        return tomli.load(fh)


def _pick(flag, settings: dict, key: str, default=None):
    """CLI flag wins over the config file, which wins over the default."""
    if flag is not None:
        return flag
    return settings.get(key, default)


@click.group()
def main():
    """Fit, optimize, inspect, and serve lineup-selection runs."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="TOML settings file; flags override it.")
@click.option("--roster", "roster_path", type=click.Path(path_type=Path), default=None, help="Roster CSV (index,name,classification,sex).")
@click.option("--boxscores", "boxscores_path", type=click.Path(path_type=Path), default=None, help="Box-score CSV, one row per player-match.")
@click.option("--metric", "metrics", multiple=True, help="Metric to fit (repeatable); default all three.")
@click.option("--seed", type=int, default=None, help="Sampler seed (default 0).")
@click.option("--profile", type=click.Choice(["desk", "paper"]), default=None, help="Sampler schedule; desk is the short default.")
@click.option("--chains", type=int, default=None, help="Number of chains (default 3).")
@click.option("--min-minutes", type=float, default=None, help="Season-minutes cutoff below which a player is dropped (default 40).")
@click.option("--out", "out_root", type=click.Path(file_okay=False, path_type=Path), default=None, help="Directory that holds run directories (default ./runs).")
@click.option("--run-id", default=None, help="Run directory name; default is derived from the inputs.")
@handle_errors
def fit(config_path, roster_path, boxscores_path, metrics, seed, profile,
        chains, min_minutes, out_root, run_id):
    """Fit the mixed model for each metric and persist draws plus diagnostics."""
    settings = _load_settings(config_path)
    sampler_settings = settings.get("sampler", {})
    panel_settings = settings.get("panel", {})

    roster_file = _pick(roster_path, settings, "roster")
    boxscores_file = _pick(boxscores_path, settings, "boxscores")
    if roster_file is None or boxscores_file is None:
        raise click.UsageError("both a roster and a boxscores table are required "
                               "(flags or config keys 'roster'/'boxscores')")

    wanted = check_metrics(metrics or settings.get("metrics"))
    profile_name = check_profile(_pick(profile, sampler_settings, "profile", "desk"))
    seed_value = check_seed(_pick(seed, sampler_settings, "seed", 0))
    chain_count = int(_pick(chains, sampler_settings, "chains", 3))
    cutoff = float(_pick(min_minutes, panel_settings, "min_season_minutes", 40.0))
    root = Path(_pick(out_root, settings, "out", "runs"))

    overrides = {"chains": chain_count, "seed": seed_value}
    for key in ("burn_in", "iterations", "thin"):
        if key in sampler_settings:
            overrides[key] = int(sampler_settings[key])
    factory = SamplerConfig.desk if profile_name == "desk" else SamplerConfig.paper
    config = factory(**overrides)

    roster = parse_roster(Path(roster_file).read_text())
    rows = parse_boxscores(Path(boxscores_file).read_text())

    results: dict[str, FitResult] = {}
    for metric in wanted:
        panel, mapping = build_panel(rows, roster, metric, min_season_minutes=cutoff)
        click.echo(f"[{metric}] {panel.n_players} players, "
                   f"{panel.match_count} matches, {panel.n_observations} observations")
        sample = run_sampler(panel, config)
        table = convergence_table(sample)
        warns = convergence_warnings(table)
        for message in warns:
            click.echo(f"warning [{metric}]: {message}", err=True)
        pit = cross_validated_pit(sample, panel)
        results[metric] = FitResult(panel, mapping, sample, table, warns, pit)

    if run_id is None:
        fingerprints = {m: r.panel.fingerprint for m, r in results.items()}
        run_id = derive_run_id(seed_value, config, fingerprints)

    store = RunStore(root)
    run_dir = store.save_fit(run_id, results, extra_meta={
        "profile": profile_name,
        "min_season_minutes": cutoff,
        "sources": {"roster": str(roster_file), "boxscores": str(boxscores_file)},
    })
    click.echo(f"{config.chains} chains x {config.draws_per_chain} retained draws per metric")
    click.echo(f"saved run {run_id} -> {run_dir}")


def _open_run(run_dir: Path) -> tuple[RunStore, str, dict]:
    run_dir = Path(run_dir)
    store = RunStore(run_dir.parent if run_dir.parent != Path("") else Path("."))
    run_id = run_dir.name
    meta = store.load_meta(run_id)
    return store, run_id, meta


def _build_report(run_id, metric, predictive, posterior, roster, rules,
                  scenario, constraints, pinned, seed, engine):
    size = posterior.size
    counts = Counter(lineup for _, lineup in posterior.solutions)
    lineups = []
    for lineup, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].members)):
        prob = posterior.lineup_probs[lineup]
        lineups.append({
            "members": list(lineup.members),
            "names": [roster[i - 1].name for i in lineup.members],
            "probability": prob,
            "se": monte_carlo_se(prob, size),
            "count": count,
            "class_sum": class_sum(lineup, roster),
            "female_count": female_count(lineup, roster),
        })

    completion = None
    if pinned:
        rows = completion_table(posterior, roster, pinned)
        completion = {
            "given": sorted(pinned),
            "n_given": posterior.count_containing(pinned),
            "candidates": rows,
        }

    feasible = len(enumerate_valid_lineups(roster, rules, constraints))
    return {
        "run_id": run_id,
        "metric": metric,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
        "engine": engine,
        "draws": size,
        "scenario": scenario_dict(scenario),
        "rules": rules_dict(rules),
        "constraints": {
            "pinned": sorted(constraints.pinned),
            "banned": sorted(constraints.banned),
        },
        "feasible_lineups": feasible,
        "lineups": lineups,
        "inclusion": inclusion_table(posterior, roster),
        "completion": completion,
    }


@main.command()
@click.argument("run_dir", type=click.Path(path_type=Path))
@click.option("--metric", "metrics", multiple=True, help="Metric to optimize (repeatable); default every fitted metric.")
@click.option("--home/--away", default=False, help="Whether the simulated match is at home.")
@click.option("--match-index", type=int, default=None, help="1-based index of the simulated match; default one past the season.")
@click.option("--per-player-effect", is_flag=True, help="Draw an independent new-match effect per player instead of one shared effect.")
@click.option("--seed", type=int, default=None, help="Predictive seed; defaults to the fit seed.")
@click.option("--ban", "banned", multiple=True, type=int, help="Exclude this player (repeatable) and re-solve.")
@click.option("--pin", "pinned", multiple=True, type=int, help="Condition on this player (repeatable); reports the best completions.")
@click.option("--rules", "rules_mode", type=click.Choice(["RBBL", "IWBF"]), default="RBBL", help="Classification cap regime.")
@click.option("--engine", type=click.Choice(["branch_and_bound", "enumeration"]), default="branch_and_bound")
@click.option("--top", type=int, default=10, help="How many lineups to echo (the report keeps all).")
@handle_errors
def optimize(run_dir, metrics, home, match_index, per_player_effect, seed,
             banned, pinned, rules_mode, engine, top):
    """Simulate the next match and solve the lineup problem for each draw."""
    store, run_id, meta = _open_run(run_dir)
    fitted = list(meta["metrics"])
    wanted = check_metrics(metrics) if metrics else fitted
    unknown = [m for m in wanted if m not in fitted]
    if unknown:
        raise click.UsageError(
            f"metric(s) {', '.join(unknown)} not fitted in run {run_id}; "
            f"available: {', '.join(fitted)}")

    scenario = MatchScenario(home=home, match_index=match_index,
                             shared_match_effect=not per_player_effect)
    rules = RuleSet(mode=rules_mode)
    predictive_seed = check_seed(seed if seed is not None else meta["sampler"]["seed"])

    for metric in wanted:
        panel = store.load_panel(run_id, metric)
        sample = store.load_sample(run_id, metric)
        banned_set = check_player_indices(banned, "banned", panel.n_players)
        pinned_set = check_player_indices(pinned, "pinned", panel.n_players)
        if banned_set & pinned_set:
            raise click.UsageError("a player cannot be both pinned and banned")

        predictive = predict_match(sample, panel, scenario, seed=predictive_seed)
        constraints = SelectionConstraints(banned=banned_set)
        posterior = solve_posterior(predictive, panel.roster, rules,
                                    constraints, engine=engine)
        report = _build_report(run_id, metric, predictive, posterior,
                               panel.roster, rules, scenario, constraints,
                               pinned_set, predictive_seed, engine)
        version = store.save_optimize(run_id, metric, predictive, posterior,
                                      panel.roster, report)
        click.echo(f"[{metric}] report v{version}: {report['feasible_lineups']} "
                   f"feasible lineups, {len(report['lineups'])} observed across "
                   f"{report['draws']} draws")
        for entry in report["lineups"][:max(top, 0)]:
            members = ",".join(str(i) for i in entry["members"])
            click.echo(f"  {{{members}}} p={entry['probability']:.4f} "
                       f"(se {entry['se']:.4f}) class_sum={entry['class_sum']} "
                       f"women={entry['female_count']}")
        if report["completion"] is not None:
            given = ",".join(str(i) for i in report["completion"]["given"])
            click.echo(f"  completions of {{{given}}}:")
            for row in report["completion"]["candidates"][:max(top, 0)]:
                click.echo(f"    {row['index']} {row['name']}: "
                           f"p={row['probability']:.4f} (se {row['se']:.4f})")


@main.command()
@click.argument("run_dir", type=click.Path(path_type=Path))
@click.option("--metric", default=None, help="Single metric; default prints every metric that has a report.")
@click.option("--version", "version", type=int, default=None, help="Report version; default latest.")
@handle_errors
def report(run_dir, metric, version):
    """Print a saved optimization report as JSON."""
    store, run_id, meta = _open_run(run_dir)
    if metric is not None:
        wanted = check_metrics([metric])[0]
        payload = store.load_report(run_id, wanted, version)
    else:
        payload = {}
        for m in meta["metrics"]:
            if store.report_versions(run_id, m):
                payload[m] = store.load_report(run_id, m, version)
        if not payload:
            raise FileNotFoundError(
                f"run {run_id!r} has no reports; run the optimize step first")
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@main.command()
@click.option("--runs", "runs_root", type=click.Path(file_okay=False, path_type=Path), default=Path("runs"), help="Directory holding run directories.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None, help="Port; defaults to LINEUP_PORT or 8000.")
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False, path_type=Path), default=None, help="Static UI build to serve at /; defaults to LINEUP_UI or ./frontend/dist when present.")
@handle_errors
def serve(runs_root, host, port, ui_dir):
    """Serve completed runs (and optionally the explorer UI) over HTTP."""
    import uvicorn

    from .service import create_app

    resolved_port = port if port is not None else int(os.environ.get("LINEUP_PORT", "8000"))
    if ui_dir is None:
        env_ui = os.environ.get("LINEUP_UI")
        if env_ui:
            ui_dir = Path(env_ui)
        elif Path("frontend/dist").is_dir():
            ui_dir = Path("frontend/dist")
    app = create_app(Path(runs_root), ui_dir=ui_dir)
    click.echo(f"serving runs from {runs_root} at http://{host}:{resolved_port}")
    uvicorn.run(app, host=host, port=resolved_port)


if __name__ == "__main__":
    main()
