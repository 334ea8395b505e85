"""HTTP surface over completed run directories.

The service is read-mostly: every GET is answered from artifacts persisted
by the fit and optimize steps. The one compute endpoint is
``POST /runs/{id}/query``, which answers probability questions about the
optimal lineup and re-solves the per-draw problem when the question bans or
pins players. Re-solves are serialized per run and memoized, so repeated
what-if questions are cheap.

Status codes: 404 for unknown runs, metrics, or missing artifacts; 400 for
malformed bodies or out-of-range player indices; 422 when the question is
well-formed but unanswerable (conditioning event never happens, or the
constraints leave no feasible lineup).
"""

from __future__ import annotations

import math
import threading
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .analytics import (
    LineupPosterior,
    conditional_probability,
    joint_probability,
    monte_carlo_se,
)
from .errors import (
    DataValidationError,
    InfeasibleError,
    StaleSampleError,
    UndefinedConditionalError,
)
from .optimizer import SelectionConstraints, solve_posterior
from .predictive import predict_match
from .runstore import RunStore, rules_from_dict, scenario_from_dict
from .validation import check_metric


class QueryBody(BaseModel):
    """A probability question about the optimal lineup.

    ``targets`` and ``given`` ask for P(targets all selected | given all
    selected); an empty ``given`` makes that a joint probability and an
    empty ``targets`` is vacuously 1. ``banned`` and ``pinned`` change the
    optimization itself and trigger an exact re-solve.
    """

    model_config = {"extra": "forbid"}

    metric: str
    targets: list[int] = Field(default_factory=list)
    given: list[int] = Field(default_factory=list)
    banned: list[int] = Field(default_factory=list)
    pinned: list[int] = Field(default_factory=list)


def _error_payload(status: int, kind: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": {"kind": kind, "message": message}})


class _RunService:
    """Loads run artifacts lazily and caches re-solved posteriors."""

    def __init__(self, store: RunStore):
        self.store = store
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._guard = threading.Lock()
        self._posteriors: dict[tuple, LineupPosterior] = {}

    def _lock(self, run_id: str) -> threading.Lock:
        with self._guard:
            return self._locks[run_id]

    def meta(self, run_id: str) -> dict:
        try:
            return self.store.load_meta(run_id)
        except FileNotFoundError:
            raise LookupError(f"unknown run {run_id!r}")

    def check_metric_fitted(self, run_id: str, metric: str) -> str:
        meta = self.meta(run_id)
        try:
            canonical = check_metric(metric)
        except ValueError as exc:
            raise LookupError(str(exc))
        if canonical not in meta["metrics"]:
            raise LookupError(
                f"run {run_id!r} has no metric {canonical!r}; "
                f"available: {', '.join(sorted(meta['metrics']))}")
        return canonical

    def report(self, run_id: str, metric: str) -> dict:
        metric = self.check_metric_fitted(run_id, metric)
        try:
            return self.store.load_report(run_id, metric)
        except FileNotFoundError as exc:
            raise LookupError(str(exc))

    def posterior(self, run_id: str, metric: str,
                  banned: frozenset[int], pinned: frozenset[int]) -> tuple[LineupPosterior, dict]:
        """Per-draw optimal lineups under the given constraint overrides.

        With no overrides this replays the latest saved report's solutions;
        otherwise the lineup problem is re-solved from the saved predictive
        draws with the overrides as the only constraints.
        """
        report = self.report(run_id, metric)
        key = (run_id, metric, report["version"], banned, pinned)
        with self._lock(run_id):
            cached = self._posteriors.get(key)
            if cached is not None:
                return cached, report

            rules = rules_from_dict(report["rules"])
            scenario = scenario_from_dict(report["scenario"])
            if not banned and not pinned:
                base = SelectionConstraints(
                    pinned=frozenset(report["constraints"]["pinned"]),
                    banned=frozenset(report["constraints"]["banned"]),
                )
                solutions = self.store.load_solutions(run_id, metric,
                                                      report["version"])
                posterior = LineupPosterior(tuple(solutions), metric,
                                            scenario, base)
            else:
                panel = self.store.load_panel(run_id, metric)
                sample = self.store.load_sample(run_id, metric)
                predictive = predict_match(sample, panel, scenario,
                                           seed=report["seed"])
                constraints = SelectionConstraints(pinned=pinned, banned=banned)
                posterior = solve_posterior(predictive, panel.roster, rules,
                                            constraints,
                                            engine=report["engine"])
            self._posteriors[key] = posterior
            return posterior, report


def _check_indices(values, name: str, n_players: int) -> frozenset[int]:
    out = set()
    for value in values:
        if not 1 <= value <= n_players:
            raise ValueError(
                f"{name} entry {value} is out of range for a "
                f"{n_players}-player roster")
        out.add(value)
    return frozenset(out)


def create_app(run_root: Path | str, ui_dir: Path | str | None = None) -> FastAPI:
    """Build the application serving runs below ``run_root``.

    ``ui_dir``, when given, is a static single-page-app build mounted at the
    root; API routes are registered first so they always win.
    """
    store = RunStore(Path(run_root))
    service = _RunService(store)
    app = FastAPI(title="lineuplab", docs_url="/docs")

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return _error_payload(400, "bad_request", str(exc.errors()))

    @app.exception_handler(LookupError)
    async def not_found(request: Request, exc: LookupError):
        return _error_payload(404, "not_found", str(exc))

    @app.exception_handler(ValueError)
    async def bad_value(request: Request, exc: ValueError):
        return _error_payload(400, "bad_request", str(exc))

    @app.exception_handler(UndefinedConditionalError)
    async def undefined_conditional(request: Request, exc: UndefinedConditionalError):
        return _error_payload(422, "undefined_conditional", str(exc))

    @app.exception_handler(InfeasibleError)
    async def infeasible(request: Request, exc: InfeasibleError):
        return _error_payload(422, "infeasible", str(exc))

    @app.exception_handler(StaleSampleError)
    async def stale(request: Request, exc: StaleSampleError):
        return _error_payload(500, "stale_artifacts", str(exc))

    @app.exception_handler(DataValidationError)
    async def corrupt(request: Request, exc: DataValidationError):
        return _error_payload(500, "corrupt_artifacts", str(exc))

    @app.get("/runs")
    def list_runs():
        return {"runs": service.store.list_runs()}

    @app.get("/runs/{run_id}/lineups")
    def lineups(run_id: str, metric: str = Query(...), top: int = Query(10, ge=0)):
        report = service.report(run_id, metric)
        return {
            "run_id": run_id,
            "metric": report["metric"],
            "version": report["version"],
            "draws": report["draws"],
            "scenario": report["scenario"],
            "rules": report["rules"],
            "constraints": report["constraints"],
            "feasible_lineups": report["feasible_lineups"],
            "total_distinct": len(report["lineups"]),
            "lineups": report["lineups"][:top],
        }

    @app.get("/runs/{run_id}/inclusion")
    def inclusion(run_id: str, metric: str = Query(...)):
        report = service.report(run_id, metric)
        return {
            "run_id": run_id,
            "metric": report["metric"],
            "version": report["version"],
            "draws": report["draws"],
            "players": report["inclusion"],
        }

    @app.get("/runs/{run_id}/pit")
    def pit(run_id: str, metric: str = Query(...)):
        canonical = service.check_metric_fitted(run_id, metric)
        meta = service.meta(run_id)
        sampler = meta["sampler"]
        draws = sampler["chains"] * (sampler["iterations"] // sampler["thin"])
        floor = draws * 0.01
        try:
            rows = service.store.load_pit(run_id, canonical)
        except FileNotFoundError as exc:
            raise LookupError(str(exc))
        entries = []
        used = []
        by_match: dict[int, list[float]] = defaultdict(list)
        for row in rows:
            flagged = (not math.isfinite(row["pit"])) or row["ess"] < floor
            entries.append({**row, "flagged": flagged})
            if not flagged:
                used.append(row["pit"])
                by_match[row["match"]].append(row["pit"])
        match_rows = [
            {"match": match, "mean_pit": sum(vals) / len(vals), "n": len(vals)}
            for match, vals in sorted(by_match.items())
        ]
        return {
            "run_id": run_id,
            "metric": canonical,
            "draws": draws,
            "entries": entries,
            "by_match": match_rows,
            "n_flagged": len(entries) - len(used),
        }

    @app.post("/runs/{run_id}/query")
    def query(run_id: str, body: QueryBody):
        metric = service.check_metric_fitted(run_id, body.metric)
        meta = service.meta(run_id)
        n_players = meta["metrics"][metric]["n_players"]
        targets = _check_indices(body.targets, "targets", n_players)
        given = _check_indices(body.given, "given", n_players)
        banned = _check_indices(body.banned, "banned", n_players)
        pinned = _check_indices(body.pinned, "pinned", n_players)
        if banned & pinned:
            raise ValueError("a player cannot be both pinned and banned")

        posterior, report = service.posterior(run_id, metric, banned, pinned)
        joint_all = joint_probability(posterior, targets | given)
        given_prob = joint_probability(posterior, given)
        probability = conditional_probability(posterior, targets, given)
        n_condition = posterior.count_containing(given)
        return {
            "run_id": run_id,
            "metric": metric,
            "version": report["version"],
            "targets": sorted(targets),
            "given": sorted(given),
            "banned": sorted(banned),
            "pinned": sorted(pinned),
            "resolved": bool(banned or pinned),
            "draws": posterior.size,
            "conditioning_draws": n_condition,
            "probability": probability,
            "se": monte_carlo_se(probability, n_condition) if n_condition else None,
            "joint_probability": joint_all,
            "given_probability": given_prob,
        }

    if ui_dir is not None:
        ui_path = Path(ui_dir)
        if ui_path.is_dir():
            app.mount("/", StaticFiles(directory=ui_path, html=True), name="ui")

    return app
