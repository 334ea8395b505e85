"""Run-directory persistence.

A run directory holds everything needed to reproduce and query one fit:

    <root>/<run_id>/
        meta.json                sampler config, roster, fingerprints
        <METRIC>/
            panel.csv            the exact panel the sampler saw
            draws.csv            thinned posterior draws, one row per draw
            convergence.csv      split R-hat and bulk ESS per parameter
            pit.csv              cross-validated PIT per observation
            predictive.csv       one simulated next match (after optimize)
            solutions.csv        per-draw optimal line-ups (after optimize)
            report.v1.json ...   versioned analysis reports (append-only)

Floats are written with repr, which round-trips exactly, so identical
configurations produce byte-identical files and reloaded panels hash to the
fingerprints recorded at fit time. Directories are append-only: a second
optimization writes report.v2.json plus predictive.v2.csv and
solutions.v2.csv rather than touching version 1.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .analytics import LineupPosterior
from .boxscore import Observation, Panel, RosterEntry
from .diagnostics import ConvergenceRow, PitTable
from .errors import DataValidationError, StaleSampleError
from .model import FIXED_EFFECTS, SCALES, PriorSpec
from .optimizer import Lineup, RuleSet
from .predictive import MatchScenario, PredictiveSample
from .sampler import PosteriorSample, SamplerConfig

_RUN_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def fmt(value: float) -> str:
    """Shortest exact decimal form; float(fmt(x)) == x."""
    return repr(float(value))


def derive_run_id(seed: int, config: SamplerConfig,
                  fingerprints: dict[str, str]) -> str:
    payload = json.dumps(
        {
            "seed": seed,
            "chains": config.chains,
            "burn_in": config.burn_in,
            "iterations": config.iterations,
            "thin": config.thin,
            "prior": [config.prior.fixed_effect_sd, config.prior.scale_upper],
            "fingerprints": dict(sorted(fingerprints.items())),
        },
        sort_keys=True,
    )
    return "run-" + hashlib.sha256(payload.encode()).hexdigest()[:12]


@dataclass
class FitResult:
    """Everything a fit produces for one metric."""

    panel: Panel
    mapping: dict[int, int]
    sample: PosteriorSample
    convergence: list[ConvergenceRow]
    warnings: list[str]
    pit: PitTable


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


class RunStore:
    """Flat-file store of run directories under one root."""

    def __init__(self, root):
        self.root = Path(root)

    def run_dir(self, run_id: str) -> Path:
        if not _RUN_ID_RE.match(run_id):
            raise ValueError(f"invalid run id {run_id!r}")
        return self.root / run_id

    def exists(self, run_id: str) -> bool:
        return (self.run_dir(run_id) / "meta.json").is_file()

    def list_runs(self) -> list[dict]:
        if not self.root.is_dir():
            return []
        summaries = []
        for child in sorted(self.root.iterdir()):
            meta_path = child / "meta.json"
            if not meta_path.is_file():
                continue
            meta = json.loads(meta_path.read_text())
            summaries.append({
                "id": meta["run_id"],
                "created_at": meta["created_at"],
                "seed": meta["sampler"]["seed"],
                "metrics": sorted(meta["metrics"]),
            })
        return summaries

    def load_meta(self, run_id: str) -> dict:
        path = self.run_dir(run_id) / "meta.json"
        if not path.is_file():
            raise FileNotFoundError(f"run {run_id!r} not found under {self.root}")
        return json.loads(path.read_text())

    # ---- fit artifacts ----

    def save_fit(self, run_id: str, results: dict[str, FitResult],
                 extra_meta: dict | None = None) -> Path:
        if not results:
            raise ValueError("nothing to save")
        run_dir = self.run_dir(run_id)
        if (run_dir / "meta.json").exists():
            raise FileExistsError(
                f"run {run_id!r} already exists; run directories are append-only"
            )
        run_dir.mkdir(parents=True, exist_ok=True)

        first = next(iter(results.values()))
        config = first.sample.config
        meta = {
            "run_id": run_id,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "rng_algorithm": first.sample.rng_algorithm,
            "sampler": {
                "chains": config.chains,
                "burn_in": config.burn_in,
                "iterations": config.iterations,
                "thin": config.thin,
                "seed": config.seed,
                "prior": {
                    "fixed_effect_sd": config.prior.fixed_effect_sd,
                    "scale_upper": config.prior.scale_upper,
                },
            },
            "metrics": {},
        }
        if extra_meta:
            meta.update(extra_meta)

        for metric, result in results.items():
            panel = result.panel
            if result.sample.panel_fingerprint != panel.fingerprint:
                raise StaleSampleError(
                    f"{metric}: sample fingerprint does not match its panel"
                )
            metric_dir = run_dir / metric
            metric_dir.mkdir(exist_ok=True)
            self._write_panel(metric_dir / "panel.csv", panel)
            self._write_draws(metric_dir / "draws.csv", result.sample)
            _write_csv(
                metric_dir / "convergence.csv",
                ["parameter", "rhat", "ess"],
                [[row.parameter, fmt(row.rhat), fmt(row.ess)]
                 for row in result.convergence],
            )
            _write_csv(
                metric_dir / "pit.csv",
                ["player", "match", "pit", "ess"],
                [[i, j, fmt(result.pit.pit[(i, j)]), fmt(result.pit.ess[(i, j)])]
                 for (i, j) in result.pit.order],
            )
            meta["metrics"][metric] = {
                "panel_fingerprint": panel.fingerprint,
                "n_players": panel.n_players,
                "match_count": panel.match_count,
                "n_observations": panel.n_observations,
                "players": [
                    {
                        "index": e.index,
                        "name": e.name,
                        "classification": e.classification,
                        "is_female": e.is_female,
                    }
                    for e in panel.roster
                ],
                "index_mapping": {str(k): v for k, v in result.mapping.items()},
                "warnings": list(result.warnings),
            }
        _write_json(run_dir / "meta.json", meta)
        return run_dir

    @staticmethod
    def _write_panel(path: Path, panel: Panel) -> None:
        _write_csv(
            path,
            ["player", "match", "value", "home"],
            [[o.player_index, o.match_index, fmt(o.value), int(o.home)]
             for o in panel.observations],
        )

    @staticmethod
    def _write_draws(path: Path, sample: PosteriorSample) -> None:
        names = sample.column_names()
        columns = [sample.column(name) for name in names]
        rows = (
            [int(sample.chain_id[s]), int(sample.iteration[s])]
            + [fmt(col[s]) for col in columns]
            for s in range(sample.size)
        )
        _write_csv(path, ["chain", "iteration"] + names, rows)

    def load_panel(self, run_id: str, metric: str) -> Panel:
        meta = self.load_meta(run_id)
        if metric not in meta["metrics"]:
            raise FileNotFoundError(f"run {run_id!r} has no metric {metric!r}")
        block = meta["metrics"][metric]
        roster = tuple(
            RosterEntry(
                index=p["index"], name=p["name"],
                classification=p["classification"], is_female=p["is_female"],
            )
            for p in block["players"]
        )
        observations = []
        with open(self.run_dir(run_id) / metric / "panel.csv", newline="") as fh:
            for record in csv.DictReader(fh):
                observations.append(Observation(
                    player_index=int(record["player"]),
                    match_index=int(record["match"]),
                    value=float(record["value"]),
                    home=record["home"] == "1",
                ))
        panel = Panel(
            roster=roster,
            observations=tuple(observations),
            metric=metric,
            match_count=block["match_count"],
        )
        if panel.fingerprint != block["panel_fingerprint"]:
            raise DataValidationError(
                f"run {run_id!r} metric {metric}: reloaded panel does not hash "
                "to the fingerprint recorded at fit time"
            )
        return panel

    def load_sample(self, run_id: str, metric: str) -> PosteriorSample:
        meta = self.load_meta(run_id)
        if metric not in meta["metrics"]:
            raise FileNotFoundError(f"run {run_id!r} has no metric {metric!r}")
        block = meta["metrics"][metric]
        n, m = block["n_players"], block["match_count"]

        sampler_meta = meta["sampler"]
        config = SamplerConfig(
            chains=sampler_meta["chains"],
            burn_in=sampler_meta["burn_in"],
            iterations=sampler_meta["iterations"],
            thin=sampler_meta["thin"],
            seed=sampler_meta["seed"],
            prior=PriorSpec(**sampler_meta["prior"]),
        )

        path = self.run_dir(run_id) / metric / "draws.csv"
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            table = list(reader)
        expected = ["chain", "iteration"] + list(FIXED_EFFECTS) + list(SCALES)
        if header[:len(expected)] != expected:
            raise DataValidationError(f"unexpected draws.csv header in {path}")

        raw = np.array(table, dtype=float)
        chain_id = raw[:, 0].astype(int)
        iteration = raw[:, 1].astype(int)
        scalar_names = list(FIXED_EFFECTS) + list(SCALES)
        scalars = {
            name: raw[:, 2 + k].copy() for k, name in enumerate(scalar_names)
        }
        offset = 2 + len(scalar_names)
        blocks = {
            "b0": raw[:, offset:offset + n].copy(),
            "b1": raw[:, offset + n:offset + 2 * n].copy(),
            "b0m": raw[:, offset + 2 * n:offset + 2 * n + m].copy(),
        }
        return PosteriorSample(
            scalars=scalars, blocks=blocks, chain_id=chain_id,
            iteration=iteration,
            panel_fingerprint=block["panel_fingerprint"], config=config,
        )

    # ---- optimization artifacts (versioned) ----

    def report_versions(self, run_id: str, metric: str) -> list[int]:
        metric_dir = self.run_dir(run_id) / metric
        versions = []
        if metric_dir.is_dir():
            for path in metric_dir.glob("report.v*.json"):
                match = re.fullmatch(r"report\.v(\d+)\.json", path.name)
                if match:
                    versions.append(int(match.group(1)))
        return sorted(versions)

    @staticmethod
    def _versioned(name: str, version: int) -> str:
        stem, ext = name.rsplit(".", 1)
        if version == 1:
            return name
        return f"{stem}.v{version}.{ext}"

    def save_optimize(
        self,
        run_id: str,
        metric: str,
        predictive: PredictiveSample,
        posterior: LineupPosterior,
        roster: list[RosterEntry],
        report: dict,
    ) -> int:
        metric_dir = self.run_dir(run_id) / metric
        if not metric_dir.is_dir():
            raise FileNotFoundError(
                f"run {run_id!r} has no fit for metric {metric!r}"
            )
        versions = self.report_versions(run_id, metric)
        version = (versions[-1] + 1) if versions else 1

        pred_name = self._versioned("predictive.csv", version)
        sol_name = self._versioned("solutions.csv", version)
        _write_csv(
            metric_dir / pred_name,
            list(predictive.player_names),
            ([fmt(v) for v in row] for row in predictive.values),
        )

        team_size = posterior.team_size
        member_cols = [f"m{k}" for k in range(1, team_size + 1)]
        rows = []
        for s, lineup in posterior.solutions:
            objective = 0.0
            for i in lineup.members:
                objective += float(predictive.values[s, i - 1])
            women = sum(1 for i in lineup.members if roster[i - 1].is_female)
            total = sum(roster[i - 1].classification for i in lineup.members)
            rows.append(
                [s, *lineup.members, fmt(objective), women, fmt(total)]
            )
        _write_csv(
            metric_dir / sol_name,
            ["draw", *member_cols, "objective", "female_count", "class_sum"],
            rows,
        )

        report = dict(report)
        report["version"] = version
        report["artifacts"] = {"predictive": pred_name, "solutions": sol_name}
        _write_json(metric_dir / f"report.v{version}.json", report)
        return version

    def load_report(self, run_id: str, metric: str,
                    version: int | None = None) -> dict:
        versions = self.report_versions(run_id, metric)
        if not versions:
            raise FileNotFoundError(
                f"run {run_id!r} metric {metric!r} has no reports; "
                "run the optimize step first"
            )
        if version is None:
            version = versions[-1]
        if version not in versions:
            raise FileNotFoundError(
                f"run {run_id!r} metric {metric!r} has no report version {version}"
            )
        path = self.run_dir(run_id) / metric / f"report.v{version}.json"
        return json.loads(path.read_text())

    def load_solutions(self, run_id: str, metric: str,
                       version: int = 1) -> list[tuple[int, Lineup]]:
        name = self._versioned("solutions.csv", version)
        path = self.run_dir(run_id) / metric / name
        out = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            member_cols = [c for c in reader.fieldnames if re.fullmatch(r"m\d+", c)]
            for record in reader:
                members = tuple(int(record[c]) for c in member_cols)
                out.append((int(record["draw"]), Lineup(members)))
        return out

    def load_pit(self, run_id: str, metric: str) -> list[dict]:
        path = self.run_dir(run_id) / metric / "pit.csv"
        if not path.is_file():
            raise FileNotFoundError(
                f"run {run_id!r} metric {metric!r} has no pit.csv"
            )
        rows = []
        with open(path, newline="") as fh:
            for record in csv.DictReader(fh):
                rows.append({
                    "player": int(record["player"]),
                    "match": int(record["match"]),
                    "pit": float(record["pit"]),
                    "ess": float(record["ess"]),
                })
        return rows


def scenario_dict(scenario: MatchScenario) -> dict:
    return {
        "home": scenario.home,
        "match_index": scenario.match_index,
        "shared_match_effect": scenario.shared_match_effect,
    }


def rules_dict(rules: RuleSet) -> dict:
    # JSON object keys are strings; rules_from_dict undoes the cast.
    return {
        "mode": rules.mode,
        "iwbf_cap": rules.iwbf_cap,
        "rbbl_caps": {str(k): v for k, v in sorted(rules.rbbl_caps.items())},
        "team_size": rules.team_size,
    }


def rules_from_dict(payload: dict) -> RuleSet:
    return RuleSet(
        mode=payload["mode"],
        iwbf_cap=float(payload["iwbf_cap"]),
        rbbl_caps={int(k): float(v) for k, v in payload["rbbl_caps"].items()},
        team_size=int(payload["team_size"]),
    )


def scenario_from_dict(payload: dict) -> MatchScenario:
    match_index = payload.get("match_index")
    return MatchScenario(
        home=bool(payload["home"]),
        match_index=None if match_index is None else int(match_index),
        shared_match_effect=bool(payload["shared_match_effect"]),
    )
