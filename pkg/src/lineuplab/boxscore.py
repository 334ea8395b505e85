"""Box-score ingestion, per-minute performance metrics, and panel assembly.

Raw data arrives as two comma-delimited files: one box-score row per player
per match, and a roster file carrying each player's functional classification
and sex. The functions here turn those into the longitudinal panel the model
consumes: one per-minute metric value per (player, match) appearance.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field

from .errors import (
    DataValidationError,
    EmptyPanelError,
    ReferenceError_,
    SchemaError,
)

METRICS = ("EFF", "PIR", "WIN_SCORE")

BOXSCORE_COLUMNS = (
    "player", "match", "minutes", "points", "rebounds", "assists", "steals",
    "blocks", "missed_fg", "missed_ft", "turnovers", "fouls_drawn",
    "shots_rejected", "personal_fouls", "fga", "fta", "home",
)

ROSTER_COLUMNS = ("index", "name", "classification", "sex")

VALID_CLASSIFICATIONS = tuple(x / 2.0 for x in range(2, 10))  # 1.0 .. 4.5


@dataclass(frozen=True)
class RosterEntry:
    """One player: 1-based index, display name, class points, sex flag."""

    index: int
    name: str
    classification: float
    is_female: bool

    def __post_init__(self):
        if self.classification not in VALID_CLASSIFICATIONS:
            raise DataValidationError(
                f"classification {self.classification} for {self.name!r} is not "
                f"a half-point value between 1.0 and 4.5"
            )
        if self.index < 1:
            raise DataValidationError(f"player index {self.index} must be >= 1")


@dataclass(frozen=True)
class BoxScoreRow:
    """Counting statistics for one player in one match."""

    player_index: int
    match_index: int
    minutes: float
    points: int = 0
    rebounds: int = 0
    assists: int = 0
    steals: int = 0
    blocks: int = 0
    missed_field_goals: int = 0
    missed_free_throws: int = 0
    turnovers: int = 0
    fouls_drawn: int = 0
    shots_rejected: int = 0
    personal_fouls: int = 0
    field_goals_attempted: int = 0
    free_throws_attempted: int = 0
    home: bool = False

    def __post_init__(self):
        if self.missed_field_goals > self.field_goals_attempted:
            raise DataValidationError(
                f"missed_fg {self.missed_field_goals} exceeds fga "
                f"{self.field_goals_attempted} for player {self.player_index}, "
                f"match {self.match_index}"
            )
        if self.missed_free_throws > self.free_throws_attempted:
            raise DataValidationError(
                f"missed_ft {self.missed_free_throws} exceeds fta "
                f"{self.free_throws_attempted} for player {self.player_index}, "
                f"match {self.match_index}"
            )


@dataclass(frozen=True)
class Observation:
    """One panel entry: per-minute metric value for player i at match j."""

    player_index: int
    match_index: int
    value: float
    home: bool


@dataclass(frozen=True)
class Panel:
    """Longitudinal panel of per-minute metric values, possibly unbalanced."""

    roster: tuple[RosterEntry, ...]
    observations: tuple[Observation, ...]
    metric: str
    match_count: int

    # memoised digest; panels are frozen so one computation suffices
    _fingerprint: str = field(default="", repr=False, compare=False)

    def __post_init__(self):
        n = len(self.roster)
        for k, entry in enumerate(self.roster, start=1):
            if entry.index != k:
                raise DataValidationError(
                    f"roster indices must be contiguous from 1; "
                    f"position {k} holds index {entry.index}"
                )
        seen = set()
        for obs in self.observations:
            if not 1 <= obs.player_index <= n:
                raise ReferenceError_(
                    f"observation refers to player {obs.player_index}, "
                    f"roster has {n} players"
                )
            if not 1 <= obs.match_index <= self.match_count:
                raise ReferenceError_(
                    f"observation refers to match {obs.match_index}, "
                    f"panel has {self.match_count} matches"
                )
            key = (obs.player_index, obs.match_index)
            if key in seen:
                raise DataValidationError(f"duplicate observation for {key}")
            seen.add(key)
        object.__setattr__(self, "_fingerprint", self._digest())

    def _digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.metric.encode())
        h.update(str(self.match_count).encode())
        for e in self.roster:
            h.update(f"{e.index}|{e.name}|{e.classification!r}|{e.is_female}".encode())
        for o in self.observations:
            h.update(f"{o.player_index}|{o.match_index}|{o.value!r}|{o.home}".encode())
        return h.hexdigest()

    @property
    def fingerprint(self) -> str:
        return self._fingerprint

    @property
    def n_players(self) -> int:
        return len(self.roster)

    @property
    def n_observations(self) -> int:
        return len(self.observations)


def compute_eff(row: BoxScoreRow) -> float:
    """Efficiency: positive box-score events minus misses and turnovers."""
    positive = row.points + row.rebounds + row.assists + row.steals + row.blocks
    negative = row.missed_field_goals + row.missed_free_throws + row.turnovers
    return float(positive - negative)


def compute_pir(row: BoxScoreRow) -> float:
    """Performance index rating: efficiency plus fouls drawn, minus
    shots rejected and personal fouls."""
    positive = (row.points + row.rebounds + row.assists + row.steals
                + row.blocks + row.fouls_drawn)
    negative = (row.missed_field_goals + row.missed_free_throws + row.turnovers
                + row.shots_rejected + row.personal_fouls)
    return float(positive - negative)


def compute_win_score(row: BoxScoreRow) -> float:
    """Win score: charges attempts instead of misses, half-weights
    assists, blocks, attempted free throws, and personal fouls."""
    positive = (row.points + row.rebounds + 0.5 * row.assists + row.steals
                + 0.5 * row.blocks)
    negative = (row.field_goals_attempted + 0.5 * row.free_throws_attempted
                + row.turnovers + 0.5 * row.personal_fouls)
    return float(positive - negative)


METRIC_FUNCTIONS = {
    "EFF": compute_eff,
    "PIR": compute_pir,
    "WIN_SCORE": compute_win_score,
}

_ROW_FIELDS = {
    "player": "player_index",
    "match": "match_index",
    "points": "points",
    "rebounds": "rebounds",
    "assists": "assists",
    "steals": "steals",
    "blocks": "blocks",
    "missed_fg": "missed_field_goals",
    "missed_ft": "missed_free_throws",
    "turnovers": "turnovers",
    "fouls_drawn": "fouls_drawn",
    "shots_rejected": "shots_rejected",
    "personal_fouls": "personal_fouls",
    "fga": "field_goals_attempted",
    "fta": "free_throws_attempted",
}


def _parse_minutes(raw: str, row_number: int) -> float:
    """Accept decimal minutes or an mm:ss clock string."""
    raw = raw.strip()
    try:
        if ":" in raw:
            mm, ss = raw.split(":", 1)
            seconds = int(ss)
            if not 0 <= seconds < 60:
                raise ValueError
            value = int(mm) + seconds / 60.0
        else:
            value = float(raw)
    except ValueError:
        raise DataValidationError(
            f"cannot parse minutes value {raw!r}", row=row_number
        ) from None
    if value < 0:
        raise DataValidationError(f"minutes {raw!r} is negative", row=row_number)
    return value


def _nonneg_int(raw: str, column: str, row_number: int) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise DataValidationError(
            f"column {column!r}: {raw!r} is not an integer", row=row_number
        ) from None
    if value < 0:
        raise DataValidationError(
            f"column {column!r}: {value} is negative", row=row_number
        )
    return value


def parse_boxscores(raw_table: str) -> list[BoxScoreRow]:
    """Parse a comma-delimited box-score table into rows.

    The header must name every required column (any order). Zero-minute
    rows are kept; they are dropped later when the panel is built.
    """
    reader = csv.DictReader(io.StringIO(raw_table))
    if reader.fieldnames is None:
        raise SchemaError("box-score table is empty")
    header = [h.strip() for h in reader.fieldnames]
    missing = [c for c in BOXSCORE_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"box-score table is missing column(s): {', '.join(missing)}")

    rows: list[BoxScoreRow] = []
    seen: dict[tuple[int, int], int] = {}
    home_by_match: dict[int, bool] = {}
    for line_no, record in enumerate(reader, start=2):
        record = {k.strip(): (v or "").strip() for k, v in record.items() if k}
        kwargs = {
            field_name: _nonneg_int(record[col], col, line_no)
            for col, field_name in _ROW_FIELDS.items()
        }
        kwargs["minutes"] = _parse_minutes(record["minutes"], line_no)
        home_raw = record["home"]
        if home_raw not in ("0", "1"):
            raise DataValidationError(
                f"column 'home': {home_raw!r} is not 0 or 1", row=line_no
            )
        kwargs["home"] = home_raw == "1"
        if kwargs["match_index"] < 1:
            raise DataValidationError(
                f"match index {kwargs['match_index']} must be >= 1", row=line_no
            )

        try:
            row = BoxScoreRow(**kwargs)
        except DataValidationError as exc:
            raise DataValidationError(str(exc), row=line_no) from None

        key = (row.player_index, row.match_index)
        if key in seen:
            raise DataValidationError(
                f"duplicate (player {key[0]}, match {key[1]}); "
                f"first seen on row {seen[key]}",
                row=line_no,
            )
        seen[key] = line_no

        prior_home = home_by_match.get(row.match_index)
        if prior_home is not None and prior_home != row.home:
            raise DataValidationError(
                f"match {row.match_index} has inconsistent home flags", row=line_no
            )
        home_by_match[row.match_index] = row.home
        rows.append(row)
    return rows


def parse_roster(raw_table: str) -> list[RosterEntry]:
    """Parse the roster file: index, name, classification, sex (F/M)."""
    reader = csv.DictReader(io.StringIO(raw_table))
    if reader.fieldnames is None:
        raise SchemaError("roster table is empty")
    header = [h.strip() for h in reader.fieldnames]
    missing = [c for c in ROSTER_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"roster table is missing column(s): {', '.join(missing)}")

    entries: list[RosterEntry] = []
    for line_no, record in enumerate(reader, start=2):
        record = {k.strip(): (v or "").strip() for k, v in record.items() if k}
        try:
            index = int(record["index"])
            classification = float(record["classification"])
        except ValueError:
            raise DataValidationError("malformed roster row", row=line_no) from None
        sex = record["sex"].upper()
        if sex not in ("F", "M"):
            raise DataValidationError(
                f"sex {record['sex']!r} is not F or M", row=line_no
            )
        try:
            entries.append(RosterEntry(
                index=index,
                name=record["name"],
                classification=classification,
                is_female=sex == "F",
            ))
        except DataValidationError as exc:
            raise DataValidationError(str(exc), row=line_no) from None

    entries.sort(key=lambda e: e.index)
    expected = list(range(1, len(entries) + 1))
    if [e.index for e in entries] != expected:
        raise DataValidationError(
            "roster indices must be unique and contiguous from 1"
        )
    return entries


def build_panel(
    rows: list[BoxScoreRow],
    roster: list[RosterEntry],
    metric: str,
    min_season_minutes: float = 40.0,
) -> tuple[Panel, dict[int, int]]:
    """Assemble the longitudinal panel for one metric.

    Per-minute values are metric(row) / minutes. Zero-minute rows contribute
    no observation. Players whose season total minutes are <= the threshold
    are dropped and the roster is re-indexed contiguously; the returned dict
    maps original indices to panel indices.
    """
    if metric not in METRIC_FUNCTIONS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    metric_fn = METRIC_FUNCTIONS[metric]

    known = {e.index for e in roster}
    totals = {e.index: 0.0 for e in roster}
    match_count = 0
    for row in rows:
        if row.player_index not in known:
            raise ReferenceError_(
                f"box-score row refers to player {row.player_index}, "
                f"not in roster"
            )
        totals[row.player_index] += row.minutes
        match_count = max(match_count, row.match_index)

    retained = [e for e in sorted(roster, key=lambda e: e.index)
                if totals[e.index] > min_season_minutes]
    if not retained:
        raise EmptyPanelError(
            f"no player exceeds {min_season_minutes} season minutes"
        )
    mapping = {e.index: new for new, e in enumerate(retained, start=1)}
    new_roster = tuple(
        RosterEntry(index=mapping[e.index], name=e.name,
                    classification=e.classification, is_female=e.is_female)
        for e in retained
    )

    observations = []
    for row in rows:
        if row.minutes <= 0 or row.player_index not in mapping:
            continue
        observations.append(Observation(
            player_index=mapping[row.player_index],
            match_index=row.match_index,
            value=metric_fn(row) / row.minutes,
            home=row.home,
        ))
    if not observations:
        raise EmptyPanelError("panel has no observations after filtering")

    panel = Panel(
        roster=new_roster,
        observations=tuple(observations),
        metric=metric,
        match_count=match_count,
    )
    return panel, mapping
