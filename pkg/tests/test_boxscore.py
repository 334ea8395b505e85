"""Ingestion, metric formulas, and panel assembly."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lineuplab.boxscore import (
    BOXSCORE_COLUMNS,
    BoxScoreRow,
    RosterEntry,
    build_panel,
    compute_eff,
    compute_pir,
    compute_win_score,
    parse_boxscores,
    parse_roster,
)
from lineuplab.errors import (
    DataValidationError,
    EmptyPanelError,
    ReferenceError_,
    SchemaError,
)

HEADER = ",".join(BOXSCORE_COLUMNS)


def line(player=1, match=1, minutes="20", home="0", **counts):
    fields = {c: "0" for c in BOXSCORE_COLUMNS}
    fields.update(player=str(player), match=str(match), minutes=minutes, home=home)
    for key, value in counts.items():
        fields[key] = str(value)
    return ",".join(fields[c] for c in BOXSCORE_COLUMNS)


ROSTER_TEXT = "index,name,classification,sex\n1,Ada,2.5,F\n2,Ben,4.0,M\n"


class TestParseBoxscores:
    def test_single_row(self):
        rows = parse_boxscores(HEADER + "\n" + line(points=7, fga=6, missed_fg=2))
        assert len(rows) == 1
        assert rows[0].points == 7
        assert rows[0].minutes == 20.0

    def test_header_order_insensitive(self):
        cols = list(reversed(BOXSCORE_COLUMNS))
        fields = {c: "0" for c in BOXSCORE_COLUMNS}
        fields.update(player="3", match="4", minutes="12.5", points="9")
        text = ",".join(cols) + "\n" + ",".join(fields[c] for c in cols)
        (row,) = parse_boxscores(text)
        assert (row.player_index, row.match_index, row.minutes, row.points) == (3, 4, 12.5, 9)

    def test_missing_column_names_it(self):
        cols = [c for c in BOXSCORE_COLUMNS if c != "turnovers"]
        text = ",".join(cols) + "\n" + ",".join("1" for _ in cols)
        with pytest.raises(SchemaError, match="turnovers"):
            parse_boxscores(text)

    def test_negative_minutes_cites_row(self):
        text = HEADER + "\n" + line() + "\n" + line(player=2, minutes="-3")
        with pytest.raises(DataValidationError, match="row 3"):
            parse_boxscores(text)

    def test_negative_count_rejected(self):
        with pytest.raises(DataValidationError, match="points"):
            parse_boxscores(HEADER + "\n" + line(points=-1))

    def test_duplicate_player_match(self):
        text = HEADER + "\n" + line(player=2, match=5) + "\n" + line(player=2, match=5)
        with pytest.raises(DataValidationError, match="player 2.*match 5"):
            parse_boxscores(text)

    def test_inconsistent_home_flag(self):
        text = (HEADER + "\n" + line(player=1, match=2, home="1")
                + "\n" + line(player=2, match=2, home="0"))
        with pytest.raises(DataValidationError, match="match 2"):
            parse_boxscores(text)

    def test_minutes_clock_format(self):
        (row,) = parse_boxscores(HEADER + "\n" + line(minutes="12:30"))
        assert row.minutes == 12.5

    def test_missed_exceeding_attempts(self):
        with pytest.raises(DataValidationError, match="missed_fg"):
            parse_boxscores(HEADER + "\n" + line(missed_fg=3, fga=2))


class TestParseRoster:
    def test_roundtrip(self):
        entries = parse_roster(ROSTER_TEXT)
        assert [e.name for e in entries] == ["Ada", "Ben"]
        assert entries[0].is_female and not entries[1].is_female

    def test_bad_classification(self):
        with pytest.raises(DataValidationError):
            parse_roster("index,name,classification,sex\n1,Ada,2.7,F\n")

    def test_bad_sex_code(self):
        with pytest.raises(DataValidationError):
            parse_roster("index,name,classification,sex\n1,Ada,2.5,X\n")

    def test_missing_column(self):
        with pytest.raises(SchemaError, match="sex"):
            parse_roster("index,name,classification\n1,Ada,2.5\n")


ZERO = BoxScoreRow(1, 1, 10.0)


class TestMetrics:
    def test_eff_zero_row(self):
        assert compute_eff(ZERO) == 0

    def test_eff_example(self):
        row = BoxScoreRow(1, 1, 20.0, points=12, rebounds=6, assists=4,
                          steals=2, blocks=1, missed_field_goals=5,
                          missed_free_throws=1, turnovers=2,
                          field_goals_attempted=5, free_throws_attempted=1)
        assert compute_eff(row) == 17

    def test_eff_negative(self):
        row = BoxScoreRow(1, 1, 20.0, missed_field_goals=3, missed_free_throws=1,
                          turnovers=2, field_goals_attempted=3, free_throws_attempted=1)
        assert compute_eff(row) == -6

    def test_pir_zero_row(self):
        assert compute_pir(ZERO) == 0

    def test_pir_example(self):
        row = BoxScoreRow(1, 1, 20.0, points=12, rebounds=6, assists=4,
                          steals=2, blocks=1, missed_field_goals=5,
                          missed_free_throws=1, turnovers=2, fouls_drawn=3,
                          shots_rejected=1, personal_fouls=2,
                          field_goals_attempted=5, free_throws_attempted=1)
        assert compute_pir(row) == 17

    def test_pir_single_term(self):
        assert compute_pir(BoxScoreRow(1, 1, 5.0, fouls_drawn=5)) == 5

    def test_win_score_zero_row(self):
        assert compute_win_score(ZERO) == 0

    def test_win_score_example(self):
        row = BoxScoreRow(1, 1, 20.0, points=12, rebounds=6, assists=4,
                          steals=2, blocks=1, turnovers=2, personal_fouls=2,
                          field_goals_attempted=10, free_throws_attempted=4)
        assert compute_win_score(row) == 7.5

    def test_win_score_half_weight(self):
        assert compute_win_score(BoxScoreRow(1, 1, 5.0, assists=2)) == 1.0


counting_rows = st.builds(
    BoxScoreRow,
    st.just(1), st.just(1), st.just(10.0),
    points=st.integers(0, 40), rebounds=st.integers(0, 20),
    assists=st.integers(0, 15), steals=st.integers(0, 10),
    blocks=st.integers(0, 10), missed_field_goals=st.integers(0, 15),
    missed_free_throws=st.integers(0, 10), turnovers=st.integers(0, 10),
    fouls_drawn=st.integers(0, 10), shots_rejected=st.integers(0, 10),
    personal_fouls=st.integers(0, 5), field_goals_attempted=st.just(40),
    free_throws_attempted=st.just(20),
)


class TestMetricProperties:
    @given(counting_rows)
    @settings(max_examples=200)
    def test_pir_minus_eff_identity(self, row):
        assert compute_pir(row) - compute_eff(row) == (
            row.fouls_drawn - row.shots_rejected - row.personal_fouls
        )

    @given(counting_rows)
    @settings(max_examples=100)
    def test_doubling_counts_doubles_metrics(self, row):
        doubled = BoxScoreRow(
            row.player_index, row.match_index, row.minutes,
            points=2 * row.points, rebounds=2 * row.rebounds,
            assists=2 * row.assists, steals=2 * row.steals,
            blocks=2 * row.blocks, missed_field_goals=2 * row.missed_field_goals,
            missed_free_throws=2 * row.missed_free_throws,
            turnovers=2 * row.turnovers, fouls_drawn=2 * row.fouls_drawn,
            shots_rejected=2 * row.shots_rejected,
            personal_fouls=2 * row.personal_fouls,
            field_goals_attempted=2 * row.field_goals_attempted,
            free_throws_attempted=2 * row.free_throws_attempted,
        )
        assert compute_eff(doubled) == 2 * compute_eff(row)
        assert compute_pir(doubled) == 2 * compute_pir(row)
        assert compute_win_score(doubled) == 2 * compute_win_score(row)


class TestBuildPanel:
    ROSTER = [RosterEntry(1, "Ada", 2.5, True), RosterEntry(2, "Ben", 4.0, False)]

    def test_per_minute_value(self):
        rows = [BoxScoreRow(1, 1, 20.0, points=12, rebounds=6, assists=4,
                            steals=2, blocks=1, missed_field_goals=5,
                            missed_free_throws=1, turnovers=2,
                            field_goals_attempted=5, free_throws_attempted=1)]
        panel, mapping = build_panel(rows, self.ROSTER[:1], "EFF",
                                     min_season_minutes=0.0)
        assert panel.n_observations == 1
        assert panel.observations[0].value == 17 / 20.0
        assert mapping == {1: 1}

    def test_zero_minute_rows_dropped(self):
        rows = [BoxScoreRow(1, 1, 50.0, points=4),
                BoxScoreRow(1, 2, 0.0)]
        panel, _ = build_panel(rows, self.ROSTER[:1], "EFF")
        assert panel.n_observations == 1
        assert panel.match_count == 2

    def test_low_minutes_player_removed_and_reindexed(self):
        rows = [BoxScoreRow(1, 1, 30.0, points=2),
                BoxScoreRow(2, 1, 60.0, points=3),
                BoxScoreRow(2, 2, 45.0, points=1)]
        panel, mapping = build_panel(rows, self.ROSTER, "EFF",
                                     min_season_minutes=40.0)
        assert [e.name for e in panel.roster] == ["Ben"]
        assert panel.roster[0].index == 1
        assert mapping == {2: 1}
        assert all(o.player_index == 1 for o in panel.observations)

    def test_boundary_exactly_at_cutoff_removed(self):
        rows = [BoxScoreRow(1, 1, 40.0, points=2),
                BoxScoreRow(2, 1, 41.0, points=3)]
        panel, mapping = build_panel(rows, self.ROSTER, "EFF",
                                     min_season_minutes=40.0)
        assert mapping == {2: 1}

    def test_unknown_player_reference(self):
        with pytest.raises(ReferenceError_):
            build_panel([BoxScoreRow(3, 1, 10.0)], self.ROSTER, "EFF")

    def test_empty_after_filtering(self):
        with pytest.raises(EmptyPanelError):
            build_panel([BoxScoreRow(1, 1, 5.0)], self.ROSTER[:1], "EFF")

    def test_unknown_metric(self):
        with pytest.raises(ValueError):
            build_panel([BoxScoreRow(1, 1, 50.0)], self.ROSTER[:1], "effx")

    def test_obs_count_matches_positive_minute_rows(self):
        rows = [BoxScoreRow(1, j, 15.0 if j % 3 else 0.0, points=j)
                for j in range(1, 10)]
        panel, _ = build_panel(rows, self.ROSTER[:1], "EFF",
                               min_season_minutes=0.0)
        assert panel.n_observations == sum(1 for r in rows if r.minutes > 0)

    def test_fingerprint_stable_and_sensitive(self):
        rows = [BoxScoreRow(1, 1, 50.0, points=4)]
        p1, _ = build_panel(rows, self.ROSTER[:1], "EFF")
        p2, _ = build_panel(rows, self.ROSTER[:1], "EFF")
        assert p1.fingerprint == p2.fingerprint
        rows2 = [BoxScoreRow(1, 1, 50.0, points=5)]
        p3, _ = build_panel(rows2, self.ROSTER[:1], "EFF")
        assert p1.fingerprint != p3.fingerprint

    def test_home_flag_carried(self):
        rows = [BoxScoreRow(1, 1, 50.0, points=4, home=True)]
        panel, _ = build_panel(rows, self.ROSTER[:1], "EFF")
        assert panel.observations[0].home is True

    def test_value_is_finite(self, demo_panel):
        assert all(math.isfinite(o.value) for o in demo_panel.observations)
