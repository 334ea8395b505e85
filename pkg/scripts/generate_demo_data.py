"""Regenerate the bundled demonstration dataset.

Writes roster.csv (the nine-player reference roster) and boxscores.csv
(a seeded synthetic season: 18 matches, unbalanced appearances, a few
zero-minute rows) into src/lineuplab/data/. The generator is deterministic,
so rerunning it reproduces the committed files byte for byte.
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np

ROSTER = [
    (1, "Annabel Breuer", 1.5, "F"),
    (2, "Correy Rossi", 2.0, "M"),
    (3, "Dejon Green", 3.5, "M"),
    (4, "Dirk Passivan", 4.5, "M"),
    (5, "Lucas Jung", 1.0, "M"),
    (6, "Natalie Passivan", 4.5, "F"),
    (7, "Patrick Dorner", 3.5, "M"),
    (8, "Svenja Erni", 3.5, "F"),
    (9, "Walter Vlaanderen", 4.5, "M"),
]

N_MATCHES = 18
SEED = 20260815

BOX_HEADER = [
    "player", "match", "minutes", "points", "rebounds", "assists", "steals",
    "blocks", "missed_fg", "missed_ft", "turnovers", "fouls_drawn",
    "shots_rejected", "personal_fouls", "fga", "fta", "home",
]


def simulate_rows(rng: np.random.Generator) -> list[list]:
    home_flags = rng.integers(0, 2, size=N_MATCHES)
    rows = []
    for match in range(1, N_MATCHES + 1):
        home = int(home_flags[match - 1])
        for index, _, classification, _ in ROSTER:
            if rng.random() < 0.04:
                continue  # did not dress for this match
            if rng.random() < 0.06:
                minutes = 0.0
            else:
                minutes = float(np.round(rng.uniform(8.0, 34.0), 1))
            if minutes == 0.0:
                rows.append([index, match, "0", *([0] * 13), home])
                continue

            fga = int(rng.poisson(minutes * 0.50))
            missed_fg = int(rng.binomial(fga, 0.55)) if fga else 0
            fta = int(rng.poisson(minutes * 0.12))
            missed_ft = int(rng.binomial(fta, 0.35)) if fta else 0
            points = 2 * (fga - missed_fg) + (fta - missed_ft)
            rebounds = int(rng.poisson(minutes * (0.10 + 0.03 * classification)))
            assists = int(rng.poisson(minutes * 0.08))
            steals = int(rng.poisson(minutes * 0.05))
            blocks = int(rng.poisson(minutes * 0.02))
            turnovers = int(rng.poisson(minutes * 0.07))
            fouls_drawn = int(rng.poisson(minutes * 0.06))
            shots_rejected = int(rng.poisson(minutes * 0.02))
            personal_fouls = min(int(rng.poisson(minutes * 0.05)), 5)
            rows.append([
                index, match, f"{minutes:g}", points, rebounds, assists,
                steals, blocks, missed_fg, missed_ft, turnovers, fouls_drawn,
                shots_rejected, personal_fouls, fga, fta, home,
            ])
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "src" / "lineuplab" / "data",
    )
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with open(args.out / "roster.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "name", "classification", "sex"])
        for index, name, classification, sex in ROSTER:
            writer.writerow([index, name, f"{classification:g}", sex])

    rng = np.random.Generator(np.random.Philox(key=SEED))
    rows = simulate_rows(rng)
    with open(args.out / "boxscores.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BOX_HEADER)
        writer.writerows(rows)

    print(f"wrote {args.out / 'roster.csv'} ({len(ROSTER)} players)")
    print(f"wrote {args.out / 'boxscores.csv'} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
