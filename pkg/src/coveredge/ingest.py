"""Reading, validating and writing game datasets in the canonical CSV format.

Columns: ``date,season,home,away,home_score,away_score,favorite,spread,total_line``.
Empty ``favorite``/``spread`` cells mean no spread was posted; an empty
``total_line`` means no total. A file with any malformed row is rejected whole.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Union

from .model import (
    CoverEdgeError,
    GameRecord,
    SeasonId,
    TeamId,
    format_line,
)

COLUMNS = ("date", "season", "home", "away", "home_score", "away_score", "favorite", "spread", "total_line")

#: Fraction of games allowed to lack a line before validation warns.
MISSING_LINE_WARN_FRACTION = 0.05


class IoError(CoverEdgeError, OSError):
    pass


class MalformedRow(CoverEdgeError, ValueError):
    """One or more rows failed to parse; ``errors`` holds ``(line, reason)`` pairs."""

    def __init__(self, errors: list[tuple[int, str]]):
        self.errors = list(errors)
        head = "; ".join(f"line {n}: {r}" for n, r in self.errors[:5])
        more = f" (+{len(self.errors) - 5} more)" if len(self.errors) > 5 else ""
        super().__init__(f"{len(self.errors)} malformed row(s): {head}{more}")


class DuplicateGame(CoverEdgeError, ValueError):
    def __init__(self, key: tuple):
        self.key = key
        season, date, home, away = key
        super().__init__(f"duplicate game {season} {date} {away} @ {home}")


class UnknownSeason(CoverEdgeError, KeyError):
    def __str__(self) -> str:
        return f"season {self.args[0]} not present in dataset"


def _sort_key(g: GameRecord):
    return (g.season, g.date, g.home.name, g.away.name)


@dataclass(frozen=True)
class Dataset:
    games: tuple[GameRecord, ...]
    digest: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.games, key=_sort_key))
        seen: set = set()
        for g in ordered:
            if g.key in seen:
                raise DuplicateGame(g.key)
            seen.add(g.key)
        object.__setattr__(self, "games", ordered)
        if not self.digest:
            object.__setattr__(self, "digest", hashlib.sha256(to_csv(ordered).encode()).hexdigest())

    @property
    def seasons(self) -> frozenset[SeasonId]:
        return frozenset(g.season for g in self.games)

    @property
    def row_count(self) -> int:
        return len(self.games)

    @cached_property
    def _by_season(self) -> dict[SeasonId, tuple[GameRecord, ...]]:
        out: dict[SeasonId, list[GameRecord]] = {}
        for g in self.games:
            out.setdefault(g.season, []).append(g)
        return {s: tuple(gs) for s, gs in out.items()}

    def season_games(self, season: SeasonId) -> tuple[GameRecord, ...]:
        try:
            return self._by_season[season]
        except KeyError:
            raise UnknownSeason(season) from None


@dataclass
class ValidationReport:
    season: SeasonId
    teams_found: int
    games_per_team: dict[TeamId, int]
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return not self.errors


def _parse_row(row: dict[str, str]) -> GameRecord:
    try:
        date = dt.date.fromisoformat(row["date"].strip())
    except ValueError:
        raise ValueError(f"bad date {row['date']!r}") from None
    season = SeasonId.parse(row["season"])
    scores = []
    for col in ("home_score", "away_score"):
        text = row[col].strip()
        if not text.isdigit():
            raise ValueError(f"{col} must be a non-negative integer, got {text!r}")
        scores.append(int(text))
    fav = row["favorite"].strip()
    spread = row["spread"].strip()
    total = row["total_line"].strip()
    return GameRecord(
        date=date,
        season=season,
        home=TeamId(row["home"]),
        away=TeamId(row["away"]),
        home_score=scores[0],
        away_score=scores[1],
        favorite=TeamId(fav) if fav else None,
        spread=spread or None,
        total_line=total or None,
    )


def parse_text(text: str) -> Dataset:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise MalformedRow([(1, "missing header row")])
    missing = [c for c in COLUMNS if c not in reader.fieldnames]
    if missing:
        raise MalformedRow([(1, f"header lacks column(s): {', '.join(missing)}")])
    games: list[GameRecord] = []
    errors: list[tuple[int, str]] = []
    for row in reader:
        line = reader.line_num
        if None in row or any(v is None for v in row.values()):
            errors.append((line, "wrong number of fields"))
            continue
        try:
            games.append(_parse_row(row))
        except (ValueError, CoverEdgeError) as exc:
            errors.append((line, str(exc)))
    if errors:
        raise MalformedRow(errors)
    return Dataset(tuple(games))


def parse_games(path: Union[str, Path]) -> Dataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return parse_text(text)


def to_csv(games: Iterable[GameRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for g in games:
        w.writerow(
            [
                g.date.isoformat(),
                g.season.label,
                g.home.name,
                g.away.name,
                g.home_score,
                g.away_score,
                g.favorite.name if g.favorite else "",
                format_line(g.spread),
                format_line(g.total_line),
            ]
        )
    return buf.getvalue()


def serialize(ds: Dataset) -> str:
    return to_csv(ds.games)


def write_games(ds: Dataset, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize(ds), encoding="utf-8")


def validate_season(
    ds: Dataset, season: SeasonId, expected_teams: int, expected_games: int | None = 82
) -> ValidationReport:
    """Check one season's league size and schedule.

    A wrong team count is an error. Uneven or short schedules (lockout
    seasons) and missing lines only produce warnings.
    """
    games = ds.season_games(season)
    counts: Counter[TeamId] = Counter()
    missing_spread = missing_total = 0
    for g in games:
        counts[g.home] += 1
        counts[g.away] += 1
        missing_spread += g.spread is None
        missing_total += g.total_line is None
    report = ValidationReport(season, len(counts), dict(sorted(counts.items())))
    if len(counts) != expected_teams:
        report.errors.append(f"{len(counts)} teams found, expected {expected_teams}")
    distinct = sorted(set(counts.values()))
    if len(distinct) > 1:
        report.warnings.append(f"unequal games per team: {distinct[0]} to {distinct[-1]}")
    elif expected_games is not None and distinct and distinct[0] != expected_games:
        report.warnings.append(f"{distinct[0]} games per team, expected {expected_games}")
    for what, n in (("spread", missing_spread), ("total line", missing_total)):
        if n > MISSING_LINE_WARN_FRACTION * len(games):
            report.warnings.append(f"{what} missing for {n} of {len(games)} games")
    return report
