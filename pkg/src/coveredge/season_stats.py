"""Per-team season aggregates and the winning-percentage ranking."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .ingest import Dataset
from .model import Ats, CoverEdgeError, OverUnder, SeasonId, TeamId, derive_outcome


class DuplicateTeam(CoverEdgeError, ValueError):
    pass


def _ratio(num: int, den: int) -> Optional[Fraction]:
    return Fraction(num, den) if den else None


@dataclass(frozen=True)
class TeamSeasonStats:
    """Counts for one team in one season; percentages are exact and pushes excluded."""

    team: TeamId
    season: SeasonId
    wins: int = 0
    losses: int = 0
    covers: int = 0
    no_covers: int = 0
    ats_pushes: int = 0
    overs: int = 0
    unders: int = 0
    ou_pushes: int = 0
    point_diff: int = 0

    @property
    def games(self) -> int:
        return self.wins + self.losses

    @property
    def games_with_spread(self) -> int:
        return self.covers + self.no_covers + self.ats_pushes

    @property
    def games_with_total(self) -> int:
        return self.overs + self.unders + self.ou_pushes

    @property
    def w_pct(self) -> Optional[Fraction]:
        return _ratio(self.wins, self.wins + self.losses)

    @property
    def c_pct(self) -> Optional[Fraction]:
        return _ratio(self.covers, self.covers + self.no_covers)

    @property
    def n_pct(self) -> Optional[Fraction]:
        return _ratio(self.no_covers, self.covers + self.no_covers)

    @property
    def o_pct(self) -> Optional[Fraction]:
        return _ratio(self.overs, self.overs + self.unders)


def format_pct(value: Optional[Fraction], places: int = 4) -> str:
    """Round half-up at ``places`` decimals, as standings tables print."""
    if value is None:
        return ""
    scaled = value * 10**places
    q = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
    return f"{q // 10**places}.{q % 10**places:0{places}d}"


def team_season_stats(ds: Dataset, season: SeasonId) -> list[TeamSeasonStats]:
    tallies: dict[TeamId, dict[str, int]] = {}

    def tally(team: TeamId) -> dict[str, int]:
        return tallies.setdefault(team, dict.fromkeys(
            ("wins", "losses", "covers", "no_covers", "ats_pushes",
             "overs", "unders", "ou_pushes", "point_diff"), 0))

    ats_field = {Ats.COVER: "covers", Ats.NO_COVER: "no_covers", Ats.PUSH: "ats_pushes"}
    ou_field = {OverUnder.OVER: "overs", OverUnder.UNDER: "unders", OverUnder.PUSH: "ou_pushes"}
    for game in ds.season_games(season):
        out = derive_outcome(game)
        tally(out.winner)["wins"] += 1
        tally(out.loser)["losses"] += 1
        tally(out.winner)["point_diff"] += out.delta_w
        tally(out.loser)["point_diff"] -= out.delta_w
        for team, res in out.ats_result.items():
            tally(team)[ats_field[res]] += 1
        if out.ou_result is not None:
            for team in game.teams:
                tally(team)[ou_field[out.ou_result]] += 1
    return [TeamSeasonStats(team, season, **t) for team, t in sorted(tallies.items())]


@dataclass(frozen=True)
class SeasonRanking:
    """Teams of one season ordered by winning percentage, position 1 = worst."""

    season: SeasonId
    positions: tuple[TeamSeasonStats, ...]

    def __len__(self) -> int:
        return len(self.positions)

    def at(self, position: int) -> TeamSeasonStats:
        if not 1 <= position <= len(self.positions):
            raise IndexError(position)
        return self.positions[position - 1]

    def from_top(self, k: int) -> TeamSeasonStats:
        """The k-th most winning team (k = 1 is the best record)."""
        return self.at(len(self.positions) - k + 1)

    def items(self) -> Iterable[tuple[int, TeamSeasonStats]]:
        return enumerate(self.positions, start=1)


def rank_by_win_pct(stats: Sequence[TeamSeasonStats]) -> SeasonRanking:
    if not stats:
        raise ValueError("cannot rank an empty season")
    seasons = {s.season for s in stats}
    if len(seasons) != 1:
        raise ValueError(f"stats span several seasons: {sorted(map(str, seasons))}")
    names = [s.team for s in stats]
    if len(set(names)) != len(names):
        dup = sorted({n.name for n in names if names.count(n) > 1})
        raise DuplicateTeam(f"team(s) listed twice: {', '.join(dup)}")
    for s in stats:
        if s.w_pct is None:
            raise ValueError(f"{s.team} has no decided games")
    ordered = sorted(stats, key=lambda s: (s.w_pct, s.point_diff, s.team.name))
    return SeasonRanking(seasons.pop(), tuple(ordered))


def season_ranking(ds: Dataset, season: SeasonId) -> SeasonRanking:
    return rank_by_win_pct(team_season_stats(ds, season))
