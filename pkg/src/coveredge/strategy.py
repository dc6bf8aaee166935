"""Train/test evaluation of the Player Edge strategy and win-rate associations.

Seasons with different league sizes are combined by counting positions from
the relevant extreme: "k-th most winning" for the cover side and "k-th most
losing" for the no-cover side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .edge import DEFAULT_BREAK_EVEN, EdgeReport, EdgeSide, prefix_means, running_average, side_rates
from .ingest import Dataset, UnknownSeason
from .model import Ats, CoverEdgeError, SeasonId, derive_outcome
from .profile import aligned_profile
from .season_stats import TeamSeasonStats, season_ranking, team_season_stats

_ALIGN = {EdgeSide.COVER_TOP: "top", EdgeSide.NOCOVER_BOTTOM: "bottom"}


class InsufficientSeasons(CoverEdgeError, ValueError):
    pass


class DegenerateVariance(CoverEdgeError, ValueError):
    pass


class OverlappingPositions(CoverEdgeError, ValueError):
    pass


@dataclass(frozen=True)
class StrategySpec:
    cover_positions: frozenset[int]
    nocover_positions: frozenset[int]
    profit_min: float
    break_even: float
    trained_on: tuple[SeasonId, ...]
    training: Optional[tuple[EdgeReport, EdgeReport]] = field(default=None, compare=False, repr=False)

    def positions(self, side: EdgeSide) -> frozenset[int]:
        return self.cover_positions if side is EdgeSide.COVER_TOP else self.nocover_positions


@dataclass(frozen=True)
class BacktestRow:
    position: int
    side: EdgeSide
    running_avg: float
    profit: float


@dataclass(frozen=True)
class FlatBetResult:
    """Unit stakes on every selected team's games, paid at the break-even price."""

    bets: int
    wins: int
    units: float

    @property
    def roi(self) -> float:
        return self.units / self.bets if self.bets else 0.0


@dataclass(frozen=True)
class BacktestReport:
    rows: tuple[BacktestRow, ...]
    seasons: tuple[SeasonId, ...]
    break_even: float
    flat_bets: dict[EdgeSide, FlatBetResult]

    def side_rows(self, side: EdgeSide) -> tuple[BacktestRow, ...]:
        return tuple(r for r in self.rows if r.side is side)

    @property
    def cumulative_by_side(self) -> dict[EdgeSide, float]:
        return {s: sum(r.profit for r in self.side_rows(s)) for s in EdgeSide}

    @property
    def bets_counted(self) -> int:
        return sum(f.bets for f in self.flat_bets.values())


def _check_seasons(ds: Dataset, seasons: Sequence[SeasonId]) -> tuple[SeasonId, ...]:
    seasons = tuple(sorted(set(seasons)))
    for s in seasons:
        if s not in ds.seasons:
            raise UnknownSeason(s)
    return seasons


def edge_reports(
    ds: Dataset, seasons: Sequence[SeasonId], break_even: float = DEFAULT_BREAK_EVEN
) -> tuple[EdgeReport, EdgeReport]:
    """(cover-top, no-cover-bottom) walks over extreme-aligned profiles."""
    seasons = _check_seasons(ds, seasons)
    return tuple(  # type: ignore[return-value]
        running_average(aligned_profile(ds, seasons, _ALIGN[side]), side, break_even) for side in EdgeSide
    )


def select_positions(report: EdgeReport, profit_min: float) -> frozenset[int]:
    """Leading run of retained steps whose profit exceeds ``profit_min``."""
    chosen = set()
    for step in report.steps:
        if not step.profit > profit_min:
            break
        chosen.add(step.k)
    return frozenset(chosen)


def train(
    ds: Dataset,
    train_seasons: Sequence[SeasonId],
    profit_min: float = 2.0,
    break_even: float = DEFAULT_BREAK_EVEN,
) -> StrategySpec:
    if profit_min < 0 or math.isnan(profit_min):
        raise ValueError(f"profit_min must be >= 0, got {profit_min}")
    seasons = _check_seasons(ds, train_seasons)
    if len(seasons) < 2:
        raise InsufficientSeasons(f"training needs at least 2 seasons, got {len(seasons)}")
    top, bottom = edge_reports(ds, seasons, break_even)
    return StrategySpec(
        cover_positions=select_positions(top, profit_min),
        nocover_positions=select_positions(bottom, profit_min),
        profit_min=profit_min,
        break_even=break_even,
        trained_on=seasons,
        training=(top, bottom),
    )


def _flat_bets(ds: Dataset, spec: StrategySpec, seasons: Sequence[SeasonId]) -> dict[EdgeSide, FlatBetResult]:
    p = spec.break_even / 100.0
    payout = (1.0 - p) / p
    tallies = {s: [0, 0] for s in EdgeSide}
    for season in seasons:
        ranking = season_ranking(ds, season)
        n = len(ranking)
        if max(spec.cover_positions, default=0) + max(spec.nocover_positions, default=0) > n:
            raise OverlappingPositions(f"{season}: selected positions overlap in a {n}-team league")
        picks = {ranking.from_top(k).team: EdgeSide.COVER_TOP for k in spec.cover_positions}
        picks.update({ranking.at(k).team: EdgeSide.NOCOVER_BOTTOM for k in spec.nocover_positions})
        wanted = {EdgeSide.COVER_TOP: Ats.COVER, EdgeSide.NOCOVER_BOTTOM: Ats.NO_COVER}
        for game in ds.season_games(season):
            out = derive_outcome(game)
            for team, res in out.ats_result.items():
                side = picks.get(team)
                if side is None or res is Ats.PUSH:
                    continue
                tallies[side][0] += 1
                tallies[side][1] += res is wanted[side]
    return {
        s: FlatBetResult(bets, wins, wins * payout - (bets - wins)) for s, (bets, wins) in tallies.items()
    }


def evaluate(ds: Dataset, spec: StrategySpec, test_seasons: Sequence[SeasonId]) -> BacktestReport:
    """Running averages and profits of the selected positions over the test seasons."""
    seasons = _check_seasons(ds, test_seasons)
    overlap = set(seasons) & set(spec.trained_on)
    if overlap:
        warnings.warn(
            f"test seasons overlap training seasons: {', '.join(s.label for s in sorted(overlap))}",
            stacklevel=2,
        )
    rows = []
    for side in EdgeSide:
        chosen = sorted(spec.positions(side))
        if not chosen:
            continue
        walk = prefix_means(side_rates(aligned_profile(ds, seasons, _ALIGN[side]), side))
        if chosen[-1] > len(walk):
            raise OverlappingPositions(f"position {chosen[-1]} exceeds league size {len(walk)}")
        rows += [BacktestRow(k, side, walk[k - 1], walk[k - 1] - spec.break_even) for k in chosen]
    return BacktestReport(tuple(rows), seasons, spec.break_even, _flat_bets(ds, spec, seasons))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.size < 2:
        raise ValueError("pearson needs two equal-length samples of size >= 2")
    da = a - a.mean()
    db = b - b.mean()
    sa = math.sqrt(float(da @ da))
    sb = math.sqrt(float(db @ db))
    if sa == 0 or sb == 0:
        raise DegenerateVariance("a variable is constant across team-seasons")
    return max(-1.0, min(1.0, float(da @ db) / (sa * sb)))


def association(ds: Dataset, seasons: Sequence[SeasonId]) -> tuple[float, float]:
    """Pearson (w_pct, c_pct) and (w_pct, o_pct) over all team-seasons."""
    seasons = _check_seasons(ds, seasons)
    if len(seasons) < 2:
        raise InsufficientSeasons("association needs at least 2 seasons")
    return association_of([st for season in seasons for st in team_season_stats(ds, season)])


def association_of(stats: Sequence[TeamSeasonStats]) -> tuple[float, float]:
    wc = [(float(s.w_pct), float(s.c_pct)) for s in stats if s.w_pct is not None and s.c_pct is not None]
    wo = [(float(s.w_pct), float(s.o_pct)) for s in stats if s.w_pct is not None and s.o_pct is not None]
    if len(wc) < 2 or len(wo) < 2:
        raise DegenerateVariance("too few team-seasons with both a win rate and line results")
    return pearson(*zip(*wc)), pearson(*zip(*wo))


def outlier_proportion(spec: StrategySpec, team_count: int) -> tuple[float, float]:
    """Share of league positions selected on each side, the no-cover share signed negative."""
    return len(spec.cover_positions) / team_count, -len(spec.nocover_positions) / team_count
