"""Position profiles: per-position averages across the seasons of an era.

Teams are matched by their winning-percentage position in each season, not by
franchise. When seasons of different league sizes are combined, positions are
aligned from one extreme (``align="bottom"`` counts up from the worst record,
``align="top"`` counts down from the best) and the profile is truncated to the
smallest league.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional, Sequence

from .ingest import Dataset, UnknownSeason
from .model import CoverEdgeError, EraSubgroup, SeasonId
from .season_stats import SeasonRanking, TeamSeasonStats, season_ranking

HOUSE_EDGE_BAND = (0.4746, 0.5254)
DEFAULT_LOW_CUT = Fraction("0.3450")
DEFAULT_HIGH_CUT = Fraction("0.6400")

Align = Literal["bottom", "top"]


class MissingSeason(CoverEdgeError, KeyError):
    def __str__(self) -> str:
        return f"season {self.args[0]} required by the era is missing from the dataset"


class WrongTeamCount(CoverEdgeError, ValueError):
    pass


class EmptyProfile(CoverEdgeError, ValueError):
    pass


@dataclass(frozen=True)
class PositionRow:
    position: int
    mean_w_pct: float
    mean_c_pct: Optional[float]
    mean_o_pct: Optional[float]
    season_count: int

    @property
    def mean_n_pct(self) -> Optional[float]:
        return None if self.mean_c_pct is None else 1.0 - self.mean_c_pct


@dataclass(frozen=True)
class PositionProfile:
    era: EraSubgroup
    per_position: tuple[PositionRow, ...]
    seasons: tuple[SeasonId, ...] = ()
    house_edge_band: tuple[float, float] = HOUSE_EDGE_BAND
    pooled: bool = False

    def __len__(self) -> int:
        return len(self.per_position)

    def row(self, position: int) -> PositionRow:
        return self.per_position[position - 1]


def _mean(values: list[Optional[Fraction]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return float(sum(present, Fraction(0)) / len(present))


def _pooled(num: int, den: int) -> Optional[float]:
    return float(Fraction(num, den)) if den else None


def _aligned(ranking: SeasonRanking, size: int, align: Align) -> tuple[TeamSeasonStats, ...]:
    if align == "bottom":
        return ranking.positions[:size]
    return ranking.positions[len(ranking) - size :]


def profile_from_rankings(
    rankings: Sequence[SeasonRanking],
    era: EraSubgroup,
    *,
    align: Align = "bottom",
    pooled: bool = False,
) -> PositionProfile:
    if not rankings:
        raise EmptyProfile(f"era {era.name} has no seasons")
    if align not in ("bottom", "top"):
        raise ValueError(f"align must be 'bottom' or 'top', got {align!r}")
    rankings = sorted(rankings, key=lambda r: r.season)
    size = min(len(r) for r in rankings)
    columns = [_aligned(r, size, align) for r in rankings]
    rows = []
    for i in range(size):
        at_pos = [col[i] for col in columns]
        if pooled:
            w = _pooled(sum(s.wins for s in at_pos), sum(s.games for s in at_pos))
            c = _pooled(sum(s.covers for s in at_pos), sum(s.covers + s.no_covers for s in at_pos))
            o = _pooled(sum(s.overs for s in at_pos), sum(s.overs + s.unders for s in at_pos))
        else:
            w = _mean([s.w_pct for s in at_pos])
            c = _mean([s.c_pct for s in at_pos])
            o = _mean([s.o_pct for s in at_pos])
        rows.append(PositionRow(i + 1, w, c, o, len(at_pos)))
    return PositionProfile(
        era=era,
        per_position=tuple(rows),
        seasons=tuple(r.season for r in rankings),
        pooled=pooled,
    )


def build_profile(ds: Dataset, era: EraSubgroup, *, pooled: bool = False) -> PositionProfile:
    """Average each position's win, cover and over rates over the era's seasons."""
    rankings = []
    for season in era.seasons:
        try:
            ranking = season_ranking(ds, season)
        except UnknownSeason:
            raise MissingSeason(season) from None
        if len(ranking) != era.team_count:
            raise WrongTeamCount(
                f"{season}: {len(ranking)} teams found, era {era.name} expects {era.team_count}"
            )
        rankings.append(ranking)
    return profile_from_rankings(rankings, era, pooled=pooled)


def aligned_profile(
    ds: Dataset, seasons: Sequence[SeasonId], align: Align, *, pooled: bool = False, name: str = "POOLED"
) -> PositionProfile:
    """Profile over seasons that may span several league sizes."""
    seasons = sorted(set(seasons))
    if not seasons:
        raise EmptyProfile("no seasons given")
    rankings = [season_ranking(ds, s) for s in seasons]
    era = EraSubgroup(name, seasons[0], seasons[-1], min(len(r) for r in rankings))
    return profile_from_rankings(rankings, era, align=align, pooled=pooled)


def group_cutoffs(
    profile: PositionProfile,
    low_cut: Fraction | float | str = DEFAULT_LOW_CUT,
    high_cut: Fraction | float | str = DEFAULT_HIGH_CUT,
) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Split positions into (low, mid, high) by mean winning percentage.

    Low is strictly below ``low_cut``, high strictly above ``high_cut``.
    """
    lo, hi = Fraction(low_cut), Fraction(high_cut)
    if not 0 <= lo < hi <= 1:
        raise ValueError(f"cutoffs must satisfy 0 <= low < high <= 1, got {lo}, {hi}")
    low, mid, high = [], [], []
    for row in profile.per_position:
        w = Fraction(row.mean_w_pct)
        (low if w < lo else high if w > hi else mid).append(row.position)
    return tuple(low), tuple(mid), tuple(high)
