"""Synthetic league seasons and Monte Carlo null distributions.

Each season draws latent team strengths, posts half-point lines from them, then
decides every spread bet with a Bernoulli draw *before* drawing the final
margin. Under no injected bias the favorite covers with probability exactly
0.5, independent of strength. Biases are attached to latent-strength ranks
(rank 1 = weakest), which stand in for winning-percentage positions.

The generator uses one ``numpy.random.Generator`` threaded through every
season; nothing touches global random state.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .edge import DEFAULT_BREAK_EVEN, EdgeSide, walk_rates
from .ingest import Dataset
from .model import CoverEdgeError, GameRecord, SeasonId, TeamId


class InvalidConfig(CoverEdgeError, ValueError):
    pass


@dataclass(frozen=True)
class RankBand:
    """Probability offset for teams whose strength rank lies in ``[lo, hi]``."""

    lo: int
    hi: int
    offset: float


def extreme_bands(team_count: int, top: float, bottom: float, size: int = 1) -> tuple[RankBand, ...]:
    """Bands covering the ``size`` strongest and ``size`` weakest teams."""
    return (RankBand(team_count - size + 1, team_count, top), RankBand(1, size, bottom))


@dataclass(frozen=True)
class SynthConfig:
    team_count: int = 30
    games_per_team: int = 82
    seasons: int = 1
    first_season: int = 1990
    strength_spread: float = 8.0
    margin_noise: float = 4.0
    total_noise: float = 11.0
    home_advantage: float = 2.5
    mean_total: float = 205.0
    total_line_spread: float = 10.0
    line_bias: tuple[RankBand, ...] = ()
    ou_bias: tuple[RankBand, ...] = ()
    allow_pushes: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "line_bias", tuple(self.line_bias))
        object.__setattr__(self, "ou_bias", tuple(self.ou_bias))
        n, g = self.team_count, self.games_per_team
        if n < 4:
            raise InvalidConfig("team_count must be at least 4")
        if g < 1 or (n * g) % 2:
            raise InvalidConfig("games_per_team must be positive and team_count * games_per_team even")
        if self.seasons < 1:
            raise InvalidConfig("seasons must be at least 1")
        if not 1946 <= self.first_season <= 2100 - self.seasons + 1:
            raise InvalidConfig("season years out of range")
        if min(self.strength_spread, self.margin_noise, self.total_noise) < 0:
            raise InvalidConfig("dispersions must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")
        for name in ("line_bias", "ou_bias"):
            offsets = np.zeros(n)
            for band in getattr(self, name):
                if not 1 <= band.lo <= band.hi <= n:
                    raise InvalidConfig(f"{name} band {band} outside ranks 1..{n}")
                offsets[band.lo - 1 : band.hi] += band.offset
            if np.any(np.abs(offsets) >= 0.5):
                raise InvalidConfig(f"{name} pushes a probability outside (0, 1)")

    @property
    def is_null(self) -> bool:
        return all(b.offset == 0 for b in self.line_bias)


def team_names(n: int) -> list[str]:
    width = len(str(n))
    return [f"Team {i + 1:0{width}d}" for i in range(n)]


def _orient(a: int, b: int, n: int) -> tuple[int, int]:
    """Host is the team the other sits ahead of on the circle; balances home games."""
    if a < 0 or b < 0:
        return a, b
    d = (b - a) % n
    if d < n - d or (d == n - d and (a // d) % 2 == 0):
        return a, b
    return b, a


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Circle-method rounds; with odd ``n`` one team sits out each round."""
    teams = list(range(n)) + ([-1] if n % 2 else [])
    m = len(teams)
    rounds = []
    for _ in range(m - 1):
        pairs = [_orient(teams[i], teams[m - 1 - i], n) for i in range(m // 2)]
        rounds.append([p for p in pairs if -1 not in p])
        teams = [teams[0], teams[-1]] + teams[1:-1]
    return rounds


@lru_cache(maxsize=32)
def schedule(n: int, games_per_team: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Balanced schedule as (home, away, day) index arrays.

    Full round robins alternate home and away; the remainder is a circulant
    regular graph so every team plays exactly ``games_per_team`` games.
    """
    full, rest = divmod(games_per_team, n - 1)
    games: list[tuple[int, int]] = []
    rr = _round_robin(n)
    for rep in range(full):
        for rnd in rr:
            games += [(a, b) if rep % 2 == 0 else (b, a) for a, b in rnd]
    offsets = list(range(1, rest // 2 + 1))
    for d in offsets:
        games += [(i, (i + d) % n) for i in range(n)]
    if rest % 2:
        games += [(i, i + n // 2) for i in range(n // 2)]

    busy: list[set[int]] = []
    days = []
    for h, a in games:
        for day, used in enumerate(busy):
            if h not in used and a not in used:
                break
        else:
            day = len(busy)
            busy.append(set())
        busy[day].update((h, a))
        days.append(day)
    arrays = (
        np.array([h for h, _ in games], dtype=np.int64),
        np.array([a for _, a in games], dtype=np.int64),
        np.array(days, dtype=np.int64),
    )
    for arr in arrays:
        arr.setflags(write=False)
    return arrays


@lru_cache(maxsize=32)
def _normal_quantiles(n: int) -> np.ndarray:
    from statistics import NormalDist

    q = np.array([NormalDist().inv_cdf((i + 0.5) / n) for i in range(n)])
    q.setflags(write=False)
    return q


def _band_offsets(bands: Sequence[RankBand], n: int) -> np.ndarray:
    out = np.zeros(n)
    for band in bands:
        out[band.lo - 1 : band.hi] += band.offset
    return out


def _pair_offset(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Combine two team offsets without exceeding the larger magnitude."""
    cap = np.maximum(np.abs(a), np.abs(b))
    return np.clip(a + b, -cap, cap)


def _magnitudes(rng: np.random.Generator, sd: float, size: int, half: np.ndarray) -> np.ndarray:
    return np.floor(np.abs(rng.normal(0.0, sd, size))) + np.where(half, 0.5, 0.0)


@dataclass
class SeasonArrays:
    """One simulated season in index form; team ``i`` is ``team_names(n)[i]``."""

    home: np.ndarray
    away: np.ndarray
    day: np.ndarray
    home_score: np.ndarray
    away_score: np.ndarray
    fav_home: np.ndarray
    spread: np.ndarray
    total_line: np.ndarray
    strength: np.ndarray = field(repr=False)


def simulate_season(config: SynthConfig, rng: np.random.Generator) -> SeasonArrays:
    n = config.team_count
    home, away, day = schedule(n, config.games_per_team)
    size = len(home)

    # evenly spaced normal quantiles keep the strength ranks well separated
    rank = rng.permutation(n)
    strength = config.strength_spread * _normal_quantiles(n)[rank]
    cover_off = _band_offsets(config.line_bias, n)[rank]
    over_off = _band_offsets(config.ou_bias, n)[rank]

    expected = strength[home] - strength[away] + config.home_advantage
    fav_home = expected >= 0
    if config.allow_pushes:
        spread = np.round(np.abs(expected) * 2) / 2
    else:
        spread = np.floor(np.abs(expected)) + 0.5
    fav = np.where(fav_home, home, away)
    dog = np.where(fav_home, away, home)

    p_cover = 0.5 + _pair_offset(cover_off[fav], -cover_off[dog])
    covered = rng.random(size) < p_cover
    half = spread % 1 == 0.5
    dist = _magnitudes(rng, config.margin_noise, size, half)
    margin = np.where(covered, spread + dist, spread - dist)
    # ties go to overtime in basketball; redraw only the losing-side magnitude
    tied = margin == 0
    while tied.any():
        dist[tied] = _magnitudes(rng, config.margin_noise, int(tied.sum()), half[tied])
        margin = np.where(covered, spread + dist, spread - dist)
        tied = margin == 0
    home_margin = np.where(fav_home, margin, -margin).astype(np.int64)

    if config.allow_pushes:
        total_line = np.round(rng.normal(config.mean_total, config.total_line_spread, size) * 2) / 2
    else:
        total_line = np.floor(rng.normal(config.mean_total, config.total_line_spread, size)) + 0.5
    p_over = 0.5 + _pair_offset(over_off[home], over_off[away])
    over = rng.random(size) < p_over
    tdist = _magnitudes(rng, config.total_noise, size, total_line % 1 == 0.5)
    total = np.where(over, total_line + tdist, total_line - tdist)
    mismatch = (total - home_margin) % 2 != 0
    tdist = tdist + mismatch
    total = np.where(over, total_line + tdist, total_line - tdist).astype(np.int64)

    home_score = (total + home_margin) // 2
    away_score = (total - home_margin) // 2
    if (away_score < 0).any() or (home_score < 0).any():
        raise InvalidConfig("score model produced negative scores; lower the noise or raise mean_total")
    return SeasonArrays(home, away, day, home_score, away_score, fav_home, spread, total_line, strength)


def _line(x: float):
    return str(x) if x % 1 else str(int(x))


def season_games(arrays: SeasonArrays, season: SeasonId, names: Sequence[str]) -> list[GameRecord]:
    start = dt.date(season.start_year, 10, 28)
    teams = [TeamId(s) for s in names]
    out = []
    for i in range(len(arrays.home)):
        h, a = teams[arrays.home[i]], teams[arrays.away[i]]
        out.append(
            GameRecord(
                date=start + dt.timedelta(days=int(arrays.day[i])),
                season=season,
                home=h,
                away=a,
                home_score=int(arrays.home_score[i]),
                away_score=int(arrays.away_score[i]),
                favorite=h if arrays.fav_home[i] else a,
                spread=_line(float(arrays.spread[i])),
                total_line=_line(float(arrays.total_line[i])),
            )
        )
    return out


def generate(config: SynthConfig) -> Dataset:
    rng = np.random.default_rng(config.seed)
    names = team_names(config.team_count)
    games: list[GameRecord] = []
    for i in range(config.seasons):
        arrays = simulate_season(config, rng)
        games += season_games(arrays, SeasonId(config.first_season + i), names)
    return Dataset(tuple(games))


# --- fast path for replications -------------------------------------------


def season_counts(arrays: SeasonArrays, n: int) -> dict[str, np.ndarray]:
    """Per-team wins, covers, no-covers, pushes and point differential."""
    hm = arrays.home_score - arrays.away_score
    home_win = hm > 0
    fav_margin = np.where(arrays.fav_home, hm, -hm)
    dc = fav_margin - arrays.spread
    home_cover = np.where(arrays.fav_home, dc > 0, dc < 0)
    home_nocover = np.where(arrays.fav_home, dc < 0, dc > 0)
    h, a = arrays.home, arrays.away

    def per_team(home_flag: np.ndarray, away_flag: np.ndarray) -> np.ndarray:
        return np.bincount(h, home_flag, n) + np.bincount(a, away_flag, n)

    return {
        "wins": per_team(home_win, ~home_win),
        "games": per_team(np.ones_like(hm), np.ones_like(hm)),
        "covers": per_team(home_cover, home_nocover),
        "no_covers": per_team(home_nocover, home_cover),
        "point_diff": per_team(hm, -hm),
    }


def _ranked_cover_rates(counts: dict[str, np.ndarray]) -> np.ndarray:
    """Cover rates ordered by (w_pct, point differential, team index) ascending."""
    w = counts["wins"] / counts["games"]
    order = np.lexsort((np.arange(len(w)), counts["point_diff"], w))
    decided = counts["covers"] + counts["no_covers"]
    return (counts["covers"] / decided)[order]


def replication_edges(config: SynthConfig, rng: np.random.Generator, break_even: float = DEFAULT_BREAK_EVEN):
    """Simulate ``config.seasons`` seasons and run both walks on the mean profile."""
    rates = np.zeros(config.team_count)
    for _ in range(config.seasons):
        rates += _ranked_cover_rates(season_counts(simulate_season(config, rng), config.team_count))
    mean_cover = 100.0 * rates / config.seasons
    top = walk_rates(list(mean_cover[::-1]), EdgeSide.COVER_TOP, break_even)
    bottom = walk_rates(list(100.0 - mean_cover), EdgeSide.NOCOVER_BOTTOM, break_even)
    return top, bottom


@dataclass(frozen=True)
class NullSummary:
    replications: int
    seed: int
    threshold_k: int
    stop_k: dict[EdgeSide, tuple[int, ...]]
    cumulative_profit: dict[EdgeSide, tuple[float, ...]]

    def mean_stop_k(self, side: EdgeSide) -> float:
        return float(np.mean(self.stop_k[side]))

    def mean_cumulative(self, side: EdgeSide) -> float:
        return float(np.mean(self.cumulative_profit[side]))

    @property
    def p_either_at_least(self) -> float:
        """Share of replications where either side retained ``threshold_k`` or more steps."""
        return float(np.mean(self._either()))

    @property
    def p_either_se(self) -> float:
        p = self.p_either_at_least
        return math.sqrt(p * (1 - p) / self.replications)

    def _either(self) -> np.ndarray:
        top = np.array(self.stop_k[EdgeSide.COVER_TOP])
        bottom = np.array(self.stop_k[EdgeSide.NOCOVER_BOTTOM])
        return (top >= self.threshold_k) | (bottom >= self.threshold_k)

    def as_dict(self) -> dict:
        out: dict = {
            "replications": self.replications,
            "seed": self.seed,
            "threshold_k": self.threshold_k,
            "p_stop_k_at_least_threshold_either_side": round(self.p_either_at_least, 6),
            "monte_carlo_se": round(self.p_either_se, 6),
        }
        for side in EdgeSide:
            ks = np.array(self.stop_k[side])
            cp = np.array(self.cumulative_profit[side])
            out[side.value] = {
                "mean_stop_k": round(float(ks.mean()), 6),
                "max_stop_k": int(ks.max()),
                "stop_k_counts": {str(k): int(c) for k, c in zip(*np.unique(ks, return_counts=True))},
                "mean_cumulative_profit": round(float(cp.mean()), 6),
                "q95_cumulative_profit": round(float(np.quantile(cp, 0.95)), 6),
            }
        return out


def replication_seeds(seed: int, replications: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(replications)


def null_distribution(
    config: SynthConfig,
    replications: int,
    *,
    break_even: float = DEFAULT_BREAK_EVEN,
    threshold_k: int = 3,
) -> NullSummary:
    """Distribution of the walk's stopping point and summed profit when no edge exists."""
    if not config.is_null:
        raise InvalidConfig("null_distribution requires no line_bias")
    if replications < 1:
        raise InvalidConfig("replications must be at least 1")
    stops: dict[EdgeSide, list[int]] = {s: [] for s in EdgeSide}
    cums: dict[EdgeSide, list[float]] = {s: [] for s in EdgeSide}
    for child in replication_seeds(config.seed, replications):
        for report in replication_edges(config, np.random.default_rng(child), break_even):
            stops[report.side].append(report.stop_k)
            cums[report.side].append(report.cumulative_profit)
    return NullSummary(
        replications,
        config.seed,
        threshold_k,
        {s: tuple(v) for s, v in stops.items()},
        {s: tuple(v) for s, v in cums.items()},
    )
