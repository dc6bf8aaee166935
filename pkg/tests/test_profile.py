import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coveredge.ingest import Dataset
from coveredge.model import EraSubgroup, SeasonId, TeamId
from coveredge.profile import (
    MissingSeason,
    WrongTeamCount,
    aligned_profile,
    build_profile,
    group_cutoffs,
    profile_from_rankings,
)
from coveredge.season_stats import TeamSeasonStats, rank_by_win_pct, season_ranking
from coveredge.synth import SynthConfig, generate
from published_tables import STANDINGS_2010

S2010 = SeasonId(2010)


def single_season_profile(rows):
    stats = [TeamSeasonStats(TeamId(n), S2010, wins=w, losses=l) for n, w, l, _ in rows]
    ranking = rank_by_win_pct(stats)
    return profile_from_rankings([ranking], EraSubgroup("T1", S2010, S2010, len(stats))), ranking


# The printed 35-37 for Milwaukee is a typo for 35-47; use the record consistent with 0.4268 here.
CORRECTED = [(n, w, 82 - w, p) for n, w, _, p in STANDINGS_2010]


def test_single_season_profile_is_the_ranking():
    profile, ranking = single_season_profile(CORRECTED)
    assert len(profile) == 30
    for pos, s in ranking.items():
        assert profile.row(pos).mean_w_pct == float(s.w_pct)
        assert profile.row(pos).season_count == 1


def test_table_cutoffs_give_extreme_groups():
    profile, _ = single_season_profile(CORRECTED)
    low, mid, high = group_cutoffs(profile)
    assert low == tuple(range(1, 7))
    assert high == tuple(range(24, 31))
    assert len(mid) == 17


def test_wide_cutoffs_leave_everything_mid():
    profile, _ = single_season_profile(CORRECTED)
    low, mid, high = group_cutoffs(profile, 0, 1)
    assert low == high == () and mid == tuple(range(1, 31))


def test_bad_cutoffs():
    profile, _ = single_season_profile(CORRECTED)
    with pytest.raises(ValueError):
        group_cutoffs(profile, "0.7", "0.6")


@given(st.fractions(0, 1), st.fractions(0, 1))
def test_cutoffs_match_direct_partition(a, b):
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    profile, _ = single_season_profile(CORRECTED)
    low, mid, high = group_cutoffs(profile, lo, hi)
    for row in profile.per_position:
        w = Fraction(row.mean_w_pct)
        expected = low if w < lo else high if w > hi else mid
        assert row.position in expected
    assert sorted(low + mid + high) == list(range(1, 31))


def _team(name, season, covers, no_covers, wins):
    return TeamSeasonStats(TeamId(name), season, wins=wins, losses=10 - wins, covers=covers, no_covers=no_covers)


def test_two_season_mean_at_a_position():
    s1, s2 = SeasonId(2000), SeasonId(2001)
    r1 = rank_by_win_pct([_team("A", s1, 4, 6, 1), _team("B", s1, 5, 5, 9)])
    r2 = rank_by_win_pct([_team("A", s2, 5, 5, 8), _team("B", s2, 5, 5, 2)])
    profile = profile_from_rankings([r1, r2], EraSubgroup("X", s1, s2, 2))
    assert profile.row(1).mean_c_pct == pytest.approx(0.45, abs=1e-15)
    assert profile.row(1).mean_w_pct == pytest.approx(0.15, abs=1e-15)


def test_pooled_mode_weights_by_games():
    s1, s2 = SeasonId(2000), SeasonId(2001)
    a = TeamSeasonStats(TeamId("A"), s1, wins=1, losses=3, covers=1, no_covers=3)
    b = TeamSeasonStats(TeamId("A"), s2, wins=4, losses=4, covers=6, no_covers=2)
    top = [TeamSeasonStats(TeamId("B"), s, wins=9, losses=0) for s in (s1, s2)]
    rankings = [rank_by_win_pct([a, top[0]]), rank_by_win_pct([b, top[1]])]
    era = EraSubgroup("X", s1, s2, 2)
    mean = profile_from_rankings(rankings, era)
    pooled = profile_from_rankings(rankings, era, pooled=True)
    assert mean.row(1).mean_c_pct == pytest.approx((0.25 + 0.75) / 2)
    assert pooled.row(1).mean_c_pct == pytest.approx(7 / 12)
    assert pooled.pooled and not mean.pooled


@pytest.fixture(scope="module")
def league():
    return generate(SynthConfig(team_count=30, seasons=10, first_season=2004, seed=7))


ERA = EraSubgroup("ERA30", SeasonId(2004), SeasonId(2013), 30)


def test_profile_invariants(league):
    profile = build_profile(league, ERA)
    w = [r.mean_w_pct for r in profile.per_position]
    assert w == sorted(w)
    assert abs(sum(w) / len(w) - 0.5) < 1e-9
    assert {r.season_count for r in profile.per_position} == {10}
    for r in profile.per_position:
        assert 0 <= r.mean_c_pct <= 1 and 0 <= r.mean_o_pct <= 1


def test_null_positions_near_half(league):
    profile = build_profile(league, ERA)
    for r in profile.per_position:
        assert 0.46 <= r.mean_c_pct <= 0.54


def test_null_positions_within_binomial_bound(league):
    # Each position averages 10 seasons of 82 coin flips: sd = 0.5 / sqrt(820).
    sd = 0.5 / math.sqrt(820)
    profile = build_profile(league, ERA)
    assert all(abs(r.mean_c_pct - 0.5) < 4 * sd for r in profile.per_position)


def test_profile_ignores_season_order(league):
    base = build_profile(league, ERA)
    reversed_games = Dataset(tuple(reversed(league.games)))
    assert build_profile(reversed_games, ERA) == base


def test_missing_season_and_wrong_size(league):
    with pytest.raises(MissingSeason):
        build_profile(league, EraSubgroup("LONG", SeasonId(2004), SeasonId(2014), 30))
    with pytest.raises(WrongTeamCount):
        build_profile(league, EraSubgroup("E29", SeasonId(2004), SeasonId(2005), 29))


def test_alignment_across_league_sizes():
    small = generate(SynthConfig(team_count=27, games_per_team=54, first_season=1990, seed=1))
    big = generate(SynthConfig(team_count=30, games_per_team=58, first_season=1991, seed=2))
    ds = Dataset(small.games + big.games)
    seasons = [SeasonId(1990), SeasonId(1991)]
    top = aligned_profile(ds, seasons, "top")
    bottom = aligned_profile(ds, seasons, "bottom")
    assert len(top) == len(bottom) == 27
    r_big = season_ranking(ds, SeasonId(1991))
    r_small = season_ranking(ds, SeasonId(1990))
    best = (float(r_big.from_top(1).c_pct) + float(r_small.from_top(1).c_pct)) / 2
    worst = (float(r_big.at(1).c_pct) + float(r_small.at(1).c_pct)) / 2
    assert top.row(27).mean_c_pct == pytest.approx(best)
    assert bottom.row(1).mean_c_pct == pytest.approx(worst)
