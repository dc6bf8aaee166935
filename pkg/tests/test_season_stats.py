from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coveredge.ingest import UnknownSeason
from coveredge.model import SeasonId, TeamId
from coveredge.season_stats import (
    DuplicateTeam,
    TeamSeasonStats,
    format_pct,
    rank_by_win_pct,
    season_ranking,
    team_season_stats,
)
from coveredge.synth import SynthConfig, generate
from published_tables import STANDINGS_2010

SEASON = SeasonId(2010)


def table_stats(rows=STANDINGS_2010):
    return [TeamSeasonStats(TeamId(name), SEASON, wins=w, losses=l) for name, w, l, _ in rows]


# Milwaukee is printed as 35-37 next to 0.4268 (= 35/82); its pairing is checked in the acceptance suite.
CONSISTENT_ROWS = [r for r in STANDINGS_2010 if r[1] + r[2] == 82]


@pytest.mark.parametrize("name,wins,losses,printed", CONSISTENT_ROWS)
def test_win_pct_matches_printed_table(name, wins, losses, printed):
    st_ = TeamSeasonStats(TeamId(name), SEASON, wins=wins, losses=losses)
    assert format_pct(st_.w_pct) == printed


def test_format_pct_rounds_half_up():
    assert format_pct(Fraction(1, 8), 2) == "0.13"
    assert format_pct(Fraction(41, 82)) == "0.5000"
    assert format_pct(Fraction(1)) == "1.0000"
    assert format_pct(None) == ""


def test_pushes_leave_cover_denominator():
    st_ = TeamSeasonStats(TeamId("X"), SEASON, covers=40, no_covers=40, ats_pushes=2)
    assert st_.c_pct == Fraction(1, 2) and st_.n_pct == Fraction(1, 2)
    assert st_.games_with_spread == 82


def test_table_ranking_extremes():
    ranking = rank_by_win_pct(table_stats())
    assert ranking.at(1).team.name == "Minnesota"
    assert ranking.at(30).team.name == "Chicago"
    assert ranking.from_top(1).team.name == "Chicago"
    pcts = [s.w_pct for s in ranking.positions]
    assert pcts == sorted(pcts)


def test_ties_broken_by_point_diff_then_name():
    stats = [
        TeamSeasonStats(TeamId("B"), SEASON, wins=1, losses=1, point_diff=0),
        TeamSeasonStats(TeamId("A"), SEASON, wins=1, losses=1, point_diff=0),
        TeamSeasonStats(TeamId("C"), SEASON, wins=1, losses=1, point_diff=-5),
    ]
    assert [s.team.name for s in rank_by_win_pct(stats).positions] == ["C", "A", "B"]


def test_duplicate_team_rejected():
    stats = table_stats()
    with pytest.raises(DuplicateTeam):
        rank_by_win_pct(stats + stats[:1])


@settings(max_examples=50)
@given(st.randoms(use_true_random=False))
def test_ranking_ignores_input_order(rnd):
    stats = table_stats()
    base = rank_by_win_pct(stats)
    shuffled = stats[:]
    rnd.shuffle(shuffled)
    again = rank_by_win_pct(shuffled)
    assert again == base
    assert rank_by_win_pct(list(again.positions)) == base


@pytest.fixture(scope="module")
def synthetic():
    return generate(SynthConfig(team_count=30, seasons=2, seed=11, allow_pushes=True))


def test_season_totals_balance(synthetic):
    for season in synthetic.seasons:
        stats = team_season_stats(synthetic, season)
        games = synthetic.season_games(season)
        assert sum(s.wins for s in stats) == sum(s.losses for s in stats) == len(games)
        assert sum(s.covers for s in stats) == sum(s.no_covers for s in stats)
        assert sum(s.point_diff for s in stats) == 0
        assert sum(s.games_with_spread for s in stats) == 2 * len(games)


def test_counts_agree_with_direct_tally(synthetic):
    season = SeasonId(1990)
    team = TeamId("Team 07")
    wins = covers = pushes = overs = 0
    for g in synthetic.season_games(season):
        if team not in g.teams:
            continue
        margin = g.score_of(team) - g.score_of(g.opponent(team))
        wins += margin > 0
        handicap = margin - g.spread if g.favorite == team else margin + g.spread
        covers += handicap > 0
        pushes += handicap == 0
        overs += g.home_score + g.away_score > g.total_line
    st_ = next(s for s in team_season_stats(synthetic, season) if s.team == team)
    assert (st_.wins, st_.covers, st_.ats_pushes, st_.overs) == (wins, covers, pushes, overs)


def test_unknown_season(synthetic):
    with pytest.raises(UnknownSeason):
        team_season_stats(synthetic, SeasonId(1970))


def test_season_ranking_is_permutation(synthetic):
    ranking = season_ranking(synthetic, SeasonId(1991))
    assert sorted(s.team.name for s in ranking.positions) == sorted(f"Team {i:02d}" for i in range(1, 31))
