import math
from collections import Counter

import numpy as np
import pytest

from coveredge.edge import EdgeSide
from coveredge.ingest import serialize
from coveredge.model import Ats, OverUnder, SeasonId, derive_outcome
from coveredge.season_stats import team_season_stats
from coveredge.synth import (
    InvalidConfig,
    RankBand,
    SynthConfig,
    extreme_bands,
    generate,
    null_distribution,
    replication_edges,
    replication_seeds,
    schedule,
    season_counts,
    simulate_season,
    team_names,
)


@pytest.mark.parametrize("n,g", [(30, 82), (29, 82), (27, 82), (30, 66), (5, 8), (4, 3), (7, 12)])
def test_schedule_is_balanced(n, g):
    home, away, day = schedule(n, g)
    assert len(home) == n * g // 2
    counts = np.bincount(home, minlength=n) + np.bincount(away, minlength=n)
    assert set(counts) == {g}
    assert not np.any(home == away)
    homes = np.bincount(home, minlength=n)
    assert homes.max() - homes.min() <= 2
    for d in np.unique(day):
        playing = np.concatenate([home[day == d], away[day == d]])
        assert len(set(playing)) == len(playing)


def test_generate_is_deterministic():
    cfg = SynthConfig(team_count=10, games_per_team=18, seasons=2, seed=99)
    assert serialize(generate(cfg)) == serialize(generate(cfg))
    other = SynthConfig(team_count=10, games_per_team=18, seasons=2, seed=100)
    assert serialize(generate(other)) != serialize(generate(cfg))


def test_games_are_consistent_and_half_point_by_default():
    ds = generate(SynthConfig(team_count=12, games_per_team=22, seasons=2, seed=4))
    for g in ds.games:
        out = derive_outcome(g)
        assert Ats.PUSH not in out.ats_result.values()
        assert out.ou_result is not OverUnder.PUSH
        assert g.spread.denominator == 2 and g.total_line.denominator == 2
        assert g.home_score > 0 and g.away_score > 0
    names = team_names(12)
    assert names[0] == "Team 01" and names[-1] == "Team 12"


def test_pushes_only_when_enabled():
    ds = generate(SynthConfig(team_count=30, seasons=2, seed=3, allow_pushes=True))
    results = Counter(r for g in ds.games for r in derive_outcome(g).ats_result.values())
    assert results[Ats.PUSH] > 0


def test_null_cover_rate_converges_to_half():
    cfg = SynthConfig(team_count=30, seasons=20, seed=12)
    rng = np.random.default_rng(cfg.seed)
    covers = decided = 0
    top_covers = top_decided = 0
    for _ in range(cfg.seasons):
        counts = season_counts(simulate_season(cfg, rng), 30)
        covers += counts["covers"].sum()
        decided += (counts["covers"] + counts["no_covers"]).sum()
        best = np.argmax(counts["wins"])
        top_covers += counts["covers"][best]
        top_decided += counts["covers"][best] + counts["no_covers"][best]
    assert covers * 2 == decided
    rate = top_covers / top_decided
    assert abs(rate - 0.5) < 3 * math.sqrt(0.25 / top_decided)


def test_injected_bias_moves_cover_rate():
    cfg = SynthConfig(team_count=30, seasons=10, seed=8, line_bias=extreme_bands(30, 0.1, -0.1, size=3))
    rng = np.random.default_rng(cfg.seed)
    rates = []
    for _ in range(cfg.seasons):
        arrays = simulate_season(cfg, rng)
        counts = season_counts(arrays, 30)
        order = np.argsort(arrays.strength)
        c = counts["covers"] / (counts["covers"] + counts["no_covers"])
        rates.append((c[order[:3]].mean(), c[order[-3:]].mean()))
    weak, strong = np.mean(rates, axis=0)
    assert strong == pytest.approx(0.6, abs=0.03)
    assert weak == pytest.approx(0.4, abs=0.03)


def test_ou_bias_moves_over_rate():
    cfg = SynthConfig(team_count=30, seasons=10, seed=9, ou_bias=(RankBand(1, 30, 0.1),))
    rng = np.random.default_rng(cfg.seed)
    overs = total = 0
    for _ in range(cfg.seasons):
        a = simulate_season(cfg, rng)
        overs += int(((a.home_score + a.away_score) > a.total_line).sum())
        total += len(a.home)
    assert overs / total == pytest.approx(0.6, abs=0.02)


def test_fast_counts_match_record_path():
    cfg = SynthConfig(team_count=10, games_per_team=36, seed=31)
    arrays = simulate_season(cfg, np.random.default_rng(cfg.seed))
    counts = season_counts(arrays, 10)
    stats = {s.team.name: s for s in team_season_stats(generate(cfg), SeasonId(cfg.first_season))}
    for i, name in enumerate(team_names(10)):
        s = stats[name]
        assert (s.wins, s.covers, s.no_covers, s.point_diff) == (
            counts["wins"][i], counts["covers"][i], counts["no_covers"][i], counts["point_diff"][i],
        )


def test_null_distribution_single_replication():
    cfg = SynthConfig(team_count=10, games_per_team=18, seasons=3, seed=5)
    summary = null_distribution(cfg, 1)
    (child,) = replication_seeds(cfg.seed, 1)
    top, bottom = replication_edges(cfg, np.random.default_rng(child))
    assert summary.stop_k[EdgeSide.COVER_TOP] == (top.stop_k,)
    assert summary.cumulative_profit[EdgeSide.NOCOVER_BOTTOM] == (bottom.cumulative_profit,)
    assert summary.mean_stop_k(EdgeSide.COVER_TOP) == top.stop_k


def test_null_distribution_determinism_and_summary():
    cfg = SynthConfig(team_count=30, seasons=4, seed=2)
    a = null_distribution(cfg, 40)
    assert a == null_distribution(cfg, 40)
    b = null_distribution(SynthConfig(team_count=30, seasons=4, seed=3), 40)
    assert a.stop_k != b.stop_k
    d = a.as_dict()
    assert d["replications"] == 40 and 0 <= d["p_stop_k_at_least_threshold_either_side"] <= 1
    assert d["monte_carlo_se"] == pytest.approx(a.p_either_se, abs=1e-6)


def test_null_distribution_rejects_bias():
    cfg = SynthConfig(line_bias=extreme_bands(30, 0.05, -0.05))
    with pytest.raises(InvalidConfig):
        null_distribution(cfg, 3)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"team_count": 3},
        {"team_count": 5, "games_per_team": 3},
        {"seasons": 0},
        {"margin_noise": -1},
        {"seed": -1},
        {"line_bias": (RankBand(0, 2, 0.1),)},
        {"line_bias": (RankBand(1, 2, 0.3), RankBand(2, 3, 0.3))},
    ],
)
def test_invalid_config(kwargs):
    with pytest.raises(InvalidConfig):
        SynthConfig(**kwargs)
