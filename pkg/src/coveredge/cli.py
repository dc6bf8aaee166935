"""Command-line entry point: ``coveredge <subcommand> ...``."""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import load_eras
from .edge import DEFAULT_BREAK_EVEN, EdgeSide, over_tendency, running_average
from .ingest import Dataset, parse_games, serialize, validate_season
from .model import CoverEdgeError, EraSubgroup, SeasonId
from .profile import DEFAULT_HIGH_CUT, DEFAULT_LOW_CUT, PositionProfile, build_profile, group_cutoffs
from .report import (
    ReportBundle,
    backtest_tables,
    edge_summary,
    emit_edge_figure,
    emit_edge_tables,
    emit_profile_figure,
    emit_win_figure,
    make_metadata,
    profile_table,
    stats_table,
    to_json,
    write_bundle,
)
from .season_stats import season_ranking
from .strategy import association, evaluate, outlier_proportion, train
from .synth import SynthConfig, extreme_bands, generate, null_distribution

OUT_ENV = "COVEREDGE_OUT"
FORMATS = ("csv", "json", "svg")


class UsageError(CoverEdgeError, ValueError):
    pass


def season_range(text: str) -> tuple[SeasonId, ...]:
    """``1990:2013`` (inclusive start years) or a single ``2014``."""
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            first, last = int(a), int(b)
        else:
            first = last = int(text)
        if last < first:
            raise ValueError
        return tuple(SeasonId(y) for y in range(first, last + 1))
    except (ValueError, CoverEdgeError):
        raise argparse.ArgumentTypeError(f"bad season range {text!r}; use START:END start years") from None


def _pct_arg(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _cut_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coveredge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=os.environ.get(OUT_ENV, "out"), help=f"output directory (env {OUT_ENV})")
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--config", help="TOML file with [[era]] definitions")

    analysis = argparse.ArgumentParser(add_help=False)
    analysis.add_argument("input", help="games CSV")
    analysis.add_argument("--seasons", type=season_range, help="restrict to START:END")
    analysis.add_argument("--era", action="append", help="era name(s) to analyse (default: every complete era)")
    analysis.add_argument("--break-even", type=_pct_arg, default=DEFAULT_BREAK_EVEN)
    analysis.add_argument("--low-cut", type=_cut_arg, default=DEFAULT_LOW_CUT)
    analysis.add_argument("--high-cut", type=_cut_arg, default=DEFAULT_HIGH_CUT)
    analysis.add_argument("--pooled", action="store_true", help="pool counts instead of averaging percentages")

    p = sub.add_parser("ingest", parents=[common], help="parse a games CSV and write its canonical form")
    p.add_argument("input")

    p = sub.add_parser("validate", parents=[common], help="check team counts and schedules per season")
    p.add_argument("input")
    p.add_argument("--teams", type=int, help="expected teams for seasons outside every era")
    p.add_argument("--games", type=int, default=82, help="regular-season games per team")

    p = sub.add_parser("stats", parents=[common, analysis], help="standings tables per season")
    p = sub.add_parser("profile", parents=[common, analysis], help="per-position averages per era")
    p = sub.add_parser("edge", parents=[common, analysis], help="running-average tables per era")
    p = sub.add_parser("report", parents=[common, analysis], help="stats, profiles and edge tables together")

    p = sub.add_parser("backtest", parents=[common], help="train on one season range, test on another")
    p.add_argument("input")
    p.add_argument("--train", type=season_range, required=True)
    p.add_argument("--test", type=season_range, required=True)
    p.add_argument("--profit-min", type=_pct_arg, default=2.0)
    p.add_argument("--break-even", type=_pct_arg, default=DEFAULT_BREAK_EVEN)

    p = sub.add_parser("simulate", parents=[common], help="write a synthetic games CSV")
    p.add_argument("--teams", type=int, default=30)
    p.add_argument("--games", type=int, default=82)
    p.add_argument("--seasons", type=int, default=1)
    p.add_argument("--first-season", type=int, default=2004)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top-bias", type=float, default=0.0, help="cover-probability offset for the strongest band")
    p.add_argument("--bottom-bias", type=float, default=0.0, help="cover-probability offset for the weakest band")
    p.add_argument("--band-size", type=int, default=2)
    p.add_argument("--allow-pushes", action="store_true")
    p.add_argument("--null-replications", type=int, default=0, help="also summarise this many null replications")
    p.add_argument("--break-even", type=_pct_arg, default=DEFAULT_BREAK_EVEN)
    return parser


def _echo(args: argparse.Namespace) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key == "out":
            continue
        if key == "input":
            value = Path(value).name
        elif isinstance(value, tuple):
            value = [str(v) for v in value]
        elif isinstance(value, Fraction):
            value = str(value)
        out[key] = value
    return out


def _load(args: argparse.Namespace) -> Dataset:
    ds = parse_games(args.input)
    seasons = getattr(args, "seasons", None)
    if seasons:
        wanted = set(seasons)
        ds = Dataset(tuple(g for g in ds.games if g.season in wanted))
        if not ds.games:
            raise UsageError("no games in the selected seasons")
    return ds


def _select_eras(ds: Dataset, args: argparse.Namespace) -> list[EraSubgroup]:
    eras = load_eras(args.config)
    if args.era:
        by_name = {e.name: e for e in eras}
        unknown = [n for n in args.era if n not in by_name]
        if unknown:
            raise UsageError(f"unknown era(s): {', '.join(unknown)}")
        return [by_name[n] for n in args.era]
    present = ds.seasons
    chosen = [e for e in eras if set(e.seasons) <= present]
    chosen = [e for e in chosen if all(len(season_ranking(ds, s)) == e.team_count for s in e.seasons)]
    if chosen:
        return chosen
    seasons = sorted(present)
    sizes = {len(season_ranking(ds, s)) for s in seasons}
    if len(sizes) != 1 or seasons[-1].start_year - seasons[0].start_year + 1 != len(seasons):
        raise UsageError("no configured era matches the data; pass --config or --seasons")
    return [EraSubgroup("ALL", seasons[0], seasons[-1], sizes.pop())]


def _profiles(ds: Dataset, args: argparse.Namespace) -> list[PositionProfile]:
    return [build_profile(ds, era, pooled=args.pooled) for era in _select_eras(ds, args)]


def _add_profile(bundle: ReportBundle, summary: dict, profile: PositionProfile, args, figures: bool) -> None:
    name = profile.era.name
    bundle.tables[f"profile_{name}.csv"] = profile_table(profile)
    low, mid, high = group_cutoffs(profile, args.low_cut, args.high_cut)
    entry: dict = {"low_positions": list(low), "mid_positions": list(mid), "high_positions": list(high)}
    if low and high and all(profile.row(p).mean_o_pct is not None for p in low + high):
        over_bias, under_bias = over_tendency(profile, low, high)
        entry["low_over_bias"] = round(over_bias, 6)
        entry["high_under_bias"] = round(under_bias, 6)
    summary.setdefault("profiles", {})[name] = entry
    if figures:
        bundle.figures[f"profile_{name}.svg"] = emit_profile_figure(profile)
        bundle.figures[f"win_{name}.svg"] = emit_win_figure(profile)


def _add_edges(bundle: ReportBundle, summary: dict, profile: PositionProfile, args, figures: bool) -> None:
    name = profile.era.name
    reports = [running_average(profile, side, args.break_even) for side in EdgeSide]
    for fname, text in emit_edge_tables(reports).items():
        bundle.tables[fname.replace("edge_", f"edge_{name}_")] = text
    summary.setdefault("edges", {})[name] = {r.side.value: edge_summary(r) for r in reports}
    if figures:
        bundle.figures[f"edge_{name}.svg"] = emit_edge_figure(*reports, title=f"Running average ({name})")


def cmd_ingest(args) -> tuple[ReportBundle, dict]:
    ds = parse_games(args.input)
    summary = {"rows": ds.row_count, "seasons": [s.label for s in sorted(ds.seasons)], "digest": ds.digest}
    bundle = ReportBundle(make_metadata(digest=ds.digest, config=_echo(args)))
    bundle.tables["games.csv"] = serialize(ds)
    return bundle, summary


def cmd_validate(args) -> tuple[ReportBundle, dict]:
    ds = parse_games(args.input)
    eras = load_eras(args.config)
    results = {}
    failed = []
    for season in sorted(ds.seasons):
        era = next((e for e in eras if season in e), None)
        expected = era.team_count if era else args.teams
        if expected is None:
            expected = len(season_ranking(ds, season))
        rep = validate_season(ds, season, expected, args.games)
        results[season.label] = {
            "teams_found": rep.teams_found,
            "expected_teams": expected,
            "errors": rep.errors,
            "warnings": rep.warnings,
        }
        if rep.errors:
            failed.append(f"{season.label}: {'; '.join(rep.errors)}")
    if failed:
        raise ValidationFailed("validation failed: " + " | ".join(failed))
    bundle = ReportBundle(make_metadata(digest=ds.digest, config=_echo(args)))
    return bundle, {"digest": ds.digest, "seasons": results, "accepted": True}


class ValidationFailed(CoverEdgeError):
    pass


def cmd_stats(args) -> tuple[ReportBundle, dict]:
    ds = _load(args)
    bundle = ReportBundle(make_metadata(digest=ds.digest, config=_echo(args)))
    for season in sorted(ds.seasons):
        bundle.tables[f"stats_{season.label}.csv"] = stats_table(season_ranking(ds, season))
    return bundle, {"seasons": [s.label for s in sorted(ds.seasons)]}


def cmd_profile(args) -> tuple[ReportBundle, dict]:
    ds = _load(args)
    bundle = ReportBundle(make_metadata(digest=ds.digest, config=_echo(args)))
    summary: dict = {}
    for profile in _profiles(ds, args):
        _add_profile(bundle, summary, profile, args, args.format == "svg")
    return bundle, summary


def cmd_edge(args) -> tuple[ReportBundle, dict]:
    ds = _load(args)
    bundle = ReportBundle(make_metadata(digest=ds.digest, config=_echo(args)))
    summary: dict = {}
    for profile in _profiles(ds, args):
        _add_edges(bundle, summary, profile, args, args.format == "svg")
    return bundle, summary


def cmd_report(args) -> tuple[ReportBundle, dict]:
    ds = _load(args)
    bundle = ReportBundle(make_metadata(digest=ds.digest, config=_echo(args)))
    summary: dict = {}
    for season in sorted(ds.seasons):
        bundle.tables[f"stats_{season.label}.csv"] = stats_table(season_ranking(ds, season))
    for profile in _profiles(ds, args):
        _add_profile(bundle, summary, profile, args, args.format == "svg")
        _add_edges(bundle, summary, profile, args, args.format == "svg")
    seasons = sorted(ds.seasons)
    if len(seasons) >= 2:
        win_cover, win_over = association(ds, seasons)
        summary["association"] = {"win_cover": round(win_cover, 6), "win_over": round(win_over, 6)}
    return bundle, summary


def cmd_backtest(args) -> tuple[ReportBundle, dict]:
    ds = parse_games(args.input)
    spec = train(ds, args.train, args.profit_min, args.break_even)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = evaluate(ds, spec, args.test)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    top, bottom = spec.training
    bundle = ReportBundle(make_metadata(digest=ds.digest, config=_echo(args)))
    for fname, text in emit_edge_tables([top, bottom]).items():
        bundle.tables[fname.replace("edge_", "train_")] = text
    bundle.tables.update(backtest_tables(result))
    if args.format == "svg":
        bundle.figures["train_edge.svg"] = emit_edge_figure(top, bottom, title="Running average, training seasons")
    win_cover, win_over = association(ds, spec.trained_on)
    league = min(len(season_ranking(ds, s)) for s in spec.trained_on)
    summary = {
        "dataset_digest": ds.digest,
        "train_seasons": [s.label for s in spec.trained_on],
        "test_seasons": [s.label for s in result.seasons],
        "break_even": spec.break_even,
        "profit_min": spec.profit_min,
        "selected": {
            EdgeSide.COVER_TOP.value: sorted(spec.cover_positions),
            EdgeSide.NOCOVER_BOTTOM.value: sorted(spec.nocover_positions),
        },
        "training": {r.side.value: edge_summary(r) for r in (top, bottom)},
        "test": {
            side.value: {
                "rows": [
                    {"position": r.position, "running_avg": round(r.running_avg, 6), "profit": round(r.profit, 6)}
                    for r in result.side_rows(side)
                ],
                "cumulative_profit": round(result.cumulative_by_side[side], 6),
                "flat_bets": {
                    "bets": result.flat_bets[side].bets,
                    "wins": result.flat_bets[side].wins,
                    "units": round(result.flat_bets[side].units, 6),
                    "roi": round(result.flat_bets[side].roi, 6),
                },
            }
            for side in EdgeSide
        },
        "bets_counted": result.bets_counted,
        "association": {
            "win_cover_pearson": round(win_cover, 6),
            "win_over_pearson": round(win_over, 6),
            "outlier_proportion": [round(v, 6) for v in outlier_proportion(spec, league)],
        },
    }
    return bundle, summary


def cmd_simulate(args) -> tuple[ReportBundle, dict]:
    bands = ()
    if args.top_bias or args.bottom_bias:
        bands = extreme_bands(args.teams, args.top_bias, args.bottom_bias, args.band_size)
    config = SynthConfig(
        team_count=args.teams,
        games_per_team=args.games,
        seasons=args.seasons,
        first_season=args.first_season,
        line_bias=bands,
        allow_pushes=args.allow_pushes,
        seed=args.seed,
    )
    ds = generate(config)
    bundle = ReportBundle(make_metadata(digest=ds.digest, config=_echo(args), seed=args.seed))
    bundle.tables["games.csv"] = serialize(ds)
    summary: dict = {"rows": ds.row_count, "digest": ds.digest, "seed": args.seed}
    if args.null_replications:
        summary["null_distribution"] = null_distribution(
            config, args.null_replications, break_even=args.break_even
        ).as_dict()
    return bundle, summary


COMMANDS = {
    "ingest": cmd_ingest,
    "validate": cmd_validate,
    "stats": cmd_stats,
    "profile": cmd_profile,
    "edge": cmd_edge,
    "report": cmd_report,
    "backtest": cmd_backtest,
    "simulate": cmd_simulate,
}


def _finish(bundle: ReportBundle, summary: dict, args) -> None:
    summary = {"schema_version": bundle.metadata["schema_version"], "subcommand": args.subcommand, **summary}
    if args.format == "json":
        bundle.tables = {k: v for k, v in bundle.tables.items() if k == "games.csv"}
    bundle.documents["summary.json"] = to_json(summary)
    write_bundle(bundle, args.out)
    if args.format == "json":
        sys.stdout.write(to_json(summary))
    else:
        print(f"wrote {len(bundle.files())} file(s) to {args.out}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        bundle, summary = COMMANDS[args.subcommand](args)
    except (CoverEdgeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        _finish(bundle, summary, args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
