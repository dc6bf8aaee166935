"""CSV/JSON tables and SVG figures, plus atomic writing of a report bundle.

Everything here is a pure function of its inputs: no timestamps, sorted JSON
keys, fixed number formatting. Percentages in edge tables carry two decimals.
"""

from __future__ import annotations

import csv
import io
import json
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence
from xml.sax.saxutils import escape

from . import __version__
from .edge import EdgeReport, EdgeSide, EdgeStep
from .profile import EmptyProfile, PositionProfile
from .season_stats import SeasonRanking, format_pct
from .strategy import BacktestReport

SCHEMA_VERSION = 1

EDGE_COLUMNS = ("group_size", "running_cover_pct", "profit", "cumulative")
PROFILE_COLUMNS = ("position", "mean_w_pct", "mean_c_pct", "mean_o_pct", "season_count")
STATS_COLUMNS = (
    "position", "team", "wins", "losses", "w_pct", "covers", "no_covers", "ats_pushes",
    "c_pct", "overs", "unders", "ou_pushes", "o_pct", "point_diff",
)


@dataclass
class ReportBundle:
    metadata: dict
    tables: dict[str, str] = field(default_factory=dict)
    figures: dict[str, str] = field(default_factory=dict)
    documents: dict[str, str] = field(default_factory=dict)

    def files(self) -> dict[str, str]:
        out = {"metadata.json": to_json(self.metadata)}
        out.update(self.tables)
        out.update(self.figures)
        out.update(self.documents)
        return dict(sorted(out.items()))


def make_metadata(*, digest: Optional[str], config: Mapping, seed: Optional[int] = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "dataset_digest": digest,
        "seed": seed,
        "config": dict(config),
    }


def to_json(payload: Mapping) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"


def write_bundle(bundle: ReportBundle, out_dir: os.PathLike | str) -> list[Path]:
    """Write every file of ``bundle`` under ``out_dir``; nothing lands there unless all writes succeed."""
    out = Path(out_dir)
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=out.parent))
    try:
        for name, text in bundle.files().items():
            target = staging / name
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8", newline="\n")
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for src in sorted(p for p in staging.rglob("*") if p.is_file()):
            dest = out / src.relative_to(staging)
            dest.parent.mkdir(parents=True, exist_ok=True)
            os.replace(src, dest)
            written.append(dest)
        return written
    finally:
        shutil.rmtree(staging, ignore_errors=True)


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _f(value: Optional[float], places: int) -> str:
    return "" if value is None else f"{value:.{places}f}"


# --- tables -----------------------------------------------------------------


def stats_table(ranking: SeasonRanking) -> str:
    rows = []
    for pos, s in ranking.items():
        rows.append([
            pos, s.team.name, s.wins, s.losses, format_pct(s.w_pct), s.covers, s.no_covers,
            s.ats_pushes, format_pct(s.c_pct), s.overs, s.unders, s.ou_pushes, format_pct(s.o_pct),
            s.point_diff,
        ])
    return _csv(STATS_COLUMNS, rows)


def profile_table(profile: PositionProfile) -> str:
    return _csv(
        PROFILE_COLUMNS,
        (
            [r.position, _f(r.mean_w_pct, 6), _f(r.mean_c_pct, 6), _f(r.mean_o_pct, 6), r.season_count]
            for r in profile.per_position
        ),
    )


def _cover_pct(side: EdgeSide, running_avg: float) -> float:
    return running_avg if side is EdgeSide.COVER_TOP else 100.0 - running_avg


def _edge_rows(side: EdgeSide, steps: Sequence[tuple[int, float, float]]) -> list[list[str]]:
    rows = []
    total = 0.0
    for i, (k, h, profit) in enumerate(steps):
        total += round(profit, 2)
        last = i == len(steps) - 1
        rows.append([str(k), _f(_cover_pct(side, h), 2), _f(profit, 2), _f(total, 2) if last else ""])
    return rows


def edge_table(report: EdgeReport) -> str:
    """Rows for the retained steps; the running average is printed as a cover rate on both sides."""
    return _csv(EDGE_COLUMNS, _edge_rows(report.side, [(s.k, s.running_avg, s.profit) for s in report.steps]))


def emit_edge_tables(reports: Sequence[EdgeReport]) -> dict[str, str]:
    if len({r.break_even for r in reports}) > 1:
        raise ValueError("edge reports were computed at different break-even rates")
    return {f"edge_{r.side.value}.csv": edge_table(r) for r in reports}


def parse_edge_table(text: str, side: EdgeSide, break_even: float) -> EdgeReport:
    """Rebuild an EdgeReport from :func:`edge_table` output at printed precision."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != EDGE_COLUMNS:
        raise ValueError(f"unexpected edge table header {reader.fieldnames}")
    steps = []
    for row in reader:
        cover = float(row["running_cover_pct"])
        steps.append(EdgeStep(int(row["group_size"]), _cover_pct(side, cover), float(row["profit"])))
    return EdgeReport(side, break_even, tuple(steps))


def backtest_tables(report: BacktestReport) -> dict[str, str]:
    out = {}
    for side in EdgeSide:
        rows = report.side_rows(side)
        out[f"backtest_{side.value}.csv"] = _csv(
            EDGE_COLUMNS, _edge_rows(side, [(r.position, r.running_avg, r.profit) for r in rows])
        )
    return out


def edge_summary(report: EdgeReport) -> dict:
    return {
        "side": report.side.value,
        "break_even": report.break_even,
        "stop_k": report.stop_k,
        "cumulative_profit": round(report.cumulative_profit, 6),
        "steps": [
            {"k": s.k, "running_avg": round(s.running_avg, 6), "profit": round(s.profit, 6)} for s in report.steps
        ],
    }


# --- SVG --------------------------------------------------------------------

WIDTH, HEIGHT = 720, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 64, 24, 32, 56
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _n(x: float) -> str:
    return f"{x:.2f}"


def y_range(values: Iterable[float], floor: float, ceil: float, step: float) -> tuple[float, float]:
    """Axis range covering ``[floor, ceil]`` and all values, snapped outward to ``step``."""
    vals = list(values)
    lo = min([floor] + vals)
    hi = max([ceil] + vals)
    lo_i = int((lo / step) // 1)
    hi_i = -int((-hi / step) // 1)
    return round(lo_i * step, 10), round(hi_i * step, 10)


class _Chart:
    def __init__(self, title: str, x_count: int, y_lo: float, y_hi: float, x_label: str, y_label: str):
        self.x_count = x_count
        self.y_lo, self.y_hi = y_lo, y_hi
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2:.0f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        ]
        self.x_label, self.y_label = x_label, y_label

    def x(self, i: int) -> float:
        if self.x_count == 1:
            return MARGIN_LEFT + PLOT_W / 2
        return MARGIN_LEFT + (i - 1) * PLOT_W / (self.x_count - 1)

    def y(self, v: float) -> float:
        return MARGIN_TOP + (self.y_hi - v) / (self.y_hi - self.y_lo) * PLOT_H

    def band(self, lo: float, hi: float, label: str) -> None:
        top, bottom = self.y(hi), self.y(lo)
        self.parts.append(
            f'<rect class="band" x="{_n(MARGIN_LEFT)}" y="{_n(top)}" width="{_n(PLOT_W)}" '
            f'height="{_n(bottom - top)}" fill="#cccccc" fill-opacity="0.5"><title>{escape(label)}</title></rect>'
        )

    def hline(self, v: float, label: str) -> None:
        y = _n(self.y(v))
        self.parts.append(
            f'<line class="threshold" x1="{_n(MARGIN_LEFT)}" y1="{y}" x2="{_n(MARGIN_LEFT + PLOT_W)}" y2="{y}" '
            f'stroke="#555555" stroke-dasharray="4 3"><title>{escape(label)}</title></line>'
        )

    def axes(self, y_ticks: Sequence[float], y_fmt) -> None:
        x0, y0 = MARGIN_LEFT, MARGIN_TOP + PLOT_H
        self.parts.append(
            f'<path d="M{_n(x0)} {_n(MARGIN_TOP)}V{_n(y0)}H{_n(x0 + PLOT_W)}" fill="none" stroke="black"/>'
        )
        for v in y_ticks:
            y = _n(self.y(v))
            self.parts.append(
                f'<text x="{_n(x0 - 6)}" y="{y}" text-anchor="end" dominant-baseline="middle">{y_fmt(v)}</text>'
            )
        step = 1 if self.x_count <= 15 else 2 if self.x_count <= 40 else 5
        for i in range(1, self.x_count + 1):
            if i == 1 or i % step == 0:
                self.parts.append(
                    f'<text x="{_n(self.x(i))}" y="{_n(y0 + 16)}" text-anchor="middle">{i}</text>'
                )
        self.parts.append(
            f'<text x="{_n(x0 + PLOT_W / 2)}" y="{HEIGHT - 12}" text-anchor="middle">{escape(self.x_label)}</text>'
        )
        self.parts.append(
            f'<text transform="translate(16 {_n(MARGIN_TOP + PLOT_H / 2)}) rotate(-90)" '
            f'text-anchor="middle">{escape(self.y_label)}</text>'
        )

    def series(self, name: str, values: Sequence[Optional[float]], color: str, index: int) -> None:
        pts = [(self.x(i), self.y(v)) for i, v in enumerate(values, start=1) if v is not None]
        if not pts:
            return
        d = "M" + "L".join(f"{_n(x)} {_n(y)}" for x, y in pts)
        self.parts.append(f'<g class="series" data-name="{escape(name)}">')
        self.parts.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            self.parts.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="2.5" fill="{color}"/>')
        self.parts.append("</g>")
        ly = MARGIN_TOP + 8 + 14 * index
        lx = MARGIN_LEFT + PLOT_W - 150
        self.parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" stroke="{color}" stroke-width="2"/>'
            f'<text x="{lx + 24}" y="{ly}" dominant-baseline="middle">{escape(name)}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _ticks(lo: float, hi: float, step: float) -> list[float]:
    n = int(round((hi - lo) / step))
    return [round(lo + i * step, 10) for i in range(n + 1)]


def _pct_label(v: float) -> str:
    return f"{100 * v:.0f}%"


def emit_profile_figure(profile: PositionProfile, *, title: Optional[str] = None) -> str:
    """Cover and over rates by position with the house-edge band shaded."""
    if not profile.per_position:
        raise EmptyProfile("profile has no positions")
    covers = [r.mean_c_pct for r in profile.per_position]
    overs = [r.mean_o_pct for r in profile.per_position]
    lo, hi = profile.house_edge_band
    vals = [v for v in covers + overs if v is not None]
    y_lo, y_hi = y_range(vals, 0.40, 0.60, 0.05)
    chart = _Chart(
        title or f"Cover and over rates by position ({profile.era.name})",
        len(profile), y_lo, y_hi, "Winning-percentage position (1 = worst record)", "Rate",
    )
    chart.band(lo, hi, f"house edge band {100 * lo:.2f}%-{100 * hi:.2f}%")
    chart.axes(_ticks(y_lo, y_hi, 0.05), _pct_label)
    chart.series("cover", covers, SERIES_COLORS[0], 0)
    chart.series("over", overs, SERIES_COLORS[1], 1)
    return chart.render()


def emit_win_figure(profile: PositionProfile, *, title: Optional[str] = None) -> str:
    if not profile.per_position:
        raise EmptyProfile("profile has no positions")
    wins = [r.mean_w_pct for r in profile.per_position]
    chart = _Chart(
        title or f"Winning percentage by position ({profile.era.name})",
        len(profile), 0.0, 1.0, "Winning-percentage position (1 = worst record)", "Win rate",
    )
    chart.hline(0.5, "50%")
    chart.axes(_ticks(0.0, 1.0, 0.1), _pct_label)
    chart.series("win", wins, SERIES_COLORS[2], 0)
    return chart.render()


def emit_edge_figure(top: EdgeReport, bottom: EdgeReport, *, title: str = "Running average from each extreme") -> str:
    """Both walks as cover rates against group size, with break-even lines on either side of 50%."""
    if top.break_even != bottom.break_even:
        raise ValueError("reports use different break-even rates")
    be = top.break_even
    top_cov = [v for v in top.walk]
    bottom_cov = [100.0 - v for v in bottom.walk]
    size = max(len(top_cov), len(bottom_cov))
    if size == 0:
        raise EmptyProfile("edge reports carry no walk")
    y_lo, y_hi = y_range(top_cov + bottom_cov, 40.0, 60.0, 5.0)
    chart = _Chart(title, size, y_lo, y_hi, "Group size k (teams from the extreme)", "Running cover rate")
    chart.band(100.0 - be, be, f"break-even band {100 - be:.2f}%-{be:.2f}%")
    chart.axes(_ticks(y_lo, y_hi, 5.0), lambda v: f"{v:.0f}%")
    chart.series(f"most winning (retained {top.stop_k})", top_cov, SERIES_COLORS[0], 0)
    chart.series(f"most losing (retained {bottom.stop_k})", bottom_cov, SERIES_COLORS[1], 1)
    return chart.render()
