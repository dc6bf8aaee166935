"""Player Edge: running averages walked in from either end of a position profile.

For the top side the walk starts at the best record and averages cover rates;
for the bottom side it starts at the worst record and averages no-cover rates.
The walk keeps expanding while the running average beats the break-even rate.
All rates here are percentages (0-100) and profits are percentage points.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import CoverEdgeError
from .profile import EmptyProfile, PositionProfile

#: Default break-even win rate, in percent.
DEFAULT_BREAK_EVEN = 52.40
#: Exact break-even at -110 pricing (110 / 210).
MINUS_110_BREAK_EVEN = 100 * 110 / 210
#: House edge as quoted in prose, applied around 50%.
PROSE_BREAK_EVEN = 52.54

# rates pass through fraction -> float -> percent; treat residue below this as zero profit
_PROFIT_EPS = 1e-9


class EmptyGroup(CoverEdgeError, ValueError):
    pass


class EdgeSide(enum.Enum):
    COVER_TOP = "cover_top"
    NOCOVER_BOTTOM = "nocover_bottom"


@dataclass(frozen=True)
class EdgeStep:
    k: int
    running_avg: float
    profit: float


@dataclass(frozen=True)
class EdgeReport:
    """Retained steps of one walk.

    ``running_avg`` is the rate of the bet being placed: cover rate on the top
    side, no-cover rate on the bottom side. ``walk`` keeps every running
    average up to the full profile length for plotting.
    """

    side: EdgeSide
    break_even: float
    steps: tuple[EdgeStep, ...]
    walk: tuple[float, ...] = ()

    @property
    def stop_k(self) -> int:
        return len(self.steps)

    @property
    def cumulative_profit(self) -> float:
        return sum(s.profit for s in self.steps)

    def cover_rate(self, step: EdgeStep) -> float:
        """The running cover rate, which is what the printed tables show for both sides."""
        if self.side is EdgeSide.COVER_TOP:
            return step.running_avg
        return 100.0 - step.running_avg


def _check_break_even(break_even: float) -> None:
    if not 50.0 < break_even < 60.0:
        raise ValueError(f"break_even must lie in (50, 60) percent, got {break_even}")


def side_rates(profile: PositionProfile, side: EdgeSide) -> list[float]:
    """Bet win rates in percent, ordered from the extreme position inward."""
    if not profile.per_position:
        raise EmptyProfile("profile has no positions")
    covers = [r.mean_c_pct for r in profile.per_position]
    if any(c is None for c in covers):
        raise EmptyProfile("profile has positions without any spread results")
    if side is EdgeSide.COVER_TOP:
        return [100.0 * c for c in reversed(covers)]
    return [100.0 * (1.0 - c) for c in covers]


def prefix_means(values: Iterable[float]) -> list[float]:
    """Incremental running means, H(k) = H(k-1) + (x_k - H(k-1)) / k."""
    out: list[float] = []
    h = 0.0
    for k, x in enumerate(values, start=1):
        h += (x - h) / k
        out.append(h)
    return out


def walk_rates(rates: Sequence[float], side: EdgeSide, break_even: float = DEFAULT_BREAK_EVEN) -> EdgeReport:
    """Run the stopping rule over bet win rates already ordered from the extreme inward."""
    _check_break_even(break_even)
    walk = prefix_means(rates)
    steps = []
    for k, h in enumerate(walk, start=1):
        profit = h - break_even
        if profit <= _PROFIT_EPS:
            break
        steps.append(EdgeStep(k, h, profit))
    return EdgeReport(side, break_even, tuple(steps), tuple(walk))


def running_average(
    profile: PositionProfile, side: EdgeSide, break_even: float = DEFAULT_BREAK_EVEN
) -> EdgeReport:
    return walk_rates(side_rates(profile, side), side, break_even)


def steps_from_table(
    cover_avgs: Sequence[float], side: EdgeSide, break_even: float = DEFAULT_BREAK_EVEN
) -> list[EdgeStep]:
    """Profits for running averages printed as cover rates, without any stopping rule.

    Bottom-side tables print the cover rate of the losing teams; their bet is
    the no-cover, so the profit is ``(100 - break_even) - cover``.
    """
    _check_break_even(break_even)
    steps = []
    for k, c in enumerate(cover_avgs, start=1):
        h = c if side is EdgeSide.COVER_TOP else 100.0 - c
        steps.append(EdgeStep(k, h, h - break_even))
    return steps


def over_tendency(
    profile: PositionProfile, low_positions: Sequence[int], high_positions: Sequence[int]
) -> tuple[float, float]:
    """(low-group over bias, high-group under bias) in percentage points off 50."""
    if not low_positions or not high_positions:
        raise EmptyGroup("both position groups must be non-empty")

    def mean_over(positions: Sequence[int]) -> float:
        vals = [profile.row(p).mean_o_pct for p in positions]
        if any(v is None for v in vals):
            raise EmptyGroup("group contains positions without total-line results")
        return 100.0 * sum(vals) / len(vals)

    return mean_over(low_positions) - 50.0, 50.0 - mean_over(high_positions)
