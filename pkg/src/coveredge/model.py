"""Domain types and outcome derivation for a single game.

Lines (spread, total) are exact :class:`fractions.Fraction` values restricted
to quarter-point steps, so push detection never depends on float rounding.
"""

from __future__ import annotations

import datetime as dt
import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Union

LineLike = Union[Fraction, int, str, float]


class CoverEdgeError(Exception):
    """Base class for every error raised by this package."""


class TiedScore(CoverEdgeError, ValueError):
    pass


class InconsistentLine(CoverEdgeError, ValueError):
    pass


class InvalidValue(CoverEdgeError, ValueError):
    pass


@dataclass(frozen=True, order=True)
class TeamId:
    name: str

    def __post_init__(self) -> None:
        canon = self.name.strip() if isinstance(self.name, str) else ""
        if not canon:
            raise InvalidValue(f"team name must be non-empty text, got {self.name!r}")
        object.__setattr__(self, "name", canon)

    def __str__(self) -> str:
        return self.name


_LABEL_RE = re.compile(r"^(\d{4})-(\d{2}|\d{4})$")


@dataclass(frozen=True, order=True)
class SeasonId:
    """A season identified by the calendar year it starts in."""

    start_year: int

    def __post_init__(self) -> None:
        if not isinstance(self.start_year, int) or not 1946 <= self.start_year <= 2100:
            raise InvalidValue(f"season start year out of range: {self.start_year!r}")

    @property
    def label(self) -> str:
        return f"{self.start_year}-{self.start_year + 1}"

    @classmethod
    def parse(cls, text: str) -> "SeasonId":
        """Accept ``2010-2011``, ``2010-11`` or a bare start year ``2010``."""
        text = text.strip()
        if text.isdigit() and len(text) == 4:
            return cls(int(text))
        m = _LABEL_RE.match(text)
        if not m:
            raise InvalidValue(f"bad season label {text!r}")
        start = int(m.group(1))
        end = m.group(2)
        expected = f"{start + 1}" if len(end) == 4 else f"{(start + 1) % 100:02d}"
        if end != expected:
            raise InvalidValue(f"season label {text!r}: second year must be start+1")
        return cls(start)

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class EraSubgroup:
    """Consecutive seasons sharing one league size."""

    name: str
    first: SeasonId
    last: SeasonId
    team_count: int

    def __post_init__(self) -> None:
        if self.last < self.first:
            raise InvalidValue(f"era {self.name}: last season before first")
        if self.team_count < 2:
            raise InvalidValue(f"era {self.name}: team_count must be >= 2")

    @property
    def seasons(self) -> tuple[SeasonId, ...]:
        return tuple(SeasonId(y) for y in range(self.first.start_year, self.last.start_year + 1))

    def __contains__(self, season: object) -> bool:
        return isinstance(season, SeasonId) and self.first <= season <= self.last


DEFAULT_ERAS: tuple[EraSubgroup, ...] = (
    EraSubgroup("ERA27", SeasonId(1990), SeasonId(1994), 27),
    EraSubgroup("ERA29", SeasonId(1995), SeasonId(2003), 29),
    EraSubgroup("ERA30", SeasonId(2004), SeasonId(2013), 30),
)


def to_line(value: Optional[LineLike]) -> Optional[Fraction]:
    """Coerce a line to an exact quarter-point Fraction (``None`` passes through)."""
    if value is None:
        return None
    if isinstance(value, float):
        value = repr(value)
    try:
        line = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidValue(f"bad line value {value!r}") from exc
    if line < 0:
        raise InvalidValue(f"line must be non-negative, got {value!r}")
    if (line * 4).denominator != 1:
        raise InvalidValue(f"line {value!r} is not a quarter-point step")
    return line


def format_line(line: Optional[Fraction]) -> str:
    """Shortest decimal text for a quarter-point line: 5, 5.25, 5.5, 5.75."""
    if line is None:
        return ""
    whole, rem = divmod(line.numerator * 4 // line.denominator, 4)
    return str(whole) if rem == 0 else f"{whole}.{('25', '5', '75')[rem - 1]}"


@dataclass(frozen=True)
class GameRecord:
    date: dt.date
    season: SeasonId
    home: TeamId
    away: TeamId
    home_score: int
    away_score: int
    favorite: Optional[TeamId] = None
    spread: Optional[Fraction] = None
    total_line: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.home == self.away:
            raise InvalidValue(f"home and away are the same team: {self.home}")
        for score in (self.home_score, self.away_score):
            if not isinstance(score, int) or isinstance(score, bool) or score < 0:
                raise InvalidValue(f"scores must be non-negative integers, got {score!r}")
        object.__setattr__(self, "spread", to_line(self.spread))
        object.__setattr__(self, "total_line", to_line(self.total_line))
        if (self.favorite is None) != (self.spread is None):
            raise InconsistentLine("favorite and spread must be given together")
        if self.favorite is not None and self.favorite not in (self.home, self.away):
            raise InconsistentLine(f"favorite {self.favorite} is not playing in this game")

    @property
    def key(self) -> tuple:
        return (self.season, self.date, self.home, self.away)

    @property
    def teams(self) -> tuple[TeamId, TeamId]:
        return (self.home, self.away)

    def score_of(self, team: TeamId) -> int:
        if team == self.home:
            return self.home_score
        if team == self.away:
            return self.away_score
        raise KeyError(team)

    def opponent(self, team: TeamId) -> TeamId:
        return self.away if team == self.home else self.home


class Ats(enum.Enum):
    COVER = "COVER"
    NO_COVER = "NO_COVER"
    PUSH = "PUSH"


class OverUnder(enum.Enum):
    OVER = "OVER"
    UNDER = "UNDER"
    PUSH = "PUSH"


@dataclass(frozen=True)
class GameOutcome:
    """Betting results of one game.

    ``ats_result`` is empty and ``delta_c`` is ``None`` when the game had no
    spread; likewise ``ou_result``/``delta_o`` when there was no total line.
    """

    winner: TeamId
    loser: TeamId
    delta_w: int
    ats_result: Mapping[TeamId, Ats]
    delta_c: Optional[Fraction]
    ou_result: Optional[OverUnder]
    delta_o: Optional[Fraction]


def derive_outcome(game: GameRecord) -> GameOutcome:
    if game.home_score == game.away_score:
        raise TiedScore(f"{game.date} {game.away} @ {game.home} ended tied {game.home_score}")
    if game.home_score > game.away_score:
        winner, loser = game.home, game.away
    else:
        winner, loser = game.away, game.home
    delta_w = abs(game.home_score - game.away_score)

    ats: dict[TeamId, Ats] = {}
    delta_c = None
    if game.spread is not None:
        fav = game.favorite
        if fav not in game.teams:
            raise InconsistentLine(f"favorite {fav} is not playing in this game")
        dog = game.opponent(fav)
        delta_c = game.score_of(fav) - game.score_of(dog) - game.spread
        if delta_c > 0:
            ats = {fav: Ats.COVER, dog: Ats.NO_COVER}
        elif delta_c < 0:
            ats = {fav: Ats.NO_COVER, dog: Ats.COVER}
        else:
            ats = {fav: Ats.PUSH, dog: Ats.PUSH}

    ou = None
    delta_o = None
    if game.total_line is not None:
        delta_o = game.home_score + game.away_score - game.total_line
        ou = OverUnder.OVER if delta_o > 0 else OverUnder.UNDER if delta_o < 0 else OverUnder.PUSH

    return GameOutcome(
        winner=winner,
        loser=loser,
        delta_w=delta_w,
        ats_result=ats,
        delta_c=delta_c,
        ou_result=ou,
        delta_o=delta_o,
    )
