"""Era definitions from an optional TOML file.

Example::

    [[era]]
    name = "ERA30"
    first = 2004   # season start year
    last = 2013
    teams = 30
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .model import DEFAULT_ERAS, CoverEdgeError, EraSubgroup, SeasonId


class ConfigError(CoverEdgeError, ValueError):
    pass


def load_eras(path: Optional[str | Path]) -> tuple[EraSubgroup, ...]:
    if path is None:
        return DEFAULT_ERAS
    try:
        data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    entries = data.get("era")
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"{path}: expected one or more [[era]] tables")
    eras = []
    for i, e in enumerate(entries):
        try:
            eras.append(EraSubgroup(str(e["name"]), SeasonId(int(e["first"])), SeasonId(int(e["last"])), int(e["teams"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: era #{i + 1} is invalid ({exc})") from exc
    names = [e.name for e in eras]
    if len(set(names)) != len(names):
        raise ConfigError(f"{path}: duplicate era names")
    return tuple(eras)
