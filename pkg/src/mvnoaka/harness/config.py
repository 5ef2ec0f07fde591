"""Flat ``key = value`` config files whose keys mirror the CLI flags.

Example::

    # scenario.conf
    seed = 42
    ues = 4
    list-size = 64
    features = session-keys
"""

from __future__ import annotations

import configparser
from pathlib import Path

from .scenario import ConfigInvalid

INT_KEYS = {"seed", "ues", "gnbs", "list-size", "skew-ms", "trials", "reps", "workers", "sessions"}
STR_KEYS = {"features", "transcript-out", "output", "type", "transport"}


def load_config(path: str | Path) -> dict[str, object]:
    """Parse a config file into a dict keyed by flag name (``list-size`` etc.)."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    try:
        text = Path(path).read_text()
        parser.read_string("[config]\n" + text)
    except (OSError, configparser.Error) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    out: dict[str, object] = {}
    for raw_key, value in parser["config"].items():
        key = raw_key.strip().replace("_", "-")
        if key in INT_KEYS:
            try:
                out[key] = int(value, 0)
            except ValueError:
                raise ConfigInvalid(f"{key} must be an integer, got {value!r}") from None
        elif key in STR_KEYS:
            out[key] = value.strip()
        else:
            raise ConfigInvalid(f"unknown config key {raw_key!r}")
    return out
