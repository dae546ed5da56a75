"""Flat ``key = value`` configuration files.

One key per line; ``#`` starts a comment; dashes in keys are read as
underscores.  Values are parsed as floats, integers or booleans where the
key calls for it.  Command-line values override file values, which override
built-in defaults.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError

FLOAT_KEYS = {
    "gamma", "kappa", "u", "delta1", "delta_a", "x", "xc", "omega",
    "tolerance", "bin_width", "duration",
}
INT_KEYS = {"seed", "sets", "points"}
BOOL_KEYS = {"absolute_units", "joint"}
TEXT_KEYS = {"preset", "out", "format", "quantity"}
KNOWN_KEYS = FLOAT_KEYS | INT_KEYS | BOOL_KEYS | TEXT_KEYS | {"axis"}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _convert(key: str, raw: str):
    if key in FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if key in INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if key in BOOL_KEYS:
        lowered = raw.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    return raw


def parse_config(text: str) -> dict:
    """Parse configuration text into a dict of typed values.

    ``axis`` may appear more than once; its values are collected in a list.

    Raises:
        ConfigError: On malformed lines, unknown keys or bad values.
    """
    values: dict = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {number}: unknown key {key!r}")
        if not raw:
            raise ConfigError(f"line {number}: empty value for {key!r}")
        if key == "axis":
            values.setdefault("axis", []).append(raw)
        elif key in values:
            raise ConfigError(f"line {number}: duplicate key {key!r}")
        else:
            values[key] = _convert(key, raw)
    return values


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text)


def merge(defaults: dict, file_values: dict, cli_values: dict) -> dict:
    """Layer settings: command line over file over defaults; ``None`` means unset."""
    merged = dict(defaults)
    merged.update({k: v for k, v in file_values.items() if v is not None})
    merged.update({k: v for k, v in cli_values.items() if v is not None})
    return merged
