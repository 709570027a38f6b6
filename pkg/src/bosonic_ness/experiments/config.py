"""Flat ``key = value`` configuration files.

One key per line, ``#`` starts a comment. Sweepable keys take a single value,
a comma-separated list (``L = 8,16,32``) or an arithmetic range
``start:step:stop`` (inclusive of ``stop`` when it is hit exactly). Keys are
case-sensitive; ``Gamma`` and ``gamma`` are different parameters.
"""

from __future__ import annotations

from fractions import Fraction

SWEEPABLE = ("L", "Gamma", "N1", "NL", "lambda", "gamma", "b", "k")
INTEGER_KEYS = ("L", "b", "k")
SCALAR_KEYS = ("omega", "r1", "theta1", "rL", "thetaL")
TEXT_KEYS = ("measures", "partition", "blocks", "preset")
KNOWN_KEYS = SWEEPABLE + SCALAR_KEYS + TEXT_KEYS + ("workers",)


class ConfigError(ValueError):
    """Malformed configuration text."""


def _number(text: str, key: str):
    text = text.strip()
    try:
        if key in INTEGER_KEYS or key == "workers":
            value = Fraction(text)
            if value.denominator != 1:
                raise ValueError
            return int(value)
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from None


def parse_values(text: str, key: str) -> list:
    """Expand a value list or ``start:step:stop`` range."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: ranges are written start:step:stop, got {text!r}")
        start, step, stop = (Fraction(p.strip()) for p in parts)
        if step <= 0:
            raise ConfigError(f"{key}: range step must be positive")
        out = []
        x = start
        while x <= stop:
            out.append(x)
            x += step
        return [_number(str(v.numerator) if v.denominator == 1 else repr(float(v)), key) for v in out]
    values = [_number(v, key) for v in text.split(",") if v.strip()]
    if not values:
        raise ConfigError(f"{key}: empty value list")
    return values


def parse_config(text: str) -> dict:
    """Parse config text into ``{key: value or list}``; insertion order is file order."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key in TEXT_KEYS:
            out[key] = value
        elif key in SWEEPABLE:
            values = parse_values(value, key)
            out[key] = values if len(values) > 1 or "," in value or ":" in value else values[0]
        else:
            out[key] = _number(value, key)
    return out


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
