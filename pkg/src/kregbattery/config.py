"""Plain ``key = value`` config files.

One assignment per line, ``#`` starts a comment.  Values are parsed as
int, float, bool (true/false) or string; comma-separated values become
lists, and ``a..b`` / ``a..b:step`` expand to inclusive integer ranges.
``pi`` is accepted as a float literal (``pi``, ``pi/2``, ``2*pi``).

Recognised model keys: n_sites, battery_axis | battery_k,
charger_k | charger_alpha, t_min, t_max, t_points.  Experiment keys:
experiment, sweep, m, checks, max_n, inject_fault, unnormalized_weights,
seed, workers.
"""
from __future__ import annotations

import math
import re
from pathlib import Path

from .errors import ValidationError


class Config(dict):
    """Parsed key/value pairs that remember the line each key came from."""

    def __init__(self, *args, source: str = "<config>", lines: dict | None = None, **kw):
        super().__init__(*args, **kw)
        self.source = source
        self.lines = dict(lines or {})

    def where(self, key: str) -> str:
        if key in self.lines:
            return f"{self.source}:{self.lines[key]}: key {key!r}"
        return f"{self.source}: key {key!r}"

    def error(self, key: str, msg: str) -> ValidationError:
        return ValidationError(f"{self.where(key)}: {msg}")

    def as_list(self, key: str, default=None) -> list:
        if key not in self:
            if default is None:
                raise self.error(key, "required")
            return list(default)
        v = self[key]
        return list(v) if isinstance(v, list) else [v]

    def merged(self, defaults: dict) -> "Config":
        out = Config(defaults, source=self.source, lines=self.lines)
        out.update(self)
        return out


_PI = re.compile(r"^(?:(?P<num>[-+]?\d*\.?\d+)\s*\*\s*)?pi(?:\s*/\s*(?P<den>\d*\.?\d+))?$")


def parse_scalar(text: str):
    s = text.strip()
    low = s.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    m = _PI.match(low)
    if m:
        return float(m.group("num") or 1) * math.pi / float(m.group("den") or 1)
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def parse_value(text: str):
    text = text.strip()
    m = re.fullmatch(r"([-+]?\d+)\s*\.\.\s*([-+]?\d+)(?:\s*:\s*(\d+))?", text)
    if m:
        lo, hi, step = int(m.group(1)), int(m.group(2)), int(m.group(3) or 1)
        return list(range(lo, hi + 1, step))
    if "," in text:
        out = []
        for part in text.split(","):
            v = parse_value(part)
            out.extend(v if isinstance(v, list) else [v])
        return out
    return parse_scalar(text)


def parse_config(text: str, source: str = "<config>") -> Config:
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ValidationError(f"{source}:{lineno}: bad key {key!r}")
        if key in values:
            raise ValidationError(f"{source}:{lineno}: key {key!r} repeated (first on line {lines[key]})")
        if not value:
            raise ValidationError(f"{source}:{lineno}: key {key!r} has no value")
        values[key] = parse_value(value)
        lines[key] = lineno
    return Config(values, source=source, lines=lines)


def load_config(path) -> Config:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, source=str(path))
