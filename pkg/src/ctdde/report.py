"""Plain ``key=value`` reports, one item per line, in insertion order."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Fraction):
        return repr(float(value))
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value).replace("\n", " ")


def format_report(items) -> str:
    return "".join(f"{key}={_fmt(value)}\n" for key, value in items)


def write_report(path, items) -> str:
    text = format_report(items)
    Path(path).write_text(text)
    return text


def parse_report(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if line:
            key, _, value = line.partition("=")
            out[key] = value
    return out
