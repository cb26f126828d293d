"""Canonical JSON serialization helpers.

All emitters go through `dumps` so that generator output is byte-identical
for fixed inputs (compact separators, preserved key order, trailing newline).
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .errors import InputError

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def loads(text: str, where: str = "input"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{where}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_rational(text: str, where: str = "value") -> Fraction:
    """Parse an exact rational written as 'p/q' or 'p'. Floats are rejected."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise InputError(f"{where}: expected exact rational 'p/q', got {text!r}")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)


def expect(cond: bool, message: str):
    if not cond:
        raise InputError(message)


def expect_key(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing key /{key}")
    return obj[key]
