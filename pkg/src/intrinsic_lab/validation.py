"""Input validation shared by the CLI and the estimator wrappers.

Every ``check_*`` function returns the normalized value or raises
``ValueError`` (``UnknownChart`` for bad chart specifiers) with a message
naming the offending argument.
"""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Sequence

from .charts import Chart, chart_from_spec, make_box
from .errors import UnknownChart

_POWER = re.compile(r"^\s*(-?\d+)\s*\^\s*(-?\d+)\s*$")


def check_rational(value, name: str = "value", *, positive: bool = False, nonnegative: bool = False,
                   upper: Fraction | None = None) -> Fraction:
    """Exact rational from int, Fraction, "p/q", "a^b", or a decimal string.

    Floats are refused: they are not exact and would silently change results.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"{name} must be exact (int, Fraction or string), got {value!r}")
    if isinstance(value, (int, Fraction)):
        x = Fraction(value)
    elif isinstance(value, str):
        m = _POWER.match(value)
        try:
            if m:
                x = Fraction(int(m.group(1))) ** int(m.group(2))
            elif _looks_decimal(value):
                x = Fraction(Decimal(value.strip()))
            else:
                x = Fraction(value.strip())
        except (ValueError, ZeroDivisionError, InvalidOperation) as exc:
            raise ValueError(f"{name}: cannot read {value!r} as a rational") from exc
    else:
        raise ValueError(f"{name} must be a rational, got {type(value).__name__}")
    if positive and x <= 0:
        raise ValueError(f"{name} must be > 0, got {x}")
    if nonnegative and x < 0:
        raise ValueError(f"{name} must be >= 0, got {x}")
    if upper is not None and x > upper:
        raise ValueError(f"{name} must be <= {upper}, got {x}")
    return x


def _looks_decimal(text: str) -> bool:
    return "/" not in text and any(ch in text for ch in ".eE")


def check_positive_int(value, name: str = "value", *, minimum: int = 1) -> int:
    """Integer >= minimum; accepts "1e6" and "2^16" when they are exact integers."""
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer")
    x = value if isinstance(value, (int, Fraction)) else check_rational(value, name)
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise ValueError(f"{name} must be an integer, got {x}")
        x = x.numerator
    if not isinstance(x, int):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if x < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {x}")
    return x


def check_seed(value) -> int:
    seed = check_positive_int(value, "seed", minimum=0)
    if seed >= 2**64:
        raise ValueError("seed must fit in 64 bits")
    return seed


def check_chart(chart) -> Chart:
    if isinstance(chart, Chart):
        return chart
    if isinstance(chart, str):
        return chart_from_spec(chart)
    raise UnknownChart(f"expected a Chart or specifier string, got {type(chart).__name__}")


def check_box(value, dim: int, name: str = "box"):
    """Box from "lo..hi" (repeated), "lo..hi,lo..hi", or a sequence of pairs."""
    if value is None:
        return None
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
        pairs = []
        for part in parts:
            lo, sep, hi = part.partition("..")
            if not sep:
                raise ValueError(f"{name}: expected lo..hi, got {part!r}")
            pairs.append((check_rational(lo, f"{name} lower"), check_rational(hi, f"{name} upper")))
        if len(pairs) == 1:
            pairs = pairs * dim
        value = pairs
    box = make_box(value, dim)
    for lo, hi in box:
        if lo > hi:
            raise ValueError(f"{name}: empty side [{lo}, {hi}]")
    return box


def check_records(records: Sequence, name: str = "records") -> list:
    """Approximation records sorted by strictly increasing height."""
    records = list(records)
    for a, b in zip(records, records[1:]):
        if b.height <= a.height:
            raise ValueError(f"{name} must have strictly increasing heights")
    return records


def check_fraction_open(value, name: str) -> Fraction:
    """Rational strictly inside (0, 1)."""
    x = check_rational(value, name, positive=True)
    if x >= 1:
        raise ValueError(f"{name} must lie in (0, 1), got {x}")
    return x
