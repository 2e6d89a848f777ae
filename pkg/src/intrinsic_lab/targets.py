"""Real parameters to approximate, each with certified rational enclosures.

A scalar target is rational, algebraic (a polynomial and an isolating
interval) or a lacunary series sum b^(-j!).  :class:`TargetPoint` bundles one
scalar per chart parameter.  Continued-fraction expansions are read off
enclosures, so every partial quotient returned is correct for the true value.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import as_fraction, fmt_rational
from .polys import RootInterval, count_roots, isolate_roots, refine_root, squarefree_part, sturm_sequence, upoly

Interval = tuple[Fraction, Fraction]


class ScalarTarget:
    """Interface: ``enclosure(width)`` returns [lo, hi] of width < width containing the value."""

    def enclosure(self, width) -> Interval:
        raise NotImplementedError

    @property
    def is_rational(self) -> bool:
        return False

    def approx(self) -> float:
        lo, hi = self.enclosure(Fraction(1, 2**60))
        return float((lo + hi) / 2)

    def spec(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class RationalTarget(ScalarTarget):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", as_fraction(self.value))

    def enclosure(self, width) -> Interval:
        return self.value, self.value

    @property
    def is_rational(self) -> bool:
        return True

    def spec(self) -> str:
        return fmt_rational(self.value)


@dataclass(frozen=True)
class AlgebraicTarget(ScalarTarget):
    """The unique root of ``poly`` (coefficients low degree first) in [lo, hi]."""

    poly: tuple[Fraction, ...]
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        p = upoly(self.poly)
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        roots = isolate_roots(p, lo, hi)
        if len(roots) != 1:
            raise ValueError(f"interval [{lo}, {hi}] holds {len(roots)} roots, need exactly one")
        object.__setattr__(self, "poly", squarefree_part(p))
        root = roots[0]
        # store an isolating interval with the open/exact convention
        object.__setattr__(self, "lo", root.lo)
        object.__setattr__(self, "hi", root.hi)

    @property
    def is_rational(self) -> bool:
        return self.lo == self.hi

    def enclosure(self, width) -> Interval:
        iv = refine_root(self.poly, RootInterval(self.lo, self.hi), Fraction(width))
        return iv.lo, iv.hi

    def spec(self) -> str:
        return f"{_poly_text(self.poly)},[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class LacunaryTarget(ScalarTarget):
    """sum_{j >= 1} base^(-j!), a Liouville number for base >= 2."""

    base: int = 10

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")

    def partial_sum(self, terms: int) -> Fraction:
        return sum(Fraction(1, self.base ** math.factorial(j)) for j in range(1, terms + 1))

    def enclosure(self, width) -> Interval:
        width = Fraction(width)
        J = 1
        # tail after J terms is below 2 * base^-(J+1)!
        while Fraction(2, self.base ** math.factorial(J + 1)) >= width:
            J += 1
        s = self.partial_sum(J)
        return s, s + Fraction(2, self.base ** math.factorial(J + 1))

    def spec(self) -> str:
        return f"liouville:{self.base}"


@dataclass(frozen=True)
class TargetPoint:
    coords: tuple[ScalarTarget, ...]

    @property
    def k(self) -> int:
        return len(self.coords)

    @property
    def is_rational(self) -> bool:
        return all(c.is_rational for c in self.coords)

    def box(self, width) -> tuple[Interval, ...]:
        return tuple(c.enclosure(width) for c in self.coords)

    def approx(self) -> tuple[float, ...]:
        return tuple(c.approx() for c in self.coords)

    def spec(self) -> str:
        return ";".join(c.spec() for c in self.coords)


# ------------------------------------------------------------------ parsing


def _poly_text(p: Sequence[Fraction]) -> str:
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mag = abs(c)
        coef = "" if (mag == 1 and i) else fmt_rational(mag).removesuffix("/1")
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        body = coef + ("*" if coef and mono else "") + mono
        parts.append(("-" if c < 0 else "+") + body)
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*(x(?:\^(\d+))?)?")


def parse_polynomial(text: str) -> tuple[Fraction, ...]:
    """Parse a univariate polynomial in x such as ``x^2-x-1`` or ``3x^3 - 1/2``."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    coeffs: dict[int, Fraction] = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or not (m.group(2) or m.group(3)):
            raise ValueError(f"cannot parse polynomial {text!r} at {s[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        deg = 0 if not m.group(3) else int(m.group(4) or 1)
        coeffs[deg] = coeffs.get(deg, Fraction(0)) + sign * c
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise ValueError(f"cannot parse polynomial {text!r}")
    top = max(coeffs)
    return upoly([coeffs.get(i, 0) for i in range(top + 1)])


def parse_scalar(text: str) -> ScalarTarget:
    """``1/3`` | ``phi`` | ``liouville:B`` | ``POLY,[lo,hi]``."""
    t = text.strip()
    if t == "phi":
        return AlgebraicTarget((Fraction(-1), Fraction(-1), Fraction(1)), Fraction(1), Fraction(2))
    if t.startswith("liouville"):
        _, _, base = t.partition(":")
        return LacunaryTarget(int(base) if base else 10)
    m = re.fullmatch(r"(.+),\s*\[\s*([^,\]]+)\s*,\s*([^\]]+)\]", t)
    if m:
        return AlgebraicTarget(parse_polynomial(m.group(1)), Fraction(m.group(2)), Fraction(m.group(3)))
    return RationalTarget(Fraction(t))


def parse_target(text: str) -> TargetPoint:
    """Scalar specs joined by ``;`` for multi-parameter charts."""
    return TargetPoint(tuple(parse_scalar(part) for part in text.split(";")))


def as_target(value) -> TargetPoint:
    if isinstance(value, TargetPoint):
        return value
    if isinstance(value, ScalarTarget):
        return TargetPoint((value,))
    if isinstance(value, str):
        return parse_target(value)
    if isinstance(value, (int, Fraction)):
        return TargetPoint((RationalTarget(value),))
    return TargetPoint(tuple(v if isinstance(v, ScalarTarget) else RationalTarget(v) for v in value))


def quadratic_targets(count: int, seed: int, lo=Fraction(-1), hi=Fraction(1)) -> list[TargetPoint]:
    """Seeded quadratic irrationals (m + sqrt(D)) / n strictly inside (lo, hi)."""
    rng = random.Random(seed)
    lo, hi = Fraction(lo), Fraction(hi)
    out: list[TargetPoint] = []
    while len(out) < count:
        D = rng.randint(2, 60)
        if math.isqrt(D) ** 2 == D:
            continue
        n = rng.randint(1, 12)
        m = rng.randint(-12, 12)
        r = math.isqrt(D)
        # sqrt(D) in (r, r + 1), so the root lies in ((m + r)/n, (m + r + 1)/n)
        a, b = Fraction(m + r, n), Fraction(m + r + 1, n)
        if a <= lo or b >= hi:
            continue
        poly = (Fraction(m * m - D), Fraction(-2 * m * n), Fraction(n * n))
        out.append(TargetPoint((AlgebraicTarget(poly, a, b),)))
    return out


# -------------------------------------------------------- continued fractions


def cf_quotients(x: Fraction, limit: int) -> list[int]:
    out = []
    while len(out) < limit:
        a = math.floor(x)
        out.append(a)
        if x == a:
            break
        x = 1 / (x - a)
    return out


def continued_fraction(target: ScalarTarget, q_max: int) -> tuple[list[int], bool]:
    """Partial quotients [a0; a1, ...] certified for the target.

    Expansion stops once a convergent denominator exceeds q_max and its
    partial quotient is known.  The flag says whether the expansion is
    complete, i.e. the target is rational and fully expanded.
    """
    width = Fraction(1, max(4, q_max) ** 2 * 2**16)
    while True:
        lo, hi = target.enclosure(width)
        if lo == hi:
            return cf_quotients(lo, 10**9), True
        a_lo, a_hi = cf_quotients(lo, 10**6), cf_quotients(hi, 10**6)
        common = []
        for x, y in zip(a_lo, a_hi):
            if x != y:
                break
            common.append(x)
        # the last shared quotient may belong to a shorter, terminated expansion
        if len(common) == len(a_lo) or len(common) == len(a_hi):
            common = common[:-1]
        q_prev, q = 0, 1
        for a in common[1:]:
            q_prev, q = q, a * q + q_prev
            if q > q_max:
                return common, False
        width = width * width


def convergents(quotients: Sequence[int]) -> list[tuple[int, int]]:
    p_prev, p = 1, quotients[0]
    q_prev, q = 0, 1
    out = [(p, q)]
    for a in quotients[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out


def isolating_root_count(poly: Sequence[Fraction], lo: Fraction, hi: Fraction) -> int:
    return count_roots(sturm_sequence(squarefree_part(upoly(poly))), lo, hi)
