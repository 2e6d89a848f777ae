"""Polynomials with rational coefficients.

Univariate polynomials are coefficient tuples, lowest degree first, and get
Sturm-sequence root isolation.  Multivariate ones (:class:`MPoly`) are sparse
maps from exponent vectors to coefficients; :class:`RatFunc` is a quotient of
two of them.  Both evaluate exactly at rational points and soundly on boxes
through rational interval arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce as _fold
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import IdenticallyZero, PoleHit

Interval = tuple[Fraction, Fraction]

# ------------------------------------------------------------------ univariate


def upoly(coeffs: Iterable) -> tuple[Fraction, ...]:
    """Normalize coefficients (low degree first) and strip trailing zeros."""
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def upoly_from_roots(roots: Iterable) -> tuple[Fraction, ...]:
    p: tuple[Fraction, ...] = (Fraction(1),)
    for r in roots:
        p = umul(p, (-Fraction(r), Fraction(1)))
    return p


def ueval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def uderiv(p: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return upoly(i * c for i, c in enumerate(p) if i)


def umul(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return upoly(out)


def udivmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    b = upoly(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(upoly(a))
    quot = [Fraction(0)] * max(len(rem) - len(b) + 1, 0)
    lead = b[-1]
    while len(rem) >= len(b):
        shift = len(rem) - len(b)
        f = rem[-1] / lead
        quot[shift] = f
        for i, c in enumerate(b):
            rem[shift + i] -= f * c
        rem = list(upoly(rem))
    return upoly(quot), upoly(rem)


def ugcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    a, b = upoly(a), upoly(b)
    while b:
        a, b = b, udivmod(a, b)[1]
    if not a:
        return ()
    return tuple(c / a[-1] for c in a)


def squarefree_part(p: Sequence[Fraction]) -> tuple[Fraction, ...]:
    p = upoly(p)
    g = ugcd(p, uderiv(p))
    if len(g) <= 1:
        return p
    return udivmod(p, g)[0]


def sturm_sequence(p: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
    seq = [upoly(p), uderiv(p)]
    while seq[-1]:
        r = udivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(tuple(-c for c in r))
    return [s for s in seq if s]


def _variations(seq, x: Fraction) -> int:
    signs = [v for v in (ueval(s, x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(seq, a: Fraction, b: Fraction) -> int:
    """Distinct roots in the half-open interval (a, b] of a squarefree polynomial."""
    return _variations(seq, a) - _variations(seq, b)


class RootInterval(NamedTuple):
    """A root in the open interval (lo, hi), or exactly lo when lo == hi."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def _split_point(p, lo: Fraction, hi: Fraction) -> Fraction:
    """A point strictly inside (lo, hi) that is not a root of p."""
    w = hi - lo
    m = lo + w / 2
    i = 3
    while ueval(p, m) == 0:
        m = lo + w / 2 + w / 2**i
        i += 1
    return m


def isolate_roots(poly: Sequence, a, b) -> list[RootInterval]:
    """Isolating intervals for every real root of poly in the closed [a, b].

    Returned intervals are pairwise disjoint, sorted, and each contains
    exactly one root; see :class:`RootInterval` for the open/exact convention.
    """
    p = upoly(poly)
    if not p:
        raise IdenticallyZero("cannot isolate the roots of the zero polynomial")
    a, b = Fraction(a), Fraction(b)
    if a > b:
        raise ValueError("empty interval")
    p = squarefree_part(p)
    if len(p) == 1:
        return []
    seq = sturm_sequence(p)
    out: list[RootInterval] = []
    if ueval(p, a) == 0:
        out.append(RootInterval(a, a))
    if a == b:
        return out
    at_b = ueval(p, b) == 0
    inner = count_roots(seq, a, b) - (1 if at_b else 0)

    # stack of (lo, hi, n): n roots in the open (lo, hi); endpoints are non-roots
    # except possibly a itself, which count_roots already excludes
    stack = [(a, b, inner)]
    found = []
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            found.append(RootInterval(lo, hi))
            continue
        m = _split_point(p, lo, hi)
        left = count_roots(seq, lo, m)
        stack.append((m, hi, n - left))
        stack.append((lo, m, left))
    out.extend(sorted(found))
    if at_b:
        out.append(RootInterval(b, b))
    return out


def refine_root(poly: Sequence, iv: RootInterval, width) -> RootInterval:
    """Bisect an isolating interval until it is narrower than width."""
    if iv.exact:
        return iv
    p = squarefree_part(upoly(poly))
    seq = sturm_sequence(p)
    lo, hi = iv
    width = Fraction(width)
    while hi - lo >= width:
        m = (lo + hi) / 2
        if ueval(p, m) == 0:
            return RootInterval(m, m)
        if count_roots(seq, lo, m) == 1:
            hi = m
        else:
            lo = m
    return RootInterval(lo, hi)


def ueval_interval(p: Sequence[Fraction], iv: Interval) -> Interval:
    """Sound enclosure of p over [lo, hi] by interval Horner evaluation."""
    acc = (Fraction(0), Fraction(0))
    for c in reversed(p):
        acc = imul(acc, iv)
        acc = (acc[0] + c, acc[1] + c)
    return acc


def usup_abs_bounds(p: Sequence[Fraction], lo, hi, width=Fraction(1, 2**40)) -> Interval:
    """Enclosure of max |p| over [lo, hi].

    The maximum sits at an endpoint or a critical point; critical points are
    isolated exactly and their values enclosed after refinement.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    p = upoly(p)
    if not p:
        return Fraction(0), Fraction(0)
    best_lo = max(abs(ueval(p, lo)), abs(ueval(p, hi)))
    best_hi = best_lo
    dp = uderiv(p)
    if dp:
        for iv in isolate_roots(dp, lo, hi):
            iv = refine_root(dp, iv, width)
            if iv.exact:
                v = abs(ueval(p, iv.lo))
                best_lo = max(best_lo, v)
                best_hi = max(best_hi, v)
                continue
            e = ueval_interval(p, (iv.lo, iv.hi))
            mag_hi = max(abs(e[0]), abs(e[1]))
            mag_lo = Fraction(0) if e[0] <= 0 <= e[1] else min(abs(e[0]), abs(e[1]))
            best_lo = max(best_lo, mag_lo)
            best_hi = max(best_hi, mag_hi)
    return best_lo, best_hi


# ----------------------------------------------------------- interval helpers


def iadd(a: Interval, b: Interval) -> Interval:
    return a[0] + b[0], a[1] + b[1]


def imul(a: Interval, b: Interval) -> Interval:
    prods = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(prods), max(prods)


def ipow(a: Interval, n: int) -> Interval:
    if n == 0:
        return Fraction(1), Fraction(1)
    lo, hi = a
    if n % 2 == 1 or lo >= 0:
        return lo**n, hi**n
    if hi <= 0:
        return hi**n, lo**n
    return Fraction(0), max(lo**n, hi**n)


def idiv(a: Interval, b: Interval) -> Interval:
    if b[0] <= 0 <= b[1]:
        raise PoleHit("denominator interval contains zero")
    return imul(a, (1 / b[1], 1 / b[0]))


# --------------------------------------------------------------- multivariate

Exps = tuple[int, ...]


def power_table(nums: Sequence[int], q: int, deg: int) -> tuple[list[list[int]], list[int]]:
    """Powers 0..deg of every numerator and of q."""
    out = []
    for x in list(nums) + [q]:
        row = [1]
        for _ in range(deg):
            row.append(row[-1] * x)
        out.append(row)
    return out[:-1], out[-1]


@dataclass(frozen=True)
class MPoly:
    """Sparse polynomial in ``nvars`` variables with Fraction coefficients."""

    nvars: int
    terms: tuple[tuple[Exps, Fraction], ...]

    @classmethod
    def from_dict(cls, nvars: int, terms: Mapping[Exps, object]) -> "MPoly":
        clean = {}
        for e, c in terms.items():
            c = Fraction(c)
            if c != 0:
                if len(e) != nvars:
                    raise ValueError("exponent length does not match nvars")
                clean[tuple(e)] = clean.get(tuple(e), Fraction(0)) + c
        return cls(nvars, tuple(sorted((e, c) for e, c in clean.items() if c != 0)))

    @classmethod
    def const(cls, nvars: int, c) -> "MPoly":
        return cls.from_dict(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls.from_dict(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Exps, c=1) -> "MPoly":
        return cls.from_dict(len(exps), {tuple(exps): c})

    @classmethod
    def from_univariate(cls, coeffs: Sequence) -> "MPoly":
        return cls.from_dict(1, {(i,): c for i, c in enumerate(coeffs)})

    def as_dict(self) -> dict[Exps, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def _lift(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            return other
        return MPoly.const(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        d = self.as_dict()
        for e, c in other.terms:
            d[e] = d.get(e, Fraction(0)) + c
        return MPoly.from_dict(self.nvars, d)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        d: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, Fraction(0)) + c1 * c2
        return MPoly.from_dict(self.nvars, d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = MPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def diff(self, i: int) -> "MPoly":
        d = {}
        for e, c in self.terms:
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                d[tuple(ne)] = c * e[i]
        return MPoly.from_dict(self.nvars, d)

    def partial(self, alpha: Exps) -> "MPoly":
        out = self
        for i, a in enumerate(alpha):
            for _ in range(a):
                out = out.diff(i)
        return out

    @cached_property
    def _integer_form(self) -> tuple[int, int, tuple]:
        """(L, D, terms) with L*f = sum c_e t^e, integer c_e, D the total degree."""
        lcm = math.lcm(*(c.denominator for _, c in self.terms)) if self.terms else 1
        deg = max((sum(e) for e, _ in self.terms), default=0)
        ints = tuple((e, c.numerator * (lcm // c.denominator), deg - sum(e)) for e, c in self.terms)
        return lcm, deg, ints

    def __call__(self, point: Sequence) -> Fraction:
        pt = [Fraction(x) for x in point]
        q = math.lcm(*(x.denominator for x in pt)) if pt else 1
        num, den = self.eval_pair([x.numerator * (q // x.denominator) for x in pt], q)
        return Fraction(num, den)

    def eval_pair(self, nums: Sequence[int], q: int, powers=None) -> tuple[int, int]:
        """f(nums / q) as an unreduced integer pair (numerator, positive denominator).

        ``powers`` is an optional :func:`power_table` of degree >= this
        polynomial's, shared when many polynomials are evaluated at one point.
        """
        lcm, deg, ints = self._integer_form
        xpow, qpow = powers if powers is not None else power_table(nums, q, deg)
        acc = 0
        for e, c, rest in ints:
            term = c * qpow[rest]
            for i, a in enumerate(e):
                if a:
                    term *= xpow[i][a]
            acc += term
        return acc, lcm * qpow[deg]

    def eval_interval(self, box: Sequence[Interval]) -> Interval:
        lo = hi = Fraction(0)
        for e, c in self.terms:
            iv = (c, c)
            for b, a in zip(box, e):
                if a:
                    iv = imul(iv, ipow(b, a))
            lo += iv[0]
            hi += iv[1]
        return lo, hi

    def substitute(self, polys: Sequence["MPoly"]) -> "MPoly":
        """Compose: replace variable i by polys[i] (all in a common ring)."""
        if len(polys) != self.nvars:
            raise ValueError("need one polynomial per variable")
        n = polys[0].nvars
        out = MPoly.const(n, 0)
        for e, c in self.terms:
            term = MPoly.const(n, c)
            for p, a in zip(polys, e):
                if a:
                    term = term * p**a
            out = out + term
        return out

    def to_univariate(self) -> tuple[Fraction, ...]:
        if self.nvars != 1:
            raise ValueError("not a univariate polynomial")
        deg = max(0, self.degree)
        c = [Fraction(0)] * (deg + 1)
        for e, v in self.terms:
            c[e[0]] = v
        return upoly(c)

    def coefficient_lcm(self) -> int:
        return _fold(math.lcm, (c.denominator for _, c in self.terms), 1)

    def __str__(self):
        if not self.terms:
            return "0"
        names = [f"t{i + 1}" for i in range(self.nvars)] if self.nvars > 1 else ["t"]
        parts = []
        for e, c in sorted(self.terms, key=lambda ec: (-sum(ec[0]), tuple(-x for x in ec[0]))):
            mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a)
            coef = str(c)
            parts.append(coef if not mono else (mono if c == 1 else f"{coef}*{mono}"))
        return " + ".join(parts)


@dataclass(frozen=True)
class RatFunc:
    """num / den; den is never the zero polynomial."""

    num: MPoly
    den: MPoly

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")

    @classmethod
    def poly(cls, p: MPoly) -> "RatFunc":
        return cls(p, MPoly.const(p.nvars, 1))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @cached_property
    def _unit_den(self) -> bool:
        return self.den == MPoly.const(self.nvars, 1)

    def __call__(self, point: Sequence) -> Fraction:
        d = self.den(point)
        if d == 0:
            raise PoleHit(f"denominator vanishes at {tuple(map(str, point))}")
        return self.num(point) / d

    def eval_pair(self, nums: Sequence[int], q: int, powers=None) -> tuple[int, int]:
        """Like :meth:`MPoly.eval_pair`; the denominator may be negative, never zero.

        Also accepts integer arrays for ``nums`` and ``q`` (one point per entry).
        """
        a, b = self.num.eval_pair(nums, q, powers)
        if self._unit_den:
            return a, b
        c, d = self.den.eval_pair(nums, q, powers)
        if any(c == 0) if hasattr(c, "__len__") else c == 0:
            raise PoleHit("denominator vanishes at a requested parameter")
        return a * d, b * c

    def diff(self, i: int) -> "RatFunc":
        if self.is_polynomial:
            c = self.den.terms[0][1]
            return RatFunc(self.num.diff(i) * (1 / c), MPoly.const(self.nvars, 1))
        num = self.num.diff(i) * self.den - self.num * self.den.diff(i)
        return RatFunc(num, self.den * self.den)

    def partial(self, alpha: Exps) -> "RatFunc":
        out = self
        for i, a in enumerate(alpha):
            for _ in range(a):
                out = out.diff(i)
        return out

    def eval_interval(self, box: Sequence[Interval]) -> Interval:
        return idiv(self.num.eval_interval(box), self.den.eval_interval(box))

    def __str__(self):
        if self.is_polynomial:
            return str(self.num * (1 / self.den.terms[0][1]))
        return f"({self.num})/({self.den})"
