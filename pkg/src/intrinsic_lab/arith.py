"""Exact arithmetic: reduced rational points, fraction-free linear algebra,
multi-index bookkeeping and integer roots.

Rationals are plain :class:`fractions.Fraction` values; everything here is
pure and never rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce as _fold
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Sequence

Matrix = Sequence[Sequence[Fraction | int]]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction.

    Floats are rejected: silently turning 0.1 into a 55-bit fraction is the
    kind of rounding this package exists to avoid.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def fmt_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, order=True)
class RationalPoint:
    """A point of Q^d as jointly primitive numerators over one denominator.

    Ordering is by (height, numerators), which is the canonical sort order
    for every dataset the package emits.
    """

    denominator: int
    numerators: tuple[int, ...]

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be positive")
        if math.gcd(self.denominator, *self.numerators) != 1:
            raise ValueError("numerators and denominator are not jointly primitive")

    @property
    def height(self) -> int:
        return self.denominator

    @property
    def dim(self) -> int:
        return len(self.numerators)

    def coords(self) -> tuple[Fraction, ...]:
        q = self.denominator
        return tuple(Fraction(p, q) for p in self.numerators)

    def __str__(self):
        inner = ", ".join(fmt_rational(c) for c in self.coords())
        return f"({inner}) h={self.height}"


def reduce(components: Iterable) -> RationalPoint:
    """Put a rational vector in jointly primitive form p/q."""
    comps = [as_fraction(c) for c in components]
    if not comps:
        raise ValueError("need at least one coordinate")
    q = _fold(math.lcm, (c.denominator for c in comps), 1)
    return RationalPoint(q, tuple(c.numerator * (q // c.denominator) for c in comps))


def binom(n: int, m: int) -> int:
    """The bracket [n, m] = C(n + m, m)."""
    if n < 0 or m < 0:
        raise ValueError("binom takes nonnegative arguments")
    return math.comb(n + m, m)


def iroot(a: int, n: int) -> int:
    """floor(a ** (1/n)) for a >= 0, exactly."""
    if a < 0 or n < 1:
        raise ValueError("iroot needs a >= 0 and n >= 1")
    if a < 2 or n == 1:
        return a
    if n == 2:
        return math.isqrt(a)
    x = 1 << ((a.bit_length() + n - 1) // n)
    while True:
        y = ((n - 1) * x + a // x ** (n - 1)) // n
        if y >= x:
            break
        x = y
    while x**n > a:
        x -= 1
    while (x + 1) ** n <= a:
        x += 1
    return x


def floor_rational_root(x: Fraction, n: int) -> int:
    """floor(x ** (1/n)) for rational x >= 0."""
    x = Fraction(x)
    return iroot(x.numerator // x.denominator, n)


def floor_scaled_power(kappa: Fraction, rho: Fraction, num: int, den: int) -> int:
    """floor(kappa * rho ** (-num/den)) for positive rationals, exactly.

    h <= kappa * rho^(-num/den)  iff  h^den <= kappa^den * rho^(-num).
    """
    kappa, rho = Fraction(kappa), Fraction(rho)
    if kappa <= 0:
        return 0
    return floor_rational_root(kappa**den / rho**num, den)


def power_bounds(base: Fraction | int, exponent: Fraction, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Rational enclosure [lo, hi] of base ** exponent for base > 0.

    The width is about 2^-bits relative; used where exponents like 5/6 make
    exact values irrational.
    """
    base, exponent = Fraction(base), Fraction(exponent)
    if base <= 0:
        raise ValueError("base must be positive")
    if exponent.denominator == 1:
        v = base**exponent.numerator
        return v, v
    a, b = exponent.numerator, exponent.denominator
    v = base**a
    # scale S = 2^shift so that floor(S * root) carries about `bits` bits
    magnitude = v.numerator.bit_length() - v.denominator.bit_length()
    shift = bits + max(0, -magnitude // b + 1) + 2
    scale = 1 << shift
    lo_int = floor_rational_root(v * scale**b, b)
    lo = Fraction(lo_int, scale)
    hi = Fraction(lo_int + 1, scale)
    return lo, hi


# --------------------------------------------------------------- linear algebra


def _integer_rows(matrix: Matrix) -> tuple[list[list[int]], int]:
    """Scale every row to integers; also return the product of the row scales."""
    rows = []
    scale = 1
    for row in matrix:
        fr = [Fraction(x) for x in row]
        m = _fold(math.lcm, (x.denominator for x in fr), 1)
        rows.append([int(x * m) for x in fr])
        scale *= m
    return rows, scale


def _bareiss(rows: list[list[int]]) -> tuple[int, int, list[list[int]]]:
    """Fraction-free row echelon form, in place.

    Pivot is the first nonzero entry in the column below the current row.
    Returns (rank, sign of the row permutation, echelon rows).
    """
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    prev = 1
    r = 0
    sign = 1
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        p = rows[r][c]
        pr = rows[r]
        for i in range(r + 1, n_rows):
            ri = rows[i]
            f = ri[c]
            for j in range(c + 1, n_cols):
                ri[j] = (p * ri[j] - f * pr[j]) // prev
            ri[c] = 0
        prev = p
        r += 1
    return r, sign, rows


def exact_rank(matrix: Matrix) -> int:
    """Rank over Q, by fraction-free elimination."""
    if not matrix or not len(matrix[0]):
        raise ValueError("matrix must be nonempty")
    rows, _ = _integer_rows(matrix)
    rank, _, _ = _bareiss(rows)
    return rank


def exact_det(matrix: Matrix) -> Fraction:
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return Fraction(1)
    rows, scale = _integer_rows(matrix)
    rank, sign, ech = _bareiss(rows)
    if rank < n:
        return Fraction(0)
    # after full Bareiss the last pivot is the determinant
    return Fraction(sign * ech[n - 1][n - 1], scale)


def transpose(matrix: Matrix) -> list[list]:
    return [list(col) for col in zip(*matrix)]


def integer_kernel(matrix: Matrix) -> list[tuple[int, ...]]:
    """Basis of the right null space, each vector scaled to primitive integers.

    The basis is the standard one read off the reduced row echelon form: one
    vector per free column, in column order, so the output is deterministic.
    """
    rows = [[Fraction(x) for x in row] for row in matrix]
    n_cols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    basis = []
    for free in (c for c in range(n_cols) if c not in pivots):
        v = [Fraction(0)] * n_cols
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][free]
        basis.append(primitive_integer_vector(v))
    return basis


def primitive_integer_vector(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to coprime integers, first nonzero entry positive."""
    v = [Fraction(x) for x in v]
    m = _fold(math.lcm, (x.denominator for x in v), 1)
    ints = [int(x * m) for x in v]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


# ----------------------------------------------------------------- multi-indices


def multi_indices_of_degree(k: int, j: int) -> list[tuple[int, ...]]:
    """All exponent vectors of length k summing to j, lexicographically descending.

    For k = 2, j = 2 this gives (2,0), (1,1), (0,2), i.e. t1^2, t1 t2, t2^2.
    """
    if j == 0:
        return [(0,) * k]
    out = []
    for combo in combinations_with_replacement(range(k), j):
        e = [0] * k
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def graded_multi_indices(k: int, max_degree: int, min_degree: int = 1) -> Iterator[tuple[int, ...]]:
    """Multi-indices with min_degree <= |alpha| <= max_degree in graded order."""
    for j in range(min_degree, max_degree + 1):
        yield from multi_indices_of_degree(k, j)


def count_multi_indices(k: int, j: int) -> int:
    """Number of alpha in N_0^k with |alpha| = j, i.e. [k - 1, j]."""
    return binom(k - 1, j)


# ------------------------------------------------------------ Farey sequences


def farey_floor(x, Q: int) -> tuple[int, int]:
    """Largest p/q <= x with 1 <= q <= Q, as (p, q) in lowest terms.

    Stern-Brocot descent with batched steps, so O(log Q) iterations.
    """
    x = Fraction(x)
    lp, lq = math.floor(x), 1
    if x == lp:
        return lp, 1
    up, uq = lp + 1, 1
    while True:
        moved = False
        # push the lower end right: (lp + t*up)/(lq + t*uq) <= x
        num = x * lq - lp
        den = up - x * uq
        t = min(math.floor(num / den), (Q - lq) // uq)
        if t > 0:
            lp, lq = lp + t * up, lq + t * uq
            moved = True
            if x * lq == lp:
                return lp, lq
        # push the upper end left while staying strictly above x
        num = up - x * uq
        den = x * lq - lp
        s = min(math.ceil(num / den) - 1, (Q - uq) // lq)
        if s > 0:
            up, uq = up + s * lp, uq + s * lq
            moved = True
        if not moved:
            return lp, lq


def farey_successor(a: int, b: int, Q: int) -> tuple[int, int]:
    """The term after a/b in the Farey sequence of order Q."""
    # solve b*c - a*d = 1 and take the largest d <= Q
    g, s, t = _ext_gcd(b, -a)
    if g < 0:
        g, s, t = -g, -s, -t
    c0, d0 = s, t
    m = (Q - d0) // b
    return c0 + m * a, d0 + m * b


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    return old_r, old_s, old_t


def farey_range(lo, hi, Q: int) -> Iterator[tuple[int, int]]:
    """All reduced p/q in [lo, hi] with q <= Q, increasing; output-sensitive."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi or Q < 1:
        return
    a, b = farey_floor(lo, Q)
    if Fraction(a, b) < lo:
        a, b = farey_successor(a, b, Q)
    if Fraction(a, b) > hi:
        return
    yield a, b
    c, d = farey_successor(a, b, Q)
    while c * hi.denominator <= hi.numerator * d:
        yield c, d
        kk = (Q + b) // d
        a, b, c, d = c, d, kk * c - a, kk * d - b
