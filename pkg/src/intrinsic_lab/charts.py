"""Parametrized manifold pieces and their intrinsic rational points.

A :class:`Chart` maps a box of parameters t in Q^k into R^d by polynomial or
rational coordinate functions.  It also carries integer implicit equations
for the image (used as an independent membership test) and a rule Q(T) saying
how large a parameter denominator has to be swept so that every image point
of height <= T is reached.

Registry specifiers: ``veronese:k,n``, ``cn:n``, ``sphere:d``, ``identity:d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .arith import (
    RationalPoint,
    farey_range,
    as_fraction,
    binom,
    exact_rank,
    graded_multi_indices,
    iroot,
    reduce,
)
from .errors import BudgetExceeded, OutsideDomain, PoleHit, UnknownChart
from .polys import Interval, MPoly, RatFunc, power_table

DEFAULT_BUDGET = 20_000_000

Box = tuple[Interval, ...]


def make_box(bounds: Iterable, dim: int | None = None) -> Box:
    """Build a box from (lo, hi) pairs; a single pair is repeated dim times."""
    bounds = list(bounds)
    if bounds and not isinstance(bounds[0], (tuple, list)):
        bounds = [tuple(bounds)]
    if dim is not None and len(bounds) == 1 and dim > 1:
        bounds = bounds * dim
    box = tuple((as_fraction(lo), as_fraction(hi)) for lo, hi in bounds)
    if dim is not None and len(box) != dim:
        raise ValueError(f"box has {len(box)} sides, expected {dim}")
    return box


def unit_box(dim: int) -> Box:
    return tuple((Fraction(-1), Fraction(1)) for _ in range(dim))


def in_box(x: Sequence[Fraction], box: Box) -> bool:
    return all(lo <= xi <= hi for xi, (lo, hi) in zip(x, box))


@dataclass(frozen=True)
class HeightRule:
    """Parameter denominator bound Q(T) for ambient height bound T.

    ``root``: floor(T^(1/factor)); ``linear``: factor*T; ``sqrt``: floor(sqrt(factor*T)).
    """

    kind: str
    factor: int

    def __call__(self, T: int) -> int:
        T = int(T)
        if T < 1:
            return 0
        if self.kind == "root":
            return iroot(T, self.factor)
        if self.kind == "linear":
            return self.factor * T
        if self.kind == "sqrt":
            return math.isqrt(self.factor * T)
        raise ValueError(f"unknown height rule {self.kind!r}")


@dataclass(frozen=True)
class NondegeneracyOrder:
    """Least j with full-rank tangent space of order j, or None if not reached."""

    order: int | None
    ranks: tuple[int, ...]

    @property
    def reached(self) -> bool:
        return self.order is not None

    @property
    def terminal_rank(self) -> int:
        return self.ranks[-1] if self.ranks else 0


class _IntegerForm:
    """One coordinate A/B rewritten at t = p/q as integer N(p, q) / D(p, q)."""

    def __init__(self, f: RatFunc):
        scale = math.lcm(f.num.coefficient_lcm(), f.den.coefficient_lcm())
        a, b = f.num.degree, f.den.degree
        a, b = max(a, 0), max(b, 0)
        top = max(a, b)
        # A(p/q) * q^top and B(p/q) * q^top are both integral after scaling
        self.num = self._terms(f.num, scale, top)
        self.den = self._terms(f.den, scale, top)

    @staticmethod
    def _terms(p: MPoly, scale: int, top: int):
        return [(int(c * scale), e, top - sum(e)) for e, c in p.terms]

    @staticmethod
    def _bound(terms, magnitude: int) -> int:
        return sum(abs(c) for c, _, _ in terms) * magnitude ** max((sum(e) + qe for _, e, qe in terms), default=0)

    def bounds(self, magnitude: int) -> tuple[int, int]:
        return self._bound(self.num, magnitude), self._bound(self.den, magnitude)

    @staticmethod
    def _eval(terms, P, qv, dtype):
        out = np.zeros(P.shape[0], dtype=dtype)
        for c, e, qe in terms:
            v = c * qv**qe if qe else np.full(P.shape[0], c, dtype=dtype)
            for i, a in enumerate(e):
                if a:
                    v = v * P[:, i] ** a
            out = out + v
        return out

    def evaluate(self, P, q, dtype):
        return self._eval(self.num, P, q, dtype), self._eval(self.den, P, q, dtype)


@dataclass(frozen=True, eq=False)
class Chart:
    spec: str
    k: int
    d: int
    coords: tuple[RatFunc, ...]
    domain: Box
    implicit_eqs: tuple[MPoly, ...]
    param_height_bound: HeightRule
    inverse: tuple[RatFunc, ...] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.coords) != self.d:
            raise ValueError("need d coordinate functions")
        if len(self.domain) != self.k:
            raise ValueError("domain box must have k sides")

    # ---------------------------------------------------------------- basics

    def with_domain(self, domain) -> "Chart":
        box = make_box(domain, self.k)
        return Chart(self.spec, self.k, self.d, self.coords, box, self.implicit_eqs,
                     self.param_height_bound, self.inverse)

    @property
    def is_polynomial(self) -> bool:
        return all(f.is_polynomial for f in self.coords)

    @property
    def degree(self) -> int:
        """Maximal total degree of the coordinate numerators (polynomial charts)."""
        return max(f.num.degree for f in self.coords)

    def in_domain(self, t: Sequence[Fraction]) -> bool:
        return len(t) == self.k and in_box(t, self.domain)

    @cached_property
    def _eval_degree(self) -> int:
        return max(max(f.num.degree, f.den.degree) for f in self.coords)

    def evaluate(self, t: Sequence) -> RationalPoint:
        t = tuple(as_fraction(x) for x in t)
        if not self.in_domain(t):
            raise OutsideDomain(f"parameter {tuple(map(str, t))} is outside {self.spec} domain")
        q = math.lcm(*(x.denominator for x in t))
        nums = [x.numerator * (q // x.denominator) for x in t]
        powers = power_table(nums, q, self._eval_degree)
        pairs = []
        for f in self.coords:
            a, b = f.eval_pair(nums, q, powers)
            g = math.gcd(a, b)
            if b < 0:
                g = -g
            pairs.append((a // g, b // g))
        den = math.lcm(*(b for _, b in pairs))
        return RationalPoint(den, tuple(a * (den // b) for a, b in pairs))

    def evaluate_many(self, params: Sequence[Sequence]) -> list[RationalPoint]:
        """:meth:`evaluate` over many parameters, column-wise on exact integer arrays."""
        params = [tuple(as_fraction(x) for x in t) for t in params]
        if not params:
            return []
        if any(len(t) != self.k for t in params):
            raise OutsideDomain(f"{self.spec} takes {self.k} parameters")
        q = np.array([math.lcm(*(x.denominator for x in t)) for t in params], dtype=object)
        cols = [np.array([t[i].numerator * (qq // t[i].denominator) for t, qq in zip(params, q)], dtype=object)
                for i in range(self.k)]
        inside = np.ones(len(params), dtype=bool)
        for col, (lo, hi) in zip(cols, self.domain):
            inside &= (lo.numerator * q <= col * lo.denominator) & (col * hi.denominator <= hi.numerator * q)
        if not inside.all():
            t = params[int(np.argmin(inside))]
            raise OutsideDomain(f"parameter {tuple(map(str, t))} is outside {self.spec} domain")
        xpow, qpow = power_table(cols, q, self._eval_degree)
        nums, dens = [], []
        for f in self.coords:
            a, b = f.eval_pair(cols, q, (xpow, qpow))
            g = np.gcd(a, b)
            g = np.where(b < 0, -g, g)
            nums.append(a // g)
            dens.append(b // g)
        den = dens[0]
        for b in dens[1:]:
            den = np.lcm(den, b)
        scaled = [a * (den // b) for a, b in zip(nums, dens)]
        return [RationalPoint(int(h), tuple(int(c[j]) for c in scaled)) for j, h in enumerate(den)]

    def image_float(self, t: Sequence[float]) -> np.ndarray:
        return np.array([float(f([Fraction(x) for x in t])) for f in self.coords])

    def image_interval(self, box: Box) -> Box:
        return tuple(f.eval_interval(box) for f in self.coords)

    def preimage(self, point: RationalPoint | Sequence[Fraction]) -> tuple[Fraction, ...] | None:
        """Parameter of an image point, via the inverse map; None if unavailable."""
        if self.inverse is None:
            return None
        x = point.coords() if isinstance(point, RationalPoint) else tuple(point)
        try:
            return tuple(g(x) for g in self.inverse)
        except PoleHit:
            return None

    def satisfies_equations(self, point: RationalPoint) -> bool:
        x = point.coords()
        return all(eq(x) == 0 for eq in self.implicit_eqs)

    # ----------------------------------------------------------- derivatives

    def partial(self, alpha: Sequence[int]) -> tuple[RatFunc, ...]:
        alpha = tuple(alpha)
        key = ("partial", alpha)
        if key not in self._cache:
            self._cache[key] = tuple(f.partial(alpha) for f in self.coords)
        return self._cache[key]

    def derivative_at(self, alpha: Sequence[int], t: Sequence) -> tuple[Fraction, ...]:
        t = tuple(as_fraction(x) for x in t)
        return tuple(f(t) for f in self.partial(alpha))

    def tangent_vectors(self, t: Sequence, j: int) -> list[tuple[Fraction, ...]]:
        """All derivative vectors with 0 < |alpha| <= j, graded order."""
        return [self.derivative_at(a, t) for a in graded_multi_indices(self.k, j)]

    def nondegeneracy_order(self, t: Sequence, j_max: int) -> NondegeneracyOrder:
        t = tuple(as_fraction(x) for x in t)
        if not self.in_domain(t):
            raise OutsideDomain(f"parameter {tuple(map(str, t))} is outside {self.spec} domain")
        ranks = []
        rows: list[tuple[Fraction, ...]] = []
        for j in range(1, j_max + 1):
            rows.extend(self.derivative_at(a, t) for a in graded_multi_indices(self.k, j, min_degree=j))
            r = exact_rank(rows)
            ranks.append(r)
            if r == self.d:
                return NondegeneracyOrder(j, tuple(ranks))
        return NondegeneracyOrder(None, tuple(ranks))

    # ------------------------------------------------------------ enumeration

    def _integer_forms(self) -> list[_IntegerForm]:
        if "iforms" not in self._cache:
            self._cache["iforms"] = [_IntegerForm(f) for f in self.coords]
        return self._cache["iforms"]

    def integer_image(self, P: np.ndarray, qv: np.ndarray, magnitude: int):
        """Reduced images of parameters P[i]/qv[i] as (numerators n x d, denominators n).

        ``magnitude`` bounds every |p| and q; int64 is used only when all
        intermediate products provably fit.
        """
        forms = self._integer_forms()
        bnum = max(f.bounds(magnitude)[0] for f in forms)
        bden = 1
        for f in forms:
            bden *= max(1, f.bounds(magnitude)[1])
        dtype = np.int64 if bnum * bden * 4 < 2**62 else object
        P = P.astype(dtype)
        qv = qv.astype(dtype)
        nums, dens = [], []
        for f in forms:
            N, D = f.evaluate(P, qv, dtype)
            if np.any(D == 0):
                raise PoleHit(f"{self.spec}: coordinate denominator vanishes on the sweep")
            sgn = np.where(D < 0, -1, 1).astype(dtype)
            N, D = N * sgn, D * sgn
            g = np.gcd(N, D)
            nums.append(N // g)
            dens.append(D // g)
        L = dens[0]
        for D in dens[1:]:
            L = np.lcm(L, D)
        numer = np.stack([N * (L // D) for N, D in zip(nums, dens)], axis=1)
        return numer, L


FAREY_MIN_Q = 100_000


def _small(*values: int) -> bool:
    return all(abs(v) < 2**62 for v in values)


def _candidates_1d(q_max: int, lo: Fraction, hi: Fraction, budget: int):
    """(numerators, denominators) of every reduced p/q in [lo, hi], q <= q_max."""
    if q_max >= FAREY_MIN_Q:
        # distinct fractions of denominator <= Q are 1/Q^2 apart
        needed = int((hi - lo) * q_max * q_max) + 1
        if needed > budget:
            raise BudgetExceeded(needed, budget)
        pairs = list(farey_range(lo, hi, q_max))
        dtype = np.int64 if _small(q_max, *(p for p, _ in pairs[:1] + pairs[-1:])) else object
        P = np.array([p for p, _ in pairs], dtype=dtype).reshape(-1, 1)
        Q = np.array([q for _, q in pairs], dtype=dtype)
        return P, Q
    dtype = np.int64 if _small(lo.numerator * q_max, hi.numerator * q_max) else object
    qs = np.arange(1, q_max + 1, dtype=np.int64).astype(dtype)
    a = -((-lo.numerator * qs) // lo.denominator)
    b = (hi.numerator * qs) // hi.denominator
    counts = np.maximum(b - a + 1, 0).astype(np.int64)
    total = int(counts.sum())
    if total > budget:
        raise BudgetExceeded(total, budget)
    starts = np.repeat(a, counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    P = (starts + offsets.astype(dtype)).reshape(-1, 1)
    Q = np.repeat(qs, counts)
    keep = np.gcd(P[:, 0], Q) == 1
    return P[keep], Q[keep]


def _candidates(q_max: int, pbox: Box, budget: int):
    if len(pbox) == 1:
        return _candidates_1d(q_max, pbox[0][0], pbox[0][1], budget)
    needed = 0
    for q in range(1, q_max + 1):
        n = 1
        for lo, hi in pbox:
            n *= max(0, math.floor(hi * q) - math.ceil(lo * q) + 1)
        needed += n
    if needed > budget:
        raise BudgetExceeded(needed, budget)
    big = not _small(q_max, *(max(abs(lo.numerator), abs(hi.numerator)) * q_max for lo, hi in pbox))
    dtype = object if big else np.int64
    Ps, Qs = [], []
    for q in range(1, q_max + 1):
        ranges = []
        for lo, hi in pbox:
            a, b = math.ceil(lo * q), math.floor(hi * q)
            if a > b:
                break
            ranges.append(np.arange(a, b + 1, dtype=np.int64).astype(dtype))
        else:
            P = np.stack([m.ravel() for m in np.meshgrid(*ranges, indexing="ij")], axis=1)
            g = np.full(P.shape[0], q, dtype=np.int64).astype(dtype)
            for i in range(P.shape[1]):
                g = np.gcd(g, P[:, i])
            P = P[g == 1]
            Ps.append(P)
            Qs.append(np.full(P.shape[0], q, dtype=np.int64).astype(dtype))
    if not Ps:
        return np.zeros((0, len(pbox)), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(Ps), np.concatenate(Qs)


def _box_mask(nums, dens, box: Box):
    mask = np.ones(len(dens), dtype=bool)
    if nums.dtype != object and not _small(*(v for lo, hi in box for v in
                                            (lo.numerator, lo.denominator, hi.numerator, hi.denominator))):
        nums, dens = nums.astype(object), dens.astype(object)
    for i, (lo, hi) in enumerate(box):
        col = nums[:, i]
        mask &= (lo.numerator * dens <= lo.denominator * col) & (lo.denominator * col <= hi.numerator * dens)
    return mask


@dataclass
class Enumeration:
    """Intrinsic rationals as parallel integer arrays, sorted by (height, numerators).

    Parameters are stored as numerators over a common parameter denominator.
    """

    chart: Chart
    T: int
    param_nums: np.ndarray
    param_dens: np.ndarray
    nums: np.ndarray
    dens: np.ndarray

    def __len__(self):
        return len(self.dens)

    def points(self) -> list[RationalPoint]:
        return [RationalPoint(int(q), tuple(int(x) for x in row)) for row, q in zip(self.nums, self.dens)]

    def params(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(int(p), int(q)) for p in row) for row, q in zip(self.param_nums, self.param_dens)]

    def pairs(self) -> list[tuple[RationalPoint, tuple[Fraction, ...]]]:
        return list(zip(self.points(), self.params()))

    def float_points(self) -> np.ndarray:
        return self.nums.astype(float) / self.dens.astype(float)[:, None]

    def float_params(self) -> np.ndarray:
        return self.param_nums.astype(float) / self.param_dens.astype(float)[:, None]


def sweep(chart: Chart, T: int, box: Box | None = None, param_box: Box | None = None,
          budget: int = DEFAULT_BUDGET) -> Enumeration:
    """Sweep parameters p/q with q <= Q(T) and keep images of height <= T in box."""
    T = int(T)
    if T < 1:
        raise ValueError("height bound T must be >= 1")
    pbox = chart.domain if param_box is None else _intersect(chart.domain, make_box(param_box, chart.k))
    k, d = chart.k, chart.d
    empty = Enumeration(chart, T, np.zeros((0, k), dtype=np.int64), np.zeros(0, dtype=np.int64),
                        np.zeros((0, d), dtype=np.int64), np.zeros(0, dtype=np.int64))
    if pbox is None:
        return empty
    box = make_box(box, d) if box is not None else None
    q_max = chart.param_height_bound(T)
    P, Qv = _candidates(q_max, pbox, budget)
    if not len(Qv):
        return empty
    reach = max(1, max(max(abs(lo), abs(hi)) for lo, hi in pbox))
    magnitude = max(1, q_max) * math.ceil(reach)
    chunks = []
    step = 200_000
    for i in range(0, len(Qv), step):
        Pc, Qc = P[i:i + step], Qv[i:i + step]
        numer, L = chart.integer_image(Pc, Qc, magnitude)
        keep = L <= T
        if box is not None:
            keep &= _box_mask(numer, L, box)
        keep = keep.astype(bool)
        if np.any(keep):
            chunks.append((Pc[keep], Qc[keep], numer[keep], L[keep]))
    if not chunks:
        return empty
    obj = any(c[2].dtype == object for c in chunks)
    cast = (lambda a: a.astype(object)) if obj else (lambda a: a)
    Pn = np.concatenate([c[0] for c in chunks])
    Pd = np.concatenate([c[1] for c in chunks])
    X = np.concatenate([cast(c[2]) for c in chunks])
    H = np.concatenate([cast(c[3]) for c in chunks])
    # sort by (height, numerators); np.lexsort sorts by the last key first
    keys = [X[:, i] for i in reversed(range(d))] + [H]
    order = np.lexsort(keys) if not obj else np.array(
        sorted(range(len(H)), key=lambda i: (H[i], tuple(X[i]))), dtype=np.int64)
    Pn, Pd, X, H = Pn[order], Pd[order], X[order], H[order]
    if len(H) > 1:
        same = (H[1:] == H[:-1]) & np.all(X[1:] == X[:-1], axis=1)
        keep = np.concatenate([[True], ~same.astype(bool)])
        Pn, Pd, X, H = Pn[keep], Pd[keep], X[keep], H[keep]
    return Enumeration(chart, T, Pn, Pd, X, H)


def _intersect(a: Box, b: Box) -> Box | None:
    out = []
    for (l1, h1), (l2, h2) in zip(a, b):
        lo, hi = max(l1, l2), min(h1, h2)
        if lo > hi:
            return None
        out.append((lo, hi))
    return tuple(out)


def enumerate_rationals(chart: Chart, T: int, box=None, param_box=None,
                        budget: int = DEFAULT_BUDGET) -> list[tuple[RationalPoint, tuple[Fraction, ...]]]:
    """Every intrinsic rational of height <= T with parameter in the domain and image in box."""
    return sweep(chart, T, box=box, param_box=param_box, budget=budget).pairs()


# ------------------------------------------------------------- brute force


class _HomogeneousEquation:
    """F(p, q) = q^deg * L * f(p/q) as integer terms, split on its last variable."""

    def __init__(self, f: MPoly):
        scale = f.coefficient_lcm()
        deg = max(f.degree, 0)
        self.terms = [(int(c * scale), e, deg - sum(e)) for e, c in f.terms]
        used = [i for i in range(f.nvars) if any(e[i] for _, e, _ in self.terms)]
        self.last = max(used) if used else 0
        self.last_degree = max((e[self.last] for _, e, _ in self.terms), default=0)
        self.linear = self.last_degree <= 1

    def value(self, p: Sequence[int], q: int) -> int:
        total = 0
        for c, e, qe in self.terms:
            v = c * q**qe
            for x, a in zip(p, e):
                if a:
                    v *= x**a
            total += v
        return total

    def last_coefficients(self, p: list[int], q: int) -> list[int]:
        """Coefficients of F as a polynomial in p_last, given earlier coordinates."""
        coeffs = [0] * (self.last_degree + 1)
        for c, e, qe in self.terms:
            v = c * q**qe
            for i, (x, a) in enumerate(zip(p, e)):
                if a and i != self.last:
                    v *= x**a
            coeffs[e[self.last]] += v
        return coeffs


def _integer_roots(coeffs: list[int], lo: int, hi: int) -> Iterable[int] | None:
    """Integer roots in [lo, hi] of a polynomial of degree <= 2; None means "scan"."""
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) == 1:
        return None if coeffs[0] == 0 else ()
    if len(coeffs) == 2:
        B, A = coeffs
        if B % A:
            return ()
        x = -B // A
        return (x,) if lo <= x <= hi else ()
    C, B, A = coeffs
    disc = B * B - 4 * A * C
    if disc < 0:
        return ()
    r = math.isqrt(disc)
    if r * r != disc:
        return ()
    roots = set()
    for num in (-B + r, -B - r):
        if num % (2 * A) == 0 and lo <= num // (2 * A) <= hi:
            roots.add(num // (2 * A))
    return sorted(roots)


def bruteforce_intrinsic(implicit_eqs: Sequence[MPoly], T: int, box, budget: int = DEFAULT_BUDGET) -> list[RationalPoint]:
    """All jointly primitive p/q in box with q <= T satisfying every equation.

    Coordinates are assigned in order; an equation is tested as soon as its
    last variable is assigned, and when it has degree <= 2 in that variable
    the integer candidates are solved for instead of scanned.  No
    parametrization is consulted.
    """
    box = make_box(box)
    d = len(box)
    if any(lo > hi for lo, hi in box) or not implicit_eqs:
        return []
    eqs = [_HomogeneousEquation(f) for f in implicit_eqs]
    by_last: dict[int, list[_HomogeneousEquation]] = {}
    for e in eqs:
        by_last.setdefault(e.last, []).append(e)
    solver = {i: min(lst, key=lambda e: e.last_degree) for i, lst in by_last.items()}
    solver = {i: e for i, e in solver.items() if e.last_degree <= 2}
    out: list[RationalPoint] = []
    visited = 0

    for q in range(1, int(T) + 1):
        lims = [(math.ceil(lo * q), math.floor(hi * q)) for lo, hi in box]
        if any(a > b for a, b in lims):
            continue
        p = [0] * d

        def assign(i: int):
            nonlocal visited
            if i == d:
                if math.gcd(q, *p) == 1:
                    out.append(RationalPoint(q, tuple(p)))
                return
            a, b = lims[i]
            eq = solver.get(i)
            cands = _integer_roots(eq.last_coefficients(p, q), a, b) if eq is not None else None
            if cands is None:
                cands = range(a, b + 1)
            for x in cands:
                visited += 1
                if visited > budget:
                    raise BudgetExceeded(visited, budget)
                p[i] = x
                if all(e.value(p, q) == 0 for e in by_last.get(i, ())):
                    assign(i + 1)
            p[i] = 0

        assign(0)
    out.sort()
    return out


# ---------------------------------------------------------------- registry


def _projection_inverse(k: int, d: int) -> tuple[RatFunc, ...]:
    return tuple(RatFunc.poly(MPoly.var(d, i)) for i in range(k))


def veronese_chart(k: int, n: int) -> Chart:
    """t -> (t^alpha) for 0 < |alpha| <= n, degree-1 block first."""
    if k < 1 or n < 1:
        raise ValueError("veronese needs k, n >= 1")
    alphas = list(graded_multi_indices(k, n))
    d = len(alphas)
    assert d == binom(k, n) - 1
    coords = tuple(RatFunc.poly(MPoly.monomial(a)) for a in alphas)
    index = {a: i for i, a in enumerate(alphas)}
    X = [MPoly.var(d, i) for i in range(d)]
    eqs: list[MPoly] = []
    # graph relations x_alpha = prod of degree-1 coordinates
    for a in alphas:
        if sum(a) > 1:
            mono = MPoly.const(d, 1)
            for i, e in enumerate(a):
                mono = mono * X[i] ** e
            eqs.append(X[index[a]] - mono)
    # binomial relations x_a x_b = x_c x_e with a + b = c + e, plus x_{a+b} = x_a x_b
    seen = set()
    for a, b in combinations_with_replacement(alphas, 2):
        s = tuple(x + y for x, y in zip(a, b))
        if s in index:
            eqs.append(X[index[s]] - X[index[a]] * X[index[b]])
        for c, e in combinations_with_replacement(alphas, 2):
            if (c, e) <= (a, b) or tuple(x + y for x, y in zip(c, e)) != s:
                continue
            key = ((a, b), (c, e))
            if key not in seen:
                seen.add(key)
                eqs.append(X[index[a]] * X[index[b]] - X[index[c]] * X[index[e]])
    uniq = list(dict.fromkeys(eqs))
    return Chart(f"veronese:{k},{n}", k, d, coords, unit_box(k), tuple(uniq),
                 HeightRule("root", n), _projection_inverse(k, d))


def curve_cn(n: int) -> Chart:
    """t -> (t, t^n) in the plane."""
    if n < 2:
        raise ValueError("C_n needs n >= 2")
    t = MPoly.var(1, 0)
    x, y = MPoly.var(2, 0), MPoly.var(2, 1)
    return Chart(f"cn:{n}", 1, 2, (RatFunc.poly(t), RatFunc.poly(t**n)), unit_box(1), (y - x**n,),
                 HeightRule("root", n), _projection_inverse(1, 2))


def sphere_chart(d: int, pole: str = "south") -> Chart:
    """Inverse stereographic projection from the south pole onto S^{d-1}.

    t -> (2t, 1 - |t|^2) / (1 + |t|^2), t in R^{d-1}.  With ``pole="north"``
    the last coordinate is negated, so the unit parameter box lands on the
    lower half of the sphere instead of the upper half.

    Height rule: the inverse is t_i = x_i / (1 + x_d), so a point p/q of the
    sphere has a parameter denominator dividing q + p_d <= 2q.  For d = 2 the
    sharper bound floor(sqrt(2T)) holds, since with t = a/b in lowest terms
    the common factor of (2ab, b^2 - a^2, b^2 + a^2) divides 2.
    """
    if d < 2:
        raise ValueError("sphere needs d >= 2")
    if pole not in ("south", "north"):
        raise ValueError(f"pole must be 'south' or 'north', got {pole!r}")
    sign = 1 if pole == "south" else -1
    k = d - 1
    ts = [MPoly.var(k, i) for i in range(k)]
    s = MPoly.const(k, 0)
    for t in ts:
        s = s + t * t
    den = 1 + s
    coords = tuple(RatFunc(2 * t, den) for t in ts) + (RatFunc(sign * (1 - s), den),)
    X = [MPoly.var(d, i) for i in range(d)]
    eq = MPoly.const(d, -1)
    for x in X:
        eq = eq + x * x
    inv = tuple(RatFunc(X[i], 1 + sign * X[d - 1]) for i in range(k))
    rule = HeightRule("sqrt", 2) if k == 1 else HeightRule("linear", 2)
    spec = f"sphere:{d}" if pole == "south" else f"sphere:{d}@north"
    return Chart(spec, k, d, coords, unit_box(k), (eq,), rule, inv)


def identity_chart(d: int) -> Chart:
    """R^d as a chart of itself (k = d); the classical setting."""
    coords = tuple(RatFunc.poly(MPoly.var(d, i)) for i in range(d))
    return Chart(f"identity:{d}", d, d, coords, unit_box(d), (MPoly.const(d, 0),),
                 HeightRule("linear", 1), _projection_inverse(d, d))


def polynomial_chart(coords: Sequence[MPoly], domain=None, spec: str = "custom",
                     implicit_eqs: Sequence[MPoly] = ()) -> Chart:
    """Ad hoc polynomial chart; without equations it cannot be cross-checked."""
    k = coords[0].nvars
    box = unit_box(k) if domain is None else make_box(domain, k)
    return Chart(spec, k, len(coords), tuple(RatFunc.poly(c) for c in coords), box,
                 tuple(implicit_eqs), HeightRule("linear", 1))


def chart_from_spec(spec: str, domain=None) -> Chart:
    try:
        name, _, args = spec.partition(":")
        args, _, pole = args.partition("@")
        nums = [int(a) for a in args.split(",")] if args else []
        if name == "veronese" and len(nums) == 2:
            chart = veronese_chart(*nums)
        elif name == "cn" and len(nums) == 1:
            chart = curve_cn(nums[0])
        elif name == "sphere" and len(nums) == 1:
            chart = sphere_chart(nums[0], pole or "south")
        elif name == "identity" and len(nums) == 1:
            chart = identity_chart(nums[0])
        else:
            raise UnknownChart(f"unknown chart specifier {spec!r}")
        if pole and name != "sphere":
            raise UnknownChart(f"only sphere charts take a pole, got {spec!r}")
    except ValueError as exc:
        if isinstance(exc, UnknownChart):
            raise
        raise UnknownChart(f"bad chart specifier {spec!r}: {exc}") from exc
    return chart if domain is None else chart.with_domain(domain)


def atlas(chart: Chart) -> tuple[Chart, ...]:
    """Charts whose unit-box images together cover the whole variety.

    A sphere needs its north-pole companion; every other built-in chart
    already covers its variety inside the unit ambient box.
    """
    if chart.spec.startswith("sphere:") and "@" not in chart.spec:
        north = sphere_chart(chart.d, "north")
        return (chart, north if chart.domain == unit_box(chart.k) else north.with_domain(chart.domain))
    return (chart,)


def enumerate_atlas(chart: Chart, T: int, box=None,
                    budget: int = DEFAULT_BUDGET) -> list[tuple[RationalPoint, str, tuple[Fraction, ...]]]:
    """Union of the sweeps over :func:`atlas`, as (point, chart spec, parameter).

    A point reached by several charts keeps the parameter of the first.
    """
    seen: dict[RationalPoint, tuple[str, tuple[Fraction, ...]]] = {}
    for piece in atlas(chart):
        for point, t in sweep(piece, T, box=box, budget=budget).pairs():
            seen.setdefault(point, (piece.spec, t))
    return [(p, *seen[p]) for p in sorted(seen)]


BUILTIN_SPECS = ("cn:2", "cn:3", "veronese:1,2", "veronese:1,3", "veronese:2,2", "sphere:2", "sphere:3")


# module-level aliases matching the operation names
def evaluate(chart: Chart, t: Sequence) -> RationalPoint:
    return chart.evaluate(t)


def partial(chart: Chart, alpha: Sequence[int]) -> tuple[RatFunc, ...]:
    return chart.partial(alpha)


def nondegeneracy_order(chart: Chart, t: Sequence, j_max: int) -> NondegeneracyOrder:
    return chart.nondegeneracy_order(t, j_max)
