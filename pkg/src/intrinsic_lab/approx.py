"""Best intrinsic approximations of a target point and summaries of their rate.

Distances use the max norm and are certified: a float pass over an
enumeration picks a small superset of candidates, then every comparison that
decides the record staircase is made on rational enclosures, refined until
it resolves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .arith import RationalPoint, as_fraction, fmt_rational, power_bounds
from .charts import DEFAULT_BUDGET, Chart, Enumeration, sweep
from .constants import dirichlet_constants
from .errors import BudgetExceeded, Degenerate, InsufficientData, PrecisionExhausted
from .polys import count_roots, sturm_sequence, ugcd, upoly
from .targets import AlgebraicTarget, TargetPoint, as_target, continued_fraction, convergents

Interval = tuple[Fraction, Fraction]

_MAX_LEVEL = 9
_TIE_LEVEL = 2


def _width(level: int) -> Fraction:
    # squares at every level: 2^-64, 2^-128, 2^-256, ...
    return Fraction(1, 2 ** (64 << level))


@dataclass(frozen=True)
class ApproximationRecord:
    """Distance is the midpoint of a certified enclosure of half-width ``error``."""

    height: int
    distance: Fraction
    witness: RationalPoint
    error: Fraction = Fraction(0)

    @property
    def bounds(self) -> Interval:
        return self.distance - self.error, self.distance + self.error

    def to_json(self, target: str | None = None) -> dict:
        out = {"height": self.height, "distance": fmt_rational(self.distance),
               "error": fmt_rational(self.error), "witness": str(self.witness),
               "distance_approx": float(self.distance)}
        if target is not None:
            out = {"target": target, **out}
        return out


class _Certifier:
    """Distance enclosures from one target to rational points, by refinement level."""

    def __init__(self, chart: Chart, target: TargetPoint):
        if target.k != chart.k:
            raise ValueError(f"target has {target.k} coordinates, chart {chart.spec} has {chart.k} parameters")
        self.chart = chart
        self.target = target
        self._images: dict[int, tuple[Interval, ...]] = {}

    def image(self, level: int) -> tuple[Interval, ...]:
        if level not in self._images:
            self._images[level] = self.chart.image_interval(self.target.box(_width(level)))
        return self._images[level]

    def float_image(self) -> np.ndarray:
        return np.array([float((a + b) / 2) for a, b in self.image(0)])

    def coord_abs(self, point: RationalPoint, i: int, level: int) -> Interval:
        """Enclosure of |r_i - Psi_i(target)|."""
        a, b = self.image(level)[i]
        r = point.coords()[i]
        far = max(abs(r - a), abs(r - b))
        near = Fraction(0) if a <= r <= b else min(abs(r - a), abs(r - b))
        return near, far

    def distance(self, point: RationalPoint, level: int) -> Interval:
        lo = hi = Fraction(0)
        for i in range(self.chart.d):
            near, far = self.coord_abs(point, i, level)
            lo, hi = max(lo, near), max(hi, far)
        return lo, hi

    def abs_equal(self, p: RationalPoint, i: int, q: RationalPoint, j: int) -> bool:
        """Exact test |p_i - Psi_i(x)| == |q_j - Psi_j(x)| for an algebraic one-parameter target.

        Either sign combination is a rational function of x; x is a zero of its
        numerator iff the gcd with the defining polynomial has a root in the
        isolating interval.  Unsupported targets answer False.
        """
        x = self.target.coords[0] if self.target.k == 1 else None
        if not isinstance(x, AlgebraicTarget) or x.is_rational:
            return False
        fi, fj = self.chart.coords[i], self.chart.coords[j]
        r, s = p.coords()[i], q.coords()[j]
        for sign in (1, -1):
            # (r - fi) - sign * (s - fj), cleared of denominators
            num = (fi.den * (r - sign * s) - fi.num) * fj.den + sign * fj.num * fi.den
            g = ugcd(num.to_univariate(), x.poly) if not num.is_zero() else upoly(x.poly)
            if len(g) > 1 and count_roots(sturm_sequence(g), x.lo, x.hi) > 0:
                return True
        return False


class _Candidate:
    __slots__ = ("point", "height", "cert", "_cache", "inside")

    def __init__(self, cert: _Certifier, point: RationalPoint, inside: bool = True):
        self.point = point
        self.height = point.height
        self.cert = cert
        self._cache: dict[int, Interval] = {}
        self.inside = inside

    def interval(self, level: int) -> Interval:
        if level not in self._cache:
            self._cache[level] = self.cert.distance(self.point, level)
        return self._cache[level]

    def finest(self) -> Interval:
        return self._cache[max(self._cache)] if self._cache else self.interval(0)

    def record(self) -> ApproximationRecord:
        lo, hi = self.finest()
        return ApproximationRecord(self.height, (lo + hi) / 2, self.point, (hi - lo) / 2)


def _cmp_abs(cert: _Certifier, p: RationalPoint, i: int, q: RationalPoint, j: int) -> int:
    for level in range(_MAX_LEVEL):
        a, b = cert.coord_abs(p, i, level), cert.coord_abs(q, j, level)
        if a[1] < b[0]:
            return -1
        if a[0] > b[1]:
            return 1
        if a[0] == a[1] == b[0] == b[1]:
            return 0
        if level == _TIE_LEVEL and cert.abs_equal(p, i, q, j):
            return 0
    raise PrecisionExhausted(f"cannot order distances of {p} and {q}", (p, q))


def _argmax_coord(c: _Candidate) -> int:
    best = 0
    for i in range(1, c.cert.chart.d):
        if _cmp_abs(c.cert, c.point, i, c.point, best) > 0:
            best = i
    return best


def _less(x: _Candidate, y: _Candidate) -> bool:
    """Certified dist(x) < dist(y); points outside the domain count as infinitely far."""
    if not x.inside:
        return False
    if not y.inside:
        return True
    for level in range(_TIE_LEVEL + 1):
        (xl, xh), (yl, yh) = x.interval(level), y.interval(level)
        if xh < yl:
            return True
        if xl >= yh:
            return False
    # overlap persists: compare the attaining coordinates exactly
    return _cmp_abs(x.cert, x.point, _argmax_coord(x), y.point, _argmax_coord(y)) < 0


def _staircase(groups: Sequence[Sequence[_Candidate]]) -> list[ApproximationRecord]:
    """Records from candidates grouped by increasing height."""
    records: list[ApproximationRecord] = []
    best: _Candidate | None = None
    for group in groups:
        gbest = None
        for c in group:
            if c.inside and (gbest is None or _less(c, gbest)):
                gbest = c
        if gbest is None:
            continue
        if best is None or _less(gbest, best):
            best = gbest
            records.append(gbest.record())
            if best.interval(0) == (0, 0):
                break
    return records


# ------------------------------------------------------------ enumeration side


@dataclass
class EnumerationCache:
    """Sweeps keyed by chart and domain; a larger sweep serves smaller height bounds."""

    budget: int = DEFAULT_BUDGET
    _store: dict = field(default_factory=dict)

    def get(self, chart: Chart, T: int) -> Enumeration:
        key = (chart.spec, chart.domain)
        held = self._store.get(key)
        if held is None or held.T < T:
            held = sweep(chart, T, budget=self.budget)
            self._store[key] = held
        if held.T == T:
            return held
        cut = int(np.searchsorted(held.dens.astype(object) if held.dens.dtype == object else held.dens,
                                  T, side="right"))
        return Enumeration(chart, T, held.param_nums[:cut], held.param_dens[:cut], held.nums[:cut],
                           held.dens[:cut])


def default_domain(chart: Chart, target) -> Chart:
    """The chart itself if its domain holds the target, else the chart on a unit window around it."""
    box = target.box(Fraction(1, 2**32))
    if all(lo >= a and hi <= b for (lo, hi), (a, b) in zip(box, chart.domain)):
        return chart
    window = []
    for lo, hi in box:
        base = Fraction(lo.numerator // lo.denominator)
        window.append((base, base + 1) if hi <= base + 1 else (base, base + 2))
    return chart.with_domain(window)


def best_approximations(chart: Chart, target, T: int, cache: EnumerationCache | None = None,
                        budget: int = DEFAULT_BUDGET) -> list[ApproximationRecord]:
    """Record staircase of max-norm distances from Psi(target) to intrinsic rationals of height <= T.

    Only rationals with parameter in the chart domain take part.
    """
    target = as_target(target)
    cache = cache if cache is not None else EnumerationCache(budget)
    enum = cache.get(chart, int(T))
    if len(enum) == 0:
        return []
    cert = _Certifier(chart, target)
    y = cert.float_image()
    X = enum.float_points()
    df = np.max(np.abs(X - y), axis=1)
    scale = 1.0 + float(np.max(np.abs(y)))
    tol = 1e-12 * scale
    H = enum.dens
    starts = np.zeros(len(H), dtype=np.int64)
    change = np.flatnonzero(H[1:] != H[:-1]) + 1
    starts[change] = change
    starts = np.maximum.accumulate(starts)
    cm = np.minimum.accumulate(df)
    prev = np.where(starts > 0, cm[np.maximum(starts - 1, 0)], np.inf)
    idx = np.flatnonzero(df <= prev + tol)
    groups: list[list[_Candidate]] = []
    last_h = None
    for i in idx:
        point = RationalPoint(int(H[i]), tuple(int(v) for v in enum.nums[i]))
        if point.height != last_h:
            groups.append([])
            last_h = point.height
        groups[-1].append(_Candidate(cert, point))
    return _staircase(groups)


# ------------------------------------------------------ continued-fraction side


def convergent_records(chart: Chart, target, T: int, intermediate: bool = True,
                       budget: int = DEFAULT_BUDGET) -> list[ApproximationRecord]:
    """Records built from convergents and intermediate fractions of the parameter.

    For a one-parameter chart whose heights are H(t)^n and whose coordinates
    are monotone between consecutive integers, the one-sided best
    approximations of the parameter are exactly the intermediate fractions;
    within each block the distance falls as the block index grows, so the
    first record of a block is found by bisection.  With
    ``intermediate=False`` only full convergents are considered; the result
    is then a subsequence-like summary, not the full staircase.
    """
    target = as_target(target)
    rule = chart.param_height_bound
    if chart.k != 1 or rule.kind != "root":
        raise ValueError("convergent records need a one-parameter chart with height H(t)^n")
    Q = rule(int(T))
    if Q < 1:
        return []
    quotients, _ = continued_fraction(target.coords[0], Q)
    conv = convergents(quotients)
    cert = _Certifier(chart, target)

    def cand(p: int, q: int) -> _Candidate:
        t = (Fraction(p, q),)
        inside = chart.in_domain(t)
        point = chart.evaluate(t) if inside else RationalPoint(1, (0,) * chart.d)
        return _Candidate(cert, point, inside)

    records: list[ApproximationRecord] = []
    best: _Candidate | None = None

    def push(c: _Candidate):
        nonlocal best
        rec = c.record()
        if records and records[-1].height == rec.height:
            records[-1] = rec
        else:
            records.append(rec)
        best = c

    first = cand(*conv[0])
    if first.inside:
        push(first)
    prev = (1, 0)
    emitted = 0
    for i, (p, q) in enumerate(conv):
        if best is not None and best.interval(0) == (0, 0):
            break
        if i + 1 >= len(quotients):
            break
        a = quotients[i + 1]
        m_hi = min(a, (Q - prev[1]) // q)
        if m_hi < 1:
            break
        block = (lambda m, p=p, q=q, pp=prev: cand(pp[0] + m * p, pp[1] + m * q))
        if not intermediate:
            if m_hi == a:
                c = block(a)
                if c.inside and (best is None or _less(c, best)):
                    push(c)
            prev = (p, q)
            continue
        # smallest m in [1, m_hi] beating the current best
        if best is None or _less(block(m_hi), best):
            lo, hi = 1, m_hi
            while lo < hi:
                mid = (lo + hi) // 2
                if best is None or _less(block(mid), best):
                    hi = mid
                else:
                    lo = mid + 1
            emitted += m_hi - lo + 1
            if emitted > budget:
                raise BudgetExceeded(emitted, budget)
            for m in range(lo, m_hi + 1):
                c = block(m)
                if c.inside:
                    push(c)
        prev = (p, q)
    return records


# ---------------------------------------------------------------- summaries


def _log(x: Fraction | int) -> float:
    x = Fraction(x)
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass(frozen=True)
class ExponentEstimate:
    """Slopes of -log(distance) against log(height); ratios log(1/d)/log(h) on the tail."""

    slope: float
    tail_slope: float
    tail_inf: float
    tail_sup: float
    c_reference: Fraction | None
    records: int
    tail_records: int
    tail_fraction: Fraction

    def summary(self) -> dict:
        return {
            "slope_approx": self.slope,
            "tail_slope_approx": self.tail_slope,
            "tail_inf_approx": self.tail_inf,
            "tail_sup_approx": self.tail_sup,
            "c_reference": None if self.c_reference is None else fmt_rational(self.c_reference),
            "records": self.records,
            "tail_records": self.tail_records,
            "tail_fraction": fmt_rational(self.tail_fraction),
        }


def _tail_mask(logs: np.ndarray, fraction: Fraction) -> np.ndarray:
    lo, hi = float(logs.min()), float(logs.max())
    cut = lo + (1 - float(fraction)) * (hi - lo)
    return logs >= cut - 1e-12


def exponent_estimate(records: Sequence[ApproximationRecord], c_reference=None,
                      tail: Fraction = Fraction(1, 2)) -> ExponentEstimate:
    usable = [r for r in records if r.distance > 0]
    if len(usable) < 2:
        raise InsufficientData(f"need at least 2 records with positive distance, got {len(usable)}")
    tail = as_fraction(tail)
    if not 0 < tail <= 1:
        raise ValueError("tail fraction must lie in (0, 1]")
    lh = np.array([_log(r.height) for r in usable])
    ld = np.array([_log(r.distance) for r in usable])
    slope = float(np.polyfit(lh, -ld, 1)[0]) if np.ptp(lh) > 0 else math.nan
    mask = _tail_mask(lh, tail)
    t_lh, t_ld = lh[mask], ld[mask]
    tail_slope = float(np.polyfit(t_lh, -t_ld, 1)[0]) if len(t_lh) >= 2 and np.ptp(t_lh) > 0 else math.nan
    pos = t_lh > 0
    ratios = -t_ld[pos] / t_lh[pos]
    tail_inf = float(ratios.min()) if len(ratios) else math.nan
    tail_sup = float(ratios.max()) if len(ratios) else math.nan
    c_ref = None if c_reference is None else as_fraction(c_reference)
    return ExponentEstimate(slope, tail_slope, tail_inf, tail_sup, c_ref, len(usable), int(mask.sum()), tail)


def _scaled_bounds(r: ApproximationRecord, c: Fraction) -> Interval:
    """Enclosure of distance * height^c."""
    lo, hi = r.bounds
    p_lo, p_hi = power_bounds(r.height, c)
    return max(lo, Fraction(0)) * p_lo, hi * p_hi


@dataclass(frozen=True)
class BATest:
    c: Fraction
    infimum: Interval
    witness: ApproximationRecord
    window_infima: tuple[tuple[int, Interval], ...]  # (dyadic exponent j, inf over heights in [2^j, 2^(j+1)))
    threshold: Fraction
    verdict: str

    @property
    def is_ba(self) -> bool:
        return self.verdict == "BA-at-scale"


def ba_test(records: Sequence[ApproximationRecord], c, threshold=Fraction(1, 2)) -> BATest:
    """Running infimum of distance * height^c, and a finite-scale verdict.

    The verdict is BA-at-scale when the infimum is certified positive and the
    last dyadic height window does not drop below ``threshold`` times the
    infimum over all earlier windows.
    """
    if not records:
        raise InsufficientData("ba_test needs at least one record")
    c, threshold = as_fraction(c), as_fraction(threshold)
    scaled = [(r, _scaled_bounds(r, c)) for r in records]
    witness, inf = min(scaled, key=lambda s: s[1][0])
    windows: dict[int, Interval] = {}
    for r, (lo, hi) in scaled:
        j = r.height.bit_length() - 1
        cur = windows.get(j)
        windows[j] = (lo, hi) if cur is None or lo < cur[0] else cur
    ordered = tuple(sorted(windows.items()))
    positive = inf[0] > 0
    trend_ok = True
    if len(ordered) >= 2:
        last = ordered[-1][1]
        earlier = min(iv[0] for _, iv in ordered[:-1])
        trend_ok = last[0] >= threshold * earlier
    verdict = "BA-at-scale" if positive and trend_ok else "not-BA-at-scale"
    return BATest(c, inf, witness, ordered, threshold, verdict)


@dataclass(frozen=True)
class VWATest:
    c: Fraction
    counts: tuple[tuple[Fraction, int], ...]  # (epsilon, tail records with d <= h^-(c+eps))
    epsilon: Fraction | None
    min_count: int
    tail_fraction: Fraction

    @property
    def verdict(self) -> str:
        return "VWA-at-scale" if self.epsilon is not None else "not-VWA-at-scale"


def vwa_test(records: Sequence[ApproximationRecord], c, min_count: int = 5,
             tail: Fraction = Fraction(1, 4), eps_step=Fraction(1, 16), eps_max=Fraction(4)) -> VWATest:
    """Largest grid epsilon such that >= min_count tail records satisfy d <= h^-(c+eps).

    A record counts only when the inequality is certified.
    """
    if not records:
        raise InsufficientData("vwa_test needs at least one record")
    if any(r.bounds[1] == 0 for r in records):
        raise Degenerate("the target is itself an intrinsic rational")
    c, tail, eps_step = as_fraction(c), as_fraction(tail), as_fraction(eps_step)
    lh = np.array([_log(r.height) for r in records])
    mask = _tail_mask(lh, tail)
    tail_recs = [r for r, m in zip(records, mask) if m and r.height > 1]
    counts = []
    best = None
    j = 1
    while j * eps_step <= eps_max:
        eps = j * eps_step
        n = 0
        for r in tail_recs:
            bound_lo, _ = power_bounds(Fraction(1, r.height), c + eps)
            if r.bounds[1] <= bound_lo:
                n += 1
        counts.append((eps, n))
        if n >= min_count:
            best = eps
        j += 1
    return VWATest(c, tuple(counts), best, min_count, tail)


# ---------------------------------------------------------------- Dirichlet


@dataclass(frozen=True)
class DirichletTest:
    c: Fraction
    T: int
    constants: tuple[tuple[int, float], ...]  # (h, sup over targets and dyadic h' <= h)
    witness: tuple[int, int]  # (target index, dyadic h) attaining the constant at T
    ratios: tuple[float, ...]  # successive constants over the last three doublings

    @property
    def constant(self) -> float:
        return self.constants[-1][1]

    @property
    def stable(self) -> bool:
        return all(0.5 <= r <= 2 for r in self.ratios)

    @property
    def growing(self) -> bool:
        return all(r > 1 for r in self.ratios)


def _min_distance_upto(records: Sequence[ApproximationRecord], h: int) -> ApproximationRecord | None:
    best = None
    for r in records:
        if r.height > h:
            break
        best = r
    return best


def dirichlet_test(chart: Chart, targets: Sequence, c, T: int, cache: EnumerationCache | None = None,
                   budget: int = DEFAULT_BUDGET,
                   records_fn: Callable | None = None) -> DirichletTest:
    """sup over targets and dyadic h <= T of (min distance at height <= h) * h^c.

    Constants are reported at every dyadic height; ratios compare the values
    at T/4, T/2 and T.
    """
    if not targets:
        raise InsufficientData("dirichlet_test needs at least one target")
    c = as_fraction(c)
    T = int(T)
    cache = cache if cache is not None else EnumerationCache(budget)
    heights = [2**j for j in range(T.bit_length()) if 2**j <= T]
    per_h = {h: (-1.0, (-1, h)) for h in heights}
    for ti, target in enumerate(targets):
        recs = records_fn(target) if records_fn else best_approximations(chart, target, T, cache)
        for h in heights:
            r = _min_distance_upto(recs, h)
            if r is None:
                continue
            v = float(r.distance) * float(power_bounds(h, c)[1])
            if v > per_h[h][0]:
                per_h[h] = (v, (ti, h))
    constants = []
    running, witness = -1.0, (-1, 0)
    for h in heights:
        v, w = per_h[h]
        if v > running:
            running, witness = v, w
        constants.append((h, running))
    tail = [v for _, v in constants[-3:]]
    ratios = tuple(b / a if a > 0 else math.inf for a, b in zip(tail, tail[1:]))
    return DirichletTest(c, T, tuple(constants), witness, ratios)


def reference_exponent(chart: Chart) -> Fraction:
    return dirichlet_constants(chart.k, chart.d).c_kd
