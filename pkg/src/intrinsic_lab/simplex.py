"""Low-height intrinsic rationals in small balls, and the hyperplane holding them.

For a chart Psi with k parameters in R^d, the set

    S(s, rho) = { r in Psi(domain & B(s, rho)) rational : H(r) <= kappa * rho^(-N/(d+1)) }

is expected to lie in one affine hyperplane once kappa is small enough.  The
height threshold is computed exactly, as an integer floor, by comparing
integer powers.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import (
    RationalPoint,
    as_fraction,
    exact_det,
    exact_rank,
    floor_scaled_power,
    fmt_rational,
    integer_kernel,
)
from .charts import DEFAULT_BUDGET, Chart, make_box, sweep
from .constants import DirichletConstants, dirichlet_constants
from .errors import SimplexViolation

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class SimplexQuery:
    chart: Chart
    center: tuple[Fraction, ...]
    radius: Fraction
    kappa: Fraction
    constants: DirichletConstants = None

    def __post_init__(self):
        center = tuple(as_fraction(x) for x in self.center)
        radius, kappa = as_fraction(self.radius), as_fraction(self.kappa)
        if len(center) != self.chart.k:
            raise ValueError(f"center must have {self.chart.k} coordinates")
        if not 0 < radius <= 1:
            raise ValueError("radius must satisfy 0 < rho <= 1")
        if kappa < 0:
            raise ValueError("kappa must be >= 0")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "kappa", kappa)
        if self.constants is None:
            object.__setattr__(self, "constants", dirichlet_constants(self.chart.k, self.chart.d))

    @property
    def height_bound(self) -> int:
        c = self.constants
        return floor_scaled_power(self.kappa, self.radius, c.N_kd, c.d + 1)

    @property
    def param_box(self):
        return make_box([(x - self.radius, x + self.radius) for x in self.center], self.chart.k)


def collect_S(query: SimplexQuery, budget: int = DEFAULT_BUDGET) -> list[RationalPoint]:
    h = query.height_bound
    if h < 1:
        return []
    return sweep(query.chart, h, param_box=query.param_box, budget=budget).points()


@dataclass(frozen=True)
class Hyperplane:
    """The affine functional w.x = b with (w, b) jointly primitive integers."""

    normal: tuple[int, ...]
    offset: int

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum(w * xi for w, xi in zip(self.normal, x)) - self.offset

    def contains(self, point: RationalPoint) -> bool:
        # integral form: w.p - b q
        return sum(w * p for w, p in zip(self.normal, point.numerators)) == self.offset * point.denominator

    def to_json(self) -> dict:
        return {"normal": list(self.normal), "offset": self.offset}

    @classmethod
    def from_json(cls, data: dict) -> "Hyperplane":
        return cls(tuple(int(w) for w in data["normal"]), int(data["offset"]))


@dataclass(frozen=True)
class SimplexFailure:
    """d+1 affinely independent points and the determinant they span."""

    points: tuple[RationalPoint, ...]
    det: Fraction
    denominator_product: int

    @property
    def integrality_holds(self) -> bool:
        scaled = self.det * self.denominator_product
        return scaled.denominator == 1 and abs(self.det) * self.denominator_product >= 1

    def to_json(self) -> dict:
        return {"points": [str(p) for p in self.points], "det": fmt_rational(self.det),
                "denominator_product": self.denominator_product,
                "integrality_holds": self.integrality_holds}


@dataclass(frozen=True)
class SimplexReport:
    points: tuple[RationalPoint, ...]
    hyperplane: Hyperplane | None  # None: no point, nothing to constrain
    rank: int
    passed: bool
    failure: SimplexFailure | None = None


def _affine_rows(points: Iterable[RationalPoint]) -> list[list[Fraction]]:
    return [[Fraction(1), *p.coords()] for p in points]


def _independent_subset(points: Sequence[RationalPoint], size: int) -> list[RationalPoint]:
    chosen: list[RationalPoint] = []
    for p in points:
        if exact_rank(_affine_rows(chosen + [p])) == len(chosen) + 1:
            chosen.append(p)
            if len(chosen) == size:
                break
    return chosen


def hyperplane_containment(points: Sequence[RationalPoint], d: int) -> SimplexReport:
    points = tuple(points)
    if not points:
        return SimplexReport(points, None, 0, True)
    if any(p.dim != d for p in points):
        raise ValueError(f"all points must lie in R^{d}")
    rows = _affine_rows(points)
    rank = exact_rank(rows)
    if rank <= d:
        v = integer_kernel(rows)[0]
        w, b = tuple(v[1:]), -v[0]
        if next(x for x in w if x) < 0:
            w, b = tuple(-x for x in w), -b
        plane = Hyperplane(w, b)
        assert all(plane.contains(p) for p in points)
        return SimplexReport(points, plane, rank, True)
    simplex = _independent_subset(points, d + 1)
    det = exact_det(_affine_rows(simplex))
    prod = 1
    for p in simplex:
        prod *= p.denominator
    return SimplexReport(points, None, rank, False, SimplexFailure(tuple(simplex), det, prod))


def verify(query: SimplexQuery, budget: int = DEFAULT_BUDGET) -> SimplexReport:
    return hyperplane_containment(collect_S(query, budget), query.chart.d)


# ------------------------------------------------------------------ sweeps


def radical_inverse(n: int, base: int) -> Fraction:
    num, den = 0, 1
    while n:
        n, digit = divmod(n, base)
        num = num * base + digit
        den *= base
    return Fraction(num, den)


def halton_centers(chart: Chart, samples: int, seed: int) -> list[tuple[Fraction, ...]]:
    """Exact Halton points mapped into the chart domain, from a seeded start index."""
    if chart.k > len(_PRIMES):
        raise ValueError("too many parameters for the built-in Halton bases")
    start = random.Random(seed).randrange(1, 2**20)
    out = []
    for i in range(start, start + samples):
        out.append(tuple(lo + (hi - lo) * radical_inverse(i, _PRIMES[j])
                         for j, (lo, hi) in enumerate(chart.domain)))
    return out


def dyadic_radii(samples: int, rho_range: tuple, seed: int) -> list[Fraction]:
    """Radii 2^-j with j uniform over the dyadic exponents inside rho_range."""
    lo, hi = (as_fraction(x) for x in rho_range)
    if not 0 < lo <= hi <= 1:
        raise ValueError("need 0 < rho_min <= rho_max <= 1")
    j_min = 0
    while Fraction(1, 2**j_min) > hi:
        j_min += 1
    j_max = j_min
    while Fraction(1, 2 ** (j_max + 1)) >= lo:
        j_max += 1
    if Fraction(1, 2**j_min) < lo:
        raise ValueError("rho_range contains no power of 1/2")
    rng = random.Random(seed ^ 0x5EED)
    return [Fraction(1, 2 ** rng.randint(j_min, j_max)) for _ in range(samples)]


@dataclass(frozen=True)
class SampleRecord:
    index: int
    center: tuple[Fraction, ...]
    radius: Fraction
    kappa: Fraction
    height_bound: int
    size: int
    rank: int
    passed: bool
    hyperplane: Hyperplane | None
    failure: SimplexFailure | None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "center": [fmt_rational(x) for x in self.center],
            "radius": fmt_rational(self.radius),
            "kappa": fmt_rational(self.kappa),
            "height_bound": self.height_bound,
            "size": self.size,
            "rank": self.rank,
            "passed": self.passed,
            "functional": None if self.hyperplane is None else self.hyperplane.to_json(),
            "failure": None if self.failure is None else self.failure.to_json(),
        }


@dataclass
class SweepReport:
    chart: str
    kappa: Fraction
    seed: int
    rho_range: tuple[Fraction, Fraction]
    records: list[SampleRecord] = field(default_factory=list)

    @property
    def samples(self) -> int:
        return len(self.records)

    @property
    def failures(self) -> list[SampleRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def pass_rate(self) -> Fraction:
        return Fraction(self.samples - len(self.failures), self.samples) if self.records else Fraction(1)

    @property
    def worst(self) -> SampleRecord | None:
        if not self.records:
            return None
        return max(self.records, key=lambda r: (r.rank, r.size, -r.index))

    def summary(self) -> dict:
        worst = self.worst
        return {
            "chart": self.chart,
            "kappa": fmt_rational(self.kappa),
            "seed": self.seed,
            "rho_range": [fmt_rational(x) for x in self.rho_range],
            "samples": self.samples,
            "pass_rate": fmt_rational(self.pass_rate),
            "failures": len(self.failures),
            "worst": None if worst is None else worst.to_json(),
        }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in self.records)


def _run_sample(args) -> SampleRecord:
    chart, index, center, radius, kappa, budget = args
    query = SimplexQuery(chart, center, radius, kappa)
    rep = verify(query, budget)
    return SampleRecord(index, query.center, query.radius, query.kappa, query.height_bound,
                        len(rep.points), rep.rank, rep.passed, rep.hyperplane, rep.failure)


def simplex_sweep(chart: Chart, samples: int, rho_range=(Fraction(1, 2**20), 1), kappa=Fraction(1, 10),
                  seed: int = 0, workers: int = 1, budget: int = DEFAULT_BUDGET) -> SweepReport:
    """Run the containment test on seeded (center, radius) samples.

    Records come back in sample order whatever the worker count.
    """
    kappa = as_fraction(kappa)
    rho_range = tuple(as_fraction(x) for x in rho_range)
    centers = halton_centers(chart, samples, seed)
    radii = dyadic_radii(samples, rho_range, seed)
    jobs = [(chart, i, c, r, kappa, budget) for i, (c, r) in enumerate(zip(centers, radii))]
    if workers > 1 and samples > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_sample, jobs, chunksize=max(1, samples // (4 * workers))))
    else:
        records = [_run_sample(j) for j in jobs]
    return SweepReport(chart.spec, kappa, seed, rho_range, records)


@dataclass(frozen=True)
class KappaCalibration:
    """Largest grid kappa passing every sample; an empirical estimate only."""

    chart: str
    kappa: Fraction
    precision: Fraction
    samples: int
    seed: int
    doubled_failures: int  # failures at 2 * kappa on the same samples

    @property
    def doubled_verdict(self) -> str:
        return "fails" if self.doubled_failures else "passes (grid or sample coarseness)"


def kappa_calibrate(chart: Chart, samples: int, precision=Fraction(1, 64), seed: int = 0,
                    rho_range=(Fraction(1, 2**20), 1), kappa_max=Fraction(64), workers: int = 1,
                    budget: int = DEFAULT_BUDGET) -> KappaCalibration:
    if samples < 1:
        raise ValueError("need at least one sample")
    precision, kappa_max = as_fraction(precision), as_fraction(kappa_max)
    if precision <= 0:
        raise ValueError("precision must be positive")

    def passes(m: int) -> bool:
        return not simplex_sweep(chart, samples, rho_range, m * precision, seed, workers, budget).failures

    top = int(kappa_max / precision)
    good, bad = 0, None
    m = 1
    while m <= top:
        if passes(m):
            good = m
            m *= 2
        else:
            bad = m
            break
    if bad is None:
        bad = top + 1
        if good < top and passes(top):
            good = top
    while bad - good > 1:
        mid = (good + bad) // 2
        if passes(mid):
            good = mid
        else:
            bad = mid
    kappa = good * precision
    doubled = simplex_sweep(chart, samples, rho_range, 2 * kappa, seed, workers, budget) if kappa else None
    return KappaCalibration(chart.spec, kappa, precision, samples, seed,
                            len(doubled.failures) if doubled else 0)


def require_contained(report: SimplexReport) -> Hyperplane | None:
    if not report.passed:
        raise SimplexViolation(f"{len(report.points)} points span rank {report.rank}", report.failure)
    return report.hyperplane
