"""scikit-learn style wrappers around the experiment drivers.

Inputs are object arrays rather than float matrices: a row is a target
specifier (``"phi"``, ``"x^2-2,[1,2]"``) or a (center..., radius) tuple of
exact rationals.  Hyperparameters live in ``__init__`` so ``get_params`` /
``set_params`` and ``sklearn.base.clone`` behave as usual.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .approx import (
    EnumerationCache,
    best_approximations,
    convergent_records,
    default_domain,
    exponent_estimate,
    reference_exponent,
)
from .charts import DEFAULT_BUDGET
from .simplex import SimplexQuery, kappa_calibrate, verify
from .targets import as_target
from .validation import check_box, check_chart, check_positive_int, check_rational, check_seed


def _rows(X) -> list:
    if isinstance(X, (str, Fraction, int)):
        raise ValueError("expected a sequence of samples, got a single value")
    rows = list(X)
    if not rows:
        raise ValueError("need at least one sample")
    return rows


class IntrinsicExponentEstimator(TransformerMixin, BaseEstimator):
    """Tail exponent of intrinsic best approximations, one target per row.

    Without an explicit ``domain`` each target uses the chart domain when it
    lies inside, else a unit window around the target.

    ``fit`` runs every training target and keeps the median tail exponent as
    ``exponent_``; ``predict`` returns the per-target tail exponents and
    ``transform`` the feature rows (slope, tail_slope, tail_inf, tail_sup).
    """

    def __init__(self, chart="cn:2", height=10**4, method="auto", tail=Fraction(1, 2), domain=None,
                 budget=DEFAULT_BUDGET):
        self.chart = chart
        self.height = height
        self.method = method
        self.tail = tail
        self.domain = domain
        self.budget = budget

    def _setup(self):
        chart = check_chart(self.chart)
        if self.domain is not None:
            chart = chart.with_domain(check_box(self.domain, chart.k, "domain"))
        T = check_positive_int(self.height, "height", minimum=2)
        if self.method not in ("auto", "enumerate", "convergent"):
            raise ValueError(f"method must be auto, enumerate or convergent, got {self.method!r}")
        return chart, T

    def _records(self, chart, T, target, cache):
        use_cf = self.method == "convergent" or (
            self.method == "auto" and chart.k == 1 and chart.param_height_bound.kind == "root")
        if use_cf:
            return convergent_records(chart, target, T, budget=self.budget)
        return best_approximations(chart, target, T, cache, self.budget)

    def _estimates(self, X):
        chart, T = self._setup()
        cache = EnumerationCache(self.budget)
        out = []
        for row in _rows(X):
            target = as_target(row)
            if target.k != chart.k:
                raise ValueError(f"target {target.spec()} has {target.k} coordinates, chart has {chart.k}")
            local = chart if self.domain is not None else default_domain(chart, target)
            records = self._records(local, T, target, cache)
            out.append(exponent_estimate(records, reference_exponent(chart), check_rational(self.tail, "tail")))
        return out

    def fit(self, X, y=None):
        est = self._estimates(X)
        self.estimates_ = est
        self.exponent_ = float(np.median([e.tail_slope for e in est]))
        self.c_reference_ = reference_exponent(check_chart(self.chart))
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "exponent_")
        return np.array([e.tail_slope for e in self._estimates(X)])

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "exponent_")
        return np.array([[e.slope, e.tail_slope, e.tail_inf, e.tail_sup] for e in self._estimates(X)])

    def score(self, X, y=None) -> float:
        """Negative mean distance of the predicted exponents from y (default: the fitted median)."""
        pred = self.predict(X)
        ref = np.full(len(pred), self.exponent_) if y is None else np.asarray(y, dtype=float)
        return -float(np.mean(np.abs(pred - ref)))


def _query_rows(X, k: int) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    out = []
    for row in _rows(X):
        row = list(row)
        if len(row) != k + 1:
            raise ValueError(f"each row needs {k} center coordinates and a radius, got {len(row)} values")
        values = [check_rational(v, "row entry") for v in row]
        out.append((tuple(values[:k]), values[k]))
    return out


class SimplexVerifier(TransformerMixin, BaseEstimator):
    """Containment test per ball; rows are (center..., radius).

    ``predict`` gives True where the low-height rationals lie in one affine
    hyperplane; ``transform`` gives (height bound, points, rank).
    """

    def __init__(self, chart="cn:2", kappa=Fraction(1, 10), budget=DEFAULT_BUDGET):
        self.chart = chart
        self.kappa = kappa
        self.budget = budget

    def fit(self, X=None, y=None):
        self.chart_ = check_chart(self.chart)
        self.kappa_ = check_rational(self.kappa, "kappa", nonnegative=True)
        self.n_features_in_ = self.chart_.k + 1
        return self

    def _reports(self, X):
        check_is_fitted(self, "chart_")
        for center, radius in _query_rows(X, self.chart_.k):
            query = SimplexQuery(self.chart_, center, radius, self.kappa_)
            yield query, verify(query, self.budget)

    def predict(self, X) -> np.ndarray:
        return np.array([rep.passed for _, rep in self._reports(X)], dtype=bool)

    def transform(self, X) -> np.ndarray:
        return np.array([[q.height_bound, len(rep.points), rep.rank] for q, rep in self._reports(X)],
                        dtype=np.int64)

    def score(self, X, y=None) -> float:
        """Pass rate, or accuracy against y when given."""
        pred = self.predict(X)
        return float(np.mean(pred)) if y is None else float(np.mean(pred == np.asarray(y, dtype=bool)))


class KappaCalibrator(BaseEstimator):
    """Largest kappa on a 1/precision grid passing every seeded sample."""

    def __init__(self, chart="cn:2", samples=200, precision=Fraction(1, 64), seed=0,
                 rho_min=Fraction(1, 2**20), workers=1, budget=DEFAULT_BUDGET):
        self.chart = chart
        self.samples = samples
        self.precision = precision
        self.seed = seed
        self.rho_min = rho_min
        self.workers = workers
        self.budget = budget

    def fit(self, X=None, y=None):
        chart = check_chart(self.chart)
        cal = kappa_calibrate(chart, check_positive_int(self.samples, "samples"),
                              check_rational(self.precision, "precision", positive=True), check_seed(self.seed),
                              (check_rational(self.rho_min, "rho_min", positive=True, upper=Fraction(1)),
                               Fraction(1)),
                              workers=check_positive_int(self.workers, "workers"), budget=self.budget)
        self.calibration_ = cal
        self.kappa_ = cal.kappa
        self.verifier_ = SimplexVerifier(chart, cal.kappa, self.budget).fit()
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "kappa_")
        return self.verifier_.predict(X)
