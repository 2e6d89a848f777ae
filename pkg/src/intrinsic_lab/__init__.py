"""Intrinsic Diophantine approximation on manifolds, computed exactly."""

__version__ = "0.1.0"

from .arith import RationalPoint, exact_det, exact_rank, reduce
from .charts import (
    Chart,
    bruteforce_intrinsic,
    chart_from_spec,
    curve_cn,
    enumerate_atlas,
    enumerate_rationals,
    sphere_chart,
    veronese_chart,
)
from .constants import N_bruteforce, c_table, dirichlet_constants, veronese_condition
from .errors import (
    BudgetExceeded,
    IllegalMove,
    IntrinsicLabError,
    InvalidPair,
    SimplexViolation,
)

__all__ = [
    "__version__",
    "BudgetExceeded",
    "Chart",
    "IllegalMove",
    "IntrinsicLabError",
    "InvalidPair",
    "N_bruteforce",
    "RationalPoint",
    "SimplexViolation",
    "bruteforce_intrinsic",
    "c_table",
    "chart_from_spec",
    "curve_cn",
    "dirichlet_constants",
    "enumerate_atlas",
    "enumerate_rationals",
    "exact_det",
    "exact_rank",
    "reduce",
    "sphere_chart",
    "veronese_chart",
    "veronese_condition",
]
