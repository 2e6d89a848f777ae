"""The intrinsic Dirichlet exponent c(k, d) and the quantities around it.

d is written greedily as [k-1,1] + [k-1,2] + ... + [k-1,n] + m with n
maximal; then N = sum j*[k-1,j] + (n+1)*m and c(k,d) = (d+1)/N.  N is
also the least total degree of a derivative of the determinant function
det[Phi(s_1) ... Phi(s_{d+1})] that can survive on the diagonal, which
:func:`N_bruteforce` recomputes by a direct minimization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import binom
from .errors import InvalidPair


def _check_pair(k: int, d: int) -> None:
    if not (isinstance(k, int) and isinstance(d, int)) or k < 1 or d < k:
        raise InvalidPair(f"need integers 1 <= k <= d, got k={k!r}, d={d!r}")


@dataclass(frozen=True)
class DirichletConstants:
    k: int
    d: int
    n_kd: int
    m_kd: int
    N_kd: int
    c_kd: Fraction

    @property
    def exponent(self) -> Fraction:
        """N/(d+1) = 1/c, the power of 1/rho bounding the heights in a simplex query."""
        return Fraction(self.N_kd, self.d + 1)


def dirichlet_constants(k: int, d: int) -> DirichletConstants:
    _check_pair(k, d)
    rest = d
    n = 0
    N = 0
    while rest >= binom(k - 1, n + 1):
        n += 1
        cap = binom(k - 1, n)
        rest -= cap
        N += n * cap
    N += (n + 1) * rest
    return DirichletConstants(k, d, n, rest, N, Fraction(d + 1, N))


def N_bruteforce(k: int, d: int) -> int:
    """min sum_j j*n_j over 0 <= n_j <= [k-1, j], sum_j n_j = d + 1.

    Bounded-knapsack dynamic program over degrees j = 0, 1, ..., d; it never
    looks at the greedy decomposition.  Degrees above d are never needed since
    every capacity is at least one.
    """
    _check_pair(k, d)
    if d > 30:
        raise InvalidPair("N_bruteforce is guarded to d <= 30")
    target = d + 1
    inf = float("inf")
    best = [0] + [inf] * target  # best[s]: least cost for s chosen multi-indices
    for j in range(0, d + 1):
        cap = binom(k - 1, j)
        nxt = list(best)
        for s in range(target + 1):
            if best[s] == inf:
                continue
            for take in range(1, min(cap, target - s) + 1):
                cost = best[s] + j * take
                if cost < nxt[s + take]:
                    nxt[s + take] = cost
        best = nxt
    return int(best[target])


@dataclass(frozen=True)
class VeroneseCondition:
    k: int
    d: int
    n: int
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def veronese_condition(k: int, d: int, n: int) -> VeroneseCondition:
    """Compare (1/n)(d+1)/N_{k,d} with [d,n]/N_{k,[d,n]-1} exactly.

    Equality is the criterion for the image of a maximally approximable
    k-manifold in R^d under the degree-n Veronese map to stay maximally
    approximable.
    """
    _check_pair(k, d)
    if n < 1:
        raise InvalidPair("Veronese degree n must be >= 1")
    lhs = Fraction(1, n) * dirichlet_constants(k, d).c_kd
    big_d = binom(d, n) - 1
    rhs = Fraction(binom(d, n), dirichlet_constants(k, big_d).N_kd)
    return VeroneseCondition(k, d, n, lhs, rhs)


def c_table(d_max: int) -> dict[tuple[int, int], Fraction]:
    """c(k, d) for 1 <= k <= d <= d_max, keyed by (k, d)."""
    if d_max < 1:
        raise InvalidPair("d_max must be >= 1")
    return {(k, d): dirichlet_constants(k, d).c_kd for d in range(1, d_max + 1) for k in range(1, d + 1)}


def format_table(table: dict[tuple[int, int], Fraction]) -> str:
    d_max = max(d for _, d in table)
    width = max(len(_fmt(v)) for v in table.values()) + 1
    lines = ["k\\d" + "".join(f"{d:>{width}}" for d in range(1, d_max + 1))]
    for k in range(1, d_max + 1):
        cells = [(_fmt(table[(k, d)]) if (k, d) in table else "") for d in range(1, d_max + 1)]
        lines.append(f"{k:<3}" + "".join(f"{c:>{width}}" for c in cells))
    return "\n".join(lines)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
