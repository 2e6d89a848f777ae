from fractions import Fraction as F
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from intrinsic_lab.arith import (
    RationalPoint,
    binom,
    exact_det,
    exact_rank,
    farey_range,
    floor_scaled_power,
    integer_kernel,
    iroot,
    reduce,
    transpose,
)
from intrinsic_lab.errors import IdenticallyZero
from intrinsic_lab.polys import isolate_roots, refine_root


def test_reduce_examples():
    p = reduce((F(1, 2), F(1, 4)))
    assert (p.numerators, p.denominator, p.height) == ((2, 1), 4, 4)
    assert reduce((0, 0)) == RationalPoint(1, (0, 0))
    assert reduce((F(2, 6), F(1, 3))) == RationalPoint(3, (1, 1))


def test_rational_point_rejects_non_primitive():
    with pytest.raises(ValueError):
        RationalPoint(4, (2, 2))


def test_rank_examples():
    assert exact_rank([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3
    assert exact_rank([[1, 2], [2, 4]]) == 1
    rows = [[1, 0, 0], [1, F(1, 2), F(1, 4)], [1, F(1, 3), F(1, 9)]]
    assert exact_rank(rows) == 3
    assert exact_det(rows) == F(-1, 36)


def test_det_examples():
    for n in range(1, 6):
        eye = [[int(i == j) for j in range(n)] for i in range(n)]
        assert exact_det(eye) == 1
    assert exact_det([[1, 1, 5], [2, 2, 7], [3, 3, 9]]) == 0


def test_integer_det_at_least_one():
    m = [[2, 1, 7], [3, 5, 1], [4, 4, 4]]
    det = exact_det(m)
    assert det != 0 and abs(det) >= 1 and det.denominator == 1


def test_isolate_roots_examples():
    (iv,) = isolate_roots((F(-2), F(0), F(1)), F(0), F(2))
    fine = refine_root((F(-2), F(0), F(1)), iv, F(1, 10**6))
    assert fine.hi - fine.lo < F(1, 10**6)
    assert fine.lo ** 2 <= 2 <= fine.hi ** 2
    assert isolate_roots((F(1), F(0), F(1)), F(-10), F(10)) == []
    # (x - 1/3)(x - 1/2) = x^2 - 5/6 x + 1/6
    ivs = isolate_roots((F(1, 6), F(-5, 6), F(1)), F(0), F(1))
    assert len(ivs) == 2
    assert ivs[0].hi <= ivs[1].lo
    assert ivs[0].lo <= F(1, 3) <= ivs[0].hi and ivs[1].lo <= F(1, 2) <= ivs[1].hi


def test_isolate_roots_zero_polynomial():
    with pytest.raises(IdenticallyZero):
        isolate_roots((F(0),), F(0), F(1))


def test_binom_examples():
    # [a, b] = C(a + b, a): [k-1, 1] at k = 2 and [1, 2]
    assert binom(1, 1) == 2
    assert binom(1, 2) == 3
    assert binom(0, 5) == 1


def test_pascal_identity_full_grid():
    for n in range(1, 21):
        for m in range(1, 21):  # boundary row and column are all ones
            assert binom(n, m) == binom(n - 1, m) + binom(n, m - 1)


def test_iroot_and_scaled_power():
    assert iroot(10**12, 3) == 10**4
    assert iroot(10**12 - 1, 3) == 10**4 - 1
    # floor(1 * (1/64)^(-1/2)) = 8 and floor((1/10) * 2^20) exactly
    assert floor_scaled_power(F(1), F(1, 64), 1, 2) == 8
    assert floor_scaled_power(F(1, 10), F(1, 2**20), 1, 1) == 104857


def test_farey_range_matches_direct_listing():
    got = list(farey_range(F(1, 3), F(1, 2), 7))
    want = sorted({F(p, q) for q in range(1, 8) for p in range(q + 1) if F(1, 3) <= F(p, q) <= F(1, 2)})
    assert [F(p, q) for p, q in got] == want


def test_integer_kernel_annihilates():
    m = [[1, 0, 0], [1, F(1, 2), F(1, 4)]]
    for v in integer_kernel(m):
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


# ---------------------------------------------------------------- properties

small = st.integers(-9, 9)
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=30)


def _cofactor_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _cofactor_det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(n))


def _leibniz_det(m):
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i, j in enumerate(perm):
            prod *= m[i][j]
        total += (-1) ** inv * prod
    return total


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_cofactor_expansion(m):
    assert exact_det(m) == _cofactor_det(m) == _leibniz_det(m)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(rationals, min_size=c, max_size=c), min_size=r, max_size=r))))
def test_rank_equals_rank_of_transpose(m):
    assert exact_rank(m) == exact_rank(transpose(m))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.fractions(max_denominator=10**6), min_size=1, max_size=5))
def test_reduce_idempotent(v):
    p = reduce(v)
    assert reduce(p.coords()) == p
    assert p.coords() == tuple(v)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(rationals, min_size=n, max_size=n)), st.data())
def test_upper_triangular_det_is_diagonal_product(diag, data):
    n = len(diag)
    m = [[diag[i] if i == j else (data.draw(rationals) if j > i else 0) for j in range(n)] for i in range(n)]
    prod = F(1)
    for x in diag:
        prod *= x
    assert exact_det(m) == prod
