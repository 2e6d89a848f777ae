from fractions import Fraction as F

import pytest

from intrinsic_lab.arith import binom
from intrinsic_lab.constants import N_bruteforce, c_table, dirichlet_constants, format_table, veronese_condition
from intrinsic_lab.errors import InvalidPair

PUBLISHED = {
    1: ["2", "1", "2/3", "1/2", "2/5", "1/3"],
    2: ["3/2", "1", "5/6", "3/4", "7/11"],
    3: ["4/3", "1", "6/7", "7/9"],
    4: ["5/4", "1", "7/8"],
    5: ["6/5", "1"],
    6: ["7/6"],
}


def test_dirichlet_constants_examples():
    dc = dirichlet_constants(2, 4)
    assert (dc.n_kd, dc.m_kd, dc.N_kd, dc.c_kd) == (1, 2, 6, F(5, 6))
    dc = dirichlet_constants(3, 3)
    assert (dc.n_kd, dc.m_kd, dc.N_kd, dc.c_kd) == (1, 0, 3, F(4, 3))
    dc = dirichlet_constants(1, 5)
    assert (dc.N_kd, dc.c_kd) == (15, F(2, 5))


@pytest.mark.parametrize("k,d", [(0, 1), (3, 2), (-1, 4)])
def test_invalid_pairs(k, d):
    with pytest.raises(InvalidPair):
        dirichlet_constants(k, d)
    with pytest.raises(InvalidPair):
        N_bruteforce(k, d)


def test_bruteforce_examples():
    assert N_bruteforce(2, 6) == 11
    assert N_bruteforce(3, 5) == 7
    for d in range(1, 11):
        assert N_bruteforce(1, d) == d * (d + 1) // 2


def test_closed_form_matches_bruteforce():
    for d in range(1, 13):
        for k in range(1, d + 1):
            assert dirichlet_constants(k, d).N_kd == N_bruteforce(k, d)


def test_special_cases_and_exactness():
    for d in range(1, 21):
        assert dirichlet_constants(d, d).c_kd == 1 + F(1, d)
        assert dirichlet_constants(1, d).c_kd == F(2, d)
        if d >= 2:
            assert dirichlet_constants(d - 1, d).c_kd == 1
        for k in range(1, d + 1):
            dc = dirichlet_constants(k, d)
            assert dc.c_kd * dc.N_kd == d + 1
            if k < d:
                assert dc.c_kd <= 1


def test_table_published_values():
    table = c_table(6)
    assert len(table) == 21
    for k, row in PUBLISHED.items():
        assert [table[(k, d)] for d in range(k, 7)] == [F(x) for x in row]
    text = format_table(table)
    for row in PUBLISHED.values():
        for cell in row:
            assert cell in text


def test_table_monotone_and_superdiagonal():
    table = c_table(12)
    for d in range(2, 13):
        assert table[(d - 1, d)] == 1
        assert all(table[(k, d)] < table[(k + 1, d)] for k in range(1, d))


def test_veronese_condition_examples():
    vc = veronese_condition(1, 1, 2)
    assert vc.holds and vc.lhs == vc.rhs == 1
    vc = veronese_condition(1, 2, 2)
    assert (vc.lhs, vc.rhs) == (F(1, 2), F(2, 5))
    assert not vc.holds
    for k in range(1, 7):
        for n in range(1, 7):
            assert veronese_condition(k, k, n).holds


def test_veronese_identity_for_big_dimension():
    for k in range(1, 7):
        for n in range(1, 7):
            big = binom(k, n) - 1
            if big < k:
                continue
            assert F(dirichlet_constants(k, big).N_kd) == F(k * n, k + 1) * binom(k, n)


def test_bruteforce_guard():
    with pytest.raises(InvalidPair):
        N_bruteforce(1, 31)
