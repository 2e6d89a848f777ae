from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from intrinsic_lab.errors import UnknownChart
from intrinsic_lab.validation import (
    check_box,
    check_chart,
    check_fraction_open,
    check_positive_int,
    check_rational,
    check_records,
    check_seed,
)


@pytest.mark.parametrize("text,value", [
    ("1/10", F(1, 10)), ("2^-20", F(1, 2**20)), ("0.125", F(1, 8)), ("1e3", F(1000)),
    ("-3/6", F(-1, 2)), (7, F(7)), (F(2, 3), F(2, 3)),
])
def test_check_rational_accepts(text, value):
    assert check_rational(text) == value


@pytest.mark.parametrize("bad", [0.1, True, "abc", "1/0", None, [1]])
def test_check_rational_rejects(bad):
    with pytest.raises(ValueError):
        check_rational(bad)


def test_check_rational_bounds():
    with pytest.raises(ValueError, match="kappa"):
        check_rational("-1", "kappa", nonnegative=True)
    with pytest.raises(ValueError):
        check_rational("0", positive=True)
    with pytest.raises(ValueError):
        check_rational("2", upper=F(1))
    assert check_rational("0", nonnegative=True) == 0


@given(st.fractions())
def test_check_rational_round_trips_strings(x):
    assert check_rational(str(x)) == x


def test_check_positive_int():
    assert check_positive_int("1e6") == 10**6
    assert check_positive_int("2^16") == 65536
    assert check_positive_int(0, minimum=0) == 0
    for bad in ("1/2", "0", True, "2.5"):
        with pytest.raises(ValueError):
            check_positive_int(bad)


def test_check_seed():
    assert check_seed("7") == 7
    assert check_seed(2**64 - 1) == 2**64 - 1
    with pytest.raises(ValueError):
        check_seed(2**64)
    with pytest.raises(ValueError):
        check_seed(-1)


def test_check_chart():
    chart = check_chart("cn:2")
    assert check_chart(chart) is chart
    with pytest.raises(UnknownChart):
        check_chart("torus:2")
    with pytest.raises(UnknownChart):
        check_chart(3)


def test_check_box():
    assert check_box("-1..1", 2) == ((F(-1), F(1)), (F(-1), F(1)))
    assert check_box("0..1/2,-1/3..1", 2) == ((F(0), F(1, 2)), (F(-1, 3), F(1)))
    assert check_box(None, 3) is None
    with pytest.raises(ValueError):
        check_box("1..0", 1)
    with pytest.raises(ValueError):
        check_box("0:1", 1)


def test_check_records_and_open_fraction():
    class R:
        def __init__(self, h):
            self.height = h

    assert len(check_records([R(1), R(3)])) == 2
    with pytest.raises(ValueError):
        check_records([R(3), R(3)])
    assert check_fraction_open("1/8", "beta") == F(1, 8)
    for bad in ("0", "1", "3/2"):
        with pytest.raises(ValueError):
            check_fraction_open(bad, "beta")
