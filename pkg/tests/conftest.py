import pytest
from fractions import Fraction


@pytest.fixture
def F():
    return Fraction
