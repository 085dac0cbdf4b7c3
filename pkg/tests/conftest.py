import pytest

from cyclic_connections.algebra.polynomials import parse_poly
from cyclic_connections.algebra.superalg import dual_numbers, end_odd_variables, exterior_algebra


@pytest.fixture
def lam():
    return exterior_algebra()


@pytest.fixture
def lam_graded():
    return exterior_algebra(graded=True)


@pytest.fixture
def dual():
    return dual_numbers()


@pytest.fixture
def mat2():
    return end_odd_variables(1)


@pytest.fixture
def cubic():
    return parse_poly("x^3", ["x"])


@pytest.fixture
def quadric():
    return parse_poly("x^2", ["x"])
