from fractions import Fraction

import pytest

from cyclic_connections.algebra.polynomials import parse_poly
from cyclic_connections.algebra.scalars import LaurentSeries
from cyclic_connections.homology.reduction import connection_matrix, gd_reduce, stable_jacobian_basis
from cyclic_connections.homology.series_matrix import SeriesMatrix
from cyclic_connections.mf.aw import NotCritical, NotIsolatedOrTruncationTooLow
from cyclic_connections.mf.derham import Form


def test_stable_jacobian_basis(cubic) -> None:
    assert stable_jacobian_basis(cubic) == [(0,), (1,)]
    assert stable_jacobian_basis(parse_poly("x^3 + y^2", ["x", "y"])) == [(0, 0), (1, 0)]


def test_stable_jacobian_basis_gives_up_on_non_isolated_points() -> None:
    with pytest.raises(NotIsolatedOrTruncationTooLow):
        stable_jacobian_basis(parse_poly("x*y^2", ["x", "y"]))
    with pytest.raises(NotCritical):
        stable_jacobian_basis(parse_poly("x + x^3", ["x"]))


def test_gradient_multiples_vanish(cubic) -> None:
    reduced = gd_reduce({(2,): Fraction(1)}, cubic)
    assert all(c.is_zero() for c in reduced.coords)
    assert str(reduced) == "0"


def test_reduction_picks_up_powers_of_u(cubic) -> None:
    reduced = gd_reduce({(3,): Fraction(1)}, cubic)
    assert reduced.coords == [LaurentSeries({1: Fraction(1, 3)}), LaurentSeries.zero()]
    reduced = gd_reduce({(4,): Fraction(1)}, cubic)
    assert reduced.coords == [LaurentSeries.zero(), LaurentSeries({1: Fraction(2, 3)})]
    assert reduced.steps == 2


def test_reduction_of_basis_form(cubic) -> None:
    reduced = gd_reduce(Form(["x"], {((0,), (0,)): 1}), cubic)
    assert reduced.coords == [LaurentSeries.one(), LaurentSeries.zero()]
    assert reduced.to_json()["basis"] == ["1", "x"]


def test_reduction_for_quadric(quadric) -> None:
    assert gd_reduce({(2,): Fraction(1)}, quadric).coords == [LaurentSeries({1: Fraction(1, 2)})]


def test_reduction_rejects_lower_degree_forms() -> None:
    w = parse_poly("x^3 + y^2", ["x", "y"])
    with pytest.raises(ValueError):
        gd_reduce(Form(["x", "y"], {((1, 0), (0,)): 1}), w)


def test_connection_matrix_cubic(cubic) -> None:
    assert connection_matrix(cubic) == SeriesMatrix.from_dicts([
        [{-1: Fraction(-1, 6)}, {}],
        [{}, {-1: Fraction(1, 6)}],
    ])
    assert connection_matrix(cubic, "classical") == SeriesMatrix.from_dicts([
        [{-1: Fraction(1, 3)}, {}],
        [{}, {-1: Fraction(2, 3)}],
    ])


@pytest.mark.parametrize("text, variables", [("x^2", ["x"]), ("x^2 + y^2", ["x", "y"])])
def test_connection_matrix_of_quadrics_vanishes(text, variables) -> None:
    assert connection_matrix(parse_poly(text, variables)).is_zero()


def test_connection_matrix_two_variables() -> None:
    A = connection_matrix(parse_poly("x^3 + y^2", ["x", "y"]))
    assert A == SeriesMatrix.from_dicts([[{-1: Fraction(-1, 6)}, {}], [{}, {-1: Fraction(1, 6)}]])


def test_unknown_convention(cubic) -> None:
    with pytest.raises(ValueError):
        connection_matrix(cubic, "hodge")
