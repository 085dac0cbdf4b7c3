from fractions import Fraction

import pytest

from cyclic_connections.algebra.polynomials import (
    BadDecomposition,
    PolynomialParseError,
    check_decomposition,
    default_decomposition,
    monomial_str,
    parse_decomposition,
    parse_poly,
    poly_terms,
)


def test_parse_poly_terms() -> None:
    w = parse_poly("x^3 + 1/2*y^2", ["x", "y"])
    assert poly_terms(w) == {(3, 0): Fraction(1), (0, 2): Fraction(1, 2)}


def test_parse_poly_reports_column_of_bad_character() -> None:
    with pytest.raises(PolynomialParseError) as e:
        parse_poly("x^3 $ y", ["x", "y"])
    assert e.value.column == 5


def test_parse_poly_rejects_undeclared_variable() -> None:
    with pytest.raises(PolynomialParseError):
        parse_poly("x^3 + z", ["x"])


def test_parse_decomposition() -> None:
    w = parse_poly("x^3+y^2", ["x", "y"])
    dec = parse_decomposition("x: x^2; y: y", ["x", "y"], w)
    assert [poly_terms(p) for p in dec] == [{(2, 0): Fraction(1)}, {(0, 1): Fraction(1)}]


def test_bad_decomposition() -> None:
    w = parse_poly("x^2", ["x"])
    with pytest.raises(BadDecomposition):
        parse_decomposition("x: x^2", ["x"], w)


def test_default_decomposition_sums_back_to_w() -> None:
    w = parse_poly("x^3 + x*y + y^2", ["x", "y"])
    check_decomposition(w, default_decomposition(w))


def test_monomial_str() -> None:
    assert monomial_str((2, 1), ["x", "y"]) == "x^2*y"
    assert monomial_str((0, 0), ["x", "y"]) == "1"
