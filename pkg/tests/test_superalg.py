from fractions import Fraction

import pytest

from cyclic_connections.algebra.superalg import (
    InvalidAlgebra,
    TruncationOverflow,
    build_algebra,
    monomials,
    poly_algebra,
    tensor,
)


def test_exterior_algebra(lam) -> None:
    assert lam.dim == 2
    assert lam.parity == [0, 1]
    eps = lam.index("eps")
    assert lam.mul_basis(eps, eps) == {}
    assert lam.unit_element() == {0: Fraction(1)}


def test_graded_exterior_algebra(lam_graded) -> None:
    assert lam_graded.zdegree == [0, 1]


def test_mat2_products(mat2) -> None:
    assert mat2.dim == 4
    e12, e21, e11 = mat2.index("E12"), mat2.index("E21"), mat2.index("E11")
    assert mat2.mul_basis(e12, e21) == {e11: Fraction(1)}
    assert mat2.mul_basis(e21, e21) == {}
    assert mat2.p(e12) == 1


def test_supercommutator_of_odd_elements(lam) -> None:
    eps = {1: Fraction(1)}
    assert lam.supercommutator(eps, eps) == {}


def test_build_algebra_from_description() -> None:
    alg = build_algebra({
        "name": "lambda-d",
        "basis": ["1", "eps"],
        "parity": [0, 1],
        "unit": "1",
        "mult": [["1", "1", "1", "1"], ["1", "eps", "eps", "1"], ["eps", "1", "eps", "1"]],
        "diff": [["eps", "1", "1"]],
    })
    assert alg.d({1: Fraction(1)}) == {0: Fraction(1)}


def test_build_algebra_rejects_even_differential() -> None:
    with pytest.raises(InvalidAlgebra) as e:
        build_algebra({
            "basis": ["1", "a"],
            "parity": [0, 0],
            "unit": "1",
            "mult": [["1", "1", "1", "1"], ["1", "a", "a", "1"], ["a", "1", "a", "1"], ["a", "a", "1", "1"]],
            "diff": [["a", "a", "1"]],
        })
    assert e.value.axiom == "odd differential"


def test_build_algebra_missing_key() -> None:
    with pytest.raises(InvalidAlgebra):
        build_algebra({"basis": ["1"]})


def test_poly_algebra_overflow() -> None:
    alg = poly_algebra(["x"], 2)
    x = alg.index("x")
    x2 = alg.index("x^2")
    assert alg.mul_basis(x, x) == {x2: Fraction(1)}
    with pytest.raises(TruncationOverflow):
        alg.mul_basis(x, x2)


def test_monomials_sorted_by_degree() -> None:
    assert monomials(2, 1) == [(0, 0), (1, 0), (0, 1)]


def test_tensor_dimension(lam, dual) -> None:
    assert tensor(lam, dual).dim == 4
