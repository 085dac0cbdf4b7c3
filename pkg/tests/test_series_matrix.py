from fractions import Fraction

import pytest
import sympy

from cyclic_connections.algebra.scalars import LaurentSeries
from cyclic_connections.homology.series_matrix import (
    PrecisionExhausted,
    SeriesMatrix,
    SingularMatrix,
    column_basis,
    snf_over_series,
)


def test_snf_of_rank_one_diagonal() -> None:
    snf = snf_over_series(SeriesMatrix.from_dicts([[{1: 1}, {}], [{}, {}]]))
    assert snf.rank == 1
    assert snf.exponents == [1]


def test_snf_of_identity() -> None:
    snf = snf_over_series(SeriesMatrix.identity(2))
    assert snf.rank == 2
    assert snf.invariant_factors == [0, 0]


def test_snf_transforms_diagonalize() -> None:
    M = SeriesMatrix.from_dicts([[{2: 1}, {3: 1}], [{}, {1: 1}]])
    snf = snf_over_series(M)
    assert snf.exponents == [1, 2]
    assert snf.left @ M @ snf.right == SeriesMatrix.from_dicts([[{1: 1}, {}], [{}, {2: 1}]])


def test_strict_snf_refuses_window_zeros() -> None:
    M = SeriesMatrix([[LaurentSeries.zero(3)]])
    assert snf_over_series(M).rank == 0
    with pytest.raises(PrecisionExhausted):
        snf_over_series(M, strict=True)


def test_inverse_of_unipotent() -> None:
    M = SeriesMatrix.from_dicts([[{0: 1}, {1: 1}], [{}, {0: 1}]])
    assert M.inverse() == SeriesMatrix.from_dicts([[{0: 1}, {1: -1}], [{}, {0: 1}]])


def test_inverse_of_singular_matrix() -> None:
    with pytest.raises(SingularMatrix):
        SeriesMatrix.from_dicts([[{1: 1}, {}], [{}, {}]]).inverse()


def test_column_basis_index() -> None:
    M = SeriesMatrix.from_dicts([[{-1: 1}, {0: 1}, {}], [{}, {}, {0: 1}]])
    basis, pivots = column_basis(M)
    assert basis.shape == (2, 2)
    assert sum(pivots) == -1


def test_matrix_calculus() -> None:
    A = SeriesMatrix.from_dicts([[{-1: Fraction(1, 2)}, {2: 1}]])
    assert A.ddu() == SeriesMatrix.from_dicts([[{-2: Fraction(-1, 2)}, {1: 2}]])
    assert A.shift(1).valuation() == 0
    assert A.transpose().shape == (2, 1)
    assert A.coefficient(-1)[0, 0] == sympy.Rational(1, 2)
    assert A.to_json() == [["1/2*u^-1", "u^2"]]
