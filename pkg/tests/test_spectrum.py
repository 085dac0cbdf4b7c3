from fractions import Fraction

import pytest
import sympy

from cyclic_connections.algebra.polynomials import parse_poly
from cyclic_connections.homology.series_matrix import SeriesMatrix
from cyclic_connections.homology.spectrum import (
    IrrationalEigenvalues,
    NotRegularSingular,
    psi_filtration,
    rational_eigenvalues,
    residue_spectrum,
    residue_spectrum_from_matrix,
    saturate_lattice,
    tate_twist_matrix,
)


def test_spectrum_cubic(cubic) -> None:
    report = residue_spectrum(cubic)
    assert report.milnor == 2
    assert report.spectrum_shifted == [Fraction(-1, 6), Fraction(1, 6)]
    assert report.spectrum_classical == [Fraction(1, 3), Fraction(2, 3)]
    assert report.saturation_steps == 0
    assert report.to_json()["residues"] == [[Fraction(-1, 6), 1], [Fraction(1, 6), 1]]


@pytest.mark.parametrize("text, variables, classical", [
    ("x^2", ["x"], [Fraction(1, 2)]),
    ("x^2 + y^2", ["x", "y"], [Fraction(1)]),
])
def test_spectrum_of_quadrics(text, variables, classical) -> None:
    report = residue_spectrum(parse_poly(text, variables))
    assert report.spectrum_shifted == [Fraction(0)]
    assert report.spectrum_classical == classical


def test_spectrum_two_variables() -> None:
    report = residue_spectrum(parse_poly("x^3 + y^2", ["x", "y"]))
    assert report.spectrum_shifted == [Fraction(-1, 6), Fraction(1, 6)]


def test_spectrum_is_symmetric_under_twist(cubic) -> None:
    report = residue_spectrum(cubic)
    twisted = residue_spectrum_from_matrix(tate_twist_matrix(report.connection_matrix, 2))
    assert twisted.spectrum_shifted == [o - 1 for o in report.spectrum_shifted]


def test_saturation_enlarges_lattice() -> None:
    A = SeriesMatrix.from_dicts([[{}, {-2: 1}], [{}, {}]])
    lattice, steps = saturate_lattice(SeriesMatrix.identity(2), A)
    assert steps == 1
    assert lattice.dim == 2
    assert lattice.index == -1


def test_saturation_of_simple_pole() -> None:
    A = SeriesMatrix.from_dicts([[{-1: Fraction(1, 3)}]])
    lattice, steps = saturate_lattice(SeriesMatrix.identity(1), A)
    assert steps == 0
    assert lattice.index == 0


def test_saturation_of_irregular_pole() -> None:
    A = SeriesMatrix.from_dicts([[{-2: 1}]])
    with pytest.raises(NotRegularSingular):
        saturate_lattice(SeriesMatrix.identity(1), A, cap=3)


def test_rational_eigenvalues() -> None:
    assert rational_eigenvalues(sympy.Matrix([[0, 1], [0, 0]])) == [0, 0]
    with pytest.raises(IrrationalEigenvalues):
        rational_eigenvalues(sympy.Matrix([[0, 2], [1, 0]]))


def test_psi_filtration_cubic() -> None:
    psi = psi_filtration([Fraction(-1, 6), Fraction(1, 6)])
    assert (psi.at(-1), psi.at(0), psi.at(1)) == (2, 1, 0)
    assert psi.at(-10) == 2
    assert psi.at(10) == 0


def test_psi_filtration_quadric() -> None:
    psi = psi_filtration([Fraction(0)])
    assert (psi.at(0), psi.at(1)) == (1, 0)


def test_psi_filtration_shifts_with_twist() -> None:
    orders = [Fraction(-1, 6), Fraction(1, 6)]
    plain, twisted = psi_filtration(orders), psi_filtration(orders, twist=2)
    for n in range(-3, 3):
        assert twisted.at(n + 1) == plain.at(n)
