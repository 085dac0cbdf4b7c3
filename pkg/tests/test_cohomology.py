from fractions import Fraction

import pytest

from cyclic_connections.algebra.polynomials import parse_poly
from cyclic_connections.homology.cohomology import (
    NotADifferential,
    dense_cohomology_dims,
    derham_cohomology,
    derham_complex,
    expected_dense_dims,
    hp_table,
    truncated_cyclic_complex,
    u_total_cohomology,
)
from cyclic_connections.homology.series_matrix import SeriesMatrix


def test_zero_differential() -> None:
    pres = u_total_cohomology(SeriesMatrix.zeros(2, 2), [0, 1])
    assert pres.free == {0: 1, 1: 1}
    assert pres.torsion == {0: [], 1: []}
    assert pres.free_rank == 2


def test_torsion_from_multiplication_by_u() -> None:
    D = SeriesMatrix.from_dicts([[{}, {1: 1}], [{}, {}]])
    pres = u_total_cohomology(D, [0, 1])
    assert pres.free == {0: 0, 1: 0}
    assert pres.torsion == {0: [1], 1: []}
    assert pres.to_json()["torsion"] == {"0": [1], "1": []}


@pytest.mark.parametrize("N", [1, 2, 4])
def test_dense_oracle_agrees(N) -> None:
    D = SeriesMatrix.from_dicts([
        [{}, {1: 1}, {}, {}],
        [{}, {}, {}, {}],
        [{}, {2: 3}, {}, {0: 1}],
        [{}, {}, {}, {}],
    ])
    degrees = [0, 1, 0, 1]
    pres = u_total_cohomology(D, degrees)
    assert dense_cohomology_dims(D, degrees, N) == expected_dense_dims(pres, N)


def test_degree_check() -> None:
    D = SeriesMatrix.from_dicts([[{}, {}], [{0: 1}, {}]])
    with pytest.raises(NotADifferential):
        u_total_cohomology(D, [0, 0])


def test_truncated_cyclic_complex_is_a_complex(lam) -> None:
    cx = truncated_cyclic_complex(lam, 2)
    assert cx.dim == len(cx.labels()) == len(cx.degrees)
    assert (cx.D @ cx.D).is_zero()


def test_hp_table_rows(lam) -> None:
    table = hp_table(lam, 2)
    assert [row["max_length"] for row in table] == [0, 1, 2]
    assert all("free" in row for row in table)


def test_derham_cubic() -> None:
    w = parse_poly("x^3", ["x"])
    window = derham_complex(w)
    assert window.weight == Fraction(2)
    pres = derham_cohomology(w)
    assert pres.free == {0: 0, 1: 2}
    assert pres.torsion == {0: [], 1: []}


def test_derham_two_variables() -> None:
    pres = derham_cohomology(parse_poly("x^2 + y^2", ["x", "y"]), Fraction(2))
    assert pres.free == {0: 0, 1: 0, 2: 1}
