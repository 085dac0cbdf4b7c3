from fractions import Fraction

import pytest

from cyclic_connections.algebra.scalars import LaurentSeries, ZeroLeadingTerm, fraction_str, to_fraction


def test_to_fraction_accepts_strings_and_ints() -> None:
    assert to_fraction("3/4") == Fraction(3, 4)
    assert to_fraction(2) == Fraction(2)
    assert fraction_str(Fraction(-1, 6)) == "-1/6"
    assert fraction_str(Fraction(4, 2)) == "2"


def test_zero_coefficients_and_untracked_powers_are_dropped() -> None:
    s = LaurentSeries({-1: 0, 0: 1, 3: 5}, prec=3)
    assert s.coeffs == {0: Fraction(1)}
    assert s.valuation() == 0


def test_coefficient_outside_window_raises() -> None:
    s = LaurentSeries({0: 1}, prec=2)
    assert s.coeff(1) == 0
    with pytest.raises(ValueError):
        s.coeff(2)


def test_render() -> None:
    s = LaurentSeries({-1: Fraction(-1, 6), 1: Fraction(1, 3)})
    assert str(s) == "-1/6*u^-1 + 1/3*u"
    assert str(LaurentSeries.zero()) == "0"
    assert str(LaurentSeries({1: 1})) == "u"


def test_invert_geometric_series() -> None:
    a = LaurentSeries({0: 1, 1: 1}, prec=3)
    b = a.invert()
    assert b.prec == 3
    assert b.coeffs == {0: Fraction(1), 1: Fraction(-1), 2: Fraction(1)}
    equal, prec = (a * b).equal_on_window(1)
    assert equal
    assert prec == 3


def test_invert_exact_single_term() -> None:
    assert LaurentSeries({2: 3}).invert() == LaurentSeries({-2: Fraction(1, 3)})


def test_invert_zero_raises() -> None:
    with pytest.raises(ZeroLeadingTerm):
        LaurentSeries.zero(4).invert()


def test_ddu_and_shift() -> None:
    s = LaurentSeries({-1: 1, 2: 1})
    assert s.ddu() == LaurentSeries({-2: -1, 1: 2})
    assert s.shift(1) == LaurentSeries({0: 1, 3: 1})
    assert LaurentSeries({0: 7}).ddu().is_zero()


def test_sum_keeps_the_smaller_window() -> None:
    s = LaurentSeries({0: 1}, prec=4) + LaurentSeries({1: 1}, prec=2)
    assert s.prec == 2
    assert s.coeffs == {0: Fraction(1), 1: Fraction(1)}
