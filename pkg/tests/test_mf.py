from fractions import Fraction

import pytest

from cyclic_connections.algebra.polynomials import BadDecomposition, parse_poly, poly_terms
from cyclic_connections.algebra.superalg import E_MARK, TruncationOverflow, monomials
from cyclic_connections.chains.identities import FAIL
from cyclic_connections.chains.words import Sector, word_window
from cyclic_connections.mf.aw import (
    NotCritical,
    NotIsolatedOrTruncationTooLow,
    build_Aw,
    jacobian_basis,
    quasi_homogeneous_weights,
    validate_w,
)
from cyclic_connections.mf.derham import (
    Form,
    FormSeries,
    check_form_identity,
    dw_d,
    hkr_eps,
    twisted_diff,
    w_d_over_u,
)
from cyclic_connections.mf.pipeline import (
    MF_SUITES,
    CompositeCheck,
    EpsCheck,
    composite_terms,
    run_mf_suites,
    surjectivity_check,
)

XY = ["x", "y"]


@pytest.fixture
def aw_quadric(quadric):
    return build_Aw(quadric)


def test_build_Aw_dimension(aw_quadric) -> None:
    assert aw_quadric.max_deg == 4
    assert aw_quadric.algebra.dim == 5 * 4
    assert aw_quadric.validation.milnor == 1
    assert aw_quadric.algebra.mul(aw_quadric.Dw, aw_quadric.Dw) == aw_quadric.w_element


def test_build_Aw_rejects_wrong_decomposition(quadric) -> None:
    with pytest.raises(BadDecomposition):
        build_Aw(quadric, [parse_poly("x^2", ["x"])])


def test_validate_w_needs_a_critical_point() -> None:
    with pytest.raises(NotCritical):
        validate_w(parse_poly("x + x^2", ["x"]), 4)
    with pytest.raises(NotCritical):
        validate_w(parse_poly("x^2 + 1", ["x"]), 4)


def test_validate_w_detects_non_isolated_point() -> None:
    with pytest.raises(NotIsolatedOrTruncationTooLow):
        validate_w(parse_poly("x*y^2", XY), 4)


def test_jacobian_basis_and_weights() -> None:
    w = parse_poly("x^3 + y^2", XY)
    assert jacobian_basis(w, 3) == [(0, 0), (1, 0)]
    assert validate_w(w, 3).milnor == 2
    assert quasi_homogeneous_weights(w) == [Fraction(1, 3), Fraction(1, 2)]
    assert quasi_homogeneous_weights(parse_poly("x^3 + x^2", ["x"])) is None


def test_d_squares_to_zero() -> None:
    report = check_form_identity("d^2 = 0", lambda f: f.map(Form.d).map(Form.d), lambda f: FormSeries(XY),
                                 XY, 3)
    assert report.status == "pass"
    assert report.checked > 0


def test_twisted_differential_squares_to_zero() -> None:
    wt = poly_terms(parse_poly("x^3 + x*y^2", XY))
    report = check_form_identity("(-dw + ud)^2 = 0", lambda f: twisted_diff(twisted_diff(f, wt), wt),
                                 lambda f: FormSeries(XY), XY, 3)
    assert report.status == "pass"


def test_dw_d_is_a_boundary() -> None:
    wt = poly_terms(parse_poly("x^3 + y^2", XY))
    report = check_form_identity(
        "dw ^ d = [-dw + ud, w d / u]",
        lambda f: dw_d(f, wt),
        lambda f: twisted_diff(w_d_over_u(f, wt), wt) + w_d_over_u(twisted_diff(f, wt), wt),
        XY, 3,
    )
    assert report.status == "pass", report.counterexample


def test_hkr_eps_on_short_words() -> None:
    monos = monomials(1, 2)
    assert hkr_eps({(E_MARK, 2): Fraction(1)}, monos, ["x"]) == Form(["x"], {((1,), (0,)): 2})
    assert hkr_eps({(1, 1): Fraction(3)}, monos, ["x"]) == Form(["x"], {((1,), (0,)): 3})
    assert hkr_eps({(0, 1, 1): Fraction(1)}, monos, ["x"]).is_zero()


def test_surjectivity_diagnostic_is_bounded(aw_quadric) -> None:
    report = surjectivity_check(aw_quadric)
    assert report.candidates > 0
    assert 0 <= report.rank <= report.milnor == 1


def test_unknown_mf_suite(aw_quadric) -> None:
    with pytest.raises(ValueError):
        run_mf_suites(aw_quadric, 1, ["mf-nothing"])


@pytest.mark.slow
@pytest.mark.parametrize("suite", list(MF_SUITES))
def test_mf_suites_on_quadric(aw_quadric, suite) -> None:
    report = run_mf_suites(aw_quadric, 1, [suite])[0]
    assert report.status == "pass", [e.to_json() for e in report.failures()]


def test_composite_is_computed_once_per_word(aw_quadric) -> None:
    check = CompositeCheck(aw_quadric, "theorem")
    compared = 0
    for w in word_window(aw_quadric.algebra, [1], Sector.CE).all_words():
        try:
            expected = composite_terms({w: Fraction(1)}, aw_quadric)
            first = check.witness({w: Fraction(1)})
        except TruncationOverflow:
            continue
        assert check._F({w: Fraction(3)}) == expected.scale(3)
        cached = len(check._witness_cache)
        assert check.witness({w: Fraction(2)}) == first.scale(2)
        assert len(check._witness_cache) == cached
        assert w in check._F_cache and w in check._exp_cache
        assert check(w)[0] != FAIL
        compared += 1
    assert compared > 0


def test_eps_V_relation_has_minus_one_half() -> None:
    mfa = build_Aw(parse_poly("x^2 + y^2", XY))
    y = mfa.monos.index((0, 1))
    check = EpsCheck(mfa, "V")
    [(_, left, right)] = check.sides((y,))
    # (dw ^ d)(y) = dw ^ dy = 2x dx ^ dy
    assert dw_d(Form.poly(XY, {(0, 1): Fraction(1)}), poly_terms(mfa.w)).at(0) == Form(XY, {((1, 0), (0, 1)): 2})
    assert right == Form(XY, {((1, 0), (0, 1)): -1})
    assert left == right
