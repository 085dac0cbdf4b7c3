from fractions import Fraction

import pytest

from cyclic_connections.algebra.superalg import E_MARK, NonUnital, SuperAlgebra, build_algebra
from cyclic_connections.chains.identities import IdentityCase, check_identity, run_cases
from cyclic_connections.chains.operators import BDelta, Identity, Tau, Zero, apply_B, connes_Be, hochschild_b
from cyclic_connections.chains.suites import SUITES, run_suite
from cyclic_connections.chains.words import Chain, Sector, SectorMismatch, format_word, parse_word, word_window


def test_parse_and_format_word(lam) -> None:
    w = parse_word(lam, "1[eps|eps]")
    assert w == (0, 1, 1)
    assert format_word(lam, w) == "1[eps|eps]"
    assert parse_word(lam, "e[eps]") == (E_MARK, 1)


def test_chain_rejects_wrong_sector(lam) -> None:
    with pytest.raises(SectorMismatch):
        Chain(lam, {(E_MARK, 1): 1}, Sector.C)
    with pytest.raises(SectorMismatch):
        Chain(lam, {(0, E_MARK): 1})
    with pytest.raises(SectorMismatch):
        Chain(lam, {(E_MARK,): 1}, Sector.CPLUS)


def test_chain_arithmetic(lam) -> None:
    x = Chain.word(lam, "1[eps]")
    y = Chain.word(lam, "eps[1]", 2)
    assert (x + y - y) == x
    assert (x - x).is_zero()
    assert x.scale(Fraction(1, 2)).to_json() == {"1[eps]": "1/2"}


def test_b_squares_to_zero(lam) -> None:
    b = hochschild_b()
    report = check_identity(b @ b, Zero(), lam, Sector.CE, 3, "b^2 = 0")
    assert report.status == "pass"
    assert report.checked > 0


def test_mixed_complex_relations(lam) -> None:
    b, Be = hochschild_b(), connes_Be()
    assert check_identity(Be @ Be, Zero(), lam, Sector.CE, 3).status == "pass"
    assert check_identity(b @ Be + Be @ b, Zero(), lam, Sector.CE, 3).status == "pass"


def test_wrong_identity_reports_counterexample(lam) -> None:
    report = check_identity(Tau(), Identity(), lam, Sector.C, 2, "tau = 1")
    assert report.status == "fail"
    assert report.counterexample["word"]


def test_B_needs_a_unit() -> None:
    alg = build_algebra({"name": "odd-line", "basis": ["a"], "parity": [1]})
    with pytest.raises(NonUnital):
        apply_B(Chain.word(alg, "a[a]", sector=Sector.C))


def test_word_window_samples_past_budget(lam) -> None:
    window = word_window(lam, [1, 5], Sector.CE, budget=10, seed=1)
    assert window.sampled == {1: False, 5: True}
    assert window.available[5] == 3 * 2 ** 5
    assert len(window.words[1]) == 6
    assert 0 < len(window.words[5]) <= 10
    again = word_window(lam, [5], Sector.CE, budget=10, seed=1)
    assert again.words[5] == window.words[5]


def test_word_window_is_exhaustive_by_default(lam) -> None:
    window = word_window(lam, [0, 1, 5], Sector.CE)
    assert window.sampled == {0: False, 1: False, 5: False}
    assert window.words[0] == [(0,), (1,)]
    assert len(window.words[5]) == window.available[5] == 3 * 2 ** 5
    assert (E_MARK,) not in window.all_words()
    assert word_window(lam, [0], Sector.CPLUS).words[0] == []


def test_all_overflowing_words_are_inconclusive() -> None:
    alg = SuperAlgebra("escaping", ["a"], [0], {}, diff_overflow={0})
    report = check_identity(BDelta(), Zero(), alg, Sector.C, 2, "b(delta) = 0")
    assert report.checked == 0
    assert report.overflowed == 3
    assert report.status == "inconclusive"
    assert not report.passed
    suite = run_cases("escaping", [IdentityCase("b(delta) = 0", BDelta(), Zero(), Sector.C)], alg, 2)
    assert suite.status == "fail"
    assert suite.failures()


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_identity_suites_on_lambda(lam_graded, suite) -> None:
    report = run_suite(suite, lam_graded, 2)
    assert report.status == "pass", [e.to_json() for e in report.failures()]


def test_gamma_suite_skips_without_grading(lam) -> None:
    assert run_suite("gamma", lam, 2).status == "skipped"


def test_unknown_suite(lam) -> None:
    with pytest.raises(KeyError):
        run_suite("lemma-Z9", lam, 2)


@pytest.mark.slow
@pytest.mark.parametrize("suite", sorted(SUITES))
def test_identity_suites_on_mat2(mat2, suite) -> None:
    report = run_suite(suite, mat2, 3)
    assert report.status in ("pass", "skipped"), [e.to_json() for e in report.failures()]
