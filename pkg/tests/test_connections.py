import pytest

from cyclic_connections.algebra.superalg import NonUnital, NotZGraded, build_algebra
from cyclic_connections.chains.operators import Identity, Tau
from cyclic_connections.connections.certificates import SUITES, cert_iota_p, cert_p_iota, cert_tilde, certificate_catalog
from cyclic_connections.connections.nabla import (
    iota_p_certificates,
    connection_nabla,
    connection_nabla_circ,
    connection_nabla_gr,
    connection_nabla_tilde,
    connection_nabla_un,
    tate_twist,
)
from cyclic_connections.connections.uoperator import UOperator, check_connection_law, verify_certificate


def test_uoperator_calculus() -> None:
    x = UOperator({-1: Tau(), 2: Identity()})
    assert x.shift(1).powers() == [0, 3]
    assert x.ddu().powers() == [-2, 1]
    assert UOperator({0: Identity()}).ddu().is_zero()
    assert (x @ x).powers() == [-2, 1, 4]
    assert x.neg_u().powers() == [-1, 2]


@pytest.mark.parametrize("make", [connection_nabla, connection_nabla_circ, connection_nabla_tilde])
def test_connection_law(lam, make) -> None:
    report = check_connection_law(make(), lam, 2)
    assert report.status == "pass", report.counterexample


def test_tate_twist_keeps_connection_law(lam) -> None:
    twisted = tate_twist(connection_nabla(), 3)
    assert twisted.potential.powers() == [-2, -1]
    assert check_connection_law(twisted, lam, 2).status == "pass"


def test_unit_and_grading_are_required(lam) -> None:
    alg = build_algebra({"name": "odd-line", "basis": ["a"], "parity": [1]})
    with pytest.raises(NonUnital):
        connection_nabla_un(alg)
    with pytest.raises(NotZGraded):
        connection_nabla_gr(lam)


def test_catalog_follows_structure(lam, lam_graded) -> None:
    assert "C6" not in certificate_catalog(lam)
    assert {"C3", "C4", "C6", "p-iota", "gauge"} <= set(certificate_catalog(lam_graded))


def test_tilde_certificate(lam) -> None:
    assert verify_certificate(cert_tilde(), lam, 2).status == "pass"


@pytest.mark.parametrize("suite", sorted(SUITES))
def test_certificate_suites_on_lambda(lam_graded, suite) -> None:
    report = SUITES[suite](lam_graded, 2)
    assert report.status == "pass", [e.to_json() for e in report.failures()]


@pytest.mark.parametrize("name", ["lam", "lam_graded", "dual"])
def test_iota_p_homotopies_hold_at_length_four(request, name) -> None:
    alg = request.getfixturevalue(name)
    data = iota_p_certificates(alg)
    assert data.H.powers() == [1]
    assert data.He.powers() == [0]
    for cert in (cert_p_iota(alg), cert_iota_p(alg)):
        report = verify_certificate(cert, alg, 4)
        assert report.status == "pass", report.counterexample
        assert report.checked > 0


@pytest.mark.slow
@pytest.mark.parametrize("suite", sorted(SUITES))
def test_certificate_suites_on_mat2(mat2, suite) -> None:
    report = SUITES[suite](mat2, 3)
    assert report.status in ("pass", "skipped"), [e.to_json() for e in report.failures()]
