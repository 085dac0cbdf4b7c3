"""
Certificate catalog and the u-connection suites.

Every homotopy between two canonical connections ships here as an explicit
odd witness W with residual = [b + uB, W]; `verify_certificate` checks it word
by word. Certificates flagged `derived` were assembled from several homotopy
steps (gauge transfer of nabla along iota/p).

Suite ids: uconn-law, cert-C3, cert-C4, cert-C6, cert-iotap, dual, gauge-transfer
"""

import copy
import logging
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from cyclic_connections.algebra.superalg import SuperAlgebra
from cyclic_connections.chains.identities import IdentityCase, IdentityReport, SuiteReport, check_identity, run_cases
from cyclic_connections.chains.operators import (
    BDelta,
    BMu,
    Delta,
    GammaAt,
    GammaOp,
    H,
    He,
    Mu,
    NOp,
    NPrime,
    ProjC,
    ProjPlus,
    Scaled,
    TauSum,
    Zero,
    commutator,
    connes_Be,
)
from cyclic_connections.chains.words import Sector
from cyclic_connections.connections.nabla import (
    connection_nabla,
    connection_nabla_circ,
    connection_nabla_gr,
    connection_nabla_tilde,
    connection_nabla_un,
    dual_connection,
    gauge_transfer,
    iota_p_certificates,
    morphism_residual,
    one_minus_tau_inv,
    op_U_circ,
    op_V_circ,
)
from cyclic_connections.connections.uoperator import (
    HomotopyCertificate,
    UOperator,
    check_connection_law,
    cyclic_complex,
    extended_complex,
    verify_certificate,
)
from cyclic_connections.utils.constants import DEFAULT_SAMPLE_SEED, DEFAULT_WORD_BUDGET

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _twice_u2(x: UOperator) -> UOperator:
    return x.shift(2).scale(2)


# ==================================================
# Catalog
# ==================================================


def cert_K() -> HomotopyCertificate:
    """2u^2(nabla - nabla_circ) = [D^e, K], K = (delta(0) - delta(0) N) on C, delta(0) on C^+."""
    residual = _twice_u2(connection_nabla().potential - connection_nabla_circ().potential)
    K = (Delta(0) - Delta(0) @ NOp()) @ ProjC() + Delta(0) @ ProjPlus()
    return HomotopyCertificate("cert-C3: 2u^2(nabla - nabla_circ) = [D, K]", residual, UOperator({0: K}),
                               extended_complex())


def cert_tilde(drop_H1: bool = False) -> HomotopyCertificate:
    """2u^2(nabla_tilde - nabla) = [D^e, H0 + u H1], H0 = mu(0), H1 = h^e N' on C."""
    residual = _twice_u2(connection_nabla_tilde().potential - connection_nabla().potential)
    coeffs = {0: Mu(0), 1: He() @ NPrime() @ ProjC()}
    name = "cert-C4: 2u^2(nabla_tilde - nabla) = [D, H0 + uH1]"
    if drop_H1:
        del coeffs[1]
        name = "cert-C4 without uH1"
    return HomotopyCertificate(name, residual, UOperator(coeffs), extended_complex())


def cert_graded() -> HomotopyCertificate:
    """2u^2(nabla_gr - nabla) = [D^e, H0 + u H1], H0 = mu(0) gamma(1), H1 = h^e sum tau^j gamma(i)."""
    residual = _twice_u2(connection_nabla_gr().potential - connection_nabla().potential)
    witness = UOperator({0: Mu(0) @ GammaAt(1), 1: He() @ TauSum("gamma") @ ProjC()})
    return HomotopyCertificate("cert-C6: 2u^2(nabla_gr - nabla) = [D, H0 + uH1]", residual, witness,
                               extended_complex())


def cert_p_iota(alg: Optional[SuperAlgebra] = None) -> HomotopyCertificate:
    data = iota_p_certificates(alg)
    residual = data.p @ data.iota - UOperator.identity()
    return HomotopyCertificate("cert-iotap: p iota - id = [D, H]", residual, data.H, cyclic_complex())


def cert_iota_p(alg: Optional[SuperAlgebra] = None) -> HomotopyCertificate:
    data = iota_p_certificates(alg)
    residual = data.iota @ data.p - UOperator.identity()
    return HomotopyCertificate("cert-iotap: iota p - id = [D^e, H^e]", residual, data.He, extended_complex())


def gauge_witness() -> UOperator:
    """(1 - tau^{-1}) h h h N Gamma."""
    return UOperator({0: one_minus_tau_inv() @ H() @ H() @ H() @ NOp() @ GammaOp()}, "W_gauge")


def cert_gauge(alg: Optional[SuperAlgebra] = None) -> HomotopyCertificate:
    """gauge_transfer(nabla) - nabla_un = [D, W_gauge] on C(A)."""
    data = iota_p_certificates(alg)
    small = cyclic_complex()
    transferred = gauge_transfer(connection_nabla(), data.iota, data.p, data.H, small)
    residual = transferred.potential - connection_nabla_un(alg).potential
    return HomotopyCertificate("gauge-transfer: gauge(nabla) - nabla_un = [D, W]", residual, gauge_witness(),
                               small, derived=True)


def iota_witness(alg: Optional[SuperAlgebra] = None) -> UOperator:
    """
    -H^e (d iota/du + A iota) + (H^e iota - iota H) A_un + iota W_gauge,
    with A the potential of nabla and A_un that of nabla_un.
    """
    data = iota_p_certificates(alg)
    A = connection_nabla().potential
    A_un = connection_nabla_un(alg).potential
    iota, He_u, H_u = data.iota, data.He, data.H
    return (-(He_u @ (iota.ddu() + A @ iota))
            + (He_u @ iota - iota @ H_u) @ A_un
            + iota @ gauge_witness())


def cert_iota_morphism(alg: Optional[SuperAlgebra] = None) -> HomotopyCertificate:
    """iota is a morphism of u-connections nabla_un -> nabla."""
    data = iota_p_certificates(alg)
    residual = morphism_residual(data.iota, connection_nabla_un(alg), connection_nabla())
    return HomotopyCertificate("gauge-transfer: iota residual = [D, W_iota]", residual, iota_witness(alg),
                               cyclic_complex(), extended_complex(), derived=True)


def certificate_catalog(alg: SuperAlgebra) -> Dict[str, HomotopyCertificate]:
    catalog = {"C3": cert_K(), "C4": cert_tilde()}
    if alg.zdegree is not None:
        catalog["C6"] = cert_graded()
    if alg.unit is not None:
        catalog["p-iota"] = cert_p_iota(alg)
        catalog["iota-p"] = cert_iota_p(alg)
        catalog["gauge"] = cert_gauge(alg)
        catalog["iota-residual"] = cert_iota_morphism(alg)
    return catalog


# ==================================================
# Suites
# ==================================================


def expect_failure(report: IdentityReport) -> IdentityReport:
    """Negative control: passes exactly when the wrapped check found a counterexample."""
    out = copy.copy(report)
    out.name = f"negative control: {report.name}"
    out.failed = 0 if report.failed else 1
    if report.failed == 0:
        out.counterexample = {"word": "", "component": "", "lhs": "no counterexample", "rhs": ""}
    return out


def _certs(suite: str, certs: List[HomotopyCertificate], alg: SuperAlgebra, max_length: int,
           budget: Optional[int], seed: int, jobs: int, progress: bool) -> SuiteReport:
    report = SuiteReport(suite, alg.name, max_length)
    for cert in certs:
        report.entries.append(verify_certificate(cert, alg, max_length, budget, seed, jobs, progress))
    return report


def _skip(suite: str, alg: SuperAlgebra, max_length: int, reason: str) -> SuiteReport:
    report = SuiteReport(suite, alg.name, max_length)
    report.skipped = reason
    return report


def uconn_law_suite(alg, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    report = SuiteReport("uconn-law", alg.name, max_length)
    connections = [connection_nabla(), connection_nabla_circ(), connection_nabla_tilde()]
    if alg.unit is not None:
        connections.append(connection_nabla_un(alg))
    if alg.zdegree is not None:
        connections.append(connection_nabla_gr(alg))
    for nab in connections:
        report.entries.append(check_connection_law(nab, alg, max_length, budget, seed, jobs))
    Be = connes_Be()
    cases = [
        IdentityCase("[U°, b^e(delta)] = 0", commutator(op_U_circ(), BDelta()), Zero()),
        IdentityCase("[U°, b^e(mu)] = 0", commutator(op_U_circ(), BMu()), Zero()),
        IdentityCase("[V°, B^e] = 0", commutator(op_V_circ(), Be), Zero()),
        IdentityCase("[V°, b^e(delta)] = 0", commutator(op_V_circ(), BDelta()), Zero()),
        IdentityCase("[V°, b^e(mu)] + [U°, B^e] = 1/2 b^e(delta)",
                     commutator(op_V_circ(), BMu()) + commutator(op_U_circ(), Be), Scaled(HALF, BDelta())),
        IdentityCase("[Gamma, b^e(delta)] = 0", commutator(GammaOp(), BDelta()), Zero()),
        IdentityCase("[Gamma, b^e(mu)] = 1/2 b^e(mu)", commutator(GammaOp(), BMu()), Scaled(HALF, BMu())),
        IdentityCase("[Gamma, B^e] = -1/2 B^e", commutator(GammaOp(), Be), Scaled(-HALF, Be)),
    ]
    report.entries += run_cases("uconn-law", cases, alg, max_length, budget, seed, jobs, progress).entries
    return report


def cert_c3_suite(alg, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    report = _certs("cert-C3", [cert_K()], alg, max_length, budget, seed, jobs, progress)
    cases = [
        IdentityCase("b(mu) delta(0) + delta(0) b(mu) = -mu(0) delta(1) - mu* delta(n)",
                     BMu() @ Delta(0) + Delta(0) @ BMu(), -(Mu(0) @ Delta(1)) - Mu(-1) @ Delta(-1), Sector.C),
        IdentityCase("b(mu) delta(0) N + delta(0) N b(mu) = 0",
                     BMu() @ Delta(0) @ NOp() + Delta(0) @ NOp() @ BMu(), Zero(), Sector.C),
    ]
    report.entries += run_cases("cert-C3", cases, alg, max_length, budget, seed, jobs, progress).entries
    return report


def cert_c4_suite(alg, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    report = _certs("cert-C4", [cert_tilde()], alg, max_length, budget, seed, jobs, progress)
    control = verify_certificate(cert_tilde(drop_H1=True), alg, max_length, budget, seed, jobs)
    report.entries.append(expect_failure(control))
    return report


def cert_c6_suite(alg, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    if alg.zdegree is None:
        return _skip("cert-C6", alg, max_length, f"{alg.name} carries no Z-grading")
    return _certs("cert-C6", [cert_graded()], alg, max_length, budget, seed, jobs, progress)


def cert_iotap_suite(alg, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    if alg.unit is None:
        return _skip("cert-iotap", alg, max_length, f"{alg.name} is not unital")
    report = _certs("cert-iotap", [cert_p_iota(alg), cert_iota_p(alg)], alg, max_length, budget, seed, jobs,
                    progress)
    data = iota_p_certificates(alg)
    small, big = cyclic_complex().D(), extended_complex().D()
    report.entries.append(check_identity(big @ data.iota, data.iota @ small, alg, Sector.C, max_length,
                                         "D^e iota = iota D", None, budget, seed, jobs))
    report.entries.append(check_identity(data.p @ big, small @ data.p, alg, Sector.CE, max_length,
                                         "p D^e = D p", None, budget, seed, jobs))
    return report


def dual_suite(alg, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    nab = connection_nabla()
    circ = connection_nabla_circ()
    dual = dual_connection(nab, alg)
    cases = [
        IdentityCase("dual(nabla) = nabla_circ", dual.potential, circ.potential),
        IdentityCase("dual(dual(nabla)) = nabla", dual_connection(dual, alg).potential, nab.potential),
        IdentityCase("dual(nabla_circ) = nabla", dual_connection(circ, alg).potential, nab.potential),
    ]
    if not alg.diff and not alg.diff_overflow:
        cases.append(IdentityCase("nabla = nabla_circ for d = 0", nab.potential, circ.potential))
    return run_cases("dual", cases, alg, max_length, budget, seed, jobs, progress)


def gauge_transfer_suite(alg, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1,
                         progress=False):
    if alg.unit is None:
        return _skip("gauge-transfer", alg, max_length, f"{alg.name} is not unital")
    report = _certs("gauge-transfer", [cert_gauge(alg), cert_iota_morphism(alg)], alg, max_length,
                    budget, seed, jobs, progress)
    data = iota_p_certificates(alg)
    transferred = gauge_transfer(connection_nabla(), data.iota, data.p, data.H, cyclic_complex(), alg,
                                 max_length)
    report.entries.append(check_connection_law(transferred, alg, max_length, budget, seed, jobs))
    residual = morphism_residual(data.iota, connection_nabla_un(alg), connection_nabla())
    report.entries.append(check_identity(
        residual @ cyclic_complex().D(), extended_complex().D() @ residual, alg, Sector.C, max_length,
        "iota residual is a u-morphism", None, budget, seed, jobs,
    ))
    return report


SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "uconn-law": uconn_law_suite,
    "cert-C3": cert_c3_suite,
    "cert-C4": cert_c4_suite,
    "cert-C6": cert_c6_suite,
    "cert-iotap": cert_iotap_suite,
    "dual": dual_suite,
    "gauge-transfer": gauge_transfer_suite,
}
