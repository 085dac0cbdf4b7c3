"""
Canonical u-connections on the cyclic complexes and the operations on them.

Connections on (C^e(A), b^e, B^e):
    nabla        d/du + U(delta)/u^2 + (V(delta) + Gamma)/u
    nabla_circ   d/du + U°(delta)/u^2 + (V°(delta) + Gamma)/u
    nabla_tilde  d/du + (U(delta) + U(mu))/u^2 + (V(delta) + V(mu))/u
    nabla_gr     d/du + Gamma'/(2u)                (Z-graded A)
and on (C(A), b, B) for unital A:
    nabla_un     d/du + U^un/u^2 + (V^un + Gamma)/u + W^un

Usage:
    nab = connection_nabla()
    dual = dual_connection(nab)
    twisted = tate_twist(nab, 2)
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from cyclic_connections.algebra.superalg import NonUnital, NotZGraded, SuperAlgebra
from cyclic_connections.chains.identities import check_identity
from cyclic_connections.chains.operators import (
    BDelta,
    ChainOperator,
    Compose,
    Delta,
    GammaOp,
    GammaPrime,
    H,
    He,
    Identity,
    Mu,
    NOp,
    PhiOp,
    ProjC,
    ProjPlus,
    Scaled,
    TauPow,
    TauSum,
)
from cyclic_connections.connections.uoperator import (
    MixedComplex,
    UConnection,
    UOperator,
    cyclic_complex,
    extended_complex,
    ucommutator,
)
from cyclic_connections.utils.constants import DEFAULT_MAX_LENGTH

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


class BadHomotopyTriple(ValueError):
    pass


def one_minus_tau_inv() -> ChainOperator:
    return Identity() - TauPow(-1)


# ==================================================
# Connection operators
# ==================================================


def op_U_delta() -> ChainOperator:
    """U(delta) = -1/2 mu(0) delta(1), on both components."""
    return Scaled(-HALF, Mu(0) @ Delta(1))


def op_V_delta() -> ChainOperator:
    """V(delta) = -1/2 h^e sum_{i<j} tau^j delta(i), from C into C^+."""
    return Scaled(-HALF, He() @ TauSum("delta") @ ProjC())


def op_U_circ() -> ChainOperator:
    return Scaled(HALF, Mu(-1) @ Delta(-1))


def op_V_circ() -> ChainOperator:
    return Scaled(HALF, He() @ TauSum("delta", lower=True) @ ProjC())


def op_U_mu() -> ChainOperator:
    return Scaled(-HALF, Mu(0) @ Mu(1))


def op_V_mu() -> ChainOperator:
    return Scaled(HALF, ProjC()) - Scaled(HALF, He() @ TauSum("mu") @ ProjC())


def op_U_un() -> ChainOperator:
    return Scaled(-HALF, Mu(0) @ Delta(1))


def op_V_un() -> ChainOperator:
    return Scaled(-HALF, one_minus_tau_inv() @ H() @ TauSum("delta"))


def op_W_un() -> ChainOperator:
    return Scaled(HALF, one_minus_tau_inv() @ H() @ H() @ H() @ NOp() @ BDelta())


def _require_unit(alg: Optional[SuperAlgebra], what: str):
    if alg is not None and alg.unit is None:
        raise NonUnital(f"{what} needs a unital algebra; {alg.name} has none")


# ==================================================
# Constructors
# ==================================================


def connection_nabla() -> UConnection:
    potential = UOperator({-2: op_U_delta(), -1: op_V_delta() + GammaOp()})
    return UConnection("nabla", potential, extended_complex())


def connection_nabla_circ() -> UConnection:
    potential = UOperator({-2: op_U_circ(), -1: op_V_circ() + GammaOp()})
    return UConnection("nabla_circ", potential, extended_complex())


def connection_nabla_tilde() -> UConnection:
    potential = UOperator({-2: op_U_delta() + op_U_mu(), -1: op_V_delta() + op_V_mu()})
    return UConnection("nabla_tilde", potential, extended_complex())


def connection_nabla_un(alg: Optional[SuperAlgebra] = None) -> UConnection:
    _require_unit(alg, "nabla_un")
    potential = UOperator({-2: op_U_un(), -1: op_V_un() + GammaOp(), 0: op_W_un()})
    return UConnection("nabla_un", potential, cyclic_complex())


def connection_nabla_gr(alg: Optional[SuperAlgebra] = None) -> UConnection:
    if alg is not None and alg.zdegree is None:
        raise NotZGraded(f"nabla_gr needs a Z-grading; {alg.name} carries none")
    potential = UOperator({-1: Scaled(HALF, GammaPrime())})
    return UConnection("nabla_gr", potential, extended_complex())


# ==================================================
# Operations on connections
# ==================================================


def dual_connection(nab: UConnection, alg: Optional[SuperAlgebra] = None) -> UConnection:
    """
    d/du - Phi^{-1} A_{A°}(-u) Phi.

    The potential's operators are algebra independent, so re-instantiating over
    the opposite algebra amounts to evaluating them after Phi.
    """
    coeffs = {}
    for p, op in nab.potential.coeffs.items():
        sign = 1 if p % 2 else -1
        coeffs[p] = Scaled(sign, Compose(PhiOp(), op, PhiOp()))
    cx = nab.complex
    return UConnection(f"dual({nab.name})", UOperator(coeffs), cx)


def morphism_residual(f: UOperator, nab: UConnection, nab2: UConnection) -> UOperator:
    """df/du + A2 f - f A1 for f from (nab's complex) to (nab2's complex)."""
    f = UOperator.coerce(f)
    return f.ddu() + nab2.potential @ f - f @ nab.potential


def tate_twist(nab: UConnection, n: int) -> UConnection:
    """nabla - (n/2)(1/u)."""
    if n == 0:
        return nab
    shift = UOperator({-1: Scaled(Fraction(-n, 2), Identity())})
    return UConnection(f"{nab.name}<{n}/2>", nab.potential + shift, nab.complex)


@dataclass
class IotaP:
    """The homotopy equivalence C(A) <-> C^e(A) and its two homotopies."""
    iota: UOperator
    p: UOperator
    H: UOperator
    He: UOperator


def iota_p_certificates(alg: Optional[SuperAlgebra] = None) -> IotaP:
    """
    iota(u) = (id; u h^e h N),  p(u) = (id, (1 - tau^{-1}) h mu(0)),
    H(u) = u (1 - tau^{-1}) h h h N,  H^e(u) = h^e h mu(0) on C^+ (no u).
    """
    _require_unit(alg, "iota/p")
    iota = UOperator({0: ProjC(), 1: He() @ H() @ NOp() @ ProjC()}, "iota")
    p = UOperator({0: ProjC() + one_minus_tau_inv() @ H() @ Mu(0) @ ProjPlus()}, "p")
    homotopy = UOperator({1: one_minus_tau_inv() @ H() @ H() @ H() @ NOp()}, "H")
    homotopy_e = UOperator({0: He() @ H() @ Mu(0) @ ProjPlus()}, "H^e")
    return IotaP(iota, p, homotopy, homotopy_e)


def gauge_transfer(
    nab2: UConnection,
    iota: UOperator,
    p: UOperator,
    H: UOperator,
    small: MixedComplex,
    alg: Optional[SuperAlgebra] = None,
    max_length: int = DEFAULT_MAX_LENGTH,
) -> UConnection:
    """
    Transfer nab2 along (iota, p, H):
        d/du + p (d iota/du) + p A' iota + (1/2u) H (b - uB)

    When an algebra is given, p iota = id + [b + uB, H] is checked first on its
    basis words and BadHomotopyTriple is raised on failure.
    """
    D = small.D()
    if alg is not None:
        report = check_identity(
            p @ iota, UOperator.identity() + ucommutator(D, H), alg, small.sector, max_length,
            "p iota = id + [D, H]",
        )
        if not report.passed:
            raise BadHomotopyTriple(f"p iota - id is not [D, H] at {report.counterexample}")
    potential = p @ iota.ddu() + p @ nab2.potential @ iota + (H @ small.D_minus()).shift(-1).scale(HALF)
    return UConnection(f"gauge({nab2.name})", potential, small)
