"""
Laurent polynomials in u with chain-operator coefficients.

A UOperator is a finite map u-power -> ChainOperator. Composition multiplies
u-powers, `ddu` differentiates coefficientwise, and `ucommutator` is the
graded commutator. A u-connection d/du + A(u) is stored through its potential
A(u) together with the mixed complex (b, B) it lives on.

Usage:
    cx = extended_complex()
    law = connection_law_residual(nabla)        # [nabla, b + uB] - (1/2u)(b + uB)
    report = verify_certificate(cert, lam, 4)
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from cyclic_connections.algebra.scalars import to_fraction
from cyclic_connections.algebra.superalg import SuperAlgebra
from cyclic_connections.chains.identities import IdentityReport, check_identity
from cyclic_connections.chains.operators import (
    ChainOperator,
    Compose,
    Identity,
    Scaled,
    Sum,
    Zero,
    connes_B,
    connes_Be,
    eval_operator,
    hochschild_b,
)
from cyclic_connections.chains.words import Chain, Sector
from cyclic_connections.utils.constants import DEFAULT_MAX_LENGTH, DEFAULT_SAMPLE_SEED, DEFAULT_WORD_BUDGET

logger = logging.getLogger(__name__)


class UOperator:
    """
    Args:
        coeffs: u-power -> chain operator; zero operators are dropped
        name: label used in reports
    """

    def __init__(self, coeffs: Optional[Dict[int, ChainOperator]] = None, name: str = ""):
        self.coeffs: Dict[int, ChainOperator] = {
            int(p): op for p, op in (coeffs or {}).items() if not isinstance(op, Zero)
        }
        self.name = name or self._describe()

    @classmethod
    def coerce(cls, value) -> "UOperator":
        if isinstance(value, UOperator):
            return value
        if isinstance(value, ChainOperator):
            return cls({0: value})
        raise TypeError(f"Cannot treat {value!r} as a u-operator")

    @classmethod
    def identity(cls) -> "UOperator":
        return cls({0: Identity()}, "id")

    @classmethod
    def zero(cls) -> "UOperator":
        return cls({}, "0")

    @property
    def parity(self) -> Optional[int]:
        parities = {op.parity for op in self.coeffs.values() if op.parity is not None}
        if len(parities) > 1:
            raise ValueError(f"Inhomogeneous u-operator {self.name}")
        return parities.pop() if parities else None

    def at(self, power: int) -> ChainOperator:
        return self.coeffs.get(power, Zero())

    def powers(self):
        return sorted(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    # ==================================================
    # Algebra
    # ==================================================

    def __add__(self, other) -> "UOperator":
        other = UOperator.coerce(other)
        out = dict(self.coeffs)
        for p, op in other.coeffs.items():
            out[p] = Sum(out[p], op) if p in out else op
        return UOperator(out)

    def __sub__(self, other) -> "UOperator":
        return self + (-UOperator.coerce(other))

    def __neg__(self) -> "UOperator":
        return self.scale(-1)

    def scale(self, c) -> "UOperator":
        c = to_fraction(c)
        if c == 0:
            return UOperator.zero()
        if c == 1:
            return self
        return UOperator({p: Scaled(c, op) for p, op in self.coeffs.items()})

    def __rmul__(self, c) -> "UOperator":
        return self.scale(c)

    def __matmul__(self, other) -> "UOperator":
        other = UOperator.coerce(other)
        out: Dict[int, ChainOperator] = {}
        for p, x in sorted(self.coeffs.items()):
            for q, y in sorted(other.coeffs.items()):
                term = Compose(x, y)
                out[p + q] = Sum(out[p + q], term) if p + q in out else term
        return UOperator(out)

    def __rmatmul__(self, other) -> "UOperator":
        return UOperator.coerce(other) @ self

    def shift(self, k: int) -> "UOperator":
        """Multiply by u^k."""
        return UOperator({p + k: op for p, op in self.coeffs.items()})

    def ddu(self) -> "UOperator":
        return UOperator({p - 1: Scaled(p, op) for p, op in self.coeffs.items() if p != 0})

    def neg_u(self) -> "UOperator":
        """Substitute u -> -u."""
        return UOperator({p: (Scaled(-1, op) if p % 2 else op) for p, op in self.coeffs.items()})

    def conjugate(self, outer: ChainOperator, inner: ChainOperator) -> "UOperator":
        return UOperator({p: Compose(outer, op, inner) for p, op in self.coeffs.items()})

    def apply(self, x: Chain) -> Dict[int, Chain]:
        """Coefficientwise evaluation on a chain; returns u-power -> chain."""
        out = {}
        for p, op in sorted(self.coeffs.items()):
            result = eval_operator(op, x).chain
            if not result.is_zero():
                out[p] = result
        return out

    def _describe(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"u^{p}*({op})" for p, op in sorted(self.coeffs.items()))

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"[UOperator {self.name}, powers: {self.powers()}]"


def ucommutator(x, y) -> UOperator:
    x = UOperator.coerce(x)
    y = UOperator.coerce(y)
    px = x.parity or 0
    py = y.parity or 0
    sign = -1 if px * py else 1
    return (x @ y) - (y @ x).scale(sign)


def half_over_u(x: UOperator) -> UOperator:
    return x.shift(-1).scale(Fraction(1, 2))


# ==================================================
# Mixed complexes and u-connections
# ==================================================


@dataclass
class MixedComplex:
    name: str
    b: ChainOperator
    B: ChainOperator
    sector: Sector

    def D(self) -> UOperator:
        """The u-totalized differential b + uB."""
        return UOperator({0: self.b, 1: self.B}, f"{self.name}: b + uB")

    def D_minus(self) -> UOperator:
        return UOperator({0: self.b, 1: Scaled(-1, self.B)}, f"{self.name}: b - uB")


def cyclic_complex() -> MixedComplex:
    """(C(A), b, B) for unital A."""
    return MixedComplex("C(A)", hochschild_b(), connes_B(), Sector.C)


def extended_complex() -> MixedComplex:
    """(C^e(A), b^e, B^e)."""
    return MixedComplex("Ce(A)", hochschild_b(), connes_Be(), Sector.CE)


@dataclass
class UConnection:
    """d/du + potential on the given mixed complex."""
    name: str
    potential: UOperator
    complex: MixedComplex

    def law_residual(self) -> UOperator:
        return connection_law_residual(self)

    def __repr__(self):
        return f"[UConnection {self.name} on {self.complex.name}, powers: {self.potential.powers()}]"


def connection_law_residual(nab: UConnection) -> UOperator:
    """[nabla, b + uB] - (1/2u)(b + uB), which vanishes for a u-connection."""
    D = nab.complex.D()
    return D.ddu() + ucommutator(nab.potential, D) - half_over_u(D)


def check_connection_law(nab: UConnection, alg: SuperAlgebra, max_length: int = DEFAULT_MAX_LENGTH,
                         budget: Optional[int] = DEFAULT_WORD_BUDGET, seed: int = DEFAULT_SAMPLE_SEED,
                         jobs: int = 1) -> IdentityReport:
    return check_identity(
        connection_law_residual(nab), Zero(), alg, nab.complex.sector, max_length,
        f"u-connection law: {nab.name}", None, budget, seed, jobs,
    )


# ==================================================
# Homotopy certificates
# ==================================================


@dataclass
class HomotopyCertificate:
    """
    Claims residual = D_target W + W D_source for the odd witness W.

    Attributes:
        derived: True when the witness was assembled from several homotopy
            steps rather than displayed as a single formula
    """
    name: str
    residual: UOperator
    witness: UOperator
    source: MixedComplex
    target: Optional[MixedComplex] = None
    derived: bool = False
    notes: str = ""

    def __post_init__(self):
        if self.target is None:
            self.target = self.source

    def boundary(self) -> UOperator:
        return self.target.D() @ self.witness + self.witness @ self.source.D()


def verify_certificate(
    cert: HomotopyCertificate,
    alg: SuperAlgebra,
    max_length: int = DEFAULT_MAX_LENGTH,
    budget: Optional[int] = DEFAULT_WORD_BUDGET,
    seed: int = DEFAULT_SAMPLE_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> IdentityReport:
    witness_parity = cert.witness.parity
    if witness_parity not in (None, 1):
        raise ValueError(f"Certificate {cert.name}: witness must be odd")
    report = check_identity(
        cert.residual, cert.boundary(), alg, cert.source.sector, max_length,
        cert.name, None, budget, seed, jobs, progress,
    )
    logger.info("Certificate %s on %s: %s" % (cert.name, alg.name, report.status))
    return report
