"""
The matrix factorization algebra A_w = Q[Y] (x) End(V) with d = [D(w), -].

V is the polynomial ring in odd variables theta_1..theta_k and
D(w) = sum_i (y_i d/d(theta_i) + w_i theta_i), so that D(w)^2 = w.

Usage:
    w = parse_poly("x^3", ["x"])
    mfa = build_Aw(w, parse_decomposition("x: x^2", ["x"], w))
    Y = op_bDw(mfa)
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy.polys.matrices import DomainMatrix

from cyclic_connections.algebra.polynomials import (
    BadDecomposition,
    Monomial,
    check_decomposition,
    decomposition_str,
    default_decomposition,
    monomial_str,
    poly_str,
    poly_terms,
    variable_names,
)
from cyclic_connections.algebra.superalg import (
    Element,
    SuperAlgebra,
    TruncationOverflow,
    add_into,
    end_odd_variables,
    monomials,
    odd_monomials,
    odd_variable_operators,
    poly_algebra,
    set_differential_commutator,
    tensor,
)
from cyclic_connections.chains.operators import (
    BMu,
    ChainOperator,
    He,
    Insert,
    InsertAll,
    Mu,
    ProjC,
    Scaled,
    TauSum,
)

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


class NotCritical(ValueError):
    pass


class NotIsolatedOrTruncationTooLow(ValueError):
    pass


# ==================================================
# Jacobian ring
# ==================================================


def partials(w: sympy.Poly) -> List[Dict[Monomial, Fraction]]:
    return [poly_terms(w.diff(g)) for g in w.gens]


def qq_element(c: Fraction):
    return sympy.QQ(c.numerator, c.denominator)


def _total_degree(terms: Dict[Monomial, Fraction]) -> int:
    return max((sum(m) for m in terms), default=-1)


def jacobian_basis(w: sympy.Poly, degree: int) -> List[Monomial]:
    """
    Standard monomials of Q[y]_{<=degree} modulo the span of m * d_i w
    (deg m + deg d_i w <= degree), lowest degrees preferred.
    """
    k = len(w.gens)
    monos = monomials(k, degree)
    # highest monomials first, so that rref pivots become the leading terms
    columns = list(reversed(monos))
    col_of = {m: i for i, m in enumerate(columns)}
    rows = []
    for g in partials(w):
        if not g:
            continue
        dg = _total_degree(g)
        for m in monomials(k, max(degree - dg, 0)):
            if sum(m) + dg > degree:
                continue
            row = [sympy.QQ(0)] * len(columns)
            for mono, c in g.items():
                shifted = tuple(a + b for a, b in zip(mono, m))
                row[col_of[shifted]] += qq_element(c)
            rows.append(row)
    if not rows:
        return sorted(monos, key=lambda m: (sum(m), [-e for e in m]))
    _, pivots = DomainMatrix(rows, (len(rows), len(columns)), sympy.QQ).rref()
    pivots = set(pivots)
    free = [columns[i] for i in range(len(columns)) if i not in pivots]
    return sorted(free, key=lambda m: (sum(m), [-e for e in m]))


def quasi_homogeneous_weights(w: sympy.Poly) -> Optional[List[Fraction]]:
    """Positive weights q with sum a_i q_i = 1 on every monomial of w, or None."""
    terms = poly_terms(w)
    k = len(w.gens)
    A = sympy.Matrix([[sympy.Rational(e) for e in m] for m in terms])
    b = sympy.Matrix([sympy.Integer(1)] * len(terms))
    try:
        sol, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        sol = sol.subs({p: sympy.Rational(1, 2) for p in params})
    weights = []
    for i in range(k):
        q = sympy.nsimplify(sol[i])
        if not q.is_Rational or q <= 0:
            return None
        weights.append(Fraction(int(q.p), int(q.q)))
    return weights


@dataclass
class WValidation:
    poly: sympy.Poly
    variables: List[str]
    milnor: int
    basis: List[Monomial]
    degrees: Tuple[int, int]
    weights: Optional[List[Fraction]] = None

    def to_json(self) -> dict:
        return {
            "w": poly_str(self.poly),
            "variables": self.variables,
            "milnor": self.milnor,
            "jacobian_basis": [monomial_str(m, self.variables) for m in self.basis],
            "degrees": list(self.degrees),
            "weights": self.weights,
        }


def validate_w(w: sympy.Poly, max_deg: int) -> WValidation:
    """
    Check w(0) = 0 and dw(0) = 0, then compare the Jacobian quotient dimensions
    at truncation degrees max_deg - 1 and max_deg.

    Raises:
        NotCritical: the origin is not a critical point of w
        NotIsolatedOrTruncationTooLow: the two dimensions differ
    """
    variables = variable_names(w)
    terms = poly_terms(w)
    if not terms:
        raise NotCritical("w = 0 has no isolated critical point")
    k = len(variables)
    if terms.get((0,) * k):
        raise NotCritical(f"w(0) = {terms[(0,) * k]} for w = {poly_str(w)}")
    for i, name in enumerate(variables):
        linear = tuple(1 if j == i else 0 for j in range(k))
        if terms.get(linear):
            raise NotCritical(f"d{name} w(0) = {terms[linear]} for w = {poly_str(w)}")
    low = jacobian_basis(w, max_deg - 1)
    high = jacobian_basis(w, max_deg)
    if len(low) != len(high):
        raise NotIsolatedOrTruncationTooLow(
            f"Jacobian quotient of {poly_str(w)} has dimension {len(low)} at degree {max_deg - 1} "
            f"but {len(high)} at degree {max_deg}"
        )
    logger.info("w = %s: Milnor number %d" % (poly_str(w), len(high)))
    return WValidation(w, variables, len(high), high, (max_deg - 1, max_deg), quasi_homogeneous_weights(w))


# ==================================================
# The algebra
# ==================================================


@dataclass
class MFAlgebra:
    """
    Attributes:
        algebra: Q[Y]_{<=max_deg} (x) End(V) with d = [D(w), -]
        poly: the truncated polynomial algebra Q[Y]_{<=max_deg}
        Dw: D(w) in `algebra`
        w_element: w (x) 1 in `algebra`
        w_poly: w in `poly`
    """
    algebra: SuperAlgebra
    poly: SuperAlgebra
    Dw: Element
    w_element: Element
    w_poly: Element
    w: sympy.Poly
    decomposition: List[sympy.Poly]
    max_deg: int
    validation: WValidation
    monos: List[Monomial] = field(default_factory=list)

    @property
    def variables(self) -> List[str]:
        return self.validation.variables

    @property
    def k(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return 2 ** self.k

    def vparity(self, i: int) -> int:
        return len(odd_monomials(self.k)[i]) % 2

    def split(self, index: int) -> Tuple[int, int, int]:
        """A_w basis index -> (monomial index, row, column)."""
        mono, entry = divmod(index, self.m * self.m)
        i, j = divmod(entry, self.m)
        return mono, i, j

    def describe(self) -> dict:
        return {
            "w": poly_str(self.w),
            "decomposition": decomposition_str(self.decomposition, self.variables),
            "max_deg": self.max_deg,
            "dim": self.algebra.dim,
            "milnor": self.validation.milnor,
        }

    def __repr__(self):
        return f"[MFAlgebra w: {poly_str(self.w)}, max_deg: {self.max_deg}, dim: {self.algebra.dim}]"


def _tensor_element(terms: Dict[Monomial, Fraction], end_el: Element, index: Dict[Monomial, int],
                    m: int, max_deg: int) -> Element:
    out: Element = {}
    for mono, c in terms.items():
        if mono not in index:
            raise NotIsolatedOrTruncationTooLow(f"monomial of degree {sum(mono)} exceeds max_deg {max_deg}")
        for e, d in end_el.items():
            add_into(out, {index[mono] * m * m + e: c * d})
    return out


def build_Aw(w: sympy.Poly, dec: Optional[Sequence[sympy.Poly]] = None, max_deg: Optional[int] = None,
             validate: bool = True) -> MFAlgebra:
    """
    Args:
        dec: w_1..w_k with sum y_i w_i = w; defaults to `default_decomposition`
        max_deg: polynomial truncation degree, 2 deg(w) by default

    Raises:
        BadDecomposition, NotCritical, NotIsolatedOrTruncationTooLow
    """
    dec = list(dec) if dec is not None else default_decomposition(w)
    check_decomposition(w, dec)
    max_deg = max_deg or 2 * w.total_degree()
    variables = variable_names(w)
    validation = validate_w(w, max_deg) if validate else WValidation(w, variables, 0, [], (max_deg, max_deg))
    k = len(variables)
    m = 2 ** k
    monos = monomials(k, max_deg)
    index = {mono: i for i, mono in enumerate(monos)}
    poly = poly_algebra(variables, max_deg)
    big = tensor(poly, end_odd_variables(k))
    theta, dtheta = odd_variable_operators(k)

    Dw: Element = {}
    for i in range(k):
        y_i = {tuple(1 if j == i else 0 for j in range(k)): Fraction(1)}
        add_into(Dw, _tensor_element(y_i, dtheta[i], index, m, max_deg))
        add_into(Dw, _tensor_element(poly_terms(dec[i]), theta[i], index, m, max_deg))
    one = {i * m + i: Fraction(1) for i in range(m)}
    w_terms = poly_terms(w)
    w_element = _tensor_element(w_terms, one, index, m, max_deg)
    w_poly = {index[mono]: c for mono, c in w_terms.items()}

    try:
        square = big.mul(Dw, Dw)
    except TruncationOverflow as e:
        raise NotIsolatedOrTruncationTooLow(f"D(w)^2 leaves degree {max_deg}: {e}") from e
    if square != w_element:
        raise BadDecomposition(f"D(w)^2 differs from w (x) 1 for {decomposition_str(dec, variables)}")
    algebra = set_differential_commutator(big, Dw, f"A_w({poly_str(w)})<={max_deg}")
    logger.info("Built A_w for w = %s: dim %d, max_deg %d" % (poly_str(w), algebra.dim, max_deg))
    return MFAlgebra(algebra, poly, Dw, w_element, w_poly, w, dec, max_deg, validation, monos)


# ==================================================
# Insertion operators
# ==================================================


def op_bw(w_element: Element, label: str = "w") -> ChainOperator:
    """b^e(w) = sum_i w^(i), odd."""
    return InsertAll(w_element, 0, label)


def op_bDw(mfa: MFAlgebra) -> ChainOperator:
    """b^e(D(w)) = sum_i D(w)^(i), even."""
    return InsertAll(mfa.Dw, 1, "D(w)")


def twisted_b(w_element: Element, label: str = "w") -> ChainOperator:
    """b^e(mu) + b^e(w)."""
    return BMu() + op_bw(w_element, label)


def op_U_w(w_element: Element, label: str = "w") -> ChainOperator:
    """U(w) = -1/2 mu(0) w(1) on both components."""
    return Scaled(-HALF, Mu(0) @ Insert(w_element, 1, 0, label))


def op_V_w(w_element: Element, label: str = "w") -> ChainOperator:
    """V(w) = -1/2 h^e sum_{i<j} tau^j w(i), from C into C^+."""
    return Scaled(-HALF, He() @ TauSum("insert", element=w_element, element_parity=0, label=label) @ ProjC())
