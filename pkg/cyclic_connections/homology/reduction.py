"""
Reduction of top-degree forms in the twisted de Rham cohomology
H = Omega^k[[u]] / (-dw + ud) Omega^{k-1}[[u]] onto a Jacobian basis.

A top form f vol is split as sum c_m m vol + sum g_i d_i w vol; since
dw ^ eta = u d eta in cohomology, the remainder becomes u sum_i d_i g_i vol
and the reduction recurses on it with one more power of u.

Usage:
    w = parse_poly("x^3", ["x"])
    print(gd_reduce({(4,): Fraction(1)}, w))  # 2/3*u * x
    A = connection_matrix(w)
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Union

import sympy
from sympy.polys.matrices import DomainMatrix

from cyclic_connections.algebra.polynomials import Monomial, monomial_str, poly_str, poly_terms, variable_names
from cyclic_connections.algebra.scalars import LaurentSeries
from cyclic_connections.algebra.superalg import monomials
from cyclic_connections.homology.series_matrix import SeriesMatrix
from cyclic_connections.mf.aw import (
    NotIsolatedOrTruncationTooLow,
    qq_element,
    partials,
    quasi_homogeneous_weights,
    validate_w,
)
from cyclic_connections.mf.derham import Form

logger = logging.getLogger(__name__)

MAX_REDUCTION_STEPS = 64
CONVENTIONS = ("shifted", "classical")


class NonTermination(ValueError):
    pass


@dataclass
class ReducedForm:
    """coords[j] is the u-series coefficient of basis[j] vol."""
    basis: List[Monomial]
    coords: List[LaurentSeries]
    variables: List[str]
    steps: int
    exact: bool = True

    def __str__(self) -> str:
        parts = [f"({c}) * {monomial_str(m, self.variables)}" for m, c in zip(self.basis, self.coords) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "basis": [monomial_str(m, self.variables) for m in self.basis],
            "coords": [str(c) for c in self.coords],
            "steps": self.steps,
        }


def stable_jacobian_basis(w: sympy.Poly, max_tries: int = 6) -> List[Monomial]:
    """Jacobian basis at the first truncation degree where the quotient dimension settles."""
    k = len(w.gens)
    degree = max(k * (w.total_degree() - 2) + 1, w.total_degree())
    last_error = None
    for _ in range(max_tries):
        try:
            return validate_w(w, degree).basis
        except NotIsolatedOrTruncationTooLow as e:
            last_error = e
            degree += 1
    raise last_error


def _weight(m: Monomial, weights: Optional[Sequence[Fraction]]) -> Fraction:
    if weights is None:
        return Fraction(sum(m))
    return sum((q * e for q, e in zip(weights, m)), Fraction(0))


def _monomials_up_to(k: int, bound: Fraction, weights: Optional[Sequence[Fraction]]) -> List[Monomial]:
    if bound < 0:
        return []
    if weights is None:
        return monomials(k, int(bound))
    max_deg = int(bound / min(weights))
    return [m for m in monomials(k, max_deg) if _weight(m, weights) <= bound]


def _solve_split(f: Dict[Monomial, Fraction], basis: Sequence[Monomial], dws: Sequence[Dict[Monomial, Fraction]],
                 weights: Optional[Sequence[Fraction]], dw_weights: Sequence[Fraction]):
    """
    f = sum c_m m + sum g_i d_i w with weight(g_i) + weight(d_i w) <= weight(f).

    Returns:
        (c over basis, [g_i]) with free unknowns set to zero

    Raises:
        NonTermination: f is not in the span
    """
    k = len(dws)
    bound = max(_weight(m, weights) for m in f)
    if weights is None:
        bound = max(bound, max((_weight(m, None) for m in basis), default=Fraction(0)))
    basis_cols = [m for m in basis if _weight(m, weights) <= bound]
    g_cols = []
    for i, dwi in enumerate(dws):
        if not dwi:
            continue
        g_cols.extend((i, m) for m in _monomials_up_to(k, bound - dw_weights[i], weights))

    columns: List[Dict[Monomial, Fraction]] = [{m: Fraction(1)} for m in basis_cols]
    for i, m in g_cols:
        columns.append({tuple(a + b for a, b in zip(mono, m)): c for mono, c in dws[i].items()})
    row_monos = sorted({m for col in columns for m in col} | set(f), key=lambda m: (sum(m), m))
    row_of = {m: r for r, m in enumerate(row_monos)}
    rows = [[sympy.QQ(0)] * (len(columns) + 1) for _ in row_monos]
    for j, col in enumerate(columns):
        for m, c in col.items():
            rows[row_of[m]][j] += qq_element(c)
    for m, c in f.items():
        rows[row_of[m]][-1] = qq_element(c)

    R, pivots = DomainMatrix(rows, (len(rows), len(columns) + 1), sympy.QQ).rref()
    if len(columns) in pivots:
        raise NonTermination(f"{f} is not in the span of the Jacobian basis and the gradient ideal")
    R = R.to_Matrix()
    solution = [Fraction(0)] * len(columns)
    for r, p in enumerate(pivots):
        value = sympy.Rational(R[r, len(columns)])
        solution[p] = Fraction(int(value.p), int(value.q))

    c = {m: solution[j] for j, m in enumerate(basis_cols)}
    g: List[Dict[Monomial, Fraction]] = [{} for _ in range(k)]
    for j, (i, m) in enumerate(g_cols):
        value = solution[len(basis_cols) + j]
        if value:
            g[i][m] = value
    return c, g


def _divergence(g: Sequence[Dict[Monomial, Fraction]]) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    for i, gi in enumerate(g):
        for m, c in gi.items():
            if m[i]:
                lowered = m[:i] + (m[i] - 1,) + m[i + 1:]
                out[lowered] = out.get(lowered, Fraction(0)) + m[i] * c
    return {m: c for m, c in out.items() if c}


def gd_reduce(f: Union[Form, Dict[Monomial, Fraction]], w: sympy.Poly,
              basis: Optional[Sequence[Monomial]] = None) -> ReducedForm:
    """
    Coordinates of the class of f vol on the Jacobian basis.

    Args:
        f: a top-degree Form or its coefficient polynomial as a monomial dict
        basis: Jacobian basis; computed from w when omitted

    Raises:
        NonTermination: a split fails or the degree does not drop
    """
    variables = variable_names(w)
    k = len(variables)
    if isinstance(f, Form):
        top = tuple(range(k))
        stray = [key for key in f.terms if key[1] != top]
        if stray:
            raise ValueError(f"gd_reduce takes top-degree forms, got {f}")
        f = {key[0]: c for key, c in f.terms.items()}
    f = {tuple(m): Fraction(c) for m, c in f.items() if c}
    if basis is None:
        basis = stable_jacobian_basis(w)
    basis = list(basis)
    weights = quasi_homogeneous_weights(w)
    dws = partials(w)
    if weights is None:
        dw_weights = [Fraction(max((sum(m) for m in d), default=0)) for d in dws]
    else:
        dw_weights = [1 - q for q in weights]

    coords: Dict[Monomial, Dict[int, Fraction]] = {m: {} for m in basis}
    power = 0
    while f:
        if power >= MAX_REDUCTION_STEPS:
            raise NonTermination(f"reduction modulo dw of {poly_str(w)} did not finish in {MAX_REDUCTION_STEPS} steps")
        top_weight = max(_weight(m, weights) for m in f)
        c, g = _solve_split(f, basis, dws, weights, dw_weights)
        for m, value in c.items():
            if value:
                coords[m][power] = coords[m].get(power, Fraction(0)) + value
        f = _divergence(g)
        if f and max(_weight(m, weights) for m in f) >= top_weight:
            raise NonTermination(f"degree did not drop while reducing modulo dw of {poly_str(w)}")
        power += 1
    logger.debug("Reduced in %d steps" % power)
    return ReducedForm(basis, [LaurentSeries(coords[m]) for m in basis], variables, power)


def connection_matrix(w: sympy.Poly, convention: str = "shifted",
                      basis: Optional[Sequence[Monomial]] = None) -> SeriesMatrix:
    """
    The matrix of nabla_{d/du} on the Jacobian basis m_j vol: column j holds
    (1/u^2) R(w m_j), minus k/(2u) on the diagonal in the shifted convention.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"Unknown convention {convention}, expected one of {CONVENTIONS}")
    if basis is None:
        basis = stable_jacobian_basis(w)
    basis = list(basis)
    k = len(w.gens)
    w_terms = poly_terms(w)
    columns = []
    for j, m in enumerate(basis):
        product = {tuple(a + b for a, b in zip(m, mono)): c for mono, c in w_terms.items()}
        reduced = gd_reduce(product, w, basis)
        column = [s.shift(-2) for s in reduced.coords]
        if convention == "shifted":
            column[j] = column[j] - LaurentSeries({-1: Fraction(k, 2)})
        columns.append(column)
    return SeriesMatrix.from_columns(columns, len(basis))
