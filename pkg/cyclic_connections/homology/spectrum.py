"""
Regular-singular normal forms and spectra of connections over Q((u)).

A connection is given by its matrix A(u) on a basis of Q[[u]]^n, so that
nabla_{d/du} of the basis columns is A. The pipeline:

    1. saturate the lattice under u nabla until its u-adic index stabilizes
    2. read the residue R0 of u nabla on the saturated lattice
    3. gauge away the higher terms of u nabla one power of u at a time
    4. split R0 into Jordan blocks; the columns of Psi are then sections with
       u nabla psi = lambda psi (mod u^N)
    5. express the original basis in Psi and reduce it to a V-adapted basis;
       the orders of that basis form the spectrum

Usage:
    w = parse_poly("x^3", ["x"])
    report = residue_spectrum(w)
    print(report.spectrum_shifted)  # [-1/6, 1/6]
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from cyclic_connections.algebra.scalars import LaurentSeries
from cyclic_connections.homology.reduction import connection_matrix, stable_jacobian_basis
from cyclic_connections.homology.series_matrix import PrecisionExhausted, SeriesMatrix, column_basis
from cyclic_connections.utils.constants import DEFAULT_SATURATION_STEPS, DEFAULT_U_PRECISION

logger = logging.getLogger(__name__)


class NotRegularSingular(ValueError):
    pass


class IrrationalEigenvalues(ValueError):
    pass


class ResonantResidue(ValueError):
    pass


def _rational(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


# ==================================================
# Lattices
# ==================================================


@dataclass
class Lattice:
    """Q[[u]]-span of the columns of `basis`; index is the u-adic valuation of its determinant."""
    basis: SeriesMatrix
    dim: int
    index: int

    def __repr__(self):
        return f"[Lattice dim: {self.dim}, index: {self.index}]"


def apply_nabla(A: SeriesMatrix, B: SeriesMatrix) -> SeriesMatrix:
    """nabla_{d/du} of the columns of B: B' + A B."""
    return B.ddu() + A @ B


def saturate_lattice(L0: SeriesMatrix, A: SeriesMatrix, cap: int = DEFAULT_SATURATION_STEPS) -> Tuple[Lattice, int]:
    """
    Smallest lattice containing L0 and stable under u nabla.

    Returns:
        (lattice, number of rounds that changed it)

    Raises:
        NotRegularSingular: still growing after `cap` rounds
    """
    basis, pivots = column_basis(L0)
    index = sum(pivots)
    for step in range(cap + 1):
        generators = basis.hstack(apply_nabla(A, basis).shift(1))
        new_basis, new_pivots = column_basis(generators)
        new_index = sum(new_pivots)
        if len(new_pivots) != len(pivots):
            raise NotRegularSingular(f"rank changed from {len(pivots)} to {len(new_pivots)} under u nabla")
        if new_index == index:
            logger.debug("Saturated after %d rounds, index %d" % (step, index))
            return Lattice(basis, len(pivots), index), step
        basis, pivots, index = new_basis, new_pivots, new_index
    raise NotRegularSingular(f"lattice still growing after {cap} rounds (index {index})")


def gauge(A: SeriesMatrix, B: SeriesMatrix, prec: Optional[int] = None) -> SeriesMatrix:
    """The matrix of u nabla_{d/du} on the columns of B."""
    Binv = B.inverse(prec)
    return (Binv @ apply_nabla(A, B)).shift(1).truncate(prec)


def tate_twist_matrix(A: SeriesMatrix, n: int) -> SeriesMatrix:
    """A - (n/2u) I, the twist of the connection by n."""
    return A - SeriesMatrix.identity(A.nrows).scale(Fraction(n, 2)).shift(-1)


# ==================================================
# Normal form
# ==================================================


def rational_eigenvalues(R0: sympy.Matrix) -> List[Fraction]:
    """
    Raises:
        IrrationalEigenvalues: some root of the characteristic polynomial is not rational
    """
    lam = sympy.Symbol("lam")
    roots = sympy.roots(R0.charpoly(lam).as_expr(), lam, filter="Q")
    if sum(roots.values()) != R0.rows:
        raise IrrationalEigenvalues(f"residue {R0.tolist()} has eigenvalues outside Q")
    out = []
    for value, mult in roots.items():
        out.extend([_rational(value)] * mult)
    return sorted(out)


def _solve_sylvester(R0: sympy.Matrix, Rj: sympy.Matrix, j: int) -> sympy.Matrix:
    """T with (R0 + j) T - T R0 = -Rj."""
    n = R0.rows
    I = sympy.eye(n)
    op = sympy.kronecker_product(I, R0 + j * I) - sympy.kronecker_product(R0.T, I)
    rhs = -Rj.T.reshape(n * n, 1)  # column-major vec of Rj
    try:
        sol, params = op.gauss_jordan_solve(rhs)
    except ValueError:
        raise ResonantResidue(f"cannot remove the u^{j} term: eigenvalues of the residue differ by {j}")
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    return sol.reshape(n, n).T


def _unipotent_inverse(T: sympy.Matrix, j: int, prec: int) -> SeriesMatrix:
    """(I + u^j T)^{-1} up to u^prec."""
    n = T.rows
    out = SeriesMatrix.identity(n)
    power = sympy.eye(n)
    m = 1
    while j * m < prec:
        power = power * (-T)
        out = out + SeriesMatrix.from_sympy(power, j * m)
        m += 1
    return out.truncate(prec)


def normalize_residue(Ahat: SeriesMatrix, prec: int) -> Tuple[sympy.Matrix, SeriesMatrix]:
    """
    Gauge u nabla to its constant term.

    Args:
        Ahat: matrix of u nabla, holomorphic
    Returns:
        (R0, G) with G^{-1}(u G' + Ahat G) = R0 mod u^prec
    """
    n = Ahat.nrows
    R0 = Ahat.coefficient(0)
    G = SeriesMatrix.identity(n)
    current = Ahat.truncate(prec)
    for j in range(1, prec):
        Rj = current.coefficient(j)
        if Rj.is_zero_matrix:
            continue
        T = _solve_sylvester(R0, Rj, j)
        step = SeriesMatrix.identity(n) + SeriesMatrix.from_sympy(T, j)
        step_inv = _unipotent_inverse(T, j, prec)
        current = (step_inv @ (step.ddu().shift(1) + current @ step)).truncate(prec)
        G = (G @ step).truncate(prec)
    return R0, G


# ==================================================
# Orders and V-adapted bases
# ==================================================


def _order(coords: Sequence[LaurentSeries], eigen: Sequence[Fraction]) -> Fraction:
    best = None
    for c, lam in zip(coords, eigen):
        v = c.valuation()
        if v is not None:
            o = lam + v
            if best is None or o < best:
                best = o
    if best is None:
        raise PrecisionExhausted("a basis vector vanishes on the whole window")
    for c, lam in zip(coords, eigen):
        if c.is_zero() and c.prec is not None and lam + c.prec <= best:
            raise PrecisionExhausted(f"order {best} is not certified by the window")
    return best


def _leading(coords: Sequence[LaurentSeries], eigen: Sequence[Fraction], order: Fraction) -> List[Fraction]:
    out = []
    for c, lam in zip(coords, eigen):
        shift = order - lam
        if shift.denominator != 1:
            out.append(Fraction(0))
            continue
        power = int(shift)
        if c.prec is not None and power >= c.prec:
            raise PrecisionExhausted(f"leading coefficient at u^{power} is outside the window")
        out.append(c.coeffs.get(power, Fraction(0)))
    return out


def _in_span(vectors: Sequence[List[Fraction]], target: List[Fraction]) -> Optional[List[Fraction]]:
    if not vectors:
        return None
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in v] for v in vectors]).T
    b = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in target])
    try:
        sol, params = M.gauss_jordan_solve(b)
    except ValueError:
        return None
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    return [_rational(x) for x in sol]


def v_adapted_orders(columns: Sequence[Sequence[LaurentSeries]], eigen: Sequence[Fraction],
                     prec: int) -> List[Fraction]:
    """
    Orders of a basis of the Q[[u]]-span of `columns` whose leading parts are
    independent in each class of eigenvalues mod Z.

    Raises:
        PrecisionExhausted: the window is too short to separate the leading parts
    """
    reduced: List[Tuple[List[LaurentSeries], Fraction]] = []
    pending = [list(col) for col in columns]
    guard = 0
    while pending:
        guard += 1
        if guard > 64 * len(eigen) * max(prec, 1):
            raise PrecisionExhausted("V-adapted reduction did not settle")
        vec = pending.pop(0)
        while True:
            o = _order(vec, eigen)
            lead = _leading(vec, eigen, o)
            partners = [(r, ro) for r, ro in reduced if ro <= o and (o - ro).denominator == 1]
            combo = _in_span([_leading(r, eigen, ro) for r, ro in partners], lead)
            if combo is None:
                break
            for (r, ro), a in zip(partners, combo):
                if a:
                    shift = int(o - ro)
                    vec = [x - y.shift(shift).scale(a) for x, y in zip(vec, r)]
        # vectors of larger order in the same class may now reduce further
        bumped = [(r, ro) for r, ro in reduced if ro > o and (ro - o).denominator == 1]
        reduced = [(r, ro) for r, ro in reduced if not (ro > o and (ro - o).denominator == 1)]
        reduced.append((vec, o))
        pending.extend(r for r, _ in bumped)
    return sorted(ro for _, ro in reduced)


# ==================================================
# Reports
# ==================================================


@dataclass
class SpectrumReport:
    residues: List[Fraction]
    jumps: Dict[Fraction, int]
    spectrum_shifted: List[Fraction]
    spectrum_classical: List[Fraction]
    convention: str
    milnor: int
    connection_matrix: SeriesMatrix
    prec: int
    saturation_steps: int = 0
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "residues": [[value, mult] for value, mult in sorted(Counter(self.residues).items())],
            "jumps": {str(k): v for k, v in sorted(self.jumps.items())},
            "spectrum_shifted": self.spectrum_shifted,
            "spectrum_classical": self.spectrum_classical,
            "convention": self.convention,
            "milnor": self.milnor,
            "connection_matrix": self.connection_matrix.to_json(),
            "prec": self.prec,
            "saturation_steps": self.saturation_steps,
            "notes": self.notes,
        }


def _spectrum_once(A: SeriesMatrix, prec: int, shift: Fraction) -> SpectrumReport:
    n = A.nrows
    lattice, steps = saturate_lattice(SeriesMatrix.identity(n), A)
    B = lattice.basis
    Ahat = gauge(A, B, prec)
    v = Ahat.valuation()
    if v is not None and v < 0:
        raise NotRegularSingular(f"u nabla has a pole of order {-v} on the saturated lattice")
    R0, G = normalize_residue(Ahat, prec)
    residues = rational_eigenvalues(R0)
    P, J = R0.jordan_form()
    eigen = [_rational(J[i, i]) for i in range(n)]
    Psi = (B @ G @ SeriesMatrix.from_sympy(P)).truncate(prec)
    coords = Psi.inverse(prec)
    orders = v_adapted_orders(coords.columns(), eigen, prec)
    return SpectrumReport(
        residues=residues,
        jumps=dict(Counter(orders)),
        spectrum_shifted=orders,
        spectrum_classical=[o + shift for o in orders],
        convention="shifted",
        milnor=n,
        connection_matrix=A,
        prec=prec,
        saturation_steps=steps,
    )


def residue_spectrum_from_matrix(A: SeriesMatrix, prec: int = DEFAULT_U_PRECISION,
                                 shift: Fraction = Fraction(0)) -> SpectrumReport:
    """
    Spectrum of the lattice spanned by the basis, retried once at twice the
    precision when the window runs out.

    Args:
        shift: added to the orders to get the classical spectrum
    """
    try:
        return _spectrum_once(A, prec, Fraction(shift))
    except PrecisionExhausted as e:
        logger.warning("Precision %d exhausted (%s), retrying at %d" % (prec, e, 2 * prec))
        report = _spectrum_once(A, 2 * prec, Fraction(shift))
        report.notes.append(f"retried at precision {2 * prec}")
        return report


def residue_spectrum(w: sympy.Poly, prec: int = DEFAULT_U_PRECISION) -> SpectrumReport:
    """Spectrum of the Brieskorn lattice spanned by the Jacobian basis forms."""
    basis = stable_jacobian_basis(w)
    A = connection_matrix(w, "shifted", basis)
    k = len(w.gens)
    report = residue_spectrum_from_matrix(A, prec, Fraction(k, 2))
    logger.info("Spectrum of %s: %s" % (w.as_expr(), [str(o) for o in report.spectrum_shifted]))
    return report


# ==================================================
# Hodge-type filtration from the orders
# ==================================================


@dataclass
class FilteredSpace:
    """dim F^n for every n where it changes, plus one step beyond on each side."""
    dim: int
    profile: Dict[int, int]

    def at(self, n: int) -> int:
        if n < min(self.profile):
            return self.dim
        if n > max(self.profile):
            return 0
        return self.profile[n]

    def to_json(self) -> dict:
        return {"dim": self.dim, "profile": {str(n): d for n, d in sorted(self.profile.items())}}


def psi_filtration(orders, twist: int = 0) -> FilteredSpace:
    """
    dim F^n = #{i : -ceil(o_i) >= n}, with orders moved by -twist/2.

    Args:
        orders: a SpectrumReport or its shifted spectrum
    """
    if isinstance(orders, SpectrumReport):
        orders = orders.spectrum_shifted
    moved = [Fraction(o) - Fraction(twist, 2) for o in orders]
    levels = [-math.ceil(o) for o in moved]
    if not levels:
        return FilteredSpace(0, {0: 0})
    profile = {n: sum(1 for lv in levels if lv >= n) for n in range(min(levels) - 1, max(levels) + 2)}
    return FilteredSpace(len(levels), profile)
