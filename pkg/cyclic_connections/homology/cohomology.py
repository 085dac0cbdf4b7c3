"""
Cohomology of finite free complexes over Q[[u]].

A complex is a square SeriesMatrix D (columns are images) together with a
degree label per basis vector. With modulus=2 the labels are parities and D
is odd; with modulus=None they are integer form degrees and D raises them by
one. For each degree p

    free_p    = dim_p - rank(D out of p) - rank(D into p)
    torsion_p = positive Smith exponents of D into p

Usage:
    pres = u_total_cohomology(D, [0, 1])
    assert dense_cohomology_dims(D, [0, 1], 6) == expected_dense_dims(pres, 6)
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.matrices import DomainMatrix
from tqdm import tqdm

from cyclic_connections.algebra.polynomials import Monomial, monomial_str, poly_terms, variable_names
from cyclic_connections.algebra.scalars import LaurentSeries
from cyclic_connections.algebra.superalg import SuperAlgebra, TruncationOverflow, monomials
from cyclic_connections.chains.operators import connes_Be, hochschild_b
from cyclic_connections.chains.words import Sector, Terms, Word, basis_words, format_word, word_parity
from cyclic_connections.homology.series_matrix import SeriesMatrix, snf_over_series
from cyclic_connections.mf.aw import qq_element, quasi_homogeneous_weights
from cyclic_connections.mf.derham import Form, FormSeries, twisted_diff

logger = logging.getLogger(__name__)


class NotADifferential(ValueError):
    pass


@dataclass
class CohomologyPresentation:
    """
    H_p = Q[[u]]^{free[p]} + sum_e Q[[u]]/u^e over e in torsion[p].

    Attributes:
        lattice_basis: per degree, a Q[[u]]-basis of the cycles as columns
        certified_prec: first u-power not certified, None when exact
    """
    free: Dict[int, int]
    torsion: Dict[int, List[int]]
    lattice_basis: Dict[int, SeriesMatrix] = field(default_factory=dict)
    certified_prec: Optional[int] = None
    modulus: Optional[int] = 2

    @property
    def free_rank(self) -> int:
        return sum(self.free.values())

    def to_json(self) -> dict:
        return {
            "free": {str(p): n for p, n in sorted(self.free.items())},
            "torsion": {str(p): list(e) for p, e in sorted(self.torsion.items())},
            "free_rank": self.free_rank,
            "certified_prec": self.certified_prec,
        }

    def __repr__(self):
        return f"[CohomologyPresentation free: {self.free}, torsion: {self.torsion}]"


def _degree_map(degrees: Sequence[int], modulus: Optional[int]) -> Dict[int, List[int]]:
    out: Dict[int, List[int]] = {}
    for i, p in enumerate(degrees):
        p = p % modulus if modulus else p
        out.setdefault(p, []).append(i)
    return out


def _next(p: int, modulus: Optional[int]) -> int:
    return (p + 1) % modulus if modulus else p + 1


def _prev(p: int, modulus: Optional[int]) -> int:
    return (p - 1) % modulus if modulus else p - 1


def _block(D: SeriesMatrix, rows: Sequence[int], cols: Sequence[int]) -> SeriesMatrix:
    return SeriesMatrix([[D[i, j] for j in cols] for i in rows], len(cols))


def check_homogeneous(D: SeriesMatrix, degrees: Sequence[int], modulus: Optional[int] = 2):
    """D must raise degree by one."""
    for j, q in enumerate(degrees):
        for i, p in enumerate(degrees):
            if D[i, j].is_zero():
                continue
            if modulus:
                p, q = p % modulus, q % modulus
            if p != _next(q, modulus):
                raise NotADifferential(f"entry ({i}, {j}) maps degree {q} to degree {p}")


def _rank_and_exponents(M: SeriesMatrix, strict: bool) -> Tuple[int, List[int]]:
    if M.nrows == 0 or M.ncols == 0:
        return 0, []
    snf = snf_over_series(M, strict=strict)
    return snf.rank, snf.exponents


def u_total_cohomology(D: SeriesMatrix, degrees: Sequence[int], modulus: Optional[int] = 2,
                       strict: bool = False) -> CohomologyPresentation:
    """
    Free ranks and torsion exponents of H(D) over Q[[u]].

    Raises:
        NotADifferential: D does not raise degree by one
    """
    check_homogeneous(D, degrees, modulus)
    by_degree = _degree_map(degrees, modulus)
    free, torsion, lattice = {}, {}, {}
    for p, idx in sorted(by_degree.items()):
        out_rows = by_degree.get(_next(p, modulus), [])
        in_cols = by_degree.get(_prev(p, modulus), [])
        D_out = _block(D, out_rows, idx)
        D_in = _block(D, idx, in_cols)
        rank_out, _ = _rank_and_exponents(D_out, strict)
        rank_in, exponents_in = _rank_and_exponents(D_in, strict)
        free[p] = len(idx) - rank_out - rank_in
        torsion[p] = sorted(e for e in exponents_in if e > 0)
        # cycles: the columns of the right transform past the rank
        if D_out.nrows and D_out.ncols:
            right = snf_over_series(D_out, strict=strict).right
            cycles = [right.column(j) for j in range(rank_out, len(idx))]
        else:
            cycles = [[LaurentSeries.one() if r == j else LaurentSeries.zero() for r in range(len(idx))]
                      for j in range(len(idx))]
        full = []
        for col in cycles:
            vec = [LaurentSeries.zero()] * len(degrees)
            for r, i in enumerate(idx):
                vec[i] = col[r]
            full.append(vec)
        lattice[p] = SeriesMatrix.from_columns(full, len(degrees))
    pres = CohomologyPresentation(free, torsion, lattice, D.prec, modulus)
    logger.info("Cohomology: free %s, torsion %s" % (free, torsion))
    return pres


# ==================================================
# Dense check over Q[u]/u^N
# ==================================================


def _dense_rank(M: np.ndarray) -> int:
    """Rank of an object array of Fractions by Gaussian elimination."""
    M = M.copy()
    rows, cols = M.shape
    rank = 0
    for c in range(cols):
        pivot = None
        for r in range(rank, rows):
            if M[r, c] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        M[[rank, pivot]] = M[[pivot, rank]]
        for r in range(rows):
            if r != rank and M[r, c] != 0:
                M[r] = M[r] - (M[r, c] / M[rank, c]) * M[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def _dense_block(D: SeriesMatrix, rows: Sequence[int], cols: Sequence[int], N: int) -> np.ndarray:
    """The Q-matrix of a block acting on vectors with coefficients u^0..u^{N-1}."""
    out = np.full((len(rows) * N, len(cols) * N), Fraction(0), dtype=object)
    for a, i in enumerate(rows):
        for b, j in enumerate(cols):
            entry = D[i, j]
            for power, c in entry.coeffs.items():
                if power < 0:
                    raise ValueError(f"entry ({i}, {j}) = {entry} is not holomorphic")
                for s in range(N - power):
                    out[a * N + s + power, b * N + s] = c
    return out


def dense_cohomology_dims(D: SeriesMatrix, degrees: Sequence[int], N: int,
                          modulus: Optional[int] = 2) -> Dict[int, int]:
    """Q-dimensions of H(D) over Q[u]/u^N, one per degree."""
    by_degree = _degree_map(degrees, modulus)
    dims = {}
    for p, idx in sorted(by_degree.items()):
        out_rows = by_degree.get(_next(p, modulus), [])
        in_cols = by_degree.get(_prev(p, modulus), [])
        rank_out = _dense_rank(_dense_block(D, out_rows, idx, N)) if out_rows else 0
        rank_in = _dense_rank(_dense_block(D, idx, in_cols, N)) if in_cols else 0
        dims[p] = len(idx) * N - rank_out - rank_in
    return dims


def expected_dense_dims(pres: CohomologyPresentation, N: int) -> Dict[int, int]:
    """N free_p plus min(e, N) for the torsion of degree p and of degree p + 1."""
    dims = {}
    for p, f in pres.free.items():
        nxt = _next(p, pres.modulus)
        tors = pres.torsion.get(p, []) + pres.torsion.get(nxt, [])
        dims[p] = N * f + sum(min(e, N) for e in tors)
    return dims


# ==================================================
# Truncated extended cyclic complex
# ==================================================


@dataclass
class TruncatedComplex:
    """
    CE words of tail <= L modulo bmu of tail L + 1 words, with
    D = b + u Be and Be dropping tails beyond L.
    """
    algebra: SuperAlgebra
    max_length: int
    words: List[Word]
    D: SeriesMatrix
    degrees: List[int]
    relations: int

    @property
    def dim(self) -> int:
        return len(self.words)

    def labels(self) -> List[str]:
        return [format_word(self.algebra, w) for w in self.words]


def _words_up_to(alg: SuperAlgebra, L: int) -> List[Word]:
    return [w for n in range(L + 1) for w in basis_words(alg, n, Sector.CE)]


def truncated_cyclic_complex(alg: SuperAlgebra, max_length: int, progress: bool = False) -> TruncatedComplex:
    """
    Raises:
        TruncationOverflow: a product leaves the truncated algebra
    """
    words = _words_up_to(alg, max_length)
    col_of = {w: i for i, w in enumerate(words)}
    b = hochschild_b()
    Be = connes_Be()

    def vector(terms: Terms) -> Dict[int, Fraction]:
        return {col_of[w]: c for w, c in terms.items() if len(w) - 1 <= max_length and c}

    relation_rows = []
    for w in tqdm(list(basis_words(alg, max_length + 1, Sector.CE)), disable=not progress, desc="relations"):
        image = vector(b.act({w: Fraction(1)}, alg))
        if image:
            row = [sympy.QQ(0)] * len(words)
            for i, c in image.items():
                row[i] = qq_element(c)
            relation_rows.append(row)

    pivot_rows: Dict[int, Dict[int, Fraction]] = {}
    if relation_rows:
        R, pivots = DomainMatrix(relation_rows, (len(relation_rows), len(words)), sympy.QQ).rref()
        R = R.to_Matrix()
        for r, p in enumerate(pivots):
            row = {}
            for j in range(len(words)):
                value = sympy.Rational(R[r, j])
                if value != 0:
                    row[j] = Fraction(int(value.p), int(value.q))
            pivot_rows[p] = row

    kept = [i for i in range(len(words)) if i not in pivot_rows]
    position = {i: r for r, i in enumerate(kept)}

    def reduce(vec: Dict[int, Fraction]) -> Dict[int, Fraction]:
        out = dict(vec)
        for p, row in pivot_rows.items():
            c = out.get(p)
            if not c:
                continue
            for j, value in row.items():
                out[j] = out.get(j, Fraction(0)) - c * value
        return {position[i]: c for i, c in out.items() if c and i in position}

    n = len(kept)
    D = SeriesMatrix.zeros(n, n)
    for col, i in enumerate(tqdm(kept, disable=not progress, desc="differential")):
        w = words[i]
        part0 = reduce(vector(b.act({w: Fraction(1)}, alg)))
        part1 = reduce(vector(Be.act({w: Fraction(1)}, alg)))
        for row in set(part0) | set(part1):
            D.rows[row][col] = LaurentSeries({0: part0.get(row, 0), 1: part1.get(row, 0)})
    kept_words = [words[i] for i in kept]
    degrees = [word_parity(alg, w) for w in kept_words]
    logger.info("Truncated complex at L=%d: %d words, %d relations" % (max_length, n, len(pivot_rows)))
    return TruncatedComplex(alg, max_length, kept_words, D, degrees, len(pivot_rows))


def hp_table(alg: SuperAlgebra, max_length: int, progress: bool = False) -> List[dict]:
    """Periodic-cyclic ranks per truncation level; overflow is reported, not raised."""
    table = []
    for L in range(max_length + 1):
        row = {"max_length": L}
        try:
            cx = truncated_cyclic_complex(alg, L, progress)
        except TruncationOverflow as e:
            row["overflow"] = str(e)
            table.append(row)
            continue
        pres = u_total_cohomology(cx.D, cx.degrees)
        row.update({"dim": cx.dim, "relations": cx.relations, **pres.to_json()})
        table.append(row)
    return table


# ==================================================
# Twisted de Rham complex on a weight window
# ==================================================


@dataclass
class DeRhamWindow:
    variables: List[str]
    forms: List[Tuple[Monomial, Tuple[int, ...]]]
    D: SeriesMatrix
    degrees: List[int]
    weight: Fraction

    def labels(self) -> List[str]:
        out = []
        for m, dy in self.forms:
            dys = "".join(f"d{self.variables[i]}" for i in dy)
            out.append(f"{monomial_str(m, self.variables)}{'*' + dys if dys else ''}")
        return out


def _form_weight(m: Monomial, dy: Sequence[int], weights: Optional[Sequence[Fraction]]) -> Fraction:
    if weights is None:
        return Fraction(sum(m) + len(dy))
    return sum((q * e for q, e in zip(weights, m)), Fraction(0)) + sum((weights[i] for i in dy), Fraction(0))


def derham_complex(w: sympy.Poly, weight: Optional[Fraction] = None) -> DeRhamWindow:
    """
    (Omega[[u]], -dw + ud) cut to p-forms of weight <= weight - (k - p) s,
    with s = 1 under quasi-homogeneous weights and s = deg w otherwise.
    The default window sits one above the heaviest Jacobian basis form.
    """
    from cyclic_connections.homology.reduction import stable_jacobian_basis

    variables = variable_names(w)
    k = len(variables)
    weights = quasi_homogeneous_weights(w)
    step = Fraction(1) if weights is not None else Fraction(w.total_degree())
    if weight is None:
        top = tuple(range(k))
        heaviest = max(_form_weight(m, top, weights) for m in stable_jacobian_basis(w))
        weight = Fraction(math.ceil(heaviest) + 1)
    weight = Fraction(weight)
    min_q = min(weights) if weights is not None else Fraction(1)

    forms = []
    for p in range(k + 1):
        bound = weight - (k - p) * step
        for dy in itertools.combinations(range(k), p):
            room = bound - _form_weight((0,) * k, dy, weights)
            if room < 0:
                continue
            for m in monomials(k, int(room / min_q)):
                if _form_weight(m, dy, weights) <= bound:
                    forms.append((m, dy))
    index = {key: i for i, key in enumerate(forms)}
    w_terms = poly_terms(w)
    n = len(forms)
    D = SeriesMatrix.zeros(n, n)
    for j, (m, dy) in enumerate(forms):
        image = twisted_diff(FormSeries.coerce(Form(variables, {(m, dy): Fraction(1)})), w_terms)
        entries: Dict[int, Dict[int, Fraction]] = {}
        for power, form in image.coeffs.items():
            for key, c in form.terms.items():
                if key not in index:
                    raise ValueError(f"window at weight {weight} is not closed under the differential")
                entries.setdefault(index[key], {})[power] = c
        for i, coeffs in entries.items():
            D.rows[i][j] = LaurentSeries(coeffs)
    degrees = [len(dy) for _, dy in forms]
    logger.info("de Rham window at weight %s: %d forms" % (weight, n))
    return DeRhamWindow(variables, forms, D, degrees, weight)


def derham_cohomology(w: sympy.Poly, weight: Optional[Fraction] = None) -> CohomologyPresentation:
    window = derham_complex(w, weight)
    return u_total_cohomology(window.D, window.degrees, modulus=None)
