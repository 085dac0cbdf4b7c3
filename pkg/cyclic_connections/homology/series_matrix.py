"""
Dense matrices over truncated Laurent series and their Smith decomposition.

Q[[u]] is a discrete valuation ring, so elimination pivots on the entry of
least u-valuation. Row and column operations multiply by the pivot's unit
part instead of dividing by it; every step stays exact on exact input and the
recorded transforms are invertible over Q[[u]].

Usage:
    M = SeriesMatrix.from_dicts([[{2: 1}, {3: 1}], [{}, {1: 1}]])
    snf = snf_over_series(M)
    print(snf.exponents)  # [1, 2]
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from cyclic_connections.algebra.scalars import LaurentSeries, to_fraction

logger = logging.getLogger(__name__)


class PrecisionExhausted(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


def _single_term(s: LaurentSeries) -> bool:
    return s.is_exact() and len(s.coeffs) == 1


class SeriesMatrix:
    """
    Args:
        rows: row-major entries; columns are the images of basis vectors
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence[LaurentSeries]], ncols: Optional[int] = None):
        self.rows: List[List[LaurentSeries]] = [[LaurentSeries.coerce(x) for x in row] for row in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else (ncols or 0)

    # ==================================================
    # Constructors
    # ==================================================

    @classmethod
    def zeros(cls, nrows: int, ncols: int, prec: Optional[int] = None) -> "SeriesMatrix":
        return cls([[LaurentSeries.zero(prec) for _ in range(ncols)] for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int, prec: Optional[int] = None) -> "SeriesMatrix":
        return cls([[LaurentSeries.one(prec) if i == j else LaurentSeries.zero(prec) for j in range(n)]
                    for i in range(n)], n)

    @classmethod
    def from_dicts(cls, rows: Sequence[Sequence[Dict[int, object]]], prec: Optional[int] = None) -> "SeriesMatrix":
        return cls([[LaurentSeries(entry, prec) for entry in row] for row in rows])

    @classmethod
    def from_rationals(cls, rows: Sequence[Sequence[object]], prec: Optional[int] = None) -> "SeriesMatrix":
        return cls([[LaurentSeries({0: to_fraction(c)}, prec) for c in row] for row in rows])

    @classmethod
    def from_sympy(cls, M: sympy.Matrix, power: int = 0) -> "SeriesMatrix":
        rows = []
        for i in range(M.rows):
            row = []
            for j in range(M.cols):
                c = sympy.Rational(M[i, j])
                row.append(LaurentSeries({power: Fraction(int(c.p), int(c.q))}))
            rows.append(row)
        return cls(rows, M.cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[LaurentSeries]], nrows: int) -> "SeriesMatrix":
        rows = [[columns[j][i] for j in range(len(columns))] for i in range(nrows)]
        return cls(rows, len(columns))

    # ==================================================
    # Access
    # ==================================================

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, key: Tuple[int, int]) -> LaurentSeries:
        i, j = key
        return self.rows[i][j]

    def column(self, j: int) -> List[LaurentSeries]:
        return [row[j] for row in self.rows]

    def columns(self) -> List[List[LaurentSeries]]:
        return [self.column(j) for j in range(self.ncols)]

    def copy(self) -> "SeriesMatrix":
        return SeriesMatrix([list(row) for row in self.rows], self.ncols)

    @property
    def prec(self) -> Optional[int]:
        precs = [x.prec for row in self.rows for x in row if x.prec is not None]
        return min(precs) if precs else None

    def valuation(self) -> Optional[int]:
        vals = [x.valuation() for row in self.rows for x in row if not x.is_zero()]
        return min(vals) if vals else None

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.rows for x in row)

    def coefficient(self, power: int) -> sympy.Matrix:
        """The rational matrix of u^power coefficients."""
        return sympy.Matrix(self.nrows, self.ncols,
                            lambda i, j: sympy.Rational(self.rows[i][j].coeffs.get(power, Fraction(0)).numerator,
                                                        self.rows[i][j].coeffs.get(power, Fraction(0)).denominator))

    def powers(self) -> List[int]:
        return sorted({p for row in self.rows for x in row for p in x.coeffs})

    # ==================================================
    # Arithmetic
    # ==================================================

    def _check_shape(self, other: "SeriesMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"Shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        self._check_shape(other)
        return SeriesMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        self._check_shape(other)
        return SeriesMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> "SeriesMatrix":
        return self.scale(-1)

    def scale(self, c) -> "SeriesMatrix":
        c = LaurentSeries.coerce(c)
        return SeriesMatrix([[c * x for x in row] for row in self.rows], self.ncols)

    def shift(self, k: int) -> "SeriesMatrix":
        return SeriesMatrix([[x.shift(k) for x in row] for row in self.rows], self.ncols)

    def ddu(self) -> "SeriesMatrix":
        return SeriesMatrix([[x.ddu() for x in row] for row in self.rows], self.ncols)

    def truncate(self, prec: Optional[int]) -> "SeriesMatrix":
        return SeriesMatrix([[x.truncate(prec) for x in row] for row in self.rows], self.ncols)

    def transpose(self) -> "SeriesMatrix":
        return SeriesMatrix([self.column(j) for j in range(self.ncols)], self.nrows)

    def hstack(self, other: "SeriesMatrix") -> "SeriesMatrix":
        if self.nrows != other.nrows:
            raise ValueError(f"Row mismatch {self.nrows} vs {other.nrows}")
        return SeriesMatrix([r + s for r, s in zip(self.rows, other.rows)], self.ncols + other.ncols)

    def __matmul__(self, other: "SeriesMatrix") -> "SeriesMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"Cannot multiply {self.shape} by {other.shape}")
        out = []
        for row in self.rows:
            new_row = []
            for j in range(other.ncols):
                acc = LaurentSeries.zero()
                for k, a in enumerate(row):
                    b = other.rows[k][j]
                    if a.is_zero() and a.is_exact() or b.is_zero() and b.is_exact():
                        continue
                    acc = acc + a * b
                new_row.append(acc)
            out.append(new_row)
        return SeriesMatrix(out, other.ncols)

    def apply(self, vector: Sequence[LaurentSeries]) -> List[LaurentSeries]:
        col = SeriesMatrix([[x] for x in vector], 1)
        return (self @ col).column(0)

    def inverse(self, prec: Optional[int] = None) -> "SeriesMatrix":
        """
        M^{-1} = R D^{-1} L from L M R = D.

        Raises:
            SingularMatrix: rank below the size on the window
        """
        if self.nrows != self.ncols:
            raise SingularMatrix(f"Cannot invert a {self.shape} matrix")
        snf = snf_over_series(self)
        if snf.rank < self.nrows:
            raise SingularMatrix(f"Rank {snf.rank} < {self.nrows}")
        n = self.nrows
        dinv = SeriesMatrix.zeros(n, n)
        for i, d in enumerate(snf.diagonal):
            dinv.rows[i][i] = d.invert(prec)
        return snf.right @ dinv @ snf.left

    # ==================================================
    # Comparison and rendering
    # ==================================================

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a.coeffs == b.coeffs for r, s in zip(self.rows, other.rows) for a, b in zip(r, s)
        )

    def __hash__(self):
        return hash(tuple(tuple(sorted(x.coeffs.items())) for row in self.rows for x in row))

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(x) for x in row) for row in self.rows) + "]"

    def __repr__(self):
        return f"[SeriesMatrix {self.nrows}x{self.ncols}, prec: {self.prec}]"

    def to_json(self) -> List[List[str]]:
        return [[str(x) for x in row] for row in self.rows]


# ==================================================
# Smith decomposition
# ==================================================


@dataclass
class SNFResult:
    """
    left @ M @ right = diag(diagonal) with exponents the u-valuations of the diagonal.
    """
    left: SeriesMatrix
    right: SeriesMatrix
    diagonal: List[LaurentSeries]
    exponents: List[int]
    rank: int

    @property
    def invariant_factors(self) -> List[int]:
        return list(self.exponents)


def _vanishes(x: LaurentSeries, strict: bool) -> bool:
    if not x.is_zero():
        return False
    if strict and not x.is_exact():
        raise PrecisionExhausted(f"entry vanishes on its window up to u^{x.prec} but is not known to be zero")
    return True


def _combine(rows: List[List[LaurentSeries]], target: int, source: int, unit: LaurentSeries,
             unit_inv: Optional[LaurentSeries], q: LaurentSeries, v: int):
    """row_target <- unit row_target - q u^-v row_source, or its division form when unit is a scalar."""
    factor = q.shift(-v)
    if unit_inv is not None:
        factor = factor * unit_inv
        rows[target] = [a - factor * b for a, b in zip(rows[target], rows[source])]
    else:
        rows[target] = [unit * a - factor * b for a, b in zip(rows[target], rows[source])]


def snf_over_series(M: SeriesMatrix, strict: bool = False) -> SNFResult:
    """
    Smith decomposition over Q[[u]] with transforms.

    Args:
        strict: raise PrecisionExhausted on entries that only vanish on their
            window; otherwise such entries count as zero

    Raises:
        PrecisionExhausted
    """
    r, c = M.shape
    work = [list(row) for row in M.rows]
    left = [list(row) for row in SeriesMatrix.identity(r).rows]
    # columns of `right` are kept as rows of its transpose
    right_t = [list(row) for row in SeriesMatrix.identity(c).rows]
    diagonal, exponents = [], []
    for t in range(min(r, c)):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                x = work[i][j]
                if _vanishes(x, strict):
                    continue
                v = x.valuation()
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        work[t], work[i] = work[i], work[t]
        left[t], left[i] = left[i], left[t]
        if j != t:
            for row in work:
                row[t], row[j] = row[j], row[t]
            right_t[t], right_t[j] = right_t[j], right_t[t]
        pivot = work[t][t]
        unit = pivot.shift(-v)
        unit_inv = unit.invert() if _single_term(unit) else None

        for i in range(t + 1, r):
            q = work[i][t]
            if q.is_zero():
                continue
            _combine(work, i, t, unit, unit_inv, q, v)
            _combine(left, i, t, unit, unit_inv, q, v)
            work[i][t] = LaurentSeries.zero()

        cols = [[work[i][j] for i in range(r)] for j in range(c)]
        for j in range(t + 1, c):
            q = cols[j][t]
            if q.is_zero():
                continue
            _combine(cols, j, t, unit, unit_inv, q, v)
            _combine(right_t, j, t, unit, unit_inv, q, v)
            cols[j][t] = LaurentSeries.zero()
        work = [[cols[j][i] for j in range(c)] for i in range(r)]

        diagonal.append(pivot)
        exponents.append(v)
    rank = len(diagonal)
    right = SeriesMatrix(right_t, c).transpose() if c else SeriesMatrix([], 0)
    return SNFResult(SeriesMatrix(left, r), right, diagonal, exponents, rank)


def column_basis(M: SeriesMatrix, strict: bool = False) -> Tuple[SeriesMatrix, List[int]]:
    """
    A basis of the Q[[u]]-span of the columns of M by unimodular column
    operations only.

    Returns:
        (basis matrix with one column per pivot, pivot valuations); the sum of
        the valuations is the u-adic index of the span when it has full rank
    """
    r, c = M.shape
    cols = [M.column(j) for j in range(c)]
    used_rows = set()
    pivots: List[int] = []
    for t in range(min(r, c)):
        best = None
        for j in range(t, c):
            for i in range(r):
                if i in used_rows or _vanishes(cols[j][i], strict):
                    continue
                v = cols[j][i].valuation()
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        cols[t], cols[j] = cols[j], cols[t]
        pivot = cols[t][i]
        unit = pivot.shift(-v)
        unit_inv = unit.invert() if _single_term(unit) else None
        for jj in range(t + 1, c):
            q = cols[jj][i]
            if q.is_zero():
                continue
            _combine(cols, jj, t, unit, unit_inv, q, v)
            cols[jj][i] = LaurentSeries.zero()
        used_rows.add(i)
        pivots.append(v)
    basis = SeriesMatrix.from_columns(cols[:len(pivots)], r)
    return basis, pivots
