"""
Exact scalars: rationals and truncated Laurent series in u.

A LaurentSeries tracks a precision window [val_lo, prec): every stored
coefficient below `prec` is exact, nothing at or above `prec` is known.
`prec=None` marks an exact Laurent polynomial (infinite precision).

Usage:
    s = LaurentSeries({-1: Fraction(-1, 6), 1: Fraction(1, 3)}, prec=4)
    print(s)  # -1/6*u^-1 + 1/3*u
"""

from fractions import Fraction
from typing import Dict, Iterator, Optional, Tuple, Union

from cyclic_connections.utils.constants import DEFAULT_U_PRECISION

Scalar = Union[int, Fraction]


class ZeroLeadingTerm(ValueError):
    """Raised when inverting a series that vanishes on its whole window."""


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"Cannot convert {value!r} to a rational")


def fraction_str(value: Fraction) -> str:
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _min_prec(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LaurentSeries:
    """
    Sparse truncated Laurent series over Q.

    Args:
        coeffs: power -> coefficient; zero entries and powers >= prec are dropped
        prec: first untracked power (exclusive), or None for an exact polynomial
        val_lo: lowest tracked power; defaults to the lowest stored power
    """

    __slots__ = ("coeffs", "prec", "val_lo")

    def __init__(self, coeffs: Optional[Dict[int, Scalar]] = None, prec: Optional[int] = None, val_lo: Optional[int] = None):
        clean = {}
        for power, c in (coeffs or {}).items():
            c = to_fraction(c)
            if c == 0 or (prec is not None and power >= prec):
                continue
            clean[int(power)] = c
        self.coeffs: Dict[int, Fraction] = clean
        self.prec: Optional[int] = prec
        if clean:
            low = min(clean)
            self.val_lo = low if val_lo is None else min(low, val_lo)
        elif val_lo is not None:
            self.val_lo = val_lo
        else:
            self.val_lo = prec - 1 if prec is not None else 0
        if self.prec is not None and self.prec <= self.val_lo:
            self.val_lo = self.prec - 1

    # ==================================================
    # Constructors
    # ==================================================

    @classmethod
    def zero(cls, prec: Optional[int] = None) -> "LaurentSeries":
        return cls({}, prec)

    @classmethod
    def one(cls, prec: Optional[int] = None) -> "LaurentSeries":
        return cls({0: Fraction(1)}, prec)

    @classmethod
    def monomial(cls, coeff: Scalar, power: int, prec: Optional[int] = None) -> "LaurentSeries":
        return cls({power: coeff}, prec)

    @classmethod
    def coerce(cls, value) -> "LaurentSeries":
        if isinstance(value, LaurentSeries):
            return value
        return cls({0: to_fraction(value)})

    # ==================================================
    # Inspection
    # ==================================================

    def coeff(self, power: int) -> Fraction:
        if self.prec is not None and power >= self.prec:
            raise ValueError(f"u^{power} lies outside the window (prec {self.prec})")
        return self.coeffs.get(power, Fraction(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.prec is None

    def valuation(self) -> Optional[int]:
        """Lowest power with a nonzero coefficient, None if zero on the window."""
        return min(self.coeffs) if self.coeffs else None

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        for power in sorted(self.coeffs):
            yield power, self.coeffs[power]

    def truncate(self, prec: Optional[int]) -> "LaurentSeries":
        return LaurentSeries(self.coeffs, _min_prec(self.prec, prec), self.val_lo)

    def window(self) -> Tuple[int, Optional[int]]:
        return self.val_lo, self.prec

    # ==================================================
    # Arithmetic
    # ==================================================

    def __add__(self, other) -> "LaurentSeries":
        other = LaurentSeries.coerce(other)
        coeffs = dict(self.coeffs)
        for power, c in other.coeffs.items():
            coeffs[power] = coeffs.get(power, Fraction(0)) + c
        return LaurentSeries(coeffs, _min_prec(self.prec, other.prec), min(self.val_lo, other.val_lo))

    __radd__ = __add__

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries({p: -c for p, c in self.coeffs.items()}, self.prec, self.val_lo)

    def __sub__(self, other) -> "LaurentSeries":
        return self + (-LaurentSeries.coerce(other))

    def __rsub__(self, other) -> "LaurentSeries":
        return LaurentSeries.coerce(other) + (-self)

    def scale(self, c: Scalar) -> "LaurentSeries":
        c = to_fraction(c)
        return LaurentSeries({p: c * v for p, v in self.coeffs.items()}, self.prec, self.val_lo)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by u^k."""
        prec = None if self.prec is None else self.prec + k
        return LaurentSeries({p + k: c for p, c in self.coeffs.items()}, prec, self.val_lo + k)

    def __mul__(self, other) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            return self.scale(other)
        bounds = []
        if self.prec is not None:
            bounds.append(self.prec + other.val_lo)
        if other.prec is not None:
            bounds.append(other.prec + self.val_lo)
        prec = min(bounds) if bounds else None
        coeffs: Dict[int, Fraction] = {}
        for p, c in self.coeffs.items():
            for q, d in other.coeffs.items():
                if prec is not None and p + q >= prec:
                    continue
                coeffs[p + q] = coeffs.get(p + q, Fraction(0)) + c * d
        return LaurentSeries(coeffs, prec, self.val_lo + other.val_lo)

    def __rmul__(self, other) -> "LaurentSeries":
        return self.scale(other)

    def ddu(self) -> "LaurentSeries":
        prec = None if self.prec is None else self.prec - 1
        coeffs = {p - 1: p * c for p, c in self.coeffs.items() if p != 0}
        return LaurentSeries(coeffs, prec, self.val_lo - 1)

    def invert(self, prec: Optional[int] = None) -> "LaurentSeries":
        """
        Multiplicative inverse to the largest certified precision.

        Args:
            prec: target precision, only consulted when the input is an exact
                polynomial with more than one term

        Returns:
            the inverse; a window of relative length r around valuation v yields
            a result known up to u^(r - v)
        """
        v = self.valuation()
        if v is None:
            raise ZeroLeadingTerm(f"series vanishes on its window [{self.val_lo}, {self.prec})")
        lead = self.coeffs[v]
        if self.prec is None and len(self.coeffs) == 1:
            return LaurentSeries({-v: 1 / lead})
        if self.prec is None:
            prec_out = prec if prec is not None else DEFAULT_U_PRECISION - v
        else:
            prec_out = self.prec - 2 * v
            if prec is not None:
                prec_out = min(prec_out, prec)
        relative = prec_out + v
        normalized = [self.coeffs.get(v + i, Fraction(0)) for i in range(relative)]
        inverse = [Fraction(0)] * relative
        for n in range(relative):
            acc = Fraction(1) if n == 0 else Fraction(0)
            for i in range(1, n + 1):
                acc -= normalized[i] * inverse[n - i]
            inverse[n] = acc / lead
        return LaurentSeries({i - v: c for i, c in enumerate(inverse)}, prec_out)

    # ==================================================
    # Comparison and rendering
    # ==================================================

    def equal_on_window(self, other) -> Tuple[bool, Optional[int]]:
        """Compare on the intersection of both windows; returns (equal, certified prec)."""
        other = LaurentSeries.coerce(other)
        prec = _min_prec(self.prec, other.prec)
        diff = (self - other).truncate(prec)
        return diff.is_zero(), prec

    def __eq__(self, other) -> bool:
        if not isinstance(other, (LaurentSeries, int, Fraction)):
            return NotImplemented
        other = LaurentSeries.coerce(other)
        return self.coeffs == other.coeffs and self.prec == other.prec

    def __hash__(self):
        return hash((tuple(sorted(self.coeffs.items())), self.prec))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for power, c in self.items():
            sign = "-" if c < 0 else "+"
            mag = fraction_str(abs(c))
            if power == 0:
                body = mag
            else:
                u = "u" if power == 1 else f"u^{power}"
                body = u if mag == "1" else f"{mag}*{u}"
            parts.append((sign, body))
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"[LaurentSeries: {self}, prec: {self.prec}]"

    def to_json(self) -> dict:
        return {"series": str(self), "prec": self.prec}


# ==================================================
# Functional aliases
# ==================================================


def series_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return a + b


def series_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return a * b


def series_ddu(a: LaurentSeries) -> LaurentSeries:
    return a.ddu()


def series_invert(a: LaurentSeries, prec: Optional[int] = None) -> LaurentSeries:
    return a.invert(prec)
