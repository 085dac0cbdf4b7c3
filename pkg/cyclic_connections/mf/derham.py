"""
Polynomial differential forms, the twisted de Rham complex (Omega[[u]], -dw + ud)
and its connection nabla^w = d/du + w/u^2 + Gamma/u, Gamma = -p/2 on p-forms.

A Form is a sparse map (monomial, sorted dy-index subset) -> rational; the
subset (0, 2) stands for dy_1 ^ dy_3.

Usage:
    x = Form.poly(["x"], {(1,): Fraction(1)})
    print(twisted_diff(FormSeries.coerce(x), w))
"""

import itertools
import logging
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from cyclic_connections.algebra.polynomials import Monomial, monomial_str
from cyclic_connections.algebra.scalars import fraction_str, to_fraction
from cyclic_connections.algebra.superalg import E_MARK, monomials
from cyclic_connections.chains.identities import IdentityReport
from cyclic_connections.chains.words import Terms

logger = logging.getLogger(__name__)

FormKey = Tuple[Monomial, Tuple[int, ...]]


def _insert_sign(i: int, subset: Tuple[int, ...]) -> Optional[Tuple[int, Tuple[int, ...]]]:
    """dy_i ^ dy_subset = sign * dy_(subset + i), or None if i repeats."""
    if i in subset:
        return None
    before = sum(1 for j in subset if j < i)
    return (-1 if before % 2 else 1), tuple(sorted(subset + (i,)))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


class Form:
    """
    Args:
        variables: names y_1..y_k, used for rendering only
        terms: (monomial, dy-subset) -> coefficient
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Optional[Dict[FormKey, object]] = None):
        self.variables = list(variables)
        self.terms: Dict[FormKey, Fraction] = {}
        for key, c in (terms or {}).items():
            c = to_fraction(c)
            if c:
                self.terms[(tuple(key[0]), tuple(key[1]))] = c

    @property
    def k(self) -> int:
        return len(self.variables)

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Form":
        return cls(variables)

    @classmethod
    def poly(cls, variables: Sequence[str], coeffs: Dict[Monomial, Fraction], dy: Tuple[int, ...] = ()) -> "Form":
        return cls(variables, {(m, tuple(dy)): c for m, c in coeffs.items()})

    @classmethod
    def one(cls, variables: Sequence[str]) -> "Form":
        return cls(variables, {((0,) * len(variables), ()): Fraction(1)})

    def _new(self, terms) -> "Form":
        out = Form(self.variables)
        out.terms = terms
        return out

    def _acc(self, out: Dict[FormKey, Fraction], key: FormKey, c: Fraction):
        s = out.get(key, Fraction(0)) + c
        if s:
            out[key] = s
        elif key in out:
            del out[key]

    # ==================================================
    # Linear structure
    # ==================================================

    def __add__(self, other: "Form") -> "Form":
        out = dict(self.terms)
        for key, c in other.terms.items():
            self._acc(out, key, c)
        return self._new(out)

    def __sub__(self, other: "Form") -> "Form":
        return self + other.scale(-1)

    def __neg__(self) -> "Form":
        return self.scale(-1)

    def scale(self, c) -> "Form":
        c = to_fraction(c)
        if c == 0:
            return self._new({})
        return self._new({key: c * v for key, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> List[int]:
        return sorted({len(key[1]) for key in self.terms})

    def part(self, p: int) -> "Form":
        return self._new({key: c for key, c in self.terms.items() if len(key[1]) == p})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    # ==================================================
    # Products and derivations
    # ==================================================

    def mul_poly(self, coeffs: Dict[Monomial, Fraction]) -> "Form":
        out: Dict[FormKey, Fraction] = {}
        for (m, dy), c in self.terms.items():
            for n, d in coeffs.items():
                self._acc(out, (_mono_mul(m, n), dy), c * d)
        return self._new(out)

    def dy_wedge(self, i: int) -> "Form":
        """dy_i ^ self."""
        out: Dict[FormKey, Fraction] = {}
        for (m, dy), c in self.terms.items():
            moved = _insert_sign(i, dy)
            if moved is not None:
                sign, new = moved
                self._acc(out, (m, new), sign * c)
        return self._new(out)

    def wedge(self, other: "Form") -> "Form":
        out: Dict[FormKey, Fraction] = {}
        for (m, I), c in self.terms.items():
            for (n, J), d in other.terms.items():
                if set(I) & set(J):
                    continue
                # dy_I ^ dy_J: move each dy_j of J past the larger members of I
                crossings = sum(1 for i in I for j in J if i > j)
                sign = -1 if crossings % 2 else 1
                self._acc(out, (_mono_mul(m, n), tuple(sorted(I + J))), sign * c * d)
        return self._new(out)

    def d(self) -> "Form":
        out: Dict[FormKey, Fraction] = {}
        for (m, dy), c in self.terms.items():
            for i, e in enumerate(m):
                if e == 0:
                    continue
                moved = _insert_sign(i, dy)
                if moved is None:
                    continue
                sign, new = moved
                lowered = m[:i] + (e - 1,) + m[i + 1:]
                self._acc(out, (lowered, new), sign * e * c)
        return self._new(out)

    def gamma(self) -> "Form":
        """Gamma = -p/2 on p-forms."""
        out = {}
        for key, c in self.terms.items():
            if key[1]:
                out[key] = Fraction(-len(key[1]), 2) * c
        return self._new(out)

    # ==================================================
    # Rendering
    # ==================================================

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (m, dy), c in sorted(self.terms.items(), key=lambda kv: (len(kv[0][1]), kv[0][1], sum(kv[0][0]), kv[0][0])):
            factors = []
            if any(m):
                factors.append(monomial_str(m, self.variables))
            if dy:
                factors.append("^".join(f"d{self.variables[i]}" for i in dy))
            body = "*".join(factors) if factors else "1"
            parts.append(f"{fraction_str(c)}*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"[Form {self}]"


def differential(coeffs: Dict[Monomial, Fraction], variables: Sequence[str]) -> Form:
    """d of a polynomial, as a 1-form."""
    return Form.poly(variables, coeffs).d()


class FormSeries:
    """
    Laurent polynomial in u with Form coefficients.

    Args:
        coeffs: u-power -> Form
        prec: first untracked power, None when exact
    """

    __slots__ = ("variables", "coeffs", "prec")

    def __init__(self, variables: Sequence[str], coeffs: Optional[Dict[int, Form]] = None, prec: Optional[int] = None):
        self.variables = list(variables)
        self.prec = prec
        self.coeffs: Dict[int, Form] = {
            int(p): f for p, f in (coeffs or {}).items()
            if not f.is_zero() and (prec is None or p < prec)
        }

    @classmethod
    def coerce(cls, value) -> "FormSeries":
        if isinstance(value, FormSeries):
            return value
        if isinstance(value, Form):
            return cls(value.variables, {0: value})
        raise TypeError(f"Cannot treat {value!r} as a form series")

    def at(self, power: int) -> Form:
        return self.coeffs.get(power, Form.zero(self.variables))

    def is_zero(self) -> bool:
        return not self.coeffs

    def map(self, fn) -> "FormSeries":
        return FormSeries(self.variables, {p: fn(f) for p, f in self.coeffs.items()}, self.prec)

    def __add__(self, other) -> "FormSeries":
        other = FormSeries.coerce(other)
        out = dict(self.coeffs)
        for p, f in other.coeffs.items():
            out[p] = out[p] + f if p in out else f
        prec = self.prec if other.prec is None else (other.prec if self.prec is None else min(self.prec, other.prec))
        return FormSeries(self.variables, out, prec)

    def __sub__(self, other) -> "FormSeries":
        return self + (-FormSeries.coerce(other))

    def __neg__(self) -> "FormSeries":
        return self.scale(-1)

    def scale(self, c) -> "FormSeries":
        return self.map(lambda f: f.scale(c))

    def shift(self, k: int) -> "FormSeries":
        """Multiply by u^k."""
        prec = None if self.prec is None else self.prec + k
        return FormSeries(self.variables, {p + k: f for p, f in self.coeffs.items()}, prec)

    def ddu(self) -> "FormSeries":
        prec = None if self.prec is None else self.prec - 1
        return FormSeries(self.variables, {p - 1: f.scale(p) for p, f in self.coeffs.items() if p != 0}, prec)

    def __eq__(self, other) -> bool:
        if isinstance(other, Form):
            other = FormSeries.coerce(other)
        if not isinstance(other, FormSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted((p, hash(f)) for p, f in self.coeffs.items())))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for p in sorted(self.coeffs):
            body = str(self.coeffs[p])
            parts.append(body if p == 0 else f"u^{p}*({body})")
        return " + ".join(parts)

    def __repr__(self):
        return f"[FormSeries {self}]"


# ==================================================
# Twisted de Rham structure
# ==================================================


def _partials(w_terms: Dict[Monomial, Fraction], k: int) -> List[Dict[Monomial, Fraction]]:
    out = []
    for i in range(k):
        d: Dict[Monomial, Fraction] = {}
        for m, c in w_terms.items():
            if m[i]:
                lowered = m[:i] + (m[i] - 1,) + m[i + 1:]
                d[lowered] = d.get(lowered, Fraction(0)) + m[i] * c
        out.append({m: c for m, c in d.items() if c})
    return out


def dw_wedge(f: Form, w_terms: Dict[Monomial, Fraction]) -> Form:
    out = Form.zero(f.variables)
    for i, dwi in enumerate(_partials(w_terms, f.k)):
        if dwi:
            out = out + f.dy_wedge(i).mul_poly(dwi)
    return out


def twisted_diff(fs, w_terms: Dict[Monomial, Fraction]) -> FormSeries:
    """-dw ^ (.) + u d(.)."""
    fs = FormSeries.coerce(fs)
    return fs.map(lambda f: -dw_wedge(f, w_terms)) + fs.map(Form.d).shift(1)


def nabla_w(fs, w_terms: Dict[Monomial, Fraction]) -> FormSeries:
    """d/du + w/u^2 + Gamma/u."""
    fs = FormSeries.coerce(fs)
    return fs.ddu() + fs.map(lambda f: f.mul_poly(w_terms)).shift(-2) + fs.map(Form.gamma).shift(-1)


def potential_w(fs, w_terms: Dict[Monomial, Fraction]) -> FormSeries:
    """The potential w/u^2 + Gamma/u of nabla^w."""
    fs = FormSeries.coerce(fs)
    return fs.map(lambda f: f.mul_poly(w_terms)).shift(-2) + fs.map(Form.gamma).shift(-1)


def dw_d(fs, w_terms: Dict[Monomial, Fraction]) -> FormSeries:
    """dw ^ d(.)."""
    fs = FormSeries.coerce(fs)
    return fs.map(lambda f: dw_wedge(f.d(), w_terms))


def w_d_over_u(fs, w_terms: Dict[Monomial, Fraction]) -> FormSeries:
    """H = (1/u) w d(.), the homotopy with dw ^ d = [-dw + ud, H]."""
    fs = FormSeries.coerce(fs)
    return fs.map(lambda f: f.d().mul_poly(w_terms)).shift(-1)


# ==================================================
# The HKR map
# ==================================================


def hkr_eps(terms: Terms, monos: Sequence[Monomial], variables: Sequence[str]) -> Form:
    """
    phi_0[phi_1|..|phi_n] -> (1/n!) phi_0 dphi_1 ^ .. ^ dphi_n, and
    e[phi_1|..|phi_n] -> (1/n!) dphi_1 ^ .. ^ dphi_n; words are over the
    truncated polynomial algebra whose basis is `monos`.
    """
    k = len(variables)
    out = Form.zero(variables)
    for w, c in sorted(terms.items()):
        n = len(w) - 1
        if n > k:
            continue
        if w[0] == E_MARK:
            form = Form.one(variables)
        else:
            form = Form.poly(variables, {monos[w[0]]: Fraction(1)})
        for a in w[1:]:
            form = form.wedge(differential({monos[a]: Fraction(1)}, variables))
            if form.is_zero():
                break
        out = out + form.scale(c / factorial(n))
    return out


# ==================================================
# Checks on monomial forms
# ==================================================


def monomial_forms(variables: Sequence[str], max_deg: int) -> List[Form]:
    k = len(variables)
    out = []
    for p in range(k + 1):
        for dy in itertools.combinations(range(k), p):
            for m in monomials(k, max_deg):
                out.append(Form(variables, {(m, dy): Fraction(1)}))
    return out


def check_form_identity(name: str, lhs, rhs, variables: Sequence[str], max_deg: int = 6) -> IdentityReport:
    """lhs(f) == rhs(f) for every monomial form f of polynomial degree <= max_deg."""
    report = IdentityReport(name, f"Omega({','.join(variables)})", "forms", max_deg)
    forms = monomial_forms(variables, max_deg)
    report.window[max_deg] = {"available": len(forms), "checked": 0, "overflowed": 0, "sampled": False}
    for f in forms:
        left = FormSeries.coerce(lhs(FormSeries.coerce(f)))
        right = FormSeries.coerce(rhs(FormSeries.coerce(f)))
        report.checked += 1
        report.window[max_deg]["checked"] += 1
        if left != right:
            report.failed += 1
            if report.counterexample is None:
                report.counterexample = {"word": str(f), "component": "forms", "lhs": str(left), "rhs": str(right)}
    return report
