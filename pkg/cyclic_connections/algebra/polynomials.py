"""
Polynomial input handling over Q.

Polynomials are sympy `Poly` objects over `QQ` in declared variables.
Decompositions w = y1*w1 + ... + yk*wk are read from "var: poly" lists.

Usage:
    w = parse_poly("x^3 + y^2", ["x", "y"])
    dec = parse_decomposition("x: x^2; y: y", ["x", "y"], w)
"""

import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import QQ
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations


class PolynomialParseError(ValueError):
    def __init__(self, message: str, text: str = "", line: int = 1, column: Optional[int] = None):
        location = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{message} ({location}): {text!r}")
        self.line = line
        self.column = column


class BadDecomposition(ValueError):
    """Raised when sum(y_i * w_i) differs from w."""


_ALLOWED = re.compile(r"[0-9A-Za-z_+\-*/^(). \t]")
_TRANSFORMS = standard_transformations + (convert_xor,)

Monomial = Tuple[int, ...]


def parse_poly(text: str, variables: Sequence[str], line: int = 1) -> sympy.Poly:
    for column, char in enumerate(text, start=1):
        if not _ALLOWED.match(char):
            raise PolynomialParseError(f"Unexpected character {char!r}", text, line, column)
    symbols = sympy.symbols(list(variables))
    if not isinstance(symbols, (list, tuple)):
        symbols = [symbols]
    local = {str(s): s for s in symbols}
    try:
        expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        column = getattr(e, "offset", None)
        raise PolynomialParseError(f"Cannot parse polynomial: {e}", text, line, column) from e
    unknown = sorted(str(s) for s in expr.free_symbols if str(s) not in local)
    if unknown:
        column = text.find(unknown[0]) + 1
        raise PolynomialParseError(f"Undeclared variable {unknown[0]!r}", text, line, column)
    try:
        return sympy.Poly(expr, *symbols, domain=QQ)
    except sympy.PolynomialError as e:
        raise PolynomialParseError(f"Not a polynomial: {e}", text, line) from e


def zero_poly(variables: Sequence[str]) -> sympy.Poly:
    return sympy.Poly(0, *sympy.symbols(list(variables)), domain=QQ)


def to_frac(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def poly_terms(p: sympy.Poly) -> Dict[Monomial, Fraction]:
    return {tuple(m): to_frac(c) for m, c in p.terms() if c != 0}


def poly_from_terms(terms: Dict[Monomial, Fraction], variables: Sequence[str]) -> sympy.Poly:
    gens = sympy.symbols(list(variables))
    if not isinstance(gens, (list, tuple)):
        gens = [gens]
    data = {m: QQ(c.numerator, c.denominator) for m, c in terms.items() if c != 0}
    if not data:
        return sympy.Poly(0, *gens, domain=QQ)
    return sympy.Poly.from_dict(data, *gens, domain=QQ)


def poly_str(p: sympy.Poly) -> str:
    return str(p.as_expr()).replace("**", "^")


def variable_names(p: sympy.Poly) -> List[str]:
    return [str(g) for g in p.gens]


def monomial_str(m: Monomial, variables: Sequence[str]) -> str:
    factors = []
    for name, e in zip(variables, m):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    return "*".join(factors) if factors else "1"


# ==================================================
# Decompositions
# ==================================================


def parse_decomposition(text: str, variables: Sequence[str], w: sympy.Poly) -> List[sympy.Poly]:
    """
    Parse "x: x^2; y: y" (';' or ',' separated). Variables left out get w_i = 0.
    """
    parts: Dict[str, sympy.Poly] = {}
    for line, chunk in enumerate(re.split(r"[;,\n]", text), start=1):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise PolynomialParseError("Expected 'var: polynomial'", chunk, line)
        name, body = chunk.split(":", 1)
        name = name.strip()
        if name not in variables:
            raise PolynomialParseError(f"Undeclared variable {name!r}", chunk, line, 1)
        parts[name] = parse_poly(body.strip(), variables, line)
    dec = [parts.get(v, zero_poly(variables)) for v in variables]
    check_decomposition(w, dec)
    return dec


def default_decomposition(w: sympy.Poly) -> List[sympy.Poly]:
    """Assign each monomial of w to the first variable dividing it."""
    variables = variable_names(w)
    buckets: List[Dict[Monomial, Fraction]] = [{} for _ in variables]
    for m, c in poly_terms(w).items():
        for i, e in enumerate(m):
            if e > 0:
                reduced = m[:i] + (e - 1,) + m[i + 1:]
                buckets[i][reduced] = buckets[i].get(reduced, Fraction(0)) + c
                break
    return [poly_from_terms(b, variables) for b in buckets]


def check_decomposition(w: sympy.Poly, dec: Sequence[sympy.Poly]):
    if len(dec) != len(w.gens):
        raise BadDecomposition(f"Expected {len(w.gens)} components, got {len(dec)}")
    total = zero_poly(variable_names(w))
    for g, wi in zip(w.gens, dec):
        total = total + sympy.Poly(g, *w.gens, domain=QQ) * wi
    if (total - w).is_zero is False:
        raise BadDecomposition(f"sum y_i*w_i = {poly_str(total)} differs from w = {poly_str(w)}")


def decomposition_str(dec: Sequence[sympy.Poly], variables: Sequence[str]) -> str:
    return "; ".join(f"{v}: {poly_str(p)}" for v, p in zip(variables, dec))
