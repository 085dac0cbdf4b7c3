"""
Z/2-graded dg algebras with an explicit basis.

A SuperAlgebra stores sparse structure constants `mult[(i, j)]` and a sparse
differential `diff[i]`. Truncated algebras (polynomials cut at a total degree)
record escaping products in `overflow` instead of dropping them; any evaluation
touching such a product raises TruncationOverflow so that callers can exclude
the input instead of validating a false identity.

The basis index E_MARK (-1) stands for the adjoined unit e of A^e: it is even,
closed under d, and acts as the identity on both sides.

Usage:
    lam = exterior_algebra()
    aw = tensor(poly_algebra(["x"], 4), end_odd_variables(1))
"""

import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from cyclic_connections.algebra.scalars import fraction_str, to_fraction
from cyclic_connections.utils.constants import DEFAULT_SAMPLE_SEED, DEFAULT_TRIPLE_BUDGET

logger = logging.getLogger(__name__)

E_MARK = -1

Element = Dict[int, Fraction]


class InvalidAlgebra(ValueError):
    def __init__(self, axiom: str, witness: Tuple = (), detail: str = ""):
        message = f"Algebra axiom violated: {axiom} at {witness}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
        self.axiom = axiom
        self.witness = witness


class NotSquareZero(InvalidAlgebra):
    pass


class NonUnital(ValueError):
    pass


class NotZGraded(ValueError):
    pass


class TruncationOverflow(Exception):
    """A product or differential left the truncated range."""


def add_into(acc: Element, x: Element, c: Fraction = Fraction(1)):
    for k, v in x.items():
        s = acc.get(k, Fraction(0)) + c * v
        if s:
            acc[k] = s
        elif k in acc:
            del acc[k]


def scale(x: Element, c) -> Element:
    c = to_fraction(c)
    if c == 0:
        return {}
    return {k: c * v for k, v in x.items()}


class SuperAlgebra:
    """
    Finite-dimensional Z/2-graded dg algebra over Q.

    Args:
        name: identifier used in reports
        basis: basis element names
        parity: 0 (even) or 1 (odd) per basis element
        mult: (i, j) -> structure constants of b_i * b_j; absent means zero
        diff: i -> d(b_i); absent means zero
        unit: index of the unit, if any
        zdegree: optional integer grading with d of degree +1
        overflow: pairs (i, j) whose product escapes truncation
        diff_overflow: indices whose differential escapes truncation
    """

    def __init__(
        self,
        name: str,
        basis: Sequence[str],
        parity: Sequence[int],
        mult: Dict[Tuple[int, int], Element],
        diff: Optional[Dict[int, Element]] = None,
        unit: Optional[int] = None,
        zdegree: Optional[Sequence[int]] = None,
        overflow: Optional[Set[Tuple[int, int]]] = None,
        diff_overflow: Optional[Set[int]] = None,
    ):
        self.name = name
        self.basis = list(basis)
        self.parity = [int(p) % 2 for p in parity]
        self.mult = {k: v for k, v in mult.items() if v}
        self.diff = {k: v for k, v in (diff or {}).items() if v}
        self.unit = unit
        self.zdegree = list(zdegree) if zdegree is not None else None
        self.overflow = set(overflow or ())
        self.diff_overflow = set(diff_overflow or ())
        self._index = {n: i for i, n in enumerate(self.basis)}
        self._opposite: Optional["SuperAlgebra"] = None

    def __len__(self):
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __repr__(self):
        return f"[SuperAlgebra {self.name}, dim: {self.dim}, unital: {self.unit is not None}]"

    # ==================================================
    # Basis-level access
    # ==================================================

    def index(self, name: str) -> int:
        if name == "e":
            if "e" in self._index:
                return self._index["e"]
            return E_MARK
        if name not in self._index:
            raise KeyError(f"Unknown basis element {name!r} in {self.name}")
        return self._index[name]

    def name_of(self, i: int) -> str:
        return "e" if i == E_MARK else self.basis[i]

    def p(self, i: int) -> int:
        return 0 if i == E_MARK else self.parity[i]

    def deg(self, i: int) -> int:
        if self.zdegree is None:
            raise NotZGraded(f"{self.name} carries no Z-grading")
        return 0 if i == E_MARK else self.zdegree[i]

    def mul_basis(self, i: int, j: int) -> Element:
        if i == E_MARK:
            return {j: Fraction(1)}
        if j == E_MARK:
            return {i: Fraction(1)}
        if (i, j) in self.overflow:
            raise TruncationOverflow(f"{self.basis[i]}*{self.basis[j]} in {self.name}")
        return self.mult.get((i, j), {})

    def d_basis(self, i: int) -> Element:
        if i == E_MARK:
            return {}
        if i in self.diff_overflow:
            raise TruncationOverflow(f"d({self.basis[i]}) in {self.name}")
        return self.diff.get(i, {})

    # ==================================================
    # Element-level operations
    # ==================================================

    def element(self, terms: Dict[str, object]) -> Element:
        return {self.index(n): to_fraction(c) for n, c in terms.items() if to_fraction(c) != 0}

    def basis_element(self, i: int) -> Element:
        return {i: Fraction(1)}

    def unit_element(self) -> Element:
        if self.unit is None:
            raise NonUnital(f"{self.name} has no unit")
        return {self.unit: Fraction(1)}

    def element_parity(self, x: Element) -> int:
        parities = {self.p(i) for i in x}
        if len(parities) > 1:
            raise ValueError(f"Inhomogeneous element {self.format_element(x)}")
        return parities.pop() if parities else 0

    def mul(self, x: Element, y: Element) -> Element:
        out: Element = {}
        for i, a in x.items():
            for j, b in y.items():
                add_into(out, self.mul_basis(i, j), a * b)
        return out

    def d(self, x: Element) -> Element:
        out: Element = {}
        for i, a in x.items():
            add_into(out, self.d_basis(i), a)
        return out

    def supercommutator(self, x: Element, y: Element) -> Element:
        sign = -1 if self.element_parity(x) * self.element_parity(y) else 1
        out = self.mul(x, y)
        add_into(out, self.mul(y, x), Fraction(-sign))
        return out

    def format_element(self, x: Element) -> str:
        if not x:
            return "0"
        parts = []
        for i in sorted(x):
            c = x[i]
            parts.append(f"{fraction_str(c)}*{self.name_of(i)}")
        return " + ".join(parts)

    def opposite(self) -> "SuperAlgebra":
        if self._opposite is None:
            mult = {}
            for (i, j), v in self.mult.items():
                sign = -1 if self.parity[i] * self.parity[j] else 1
                mult[(j, i)] = scale(v, sign)
            overflow = {(j, i) for (i, j) in self.overflow}
            opp = SuperAlgebra(
                f"{self.name}^op", self.basis, self.parity, mult, self.diff,
                unit=self.unit, zdegree=self.zdegree, overflow=overflow, diff_overflow=self.diff_overflow,
            )
            opp._opposite = self
            self._opposite = opp
        return self._opposite

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_opposite"] = None
        return state

    # ==================================================
    # Validation
    # ==================================================

    def validate(self, budget: int = DEFAULT_TRIPLE_BUDGET, seed: int = DEFAULT_SAMPLE_SEED):
        """Check the dg algebra axioms; raises InvalidAlgebra with the first failing tuple."""
        n = self.dim
        for i in range(n):
            if self.parity[i] not in (0, 1):
                raise InvalidAlgebra("parity bit", (self.basis[i],))
        for (i, j), v in self.mult.items():
            for k in v:
                if self.parity[k] != (self.parity[i] + self.parity[j]) % 2:
                    raise InvalidAlgebra("parity additivity", (self.basis[i], self.basis[j]))
                if self.zdegree is not None and self.zdegree[k] != self.zdegree[i] + self.zdegree[j]:
                    raise InvalidAlgebra("degree additivity", (self.basis[i], self.basis[j]))
        for i, v in self.diff.items():
            for k in v:
                if self.parity[k] != (self.parity[i] + 1) % 2:
                    raise InvalidAlgebra("odd differential", (self.basis[i],))
                if self.zdegree is not None and self.zdegree[k] != self.zdegree[i] + 1:
                    raise InvalidAlgebra("differential of degree +1", (self.basis[i],))
        if self.unit is not None:
            for i in range(n):
                try:
                    if self.mul_basis(self.unit, i) != {i: 1} or self.mul_basis(i, self.unit) != {i: 1}:
                        raise InvalidAlgebra("unit", (self.basis[i],))
                except TruncationOverflow:
                    raise InvalidAlgebra("unit", (self.basis[i],), "unit product overflows")
        for i in range(n):
            try:
                if self.d(self.d_basis(i)):
                    raise InvalidAlgebra("d^2 = 0", (self.basis[i],))
            except TruncationOverflow:
                continue
        for i, j in self._pairs(budget, seed):
            self._check_leibniz(i, j)
        for i, j, k in self._triples(budget, seed):
            self._check_associative(i, j, k)

    def _pairs(self, budget: int, seed: int) -> Iterable[Tuple[int, int]]:
        n = self.dim
        if n * n <= budget:
            return itertools.product(range(n), repeat=2)
        logger.info("Sampling %d of %d basis pairs of %s" % (budget, n * n, self.name))
        rng = np.random.default_rng(seed)
        return [tuple(int(v) for v in row) for row in rng.integers(0, n, size=(budget, 2))]

    def _triples(self, budget: int, seed: int) -> Iterable[Tuple[int, int, int]]:
        n = self.dim
        if n ** 3 <= budget:
            return itertools.product(range(n), repeat=3)
        logger.info("Sampling %d of %d basis triples of %s" % (budget, n ** 3, self.name))
        rng = np.random.default_rng(seed + 1)
        return [tuple(int(v) for v in row) for row in rng.integers(0, n, size=(budget, 3))]

    def _check_leibniz(self, i: int, j: int):
        try:
            lhs = self.d(self.mul_basis(i, j))
            rhs = self.mul(self.d_basis(i), {j: Fraction(1)})
            add_into(rhs, self.mul({i: Fraction(1)}, self.d_basis(j)), Fraction(-1 if self.parity[i] else 1))
        except TruncationOverflow:
            return
        if lhs != rhs:
            raise InvalidAlgebra("Leibniz rule", (self.basis[i], self.basis[j]))

    def _check_associative(self, i: int, j: int, k: int):
        try:
            left = self.mul(self.mul_basis(i, j), {k: Fraction(1)})
            right = self.mul({i: Fraction(1)}, self.mul_basis(j, k))
        except TruncationOverflow:
            return
        if left != right:
            raise InvalidAlgebra("associativity", (self.basis[i], self.basis[j], self.basis[k]))


# ==================================================
# Construction from structured descriptions
# ==================================================


def build_algebra(spec: dict, validate: bool = True) -> SuperAlgebra:
    """
    Build and validate an algebra from a JSON-style description.

    Args:
        spec: keys "basis", "parity", optional "name", "zdegree", "unit",
            "mult" ([i, j, k, "p/q"] quadruples) and "diff" ([i, k, "p/q"] triples);
            indices may be given as integers or basis names

    Returns:
        the validated SuperAlgebra
    """
    try:
        basis = list(spec["basis"])
        parity = list(spec["parity"])
    except KeyError as e:
        raise InvalidAlgebra("description", (), f"missing key {e}") from e
    if len(basis) != len(parity):
        raise InvalidAlgebra("description", (), "basis and parity lengths differ")
    index = {n: i for i, n in enumerate(basis)}

    def resolve(ref) -> int:
        if isinstance(ref, int):
            if not 0 <= ref < len(basis):
                raise InvalidAlgebra("description", (ref,), "index out of range")
            return ref
        if ref not in index:
            raise InvalidAlgebra("description", (ref,), "unknown basis name")
        return index[ref]

    mult: Dict[Tuple[int, int], Element] = {}
    for entry in spec.get("mult", []):
        i, j, k, c = entry
        add_into(mult.setdefault((resolve(i), resolve(j)), {}), {resolve(k): to_fraction(c)})
    diff: Dict[int, Element] = {}
    for entry in spec.get("diff", []):
        i, k, c = entry
        add_into(diff.setdefault(resolve(i), {}), {resolve(k): to_fraction(c)})
    unit = spec.get("unit")
    alg = SuperAlgebra(
        spec.get("name", "custom"), basis, parity, mult, diff,
        unit=resolve(unit) if unit is not None else None,
        zdegree=spec.get("zdegree"),
    )
    if validate:
        alg.validate()
    return alg


def exterior_algebra(graded: bool = False, acyclic: bool = False) -> SuperAlgebra:
    """
    Lambda = span{1, eps}, eps odd, eps^2 = 0.

    Args:
        graded: attach the Z-grading deg(eps) = 1 (with d = 0) or -1 (acyclic)
        acyclic: use the differential d(eps) = 1
    """
    mult = {(0, 0): {0: Fraction(1)}, (0, 1): {1: Fraction(1)}, (1, 0): {1: Fraction(1)}}
    diff = {1: {0: Fraction(1)}} if acyclic else {}
    zdegree = None
    if graded:
        zdegree = [0, -1] if acyclic else [0, 1]
    name = "lambda" + ("-d" if acyclic else "") + ("-graded" if graded else "")
    return build_algebra_from_tables(name, ["1", "eps"], [0, 1], mult, diff, unit=0, zdegree=zdegree)


def dual_numbers() -> SuperAlgebra:
    mult = {(0, 0): {0: Fraction(1)}, (0, 1): {1: Fraction(1)}, (1, 0): {1: Fraction(1)}}
    return build_algebra_from_tables("dual", ["1", "t"], [0, 0], mult, {}, unit=0, zdegree=[0, 0])


def build_algebra_from_tables(name, basis, parity, mult, diff, unit=None, zdegree=None) -> SuperAlgebra:
    alg = SuperAlgebra(name, basis, parity, mult, diff, unit=unit, zdegree=zdegree)
    alg.validate()
    return alg


# ==================================================
# Truncated polynomial rings and odd-variable endomorphisms
# ==================================================


def monomials(nvars: int, max_deg: int) -> List[Tuple[int, ...]]:
    monos = [m for m in itertools.product(range(max_deg + 1), repeat=nvars) if sum(m) <= max_deg]
    return sorted(monos, key=lambda m: (sum(m), [-e for e in m]))


def monomial_name(m: Tuple[int, ...], variables: Sequence[str]) -> str:
    factors = []
    for name, e in zip(variables, m):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    return "*".join(factors) if factors else "1"


def poly_algebra(variables: Sequence[str], max_deg: int) -> SuperAlgebra:
    """Even commutative Q[vars] cut at total degree max_deg; escaping products overflow."""
    if max_deg < 1:
        raise ValueError(f"max_deg must be >= 1, got {max_deg}")
    monos = monomials(len(variables), max_deg)
    index = {m: i for i, m in enumerate(monos)}
    mult, overflow = {}, set()
    for i, a in enumerate(monos):
        for j, b in enumerate(monos):
            c = tuple(x + y for x, y in zip(a, b))
            if c in index:
                mult[(i, j)] = {index[c]: Fraction(1)}
            else:
                overflow.add((i, j))
    return SuperAlgebra(
        f"Q[{','.join(variables)}]<={max_deg}",
        [monomial_name(m, variables) for m in monos],
        [0] * len(monos), mult, {}, unit=0, overflow=overflow,
    )


def odd_monomials(k: int) -> List[Tuple[int, ...]]:
    """Basis of V = Q[theta_1..theta_k]: 1 first, then by size, then lexicographically."""
    subsets = []
    for size in range(k + 1):
        subsets.extend(itertools.combinations(range(1, k + 1), size))
    return subsets


def end_odd_variables(k: int) -> SuperAlgebra:
    """End(V) for V the polynomials in k odd variables, basis E_ij with E_ij E_jl = E_il."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    vb = odd_monomials(k)
    m = len(vb)
    vpar = [len(s) % 2 for s in vb]
    basis, parity = [], []
    for i in range(m):
        for j in range(m):
            basis.append(f"E{i + 1}{j + 1}" if m < 10 else f"E{i + 1}_{j + 1}")
            parity.append((vpar[i] + vpar[j]) % 2)
    mult = {}
    for i in range(m):
        for j in range(m):
            for l in range(m):
                mult[(i * m + j, j * m + l)] = {i * m + l: Fraction(1)}
    return SuperAlgebra(f"End(V{k})", basis, parity, mult, {})


def odd_variable_operators(k: int) -> Tuple[List[Element], List[Element]]:
    """
    Matrices of multiplication by theta_i and of d/d(theta_i) in End(V).

    Returns:
        (theta, dtheta) lists of elements of end_odd_variables(k)
    """
    vb = odd_monomials(k)
    m = len(vb)
    index = {s: i for i, s in enumerate(vb)}
    theta, dtheta = [], []
    for var in range(1, k + 1):
        mul_op, der_op = {}, {}
        for j, s in enumerate(vb):
            sign = -1 if sum(1 for t in s if t < var) % 2 else 1
            if var not in s:
                target = tuple(sorted(s + (var,)))
                mul_op[index[target] * m + j] = Fraction(sign)
            else:
                target = tuple(t for t in s if t != var)
                der_op[index[target] * m + j] = Fraction(sign)
        theta.append(mul_op)
        dtheta.append(der_op)
    return theta, dtheta


# ==================================================
# Derived constructions
# ==================================================


def tensor(A: SuperAlgebra, B: SuperAlgebra) -> SuperAlgebra:
    """Graded tensor product, (a x b)(a' x b') = (-1)^{|b||a'|} aa' x bb'."""
    nb = B.dim
    basis = [f"{a}⊗{b}" for a in A.basis for b in B.basis]
    parity = [(pa + pb) % 2 for pa in A.parity for pb in B.parity]
    mult, overflow = {}, set()
    a_pairs = set(A.mult) | A.overflow
    b_pairs = set(B.mult) | B.overflow
    for (i, k) in a_pairs:
        for (j, l) in b_pairs:
            key = (i * nb + j, k * nb + l)
            if (i, k) in A.overflow or (j, l) in B.overflow:
                overflow.add(key)
                continue
            sign = -1 if B.parity[j] * A.parity[k] else 1
            prod: Element = {}
            for x, cx in A.mult[(i, k)].items():
                for y, cy in B.mult[(j, l)].items():
                    add_into(prod, {x * nb + y: cx * cy * sign})
            mult[key] = prod
    diff, diff_overflow = {}, set()
    for i in range(A.dim):
        for j in range(nb):
            if i in A.diff_overflow or j in B.diff_overflow:
                diff_overflow.add(i * nb + j)
                continue
            out: Element = {}
            for x, c in A.diff.get(i, {}).items():
                add_into(out, {x * nb + j: c})
            sign = -1 if A.parity[i] else 1
            for y, c in B.diff.get(j, {}).items():
                add_into(out, {i * nb + y: sign * c})
            if out:
                diff[i * nb + j] = out
    unit = None
    if A.unit is not None and B.unit is not None:
        unit = A.unit * nb + B.unit
    zdegree = None
    if A.zdegree is not None and B.zdegree is not None:
        zdegree = [da + db for da in A.zdegree for db in B.zdegree]
    return SuperAlgebra(f"{A.name}⊗{B.name}", basis, parity, mult, diff, unit, zdegree, overflow, diff_overflow)


def unitalize(A: SuperAlgebra) -> SuperAlgebra:
    """A^e = A + Q e with e even, central, d(e) = 0."""
    name = "e"
    while name in A.basis:
        name += "'"
    u = A.dim
    mult = dict(A.mult)
    for i in range(A.dim):
        mult[(u, i)] = {i: Fraction(1)}
        mult[(i, u)] = {i: Fraction(1)}
    mult[(u, u)] = {u: Fraction(1)}
    zdegree = A.zdegree + [0] if A.zdegree is not None else None
    return SuperAlgebra(
        f"{A.name}^e", A.basis + [name], A.parity + [0], mult, A.diff,
        unit=u, zdegree=zdegree, overflow=A.overflow, diff_overflow=A.diff_overflow,
    )


def opposite(A: SuperAlgebra) -> SuperAlgebra:
    return A.opposite()


def set_differential_commutator(A: SuperAlgebra, D: Element, name: Optional[str] = None) -> SuperAlgebra:
    """
    Replace the differential by a -> Da - (-1)^{|a|} aD.

    Raises:
        InvalidAlgebra: D is not odd
        NotSquareZero: [D^2, -] does not vanish on some basis element
    """
    if not D or A.element_parity(D) != 1:
        raise InvalidAlgebra("odd commutator element", (A.format_element(D),))
    D2 = A.mul(D, D)
    for i in range(A.dim):
        try:
            bracket = A.mul(D2, {i: Fraction(1)})
            add_into(bracket, A.mul({i: Fraction(1)}, D2), Fraction(-1))
        except TruncationOverflow:
            continue
        if bracket:
            raise NotSquareZero("[D^2, -] = 0", (A.basis[i],), A.format_element(bracket))
    diff, diff_overflow = {}, set()
    for i in range(A.dim):
        try:
            out = A.mul(D, {i: Fraction(1)})
            add_into(out, A.mul({i: Fraction(1)}, D), Fraction(1 if A.parity[i] else -1))
        except TruncationOverflow:
            diff_overflow.add(i)
            continue
        if out:
            diff[i] = out
    return SuperAlgebra(
        name or f"({A.name}, [D,-])", A.basis, A.parity, A.mult, diff,
        unit=A.unit, zdegree=None, overflow=A.overflow, diff_overflow=diff_overflow,
    )
