"""
Symbolic chain operators on C(A^e) with exact Koszul signs.

Every generator acts on a single word; sums, compositions and rational
multiples are built with `+`, `@` and `*`. Operators are families indexed by
tail length: Delta(i), Mu(i), GammaAt(i) and Insert(a, i) accept negative
indices, resolved against the tail length of the word they act on
(-1 is the last slot).

Sign conventions, with |s a| = |a| + 1 and the head counted as a_0:
    tau(a0[a1|..|an])       = (-1)^{|sa0| sum_{i>=1} |sa_i|} a1[a2|..|an|a0]
    delta^(i)               = (-1)^{sum_{k<i} |sa_k|} a0[..|da_i|..]
    mu^(i), i < n           = (-1)^{sum_{k<=i} |sa_k| + 1} a0[..|a_i a_{i+1}|..]
    mu^(n)                  = -(-1)^{|sa_n|(|a0| + sum_{0<k<n} |sa_k|)} a_n a0[a1|..|a_{n-1}]
    a^(i), 1 <= i <= n+1    = (-1)^{|sa| sum_{k<i} |sa_k|} a0[..|a_{i-1}|a|a_i|..]

Usage:
    B = connes_B()
    result = eval_operator(B, Chain.word(lam, "eps"))
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

from cyclic_connections.algebra.scalars import fraction_str, to_fraction
from cyclic_connections.algebra.superalg import (
    E_MARK,
    Element,
    NonUnital,
    SuperAlgebra,
    TruncationOverflow,
    add_into,
)
from cyclic_connections.chains.words import (
    ApplyResult,
    Chain,
    Sector,
    SectorMismatch,
    Terms,
    Word,
    in_sector,
)

logger = logging.getLogger(__name__)


def _s(alg: SuperAlgebra, a: int) -> int:
    return 1 - alg.p(a)


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def _resolve(i: int, n: int) -> int:
    return i if i >= 0 else n + 1 + i


class ChainOperator:
    """
    Base class. Subclasses implement `act_word`; composite operators override `act`.

    Attributes:
        parity: 0 even, 1 odd, None for the zero operator
    """

    parity: Optional[int] = 0
    name: str = "op"

    def target(self, alg: SuperAlgebra) -> SuperAlgebra:
        return alg

    def act_word(self, w: Word, alg: SuperAlgebra) -> Terms:
        raise NotImplementedError

    def act(self, terms: Terms, alg: SuperAlgebra) -> Terms:
        out: Terms = {}
        for w, c in terms.items():
            add_into(out, self.act_word(w, alg), c)
        return out

    def __call__(self, x: Chain) -> Chain:
        return eval_operator(self, x).chain

    def __matmul__(self, other: "ChainOperator") -> "ChainOperator":
        return Compose(self, other)

    def __add__(self, other: "ChainOperator") -> "ChainOperator":
        return Sum(self, other)

    def __sub__(self, other: "ChainOperator") -> "ChainOperator":
        return Sum(self, Scaled(-1, other))

    def __neg__(self) -> "ChainOperator":
        return Scaled(-1, self)

    def __mul__(self, c) -> "ChainOperator":
        return Scaled(c, self)

    __rmul__ = __mul__

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"[ChainOperator {self}, parity: {self.parity}]"


# ==================================================
# Combinators
# ==================================================


class Zero(ChainOperator):
    parity = None
    name = "0"

    def act(self, terms, alg):
        return {}

    def act_word(self, w, alg):
        return {}


class Identity(ChainOperator):
    name = "id"

    def act(self, terms, alg):
        return dict(terms)

    def act_word(self, w, alg):
        return {w: Fraction(1)}


class Scaled(ChainOperator):
    def __init__(self, coeff, op: ChainOperator):
        self.coeff = to_fraction(coeff)
        self.op = op
        self.parity = op.parity
        self.name = f"{fraction_str(self.coeff)}*({op})"

    def target(self, alg):
        return self.op.target(alg)

    def act(self, terms, alg):
        if self.coeff == 0:
            return {}
        return {w: self.coeff * c for w, c in self.op.act(terms, alg).items()}


def _joint_parity(ops: Sequence[ChainOperator]) -> Optional[int]:
    parities = {op.parity for op in ops if op.parity is not None}
    if len(parities) > 1:
        raise ValueError("Inhomogeneous sum: " + " + ".join(str(op) for op in ops))
    return parities.pop() if parities else None


class Sum(ChainOperator):
    def __init__(self, *ops: ChainOperator):
        flat: List[ChainOperator] = []
        for op in ops:
            if isinstance(op, Sum):
                flat.extend(op.ops)
            elif not isinstance(op, Zero):
                flat.append(op)
        self.ops = flat
        self.parity = _joint_parity(flat)
        self.name = " + ".join(str(op) for op in flat) if flat else "0"

    def target(self, alg):
        return self.ops[0].target(alg) if self.ops else alg

    def act(self, terms, alg):
        out: Terms = {}
        for op in self.ops:
            add_into(out, op.act(terms, alg))
        return out


class Compose(ChainOperator):
    """ops[0] @ ops[1] @ ...; the rightmost factor acts first."""

    def __init__(self, *ops: ChainOperator):
        flat: List[ChainOperator] = []
        for op in ops:
            if isinstance(op, Compose):
                flat.extend(op.ops)
            else:
                flat.append(op)
        self.ops = flat
        if any(op.parity is None for op in flat):
            self.parity = None
        else:
            self.parity = sum(op.parity for op in flat) % 2
        self.name = "∘".join(f"({op})" if isinstance(op, Sum) else str(op) for op in flat)

    def target(self, alg):
        for op in reversed(self.ops):
            alg = op.target(alg)
        return alg

    def act(self, terms, alg):
        for op in reversed(self.ops):
            if not terms:
                return {}
            terms = op.act(terms, alg)
            alg = op.target(alg)
        return terms


def commutator(x: ChainOperator, y: ChainOperator) -> ChainOperator:
    """Super-commutator xy - (-1)^{|x||y|} yx."""
    px = x.parity or 0
    py = y.parity or 0
    return Sum(Compose(x, y), Scaled(-_sign(px * py), Compose(y, x)))


def compose(*ops: ChainOperator) -> ChainOperator:
    return Compose(*ops)


# ==================================================
# Generators: cyclic structure
# ==================================================


def _rotate(w: Word, alg: SuperAlgebra) -> (Word, int):
    """One application of tau: returns the rotated word and its sign."""
    if len(w) == 1:
        return w, 1
    s0 = _s(alg, w[0])
    rest = sum(_s(alg, a) for a in w[1:])
    return w[1:] + w[:1], _sign(s0 * rest)


def rotate_power(w: Word, j: int, alg: SuperAlgebra) -> (Word, int):
    k = j % len(w)
    sign = 1
    for _ in range(k):
        w, e = _rotate(w, alg)
        sign *= e
    return w, sign


class Tau(ChainOperator):
    name = "tau"

    def act_word(self, w, alg):
        v, sign = _rotate(w, alg)
        return {v: Fraction(sign)}


class TauPow(ChainOperator):
    """tau^j, with j taken modulo n+1 on tail length n (negative j allowed)."""

    def __init__(self, j: int):
        self.j = j
        self.name = f"tau^{j}"

    def act_word(self, w, alg):
        v, sign = rotate_power(w, self.j, alg)
        return {v: Fraction(sign)}


class NOp(ChainOperator):
    """N = sum_{i=0}^{n} tau^i."""

    name = "N"

    def act_word(self, w, alg):
        out: Terms = {}
        v, sign = w, 1
        for _ in range(len(w)):
            add_into(out, {v: Fraction(sign)})
            v, e = _rotate(v, alg)
            sign *= e
        return out


class NPrime(ChainOperator):
    """N' = sum_{j=1}^{n+1} j tau^j."""

    name = "N'"

    def act_word(self, w, alg):
        out: Terms = {}
        v, sign = w, 1
        for j in range(1, len(w) + 1):
            v, e = _rotate(v, alg)
            sign *= e
            add_into(out, {v: Fraction(j * sign)})
        return out


class PhiOp(ChainOperator):
    """Word reversal into the opposite algebra."""

    name = "Phi"

    def target(self, alg):
        return alg.opposite()

    def act_word(self, w, alg):
        n = len(w) - 1
        s = [_s(alg, a) for a in w[1:]]
        pairs = 0
        running = 0
        for x in s:
            pairs += running * x
            running += x
        return {(w[0],) + tuple(reversed(w[1:])): Fraction(_sign(n + pairs))}


class ProjC(ChainOperator):
    name = "pi_C"

    def act_word(self, w, alg):
        return {w: Fraction(1)} if w[0] != E_MARK else {}


class ProjPlus(ChainOperator):
    name = "pi_+"

    def act_word(self, w, alg):
        return {w: Fraction(1)} if w[0] == E_MARK else {}


class H(ChainOperator):
    """h: a0[...] -> 1[a0|...], unital algebras only."""

    parity = 1
    name = "h"

    def act_word(self, w, alg):
        if alg.unit is None:
            raise NonUnital(f"h needs a unit; {alg.name} has none")
        if w[0] == E_MARK:
            raise SectorMismatch("h is not defined on words with head e")
        return {(alg.unit,) + w: Fraction(1)}


class He(ChainOperator):
    """h^e: a0[...] -> e[a0|...]."""

    parity = 1
    name = "h^e"

    def act_word(self, w, alg):
        return {(E_MARK,) + w: Fraction(1)}


# ==================================================
# Generators: differential and multiplication
# ==================================================


def _delta_terms(w: Word, idx: int, alg: SuperAlgebra) -> Terms:
    prefix = sum(_s(alg, a) for a in w[:idx])
    sign = _sign(prefix)
    out: Terms = {}
    for x, c in alg.d_basis(w[idx]).items():
        add_into(out, {w[:idx] + (x,) + w[idx + 1:]: sign * c})
    return out


def _mu_terms(w: Word, idx: int, alg: SuperAlgebra) -> Terms:
    n = len(w) - 1
    out: Terms = {}
    if idx < n:
        sign = _sign(sum(_s(alg, a) for a in w[:idx + 1]) + 1)
        for x, c in alg.mul_basis(w[idx], w[idx + 1]).items():
            add_into(out, {w[:idx] + (x,) + w[idx + 2:]: sign * c})
        return out
    middle = sum(_s(alg, a) for a in w[1:n])
    sign = -_sign(_s(alg, w[n]) * (alg.p(w[0]) + middle))
    for x, c in alg.mul_basis(w[n], w[0]).items():
        add_into(out, {(x,) + w[1:n]: sign * c})
    return out


class Delta(ChainOperator):
    parity = 1

    def __init__(self, i: int):
        self.i = i
        self.name = f"delta({i})"

    def act_word(self, w, alg):
        n = len(w) - 1
        idx = _resolve(self.i, n)
        if idx < 0 or idx > n:
            return {}
        return _delta_terms(w, idx, alg)


class Mu(ChainOperator):
    """mu^(i); zero on tail length 0 and for indices beyond the tail."""

    parity = 1

    def __init__(self, i: int):
        self.i = i
        self.name = f"mu({i})"

    def act_word(self, w, alg):
        n = len(w) - 1
        if n == 0:
            return {}
        idx = _resolve(self.i, n)
        if idx < 0 or idx > n:
            return {}
        return _mu_terms(w, idx, alg)


def MuStar() -> ChainOperator:
    m = Mu(-1)
    m.name = "mu(*)"
    return m


class BDelta(ChainOperator):
    """b(delta) = sum_{i=0}^{n} delta^(i)."""

    parity = 1
    name = "b(delta)"

    def act_word(self, w, alg):
        out: Terms = {}
        for idx in range(len(w)):
            add_into(out, _delta_terms(w, idx, alg))
        return out


class _MuRange(ChainOperator):
    parity = 1

    def indices(self, n: int) -> range:
        raise NotImplementedError

    def act_word(self, w, alg):
        n = len(w) - 1
        out: Terms = {}
        if n == 0:
            return out
        for idx in self.indices(n):
            add_into(out, _mu_terms(w, idx, alg))
        return out


class BMu(_MuRange):
    """b(mu) = sum_{i=0}^{n} mu^(i)."""

    name = "b(mu)"

    def indices(self, n):
        return range(n + 1)


class BMuV(_MuRange):
    """b^v(mu) = mu^(0) + mu^(n)."""

    name = "b^v(mu)"

    def indices(self, n):
        return (0, n) if n > 0 else ()


class BMuH(_MuRange):
    """b^h(mu) = sum_{i=1}^{n-1} mu^(i)."""

    name = "b^h(mu)"

    def indices(self, n):
        return range(1, n)


# ==================================================
# Generators: gradings
# ==================================================


class GammaOp(ChainOperator):
    """Gamma = -n/2 on tail length n."""

    name = "Gamma"

    def act_word(self, w, alg):
        c = Fraction(-(len(w) - 1), 2)
        return {w: c} if c else {}


class GammaPrime(ChainOperator):
    """Gamma' = (sum of degrees - n); needs a Z-grading."""

    name = "Gamma'"

    def act_word(self, w, alg):
        c = Fraction(sum(alg.deg(a) for a in w) - (len(w) - 1))
        return {w: c} if c else {}


class GammaAt(ChainOperator):
    """gamma^(i) = deg(a_i)."""

    def __init__(self, i: int):
        self.i = i
        self.name = f"gamma({i})"

    def act_word(self, w, alg):
        n = len(w) - 1
        idx = _resolve(self.i, n)
        if idx < 0 or idx > n:
            return {}
        c = Fraction(alg.deg(w[idx]))
        return {w: c} if c else {}


# ==================================================
# Generators: insertions of algebra elements
# ==================================================


class Insert(ChainOperator):
    """
    a^(i): insertion of a fixed element a.

    Args:
        element: the inserted element of the algebra
        i: slot; 0 is the head insertion a[a0|...] (no sign), 1..n+1 are tail
            slots, negative values count from n+2
        element_parity: parity of the element
        label: name used in reports
    """

    def __init__(self, element: Element, i: int, element_parity: int, label: str = "a"):
        self.element = dict(element)
        self.i = i
        self.element_parity = element_parity % 2
        self.parity = (self.element_parity + 1) % 2
        self.label = label
        self.name = f"{label}({i})"

    def act_word(self, w, alg):
        n = len(w) - 1
        idx = self.i if self.i >= 0 else n + 2 + self.i
        if idx < 0 or idx > n + 1:
            return {}
        if idx == 0:
            return {(x,) + w: c for x, c in self.element.items()}
        prefix = sum(_s(alg, a) for a in w[:idx])
        sign = _sign((1 - self.element_parity) * prefix)
        return {w[:idx] + (x,) + w[idx:]: sign * c for x, c in self.element.items()}


class InsertAll(ChainOperator):
    """b^e(a) = sum_{i=1}^{n+1} a^(i)."""

    def __init__(self, element: Element, element_parity: int, label: str = "a"):
        self.element = dict(element)
        self.element_parity = element_parity % 2
        self.parity = (self.element_parity + 1) % 2
        self.label = label
        self.name = f"b^e({label})"

    def act_word(self, w, alg):
        out: Terms = {}
        for i in range(1, len(w) + 1):
            add_into(out, Insert(self.element, i, self.element_parity, self.label).act_word(w, alg))
        return out


class _HeadMul(ChainOperator):
    def __init__(self, element: Element, element_parity: int, label: str):
        self.element = dict(element)
        self.element_parity = element_parity % 2
        self.parity = self.element_parity
        self.label = label


class LeftMul0(_HeadMul):
    """l(a)^(0): a0[...] -> a a0[...]."""

    def __init__(self, element, element_parity, label="a"):
        super().__init__(element, element_parity, label)
        self.name = f"l({label})"

    def act_word(self, w, alg):
        out: Terms = {}
        for x, c in self.element.items():
            for y, d in alg.mul_basis(x, w[0]).items():
                add_into(out, {(y,) + w[1:]: c * d})
        return out


class RightMul0(_HeadMul):
    """r(a)^(0): a0[...] -> (-1)^{|a||a0|} a0 a[...]."""

    def __init__(self, element, element_parity, label="a"):
        super().__init__(element, element_parity, label)
        self.name = f"r({label})"

    def act_word(self, w, alg):
        sign = _sign(self.element_parity * alg.p(w[0]))
        out: Terms = {}
        for x, c in self.element.items():
            for y, d in alg.mul_basis(w[0], x).items():
                add_into(out, {(y,) + w[1:]: sign * c * d})
        return out


def LeftMul(element: Element, i: int, element_parity: int, label: str = "a") -> ChainOperator:
    """l(a)^(i) = tau^{-i} l(a)^(0) tau^i."""
    return Compose(TauPow(-i), LeftMul0(element, element_parity, label), TauPow(i))


def RightMul(element: Element, i: int, element_parity: int, label: str = "a") -> ChainOperator:
    """r(a)^(i) = tau^{-i} r(a)^(0) tau^i."""
    return Compose(TauPow(-i), RightMul0(element, element_parity, label), TauPow(i))


class Ad(ChainOperator):
    """ad(a) = sum_{i=0}^{n} (-1)^{|a| sum_{j<i} |sa_j|} a0[..|[a, a_i]|..]."""

    def __init__(self, element: Element, element_parity: int, label: str = "a"):
        self.element = dict(element)
        self.element_parity = element_parity % 2
        self.parity = self.element_parity
        self.name = f"ad({label})"

    def act_word(self, w, alg):
        out: Terms = {}
        pa = self.element_parity
        prefix = 0
        for i, ai in enumerate(w):
            sign = _sign(pa * prefix)
            bracket: Element = {}
            for x, c in self.element.items():
                add_into(bracket, alg.mul_basis(x, ai), c)
                add_into(bracket, alg.mul_basis(ai, x), -_sign(pa * alg.p(ai)) * c)
            for y, d in bracket.items():
                add_into(out, {w[:i] + (y,) + w[i + 1:]: sign * d})
            prefix += _s(alg, ai)
        return out


# ==================================================
# Double sums sum_i sum_j tau^j X^(i)
# ==================================================


class TauSum(ChainOperator):
    """
    Double sum over tau-conjugated slot operators.

    With m the tail length of X^(i)'s output:
        upper:  sum_{i=1}^{m} sum_{j=i+1}^{m+1} tau^j X^(i)
        lower:  sum_{i=1}^{m} sum_{j=1}^{i}     tau^j X^(i)

    Args:
        kind: "delta", "mu", "gamma" or "insert"
        lower: pick the lower triangle
        element, element_parity, label: the inserted element for kind "insert"
    """

    _SHIFT = {"delta": 0, "gamma": 0, "mu": -1, "insert": 1}

    def __init__(self, kind: str, lower: bool = False, element: Optional[Element] = None,
                 element_parity: int = 0, label: str = "a"):
        if kind not in self._SHIFT:
            raise ValueError(f"Unknown slot operator kind {kind!r}")
        self.kind = kind
        self.lower = lower
        self.element = dict(element or {})
        self.element_parity = element_parity % 2
        self.label = label
        if kind == "gamma":
            self.parity = 0
        elif kind == "insert":
            self.parity = (self.element_parity + 1) % 2
        else:
            self.parity = 1
        tri = "lower" if lower else "upper"
        inner = label if kind == "insert" else kind
        self.name = f"sum_{tri}(tau^j {inner}(i))"

    def _slot(self, i: int) -> ChainOperator:
        if self.kind == "delta":
            return Delta(i)
        if self.kind == "mu":
            return Mu(i)
        if self.kind == "gamma":
            return GammaAt(i)
        return Insert(self.element, i, self.element_parity, self.label)

    def act_word(self, w, alg):
        m = len(w) - 1 + self._SHIFT[self.kind]
        out: Terms = {}
        for i in range(1, m + 1):
            y = self._slot(i).act_word(w, alg)
            if not y:
                continue
            js = range(1, i + 1) if self.lower else range(i + 1, m + 2)
            for j in js:
                add_into(out, TauPow(j).act(y, alg))
        return out


# ==================================================
# Named operators
# ==================================================


def hochschild_b() -> ChainOperator:
    """b = b(delta) + b(mu); on C^e it is b^e."""
    return Sum(BDelta(), BMu())


def connes_B() -> ChainOperator:
    """B = (1 - tau^{-1}) h N on C(A), A unital."""
    return Compose(Sum(Identity(), Scaled(-1, TauPow(-1))), H(), NOp())


def connes_Be() -> ChainOperator:
    """B^e = h^e N on the C-component, zero on C^+."""
    return Compose(He(), NOp(), ProjC())


def insertion_b(element: Element, element_parity: int, label: str = "a") -> ChainOperator:
    return InsertAll(element, element_parity, label)


# ==================================================
# Evaluation on chains
# ==================================================


def _sector_of(terms: Terms) -> Sector:
    heads = {w[0] == E_MARK for w in terms}
    if heads == {True}:
        return Sector.CPLUS
    if heads == {False}:
        return Sector.C
    return Sector.CE


def eval_operator(op: ChainOperator, x: Chain) -> ApplyResult:
    """
    Evaluate word by word. Words whose evaluation leaves a truncated range are
    recorded as overflowed and contribute nothing; terms beyond the chain's
    length cap are dropped and flagged.
    """
    alg = x.algebra
    out: Terms = {}
    overflowed: List[Word] = []
    lengths = set()
    bad_lengths = set()
    for w, c in sorted(x.terms.items()):
        n = len(w) - 1
        lengths.add(n)
        try:
            add_into(out, op.act({w: Fraction(1)}, alg), c)
        except TruncationOverflow:
            overflowed.append(w)
            bad_lengths.add(n)
    if x.length_cap is not None:
        escaped = [w for w in out if len(w) - 1 > x.length_cap]
        for w in escaped:
            del out[w]
        if escaped:
            bad_lengths.update(lengths)
            overflowed.extend(escaped)
    target = op.target(alg)
    chain = Chain(target, out, _sector_of(out), x.length_cap, check=False)
    return ApplyResult(
        chain=chain,
        overflow=bool(overflowed),
        certified_window=sorted(lengths - bad_lengths),
        overflowed_words=overflowed,
    )


def apply_B(x: Chain, A: Optional[SuperAlgebra] = None) -> ApplyResult:
    A = A or x.algebra
    if A.unit is None:
        raise NonUnital(f"B needs a unit; {A.name} has none")
    if any(not in_sector(w, Sector.C) for w in x.terms):
        raise SectorMismatch("B acts on C(A) only")
    return eval_operator(connes_B(), x)


def apply_Be(x: Chain) -> ApplyResult:
    return eval_operator(connes_Be(), x)


def apply_Phi(x: Chain, A: Optional[SuperAlgebra] = None) -> Chain:
    return eval_operator(PhiOp(), x).chain
