"""
Words a0[a1|...|an] and sparse chains over a SuperAlgebra.

A word is a plain tuple of basis indices `(a0, a1, ..., an)`; the head a0 may
be E_MARK (the adjoined unit e). Tails of input chains never contain e, but
evaluation works in C(A^e) and may pass through such words.

Sectors:
    C      heads in A            (the complex C(A))
    Cplus  head e                (C^+(A))
    Ce     either                (C^e(A) = C(A) + C^+(A))
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from cyclic_connections.algebra.scalars import fraction_str, to_fraction
from cyclic_connections.algebra.superalg import E_MARK, SuperAlgebra, add_into
from cyclic_connections.utils.constants import DEFAULT_SAMPLE_SEED, DEFAULT_WORD_BUDGET

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
Terms = Dict[Word, Fraction]


class Sector(str, Enum):
    C = "C"
    CE = "Ce"
    CPLUS = "Cplus"


class SectorMismatch(ValueError):
    pass


def head(w: Word) -> int:
    return w[0]


def tail(w: Word) -> Word:
    return w[1:]


def tail_length(w: Word) -> int:
    return len(w) - 1


def in_sector(w: Word, sector: Sector) -> bool:
    if sector == Sector.C:
        return w[0] != E_MARK
    if sector == Sector.CPLUS:
        return w[0] == E_MARK
    return True


def format_word(alg: SuperAlgebra, w: Word) -> str:
    h = alg.name_of(w[0])
    if len(w) == 1:
        return h
    return h + "[" + "|".join(alg.name_of(a) for a in w[1:]) + "]"


def parse_word(alg: SuperAlgebra, text: str) -> Word:
    text = text.strip()
    if "[" not in text:
        return (alg.index(text),)
    h, rest = text.split("[", 1)
    if not rest.endswith("]"):
        raise ValueError(f"Unbalanced word {text!r}")
    names = [n.strip() for n in rest[:-1].split("|")] if rest[:-1] else []
    return (alg.index(h.strip()),) + tuple(alg.index(n) for n in names)


def word_parity(alg: SuperAlgebra, w: Word) -> int:
    return (alg.p(w[0]) + sum(1 - alg.p(a) for a in w[1:])) % 2


class Chain:
    """
    Sparse rational combination of words over one algebra.

    Args:
        algebra: the algebra whose basis indexes the words
        terms: word -> coefficient
        sector: C, Cplus or Ce; checked against heads and tails when `check`
        length_cap: optional bound on tail length
    """

    __slots__ = ("algebra", "terms", "sector", "length_cap")

    def __init__(self, algebra: SuperAlgebra, terms: Optional[Dict[Word, object]] = None,
                 sector: Sector = Sector.CE, length_cap: Optional[int] = None, check: bool = True):
        self.algebra = algebra
        self.terms: Terms = {}
        for w, c in (terms or {}).items():
            c = to_fraction(c)
            if c:
                self.terms[tuple(w)] = c
        self.sector = Sector(sector)
        self.length_cap = length_cap
        if check:
            for w in self.terms:
                if not in_sector(w, self.sector):
                    raise SectorMismatch(f"{format_word(algebra, w)} does not lie in {self.sector.value}")
                if E_MARK in w[1:]:
                    raise SectorMismatch(f"{format_word(algebra, w)} carries e in its tail")
                if w == (E_MARK,):
                    raise SectorMismatch("e with an empty tail is not a chain")
                if length_cap is not None and len(w) - 1 > length_cap:
                    raise ValueError(f"{format_word(algebra, w)} exceeds the length cap {length_cap}")

    @classmethod
    def word(cls, algebra: SuperAlgebra, w, coeff=1, sector: Sector = Sector.CE) -> "Chain":
        if isinstance(w, str):
            w = parse_word(algebra, w)
        return cls(algebra, {tuple(w): coeff}, sector)

    def is_zero(self) -> bool:
        return not self.terms

    def max_tail(self) -> int:
        return max((len(w) - 1 for w in self.terms), default=0)

    def __add__(self, other: "Chain") -> "Chain":
        self._compatible(other)
        terms = dict(self.terms)
        add_into(terms, other.terms)
        return Chain(self.algebra, terms, self._joint_sector(other), self.length_cap, check=False)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + other.scale(-1)

    def __neg__(self) -> "Chain":
        return self.scale(-1)

    def scale(self, c) -> "Chain":
        c = to_fraction(c)
        return Chain(self.algebra, {w: c * v for w, v in self.terms.items()}, self.sector, self.length_cap, check=False)

    def __rmul__(self, c) -> "Chain":
        return self.scale(c)

    def project(self, sector: Sector) -> "Chain":
        terms = {w: c for w, c in self.terms.items() if in_sector(w, sector)}
        return Chain(self.algebra, terms, sector, self.length_cap, check=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def _compatible(self, other: "Chain"):
        if self.algebra is not other.algebra:
            raise ValueError(f"Chains over {self.algebra.name} and {other.algebra.name} cannot be combined")

    def _joint_sector(self, other: "Chain") -> Sector:
        return self.sector if self.sector == other.sector else Sector.CE

    def __str__(self) -> str:
        return format_terms(self.algebra, self.terms)

    def __repr__(self):
        return f"[Chain over {self.algebra.name}: {self}]"

    def to_json(self) -> Dict[str, str]:
        return {format_word(self.algebra, w): fraction_str(c) for w, c in sorted(self.terms.items())}


def format_terms(alg: SuperAlgebra, terms: Terms) -> str:
    if not terms:
        return "0"
    return " + ".join(f"{fraction_str(c)}*{format_word(alg, w)}" for w, c in sorted(terms.items()))


@dataclass
class ApplyResult:
    chain: Chain
    overflow: bool = False
    certified_window: List[int] = field(default_factory=list)
    overflowed_words: List[Word] = field(default_factory=list)


# ==================================================
# Basis word enumeration
# ==================================================


def sector_heads(alg: SuperAlgebra, sector: Sector, n: int = 1) -> List[int]:
    """Heads of basis words of tail length n; C^+ starts at n = 1."""
    plus = [E_MARK] if n >= 1 else []
    if sector == Sector.C:
        return list(range(alg.dim))
    if sector == Sector.CPLUS:
        return plus
    return list(range(alg.dim)) + plus


def count_words(alg: SuperAlgebra, n: int, sector: Sector) -> int:
    return len(sector_heads(alg, sector, n)) * alg.dim ** n


def basis_words(alg: SuperAlgebra, n: int, sector: Sector) -> Iterable[Word]:
    for h in sector_heads(alg, sector, n):
        for t in itertools.product(range(alg.dim), repeat=n):
            yield (h,) + t


@dataclass
class WordWindow:
    """Basis words chosen per tail length, exhaustive or sampled."""
    words: Dict[int, List[Word]]
    available: Dict[int, int]
    sampled: Dict[int, bool]

    def all_words(self) -> List[Word]:
        return [w for n in sorted(self.words) for w in self.words[n]]


def word_window(alg: SuperAlgebra, lengths: Iterable[int], sector: Sector,
                budget: Optional[int] = DEFAULT_WORD_BUDGET, seed: int = DEFAULT_SAMPLE_SEED) -> WordWindow:
    """
    Enumerate every basis word of the given tail lengths. With an explicit
    `budget`, a length holding more words than that is replaced by a seeded sample.
    """
    words, available, sampled = {}, {}, {}
    for n in sorted(set(lengths)):
        heads = sector_heads(alg, sector, n)
        total = count_words(alg, n, sector)
        available[n] = total
        if budget is None or total <= budget:
            words[n] = list(basis_words(alg, n, sector))
            sampled[n] = False
            continue
        rng = np.random.default_rng(seed + 7919 * n)
        picks = set()
        draws = rng.integers(0, [len(heads)] + [alg.dim] * n, size=(budget, n + 1))
        for row in draws:
            picks.add((heads[int(row[0])],) + tuple(int(v) for v in row[1:]))
        words[n] = sorted(picks)
        sampled[n] = True
        logger.debug("Sampled %d of %d words of tail length %d over %s" % (len(picks), total, n, alg.name))
    return WordWindow(words, available, sampled)
