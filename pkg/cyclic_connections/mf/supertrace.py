"""
Supertrace from chains over Q[Y] (x) End(V) to chains over Q[Y].

With a_s = phi_s (x) E_{i_s i_{s+1}}, a word survives only when consecutive
matrix indices match and the last one closes the cycle:
    (phi_0 E_{i0 i1})[phi_1 E_{i1 i2}|..|phi_n E_{in i0}]
        -> (-1)^{(n-1)|v_i0| + sum_{s=1}^{n} |v_is|} phi_0[phi_1|..|phi_n]
    e[phi_1 E_{i1 i2}|..|phi_n E_{in i1}]
        -> (-1)^{n|v_i1| + sum_{s=2}^{n} |v_is|} e[phi_1|..|phi_n]
e[] is the supertrace of the unit and maps to 0.
"""

from fractions import Fraction
from typing import Optional, Sequence

from cyclic_connections.algebra.superalg import E_MARK, add_into
from cyclic_connections.chains.identities import IdentityReport, WordCheck, _Rendered, operator_powers, run_word_checks
from cyclic_connections.chains.operators import Zero
from cyclic_connections.chains.words import Chain, Sector, SectorMismatch, Terms, Word
from cyclic_connections.mf.aw import MFAlgebra
from cyclic_connections.utils.constants import DEFAULT_SAMPLE_SEED, DEFAULT_WORD_BUDGET


def _trace_word(w: Word, mfa: MFAlgebra):
    """Returns (scalar word, sign) or None when the indices do not close."""
    if E_MARK in w[1:]:
        raise SectorMismatch("supertrace is not defined on words with e in the tail")
    is_plus = w[0] == E_MARK
    entries = w[1:] if is_plus else w
    if not entries:
        return None
    parts = [mfa.split(a) for a in entries]
    for s in range(len(parts)):
        nxt = parts[(s + 1) % len(parts)]
        if parts[s][2] != nxt[1]:
            return None
    n = len(w) - 1
    rows = [mfa.vparity(p[1]) for p in parts]
    if is_plus:
        exponent = n * rows[0] + sum(rows[1:])
    else:
        exponent = (n - 1) * rows[0] + sum(rows[1:])
    monos = tuple(p[0] for p in parts)
    scalar = ((E_MARK,) + monos) if is_plus else monos
    return scalar, -1 if exponent % 2 else 1


def supertrace_terms(terms: Terms, mfa: MFAlgebra) -> Terms:
    out: Terms = {}
    for w, c in terms.items():
        traced = _trace_word(w, mfa)
        if traced is None:
            continue
        v, sign = traced
        add_into(out, {v: sign * c})
    return out


def supertrace(x: Chain, mfa: MFAlgebra) -> Chain:
    terms = supertrace_terms(x.terms, mfa)
    return Chain(mfa.poly, terms, x.sector, x.length_cap, check=False)


class StrCheck(WordCheck):
    """str(lhs(x)) == rhs(str(x)), lhs acting over A_w and rhs over Q[Y]."""

    def __init__(self, lhs, rhs, mfa: MFAlgebra):
        self.lhs = operator_powers(lhs)
        self.rhs = operator_powers(rhs)
        self.mfa = mfa
        self.algebra = mfa.algebra

    def sides(self, w):
        traced = supertrace_terms({w: Fraction(1)}, self.mfa)
        out = []
        for power in sorted(set(self.lhs) | set(self.rhs)):
            left = supertrace_terms(self.lhs.get(power, Zero()).act({w: Fraction(1)}, self.algebra), self.mfa)
            right = self.rhs.get(power, Zero()).act(traced, self.mfa.poly)
            out.append((f"u^{power}", _Rendered(left, self.mfa.poly), _Rendered(right, self.mfa.poly)))
        return out


def check_str_identity(
    lhs,
    rhs,
    mfa: MFAlgebra,
    sector: Sector = Sector.CE,
    max_length: int = 3,
    name: str = "str",
    lengths: Optional[Sequence[int]] = None,
    budget: Optional[int] = DEFAULT_WORD_BUDGET,
    seed: int = DEFAULT_SAMPLE_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> IdentityReport:
    check = StrCheck(lhs, rhs, mfa)
    return run_word_checks(check, mfa.algebra, sector, max_length, name, lengths, budget, seed, jobs, progress)
