"""
From (C^e(A_w), b^e, B^e, nabla) to (Omega(Y)((u)), -dw + ud, nabla^w).

The composite F = eps . str . exp(-b^e(D(w))) is evaluated word by word;
exp(-b^e(D(w))) is cut at tail length k + 1, which is exact after eps because
eps kills every tail longer than k and no operator applied after the
exponential lowers the tail by more than one.

Suite ids: mf-brackets, mf-conj, mf-homotopy, mf-flat-sharp, mf-str, mf-eps,
mf-composite, mf-theorem

Usage:
    mfa = build_Aw(parse_poly("x^2", ["x"]))
    F = composite_to_deRham(Chain.word(mfa.algebra, (idx,)), mfa)
    reports = run_mf_suites(mfa, max_length=2)
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional, Tuple

import sympy

from cyclic_connections.algebra.polynomials import poly_terms
from cyclic_connections.algebra.superalg import E_MARK, SuperAlgebra, TruncationOverflow, add_into
from cyclic_connections.chains.identities import (
    IdentityCase,
    IdentityReport,
    SuiteReport,
    WordCheck,
    run_cases,
    run_word_checks,
)
from cyclic_connections.chains.operators import (
    BDelta,
    BMu,
    GammaOp,
    He,
    Insert,
    Mu,
    NPrime,
    ProjC,
    Scaled,
    Tau,
    TauPow,
    Zero,
    commutator,
    connes_Be,
    hochschild_b,
)
from cyclic_connections.chains.words import Chain, Sector, Terms, Word
from cyclic_connections.connections.certificates import expect_failure
from cyclic_connections.connections.nabla import connection_nabla, op_U_delta, op_U_mu, op_V_delta, op_V_mu
from cyclic_connections.connections.uoperator import (
    HomotopyCertificate,
    MixedComplex,
    UConnection,
    UOperator,
    check_connection_law,
    verify_certificate,
)
from cyclic_connections.mf.aw import MFAlgebra, op_bDw, op_bw, op_U_w, op_V_w, twisted_b
from cyclic_connections.mf.derham import (
    Form,
    FormSeries,
    dw_d,
    dw_wedge,
    hkr_eps,
    potential_w,
    twisted_diff,
)
from cyclic_connections.mf.supertrace import check_str_identity, supertrace_terms
from cyclic_connections.utils.constants import DEFAULT_SAMPLE_SEED, DEFAULT_WORD_BUDGET

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


# ==================================================
# The composite
# ==================================================


def exp_neg_bD(terms: Terms, mfa: MFAlgebra, max_tail: int) -> Terms:
    """sum_j (-1)^j/j! b^e(D(w))^j, keeping words of tail length <= max_tail."""
    Y = op_bDw(mfa)
    out: Terms = {}
    current = {w: c for w, c in terms.items() if len(w) - 1 <= max_tail}
    j = 0
    while current:
        add_into(out, current, Fraction((-1) ** j, factorial(j)))
        j += 1
        current = {w: c for w, c in Y.act(current, mfa.algebra).items() if len(w) - 1 <= max_tail}
    return out


def eps_str(terms: Terms, mfa: MFAlgebra) -> Form:
    """eps . str on chains over A_w."""
    return hkr_eps(supertrace_terms(terms, mfa), mfa.monos, mfa.variables)


def eps_poly(terms: Terms, mfa: MFAlgebra) -> Form:
    return hkr_eps(terms, mfa.monos, mfa.variables)


def composite_terms(terms: Terms, mfa: MFAlgebra) -> Form:
    return eps_str(exp_neg_bD(terms, mfa, mfa.k + 1), mfa)


def composite_to_deRham(x: Chain, mfa: MFAlgebra) -> Form:
    """
    eps . str . exp(-b^e(D(w))) on a chain over A_w.

    Raises:
        TruncationOverflow: a product left the polynomial truncation
    """
    return composite_terms(x.terms, mfa)


def _w_terms(mfa: MFAlgebra):
    return poly_terms(mfa.w)


# ==================================================
# Connections on the w-twisted complexes
# ==================================================


def twisted_complex(mfa: MFAlgebra, on_poly: bool = False) -> MixedComplex:
    """(C^e, b^e(mu) + b^e(w), B^e) over A_w, or over Q[Y] when on_poly."""
    w_el = mfa.w_poly if on_poly else mfa.w_element
    name = "Ce(Q[Y])" if on_poly else "Ce(A_w)"
    return MixedComplex(f"{name}, w-twisted", twisted_b(w_el), connes_Be(), Sector.CE)


def connections_flat_sharp(mfa: MFAlgebra) -> Tuple[UConnection, UConnection]:
    """
    nabla^{flat,w} on C^e(A_w) and nabla^{sharp,w} on C^e(Q[Y]), both
    d/du + 2U(w)/u^2 + (2V(w) + Gamma)/u against b^e(mu) + b^e(w).
    """
    out = []
    for on_poly, name in ((False, "nabla_flat"), (True, "nabla_sharp")):
        w_el = mfa.w_poly if on_poly else mfa.w_element
        potential = UOperator({
            -2: Scaled(2, op_U_w(w_el)),
            -1: Scaled(2, op_V_w(w_el)) + GammaOp(),
        })
        out.append(UConnection(name, potential, twisted_complex(mfa, on_poly)))
    return out[0], out[1]


def homotopy_witness(drop_H1: bool = False) -> UOperator:
    """H0 + u H1 with H0 = mu(0) and H1 = h^e N' on C."""
    coeffs = {0: Mu(0), 1: He() @ NPrime() @ ProjC()}
    if drop_H1:
        del coeffs[1]
    return UOperator(coeffs, "H0 + uH1")


def cert_twisted_tilde(mfa: MFAlgebra, drop_H1: bool = False) -> HomotopyCertificate:
    """
    2(U(mu) - U(w)) + 2u(V(mu) - V(w) - Gamma) = [b^e(mu) + b^e(w) + uB^e, H0 + uH1],
    that is nabla_tilde conjugated by exp(-b^e(D(w))) is homotopic to nabla_flat.
    """
    w_el = mfa.w_element
    residual = UOperator({
        0: Scaled(2, op_U_mu() - op_U_w(w_el)),
        1: Scaled(2, op_V_mu() - op_V_w(w_el) - GammaOp()),
    })
    name = "2u^2(conj(nabla_tilde) - nabla_flat) = [D_w, H0 + uH1]"
    if drop_H1:
        name = f"{name} without uH1"
    return HomotopyCertificate(name, residual, homotopy_witness(drop_H1), twisted_complex(mfa))


# ==================================================
# Form-valued word checks
# ==================================================


def _act_u(op: UOperator, terms: Terms, alg: SuperAlgebra) -> Dict[int, Terms]:
    return {p: c.act(terms, alg) for p, c in op.coeffs.items()}


def _series(mfa: MFAlgebra, parts: Dict[int, Form]) -> FormSeries:
    return FormSeries(mfa.variables, parts)


class EpsCheck(WordCheck):
    """
    Identities of eps on chains over Q[Y].

    Kinds:
        b        eps (b^e(mu) + b^e(w)) = -dw ^ eps
        B        eps B^e = d eps
        bmu      eps b^e(mu) = 0
        U        w eps = 2 eps U(w)
        gamma    Gamma eps = eps Gamma
        V        2 eps V(w) = -1/2 (dw ^ d) eps
        he-tau   eps h^e tau^j = 1/(n+1) d eps on C, every j
        nabla    nabla^w eps - eps nabla_sharp = [-dw + ud, (1/2u^2) w d eps]
    """

    KINDS = ("b", "B", "bmu", "U", "gamma", "V", "he-tau", "nabla")

    def __init__(self, mfa: MFAlgebra, kind: str):
        if kind not in self.KINDS:
            raise ValueError(f"Unknown eps identity {kind!r}")
        self.mfa = mfa
        self.kind = kind
        self.algebra = mfa.poly

    def _eps(self, terms: Terms) -> Form:
        return eps_poly(terms, self.mfa)

    def _w3(self, terms: Terms) -> FormSeries:
        """(1/2u^2) w d eps."""
        mfa = self.mfa
        f = self._eps(terms).d().mul_poly(_w_terms(mfa))
        return _series(mfa, {-2: f.scale(HALF)})

    def sides(self, w: Word):
        mfa, alg = self.mfa, self.algebra
        x = {w: Fraction(1)}
        ex = self._eps(x)
        wt = _w_terms(mfa)
        if self.kind == "b":
            return [("forms", self._eps(twisted_b(mfa.w_poly).act(x, alg)), -dw_wedge(ex, wt))]
        if self.kind == "B":
            return [("forms", self._eps(connes_Be().act(x, alg)), ex.d())]
        if self.kind == "bmu":
            return [("forms", self._eps(BMu().act(x, alg)), Form.zero(mfa.variables))]
        if self.kind == "U":
            return [("forms", ex.mul_poly(wt), self._eps(op_U_w(mfa.w_poly).act(x, alg)).scale(2))]
        if self.kind == "gamma":
            return [("forms", ex.gamma(), self._eps(GammaOp().act(x, alg)))]
        if self.kind == "V":
            left = self._eps(op_V_w(mfa.w_poly).act(x, alg)).scale(2)
            return [("forms", left, dw_d(ex, wt).at(0).scale(-HALF))]
        if self.kind == "he-tau":
            if w[0] == E_MARK:
                return []
            n = len(w) - 1
            right = ex.d().scale(Fraction(1, n + 1))
            return [(f"j={j}", self._eps((He() @ TauPow(j)).act(x, alg)), right) for j in range(n + 1)]
        # nabla: residual against the boundary of the witness
        _, sharp = connections_flat_sharp(mfa)
        applied = _act_u(sharp.potential, x, alg)
        left = potential_w(ex, wt) - _series(mfa, {p: self._eps(t) for p, t in applied.items()})
        D = sharp.complex.D()
        right = twisted_diff(self._w3(x), wt)
        for p, t in _act_u(D, x, alg).items():
            right = right + self._w3(t).shift(p)
        return [("u-series", left, right)]


class CompositeCheck(WordCheck):
    """
    Identities of F = eps . str . exp(-b^e(D(w))) on chains over A_w.

    Kinds:
        b        F b^e = -dw ^ F
        B        F B^e = d F
        theorem  A^w F - F A = [-dw + ud, W], where A is the potential of nabla,
                 A^w = w/u^2 + Gamma/u and
                 W = (1/2u^2) (w d F + eps str (exp(-bD) Hc - Hc exp(-bD))),
                 Hc = H0 + uH1
    """

    KINDS = ("b", "B", "theorem")

    def __init__(self, mfa: MFAlgebra, kind: str):
        if kind not in self.KINDS:
            raise ValueError(f"Unknown composite identity {kind!r}")
        self.mfa = mfa
        self.kind = kind
        self.algebra = mfa.algebra
        # per-word values; every map below is linear in the chain
        self._exp_cache: Dict[Word, Terms] = {}
        self._F_cache: Dict[Word, Form] = {}
        self._witness_cache: Dict[Word, FormSeries] = {}

    def _exp_word(self, w: Word) -> Terms:
        if w not in self._exp_cache:
            self._exp_cache[w] = exp_neg_bD({w: Fraction(1)}, self.mfa, self.mfa.k + 1)
        return self._exp_cache[w]

    def _exp(self, terms: Terms) -> Terms:
        out: Terms = {}
        for w, c in terms.items():
            add_into(out, self._exp_word(w), c)
        return out

    def _F(self, terms: Terms) -> Form:
        out = Form.zero(self.mfa.variables)
        for w, c in terms.items():
            if w not in self._F_cache:
                self._F_cache[w] = eps_str(self._exp_word(w), self.mfa)
            out = out + self._F_cache[w].scale(c)
        return out

    def _witness_word(self, w: Word) -> FormSeries:
        mfa, alg = self.mfa, self.algebra
        x = {w: Fraction(1)}
        parts: Dict[int, Form] = {0: self._F(x).d().mul_poly(_w_terms(mfa))}
        expd = self._exp_word(w)
        for p, op in homotopy_witness().coeffs.items():
            before = self._F(op.act(x, alg))
            after = eps_str(op.act(expd, alg), mfa)
            parts[p] = parts.get(p, Form.zero(mfa.variables)) + before - after
        return _series(mfa, parts).shift(-2).scale(HALF)

    def witness(self, terms: Terms) -> FormSeries:
        out = _series(self.mfa, {})
        for w, c in terms.items():
            if w not in self._witness_cache:
                self._witness_cache[w] = self._witness_word(w)
            out = out + self._witness_cache[w].scale(c)
        return out

    def sides(self, w: Word):
        mfa, alg = self.mfa, self.algebra
        x = {w: Fraction(1)}
        wt = _w_terms(mfa)
        Fx = self._F(x)
        if self.kind == "b":
            return [("forms", self._F(hochschild_b().act(x, alg)), -dw_wedge(Fx, wt))]
        if self.kind == "B":
            return [("forms", self._F(connes_Be().act(x, alg)), Fx.d())]
        potential = connection_nabla().potential
        applied = _act_u(potential, x, alg)
        left = potential_w(Fx, wt) - _series(mfa, {p: self._F(t) for p, t in applied.items()})
        right = twisted_diff(self.witness(x), wt)
        D = UOperator({0: hochschild_b(), 1: connes_Be()})
        for p, t in _act_u(D, x, alg).items():
            right = right + self.witness(t).shift(p)
        return [("u-series", left, right)]


@dataclass
class FormCertificate:
    """
    A homotopy between form-valued maps, checked word by word through `check`.

    Attributes:
        derived: True when the witness was assembled from several homotopy steps
    """
    name: str
    check: WordCheck
    sector: Sector = Sector.CE
    derived: bool = False
    notes: str = ""


def eps_connection_certificate(mfa: MFAlgebra) -> FormCertificate:
    """eps is a morphism of u-connections nabla_sharp -> nabla^w, witness (1/2u^2) w d eps."""
    return FormCertificate(
        "eps: nabla^w eps - eps nabla_sharp = [-dw + ud, (1/2u^2) w d eps]",
        EpsCheck(mfa, "nabla"),
        notes="H = (1/u) w d satisfies dw ^ d = [-dw + ud, H]",
    )


def theorem_certificate(mfa: MFAlgebra) -> FormCertificate:
    """The composed residual of F between nabla on C^e(A_w) and nabla^w on forms."""
    return FormCertificate(
        "theorem: A^w F - F A = [-dw + ud, W_total]",
        CompositeCheck(mfa, "theorem"),
        derived=True,
        notes="W_total composes the eps witness with the H0 + uH1 homotopies on both sides of exp(-bD)",
    )


def verify_form_certificate(
    cert: FormCertificate,
    max_length: int,
    budget: Optional[int] = DEFAULT_WORD_BUDGET,
    seed: int = DEFAULT_SAMPLE_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> IdentityReport:
    report = run_word_checks(cert.check, cert.check.algebra, cert.sector, max_length, cert.name, None, budget,
                             seed, jobs, progress)
    logger.info("Certificate %s on %s: %s" % (cert.name, cert.check.algebra.name, report.status))
    return report


# ==================================================
# Surjectivity onto H(Omega, -dw)
# ==================================================


@dataclass
class SurjectivityReport:
    candidates: int
    overflowed: int
    cycles: int
    rank: int
    milnor: int
    witness: Optional[str] = None

    @property
    def spans(self) -> bool:
        return self.rank == self.milnor

    def to_json(self) -> dict:
        return {
            "candidates": self.candidates,
            "overflowed": self.overflowed,
            "cycles": self.cycles,
            "rank": self.rank,
            "milnor": self.milnor,
            "spans": self.spans,
            "witness": self.witness,
        }


def _low_degree_words(mfa: MFAlgebra, max_tail: int, max_mono_deg: int) -> List[Word]:
    alg = mfa.algebra
    allowed = [i for i in range(alg.dim) if sum(mfa.monos[mfa.split(i)[0]]) <= max_mono_deg]
    out = []
    for n in range(max_tail + 1):
        for head in allowed + [E_MARK]:
            out.extend((head,) + t for t in itertools.product(allowed, repeat=n))
    return out


def surjectivity_check(mfa: MFAlgebra, max_tail: int = 0, max_mono_deg: Optional[int] = None) -> SurjectivityReport:
    """
    Solve b^e x = 0 among words with entries of polynomial degree <= max_mono_deg
    (deg w - 1 by default) and tail <= max_tail, then measure the span of the
    top-degree parts of F(x) in Omega^k / dw ^ Omega^{k-1}.
    """
    from cyclic_connections.homology.reduction import gd_reduce

    if max_mono_deg is None:
        max_mono_deg = mfa.w.total_degree() - 1
    alg = mfa.algebra
    b = hochschild_b()
    words = []
    images = []
    overflowed = 0
    for w in _low_degree_words(mfa, max_tail, max_mono_deg):
        try:
            images.append(b.act({w: Fraction(1)}, alg))
        except TruncationOverflow:
            overflowed += 1
            continue
        words.append(w)
    rows = sorted({v for image in images for v in image}, key=lambda v: (len(v), v))
    row_of = {v: i for i, v in enumerate(rows)}
    if rows:
        M = sympy.zeros(len(rows), len(words))
        for j, image in enumerate(images):
            for v, c in image.items():
                M[row_of[v], j] = sympy.Rational(c.numerator, c.denominator)
        kernel = M.nullspace()
    else:
        kernel = [sympy.Matrix([1 if i == j else 0 for i in range(len(words))]) for j in range(len(words))]

    top = tuple(range(mfa.k))
    coords = []
    witness = None
    for vec in kernel:
        terms: Terms = {}
        for j, c in enumerate(vec):
            c = sympy.Rational(c)
            if c != 0:
                terms[words[j]] = Fraction(int(c.p), int(c.q))
        try:
            image = composite_terms(terms, mfa)
        except TruncationOverflow:
            overflowed += 1
            continue
        top_part = Form(mfa.variables, {key: c for key, c in image.terms.items() if key[1] == top})
        if top_part.is_zero():
            continue
        reduced = gd_reduce(top_part, mfa.w)
        row = [c.coeff(0) for c in reduced.coords]
        if any(row) and witness is None:
            witness = str(image)
        coords.append([sympy.Rational(c.numerator, c.denominator) for c in row])
    rank = sympy.Matrix(coords).rank() if coords else 0
    report = SurjectivityReport(len(words), overflowed, len(kernel), rank, mfa.validation.milnor, witness)
    logger.info("Surjectivity for %s: rank %d of %d" % (mfa.describe()["w"], rank, report.milnor))
    return report


# ==================================================
# Suites
# ==================================================


def _suite(name: str, mfa: MFAlgebra, max_length: int) -> SuiteReport:
    return SuiteReport(name, mfa.algebra.name, max_length)


def brackets_suite(mfa, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    Y = op_bDw(mfa)
    bw = op_bw(mfa.w_element)
    tw = twisted_b(mfa.w_element)
    Be = connes_Be()
    cases = [
        IdentityCase("[b^e(delta), b^e(D)] = 2 b^e(w)", commutator(BDelta(), Y), Scaled(2, bw)),
        IdentityCase("[b^e(mu), b^e(D)] = -b^e(delta)", commutator(BMu(), Y), Scaled(-1, BDelta())),
        IdentityCase("[B^e, b^e(D)] = 0", commutator(Be, Y), Zero()),
        IdentityCase("[b^e(w), b^e(D)] = 0", commutator(bw, Y), Zero()),
        IdentityCase("(b^e(mu) + b^e(w))^2 = 0", tw @ tw, Zero()),
        IdentityCase("(b^e(mu) + b^e(w)) B^e + B^e (b^e(mu) + b^e(w)) = 0", tw @ Be + Be @ tw, Zero()),
    ]
    return run_cases("mf-brackets", cases, mfa.algebra, max_length, budget, seed, jobs, progress)


def conj_suite(mfa, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    Y = op_bDw(mfa)
    w_el = mfa.w_element
    Uw, Vw = op_U_w(w_el), op_V_w(w_el)
    cases = [
        IdentityCase("[U(delta), b^e(D)] = 2U(w)", commutator(op_U_delta(), Y), Scaled(2, Uw)),
        IdentityCase("[V(delta), b^e(D)] = 2V(w)", commutator(op_V_delta(), Y), Scaled(2, Vw)),
        IdentityCase("[U(mu), b^e(D)] = -U(delta)", commutator(op_U_mu(), Y), Scaled(-1, op_U_delta())),
        IdentityCase("[V(mu), b^e(D)] = -V(delta)", commutator(op_V_mu(), Y), Scaled(-1, op_V_delta())),
        IdentityCase("[U(w), b^e(D)] = 0", commutator(Uw, Y), Zero()),
        IdentityCase("[V(w), b^e(D)] = 0", commutator(Vw, Y), Zero()),
    ]
    for label, delta, mu, target in (("U", op_U_delta(), op_U_mu(), Uw), ("V", op_V_delta(), op_V_mu(), Vw)):
        X = delta + mu
        XY = commutator(X, Y)
        XYY = commutator(XY, Y)
        cases.append(IdentityCase(
            f"X + [X, bD] + 1/2 [[X, bD], bD] = {label}(mu) + {label}(w), X = {label}(delta) + {label}(mu)",
            X + XY + Scaled(HALF, XYY), mu + target,
        ))
        cases.append(IdentityCase(f"[[[X, bD], bD], bD] = 0, X = {label}(delta) + {label}(mu)",
                                  commutator(XYY, Y), Zero()))
    return run_cases("mf-conj", cases, mfa.algebra, max_length, budget, seed, jobs, progress)


def homotopy_suite(mfa, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    bw = op_bw(mfa.w_element)
    H0 = Mu(0)
    H1 = He() @ NPrime() @ ProjC()
    cases = [
        IdentityCase("b^e(w) H0 + H0 b^e(w) = -2U(w)", commutator(bw, H0), Scaled(-2, op_U_w(mfa.w_element))),
        IdentityCase("b^e(w) H1 + H1 b^e(w) = -2V(w)", commutator(bw, H1), Scaled(-2, op_V_w(mfa.w_element))),
    ]
    report = run_cases("mf-homotopy", cases, mfa.algebra, max_length, budget, seed, jobs, progress)
    report.entries.append(verify_certificate(cert_twisted_tilde(mfa), mfa.algebra, max_length, budget, seed, jobs,
                                             progress))
    control = verify_certificate(cert_twisted_tilde(mfa, drop_H1=True), mfa.algebra, max_length, budget, seed, jobs)
    report.entries.append(expect_failure(control))
    return report


def flat_sharp_suite(mfa, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    report = _suite("mf-flat-sharp", mfa, max_length)
    flat, sharp = connections_flat_sharp(mfa)
    report.entries.append(check_connection_law(flat, mfa.algebra, max_length, budget, seed, jobs))
    report.entries.append(check_connection_law(sharp, mfa.poly, max_length, budget, seed, jobs))
    return report


def str_suite(mfa, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    report = _suite("mf-str", mfa, max_length)
    flat, sharp = connections_flat_sharp(mfa)

    def add(name, lhs, rhs, sector=Sector.CE):
        entry = check_str_identity(lhs, rhs, mfa, sector, max_length, name, None, budget, seed, jobs, progress)
        if entry.status == "fail":
            logger.info("mf-str: %s fails at %s" % (name, entry.counterexample["word"]))
        report.entries.append(entry)

    add("str tau = tau str", Tau(), Tau(), Sector.C)
    add("str h^e = h^e str", He(), He(), Sector.C)
    add("str mu(0) = mu(0) str", Mu(0), Mu(0))
    for t in range(1, max_length + 2):
        add(f"str w({t}) = w({t}) str", Insert(mfa.w_element, t, 0, "w"), Insert(mfa.w_poly, t, 0, "w"))
    add("str (b^e(mu) + b^e(w)) = (b^e(mu) + b^e(w)) str", flat.complex.b, sharp.complex.b)
    add("str B^e = B^e str", connes_Be(), connes_Be())
    add("str A_flat = A_sharp str", flat.potential, sharp.potential)
    return report


def eps_suite(mfa, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    report = _suite("mf-eps", mfa, max_length)
    names = {
        "b": "eps (b^e(mu) + b^e(w)) = -dw ^ eps",
        "B": "eps B^e = d eps",
        "bmu": "eps b^e(mu) = 0",
        "U": "w eps = 2 eps U(w)",
        "gamma": "Gamma eps = eps Gamma",
        "V": "2 eps V(w) = -1/2 (dw ^ d) eps",
        "he-tau": "eps h^e tau^j = 1/(n+1) d eps",
    }
    for kind, name in names.items():
        sector = Sector.C if kind == "he-tau" else Sector.CE
        report.entries.append(run_word_checks(EpsCheck(mfa, kind), mfa.poly, sector, max_length, name, None,
                                              budget, seed, jobs, progress))
    report.entries.append(verify_form_certificate(eps_connection_certificate(mfa), max_length, budget, seed, jobs,
                                                  progress))
    return report


def composite_suite(mfa, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    report = _suite("mf-composite", mfa, max_length)
    for kind, name in (("b", "F b^e = -dw ^ F"), ("B", "F B^e = d F")):
        report.entries.append(run_word_checks(CompositeCheck(mfa, kind), mfa.algebra, Sector.CE, max_length, name,
                                              None, budget, seed, jobs, progress))
    return report


def theorem_suite(mfa, max_length, budget=DEFAULT_WORD_BUDGET, seed=DEFAULT_SAMPLE_SEED, jobs=1, progress=False):
    report = _suite("mf-theorem", mfa, max_length)
    report.entries.append(verify_form_certificate(theorem_certificate(mfa), max_length, budget, seed, jobs,
                                                  progress))
    return report


MF_SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "mf-brackets": brackets_suite,
    "mf-conj": conj_suite,
    "mf-homotopy": homotopy_suite,
    "mf-flat-sharp": flat_sharp_suite,
    "mf-str": str_suite,
    "mf-eps": eps_suite,
    "mf-composite": composite_suite,
    "mf-theorem": theorem_suite,
}


def run_mf_suites(
    mfa: MFAlgebra,
    max_length: int,
    suites: Optional[List[str]] = None,
    budget: Optional[int] = DEFAULT_WORD_BUDGET,
    seed: int = DEFAULT_SAMPLE_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> List[SuiteReport]:
    names = list(MF_SUITES) if suites is None else suites
    out = []
    for name in names:
        if name not in MF_SUITES:
            raise ValueError(f"Unknown mf suite {name!r}; choose from {', '.join(MF_SUITES)}")
        report = MF_SUITES[name](mfa, max_length, budget, seed, jobs, progress)
        logger.info("%s on %s: %s" % (name, mfa.algebra.name, report.status))
        out.append(report)
    return out
