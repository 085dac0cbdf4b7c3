"""
Named identity suites for the cyclic operator calculus.

Each suite builder takes an algebra and a maximal tail length and returns the
list of IdentityCase objects to check; identities whose indices depend on the
tail length are emitted once per length.

Suite ids:
    lemma-B1 .. lemma-B5   tau-conjugation, delta/mu (anti)commutation, h^e relations
    phi                    duality Phi with the opposite algebra
    squares                b^2 = 0, B^2 = 0, bB + Bb = 0 and their C^e versions
    lemma-D1               insertion operators b^e(a) and their brackets
    gamma                  the Z-grading operators gamma^(i), Gamma'
    nprime                 (1 - tau^{-1}) N' = -N - 2 Gamma + 1
"""

from fractions import Fraction
from typing import Callable, Dict, List, Optional

from cyclic_connections.algebra.superalg import Element, SuperAlgebra
from cyclic_connections.chains.identities import IdentityCase, SuiteReport, run_cases
from cyclic_connections.chains.operators import (
    Ad,
    BDelta,
    BMu,
    BMuH,
    BMuV,
    ChainOperator,
    Compose,
    Delta,
    GammaAt,
    GammaOp,
    GammaPrime,
    H,
    He,
    Identity,
    Insert,
    InsertAll,
    LeftMul,
    Mu,
    MuStar,
    NOp,
    NPrime,
    PhiOp,
    RightMul,
    Sum,
    Tau,
    TauPow,
    Zero,
    commutator,
    connes_B,
    connes_Be,
    hochschild_b,
)
from cyclic_connections.chains.words import Sector
from cyclic_connections.utils.constants import DEFAULT_SAMPLE_SEED, DEFAULT_WORD_BUDGET

C = Sector.C
CE = Sector.CE


def _upto(max_length: int, start: int = 0) -> range:
    return range(start, max_length + 1)


def sample_elements(alg: SuperAlgebra, limit: int = 1) -> List[Element]:
    """A few homogeneous basis elements: the unit if any, then up to `limit` even and odd ones."""
    picks: List[int] = []
    if alg.unit is not None:
        picks.append(alg.unit)
    for parity in (0, 1):
        found = [i for i in range(alg.dim) if alg.p(i) == parity and i not in picks]
        picks.extend(found[:limit])
    return [{i: Fraction(1)} for i in sorted(picks)]


# ==================================================
# tau, delta, mu and h^e relations
# ==================================================


def lemma_b1(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    cases = []
    for m in _upto(max_length):
        for j in range(m + 1):
            for k in range(m + 1):
                cases.append(IdentityCase(
                    f"delta({k}) tau^{j} = tau^{j} delta({(k + j) % (m + 1)}) [n={m}]",
                    Delta(k) @ TauPow(j), TauPow(j) @ Delta((k + j) % (m + 1)), CE, [m],
                ))
                if m == 0:
                    continue
                rhs = TauPow(j) @ Mu(k + j) if k + j <= m else TauPow(j - 1) @ Mu(k + j - m - 1)
                cases.append(IdentityCase(f"mu({k}) tau^{j} [n={m}]", Mu(k) @ TauPow(j), rhs, CE, [m]))
    cases += [
        IdentityCase("b(delta) tau = tau b(delta)", BDelta() @ Tau(), Tau() @ BDelta()),
        IdentityCase("(b(mu) - mu*) tau = tau (b(mu) - mu(0))",
                     (BMu() - MuStar()) @ Tau(), Tau() @ (BMu() - Mu(0))),
        IdentityCase("b(mu) (1 - tau) = (1 - tau) (b(mu) - mu(0))",
                     BMu() @ (Identity() - Tau()), (Identity() - Tau()) @ (BMu() - Mu(0))),
        IdentityCase("(b(mu) - mu*) N = N b(mu)", (BMu() - MuStar()) @ NOp(), NOp() @ BMu()),
        IdentityCase("N mu(0) N = N b(mu)", NOp() @ Mu(0) @ NOp(), NOp() @ BMu()),
    ]
    return cases


def lemma_b2(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    cases = []
    for n in _upto(max_length):
        for i in range(n + 1):
            for j in range(n + 1):
                cases.append(IdentityCase(
                    f"delta({i}) delta({j}) = -delta({j}) delta({i}) [n={n}]",
                    Delta(i) @ Delta(j), -(Delta(j) @ Delta(i)), CE, [n],
                ))
        for i in range(n):
            for j in range(i + 1):
                cases.append(IdentityCase(
                    f"mu({i}) mu({j}) = -mu({j}) mu({i + 1}) [n={n}]",
                    Mu(i) @ Mu(j), -(Mu(j) @ Mu(i + 1)), CE, [n],
                ))
        if n == 0:
            continue
        for i in range(n):
            for j in range(n):
                if j < i:
                    rhs = -(Mu(j) @ Delta(i + 1))
                elif i < j:
                    rhs = -(Mu(j) @ Delta(i))
                else:
                    continue
                cases.append(IdentityCase(f"delta({i}) mu({j}) [n={n}]", Delta(i) @ Mu(j), rhs, CE, [n]))
        for i in range(1, n):
            cases.append(IdentityCase(
                f"delta({i}) mu({n}) = -mu({n}) delta({i}) [n={n}]",
                Delta(i) @ Mu(n), -(Mu(n) @ Delta(i)), CE, [n],
            ))
        for i in range(n + 1):
            outer = Delta(i) if i < n else Delta(0)
            inner = Delta(i + 1) if i < n else Delta(0)
            cases.append(IdentityCase(
                f"delta({i}) mu({i}) = -mu({i}) (delta({i + 1}) + delta({i})) [n={n}]",
                outer @ Mu(i), -(Mu(i) @ inner) - (Mu(i) @ Delta(i)), CE, [n],
            ))
    return cases


def lemma_b3(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    cases = []
    for i in _upto(max_length):
        cases.append(IdentityCase(f"b(delta) delta({i}) = -delta({i}) b(delta)",
                                  BDelta() @ Delta(i), -(Delta(i) @ BDelta())))
        cases.append(IdentityCase(f"b(delta) mu({i}) = -mu({i}) b(delta)",
                                  BDelta() @ Mu(i), -(Mu(i) @ BDelta())))
    cases.append(IdentityCase("b(delta) mu* = -mu* b(delta)", BDelta() @ MuStar(), -(MuStar() @ BDelta())))
    return cases


def _h_relations(h: ChainOperator, label: str, sector: Sector, max_length: int) -> List[IdentityCase]:
    cases = [
        IdentityCase(f"delta(0) {label} = 0", Delta(0) @ h, Zero(), sector),
        IdentityCase(f"mu(0) {label} = id", Mu(0) @ h, Identity(), sector),
        IdentityCase(f"mu* {label} = -tau^-1", MuStar() @ h, -TauPow(-1), sector),
    ]
    for i in range(1, max_length + 2):
        cases.append(IdentityCase(f"delta({i}) {label} = -{label} delta({i - 1})",
                                  Delta(i) @ h, -(h @ Delta(i - 1)), sector))
    for i in range(1, max_length + 1):
        cases.append(IdentityCase(f"mu({i}) {label} = -{label} mu({i - 1})",
                                  Mu(i) @ h, -(h @ Mu(i - 1)), sector, list(_upto(max_length, i))))
    return cases


def lemma_b4(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    cases = _h_relations(He(), "h^e", CE, max_length)
    if alg.unit is not None:
        cases += _h_relations(H(), "h", C, max_length)
    return cases


def lemma_b5(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    return [
        IdentityCase("b(delta) h^e = -h^e b(delta)", BDelta() @ He(), -(He() @ BDelta())),
        IdentityCase("b^v(mu) h^e = 1 - tau^-1", BMuV() @ He(), Identity() - TauPow(-1)),
        IdentityCase("b^h(mu) h^e = -h^e (mu(0) + b^h(mu))",
                     BMuH() @ He(), -(He() @ (Mu(0) + BMuH()))),
        IdentityCase("b(mu) = b^v(mu) + b^h(mu)", BMu(), BMuV() + BMuH()),
    ]


# ==================================================
# Duality, squares, N'
# ==================================================


def phi_suite(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    phi = PhiOp()
    b = hochschild_b()
    cases = [
        IdentityCase("Phi tau = tau^-1 Phi", phi @ Tau(), TauPow(-1) @ phi),
        IdentityCase("Phi delta(0) = delta(0) Phi", phi @ Delta(0), Delta(0) @ phi),
        IdentityCase("Phi mu(0) = mu(0) tau^-1 Phi", phi @ Mu(0), Mu(0) @ TauPow(-1) @ phi),
        IdentityCase("Phi h^e = -h^e tau Phi", phi @ He(), -(He() @ Tau() @ phi)),
        IdentityCase("Phi N = N Phi", phi @ NOp(), NOp() @ phi),
        IdentityCase("Phi b^e = b^e Phi", phi @ b, b @ phi),
        IdentityCase("Phi B^e = -B^e Phi", phi @ connes_Be(), -(connes_Be() @ phi)),
        IdentityCase("Phi Phi = id", phi @ phi, Identity()),
    ]
    for n in _upto(max_length, 1):
        for i in range(1, n + 1):
            cases.append(IdentityCase(f"Phi delta({i}) = delta({n + 1 - i}) Phi [n={n}]",
                                      phi @ Delta(i), Delta(n + 1 - i) @ phi, CE, [n]))
        for i in range(n + 1):
            cases.append(IdentityCase(f"Phi mu({i}) = mu({n - i}) Phi [n={n}]",
                                      phi @ Mu(i), Mu(n - i) @ phi, CE, [n]))
    return cases


def squares_suite(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    b = hochschild_b()
    Be = connes_Be()
    cases = [
        IdentityCase("b^e b^e = 0", b @ b, Zero()),
        IdentityCase("B^e B^e = 0", Be @ Be, Zero()),
        IdentityCase("b^e B^e + B^e b^e = 0", b @ Be + Be @ b, Zero()),
        IdentityCase("b^e(delta) B^e + B^e b^e(delta) = 0", BDelta() @ Be + Be @ BDelta(), Zero()),
        IdentityCase("b^e(mu) B^e + B^e b^e(mu) = 0", BMu() @ Be + Be @ BMu(), Zero()),
    ]
    for n in _upto(max_length):
        cases.append(IdentityCase(f"tau^{n + 1} = 1 [n={n}]", Compose(*[Tau()] * (n + 1)), Identity(), CE, [n]))
    if alg.unit is not None:
        B = connes_B()
        cases += [
            IdentityCase("b b = 0 on C", b @ b, Zero(), C),
            IdentityCase("B B = 0", B @ B, Zero(), C),
            IdentityCase("b B + B b = 0", b @ B + B @ b, Zero(), C),
        ]
    return cases


def nprime_suite(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    return [IdentityCase(
        "(1 - tau^-1) N' = -N - 2 Gamma + 1",
        (Identity() - TauPow(-1)) @ NPrime(),
        Identity() - NOp() - 2 * GammaOp(),
    )]


# ==================================================
# Insertions
# ==================================================


def lemma_d1(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    elements = sample_elements(alg)
    cases = []
    for a in elements:
        pa = alg.element_parity(a)
        label = alg.format_element(a)
        ba = InsertAll(a, pa, label)
        da = alg.d(a)
        bda = InsertAll(da, pa + 1, f"d({label})") if da else Zero()
        sign = -1 if pa else 1
        cases += [
            IdentityCase(f"[b(delta), b^e({label})] = b^e(d{label})", commutator(BDelta(), ba), bda),
            IdentityCase(f"[b(mu), b^e({label})] = (-1)^|a| ad({label})",
                         commutator(BMu(), ba), sign * Ad(a, pa, label)),
            IdentityCase(f"[B^e, b^e({label})] = 0", commutator(connes_Be(), ba), Zero()),
        ]
        for n in _upto(max_length):
            cases.append(IdentityCase(
                f"ad({label}) = sum l - r [n={n}]",
                Ad(a, pa, label),
                Sum(*[LeftMul(a, i, pa, label) - RightMul(a, i, pa, label) for i in range(n + 1)]),
                CE, [n],
            ))
        for i in range(max_length + 2):
            cases.append(IdentityCase(
                f"h^e {label}({i}) = (-1)^(|a|+1) {label}({i + 1}) h^e",
                He() @ Insert(a, i, pa, label),
                -sign * (Insert(a, i + 1, pa, label) @ He()),
                CE, [n for n in _upto(max_length) if i <= n + 1],
            ))
        for a2 in elements:
            pa2 = alg.element_parity(a2)
            label2 = alg.format_element(a2)
            cases.append(IdentityCase(f"[b^e({label2}), b^e({label})] = 0",
                                      commutator(InsertAll(a2, pa2, label2), ba), Zero()))
            for n in _upto(min(max_length, 2)):
                for i in range(1, n + 2):
                    for j in range(1, n + 3):
                        lhs = Insert(a2, j, pa2, label2) @ Insert(a, i, pa, label)
                        if j <= i:
                            rhs = Insert(a, i + 1, pa, label) @ Insert(a2, j, pa2, label2)
                        else:
                            rhs = Insert(a, i, pa, label) @ Insert(a2, j - 1, pa2, label2)
                        koszul = -1 if (1 - pa) * (1 - pa2) else 1
                        cases.append(IdentityCase(f"{label2}({j}) {label}({i}) [n={n}]",
                                                  lhs, koszul * rhs, CE, [n]))
    return cases


# ==================================================
# Z-grading
# ==================================================


def gamma_suite(alg: SuperAlgebra, max_length: int) -> List[IdentityCase]:
    b = hochschild_b()
    cases = [
        IdentityCase("gamma(0) h^e = 0", GammaAt(0) @ He(), Zero()),
        IdentityCase("[Gamma', b^e] = b^e", commutator(GammaPrime(), b), b),
        IdentityCase("[Gamma', B^e] = -B^e", commutator(GammaPrime(), connes_Be()), -connes_Be()),
    ]
    for i in _upto(max_length):
        for j in _upto(max_length):
            rhs = Delta(j) @ GammaAt(i)
            if i == j:
                rhs = rhs + Delta(i)
            cases.append(IdentityCase(f"gamma({i}) delta({j})", GammaAt(i) @ Delta(j), rhs))
    for i in range(1, max_length + 2):
        cases.append(IdentityCase(f"gamma({i}) h^e = h^e gamma({i - 1})",
                                  GammaAt(i) @ He(), He() @ GammaAt(i - 1)))
    for m in _upto(max_length, 1):
        for i in range(m):
            for j in range(m):
                if i == j:
                    rhs = Mu(i) @ GammaAt(i) + Mu(i) @ GammaAt(i + 1)
                elif i < j:
                    rhs = Mu(j) @ GammaAt(i)
                else:
                    rhs = Mu(j) @ GammaAt(i + 1)
                cases.append(IdentityCase(f"gamma({i}) mu({j}) [n={m}]", GammaAt(i) @ Mu(j), rhs, CE, [m]))
    for n in _upto(max_length):
        cases.append(IdentityCase(
            f"Gamma' = sum gamma + 2 Gamma [n={n}]",
            GammaPrime(), Sum(*[GammaAt(i) for i in range(n + 1)]) + 2 * GammaOp(), CE, [n],
        ))
    return cases


SUITES: Dict[str, Callable[[SuperAlgebra, int], List[IdentityCase]]] = {
    "lemma-B1": lemma_b1,
    "lemma-B2": lemma_b2,
    "lemma-B3": lemma_b3,
    "lemma-B4": lemma_b4,
    "lemma-B5": lemma_b5,
    "phi": phi_suite,
    "squares": squares_suite,
    "lemma-D1": lemma_d1,
    "gamma": gamma_suite,
    "nprime": nprime_suite,
}


def run_suite(
    suite: str,
    alg: SuperAlgebra,
    max_length: int,
    budget: Optional[int] = DEFAULT_WORD_BUDGET,
    seed: int = DEFAULT_SAMPLE_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> SuiteReport:
    if suite not in SUITES:
        raise KeyError(f"Unknown suite {suite!r}; choose from {sorted(SUITES)}")
    if suite == "gamma" and alg.zdegree is None:
        report = SuiteReport(suite, alg.name, max_length)
        report.skipped = f"{alg.name} carries no Z-grading"
        return report
    cases = SUITES[suite](alg, max_length)
    return run_cases(suite, cases, alg, max_length, budget, seed, jobs, progress)
