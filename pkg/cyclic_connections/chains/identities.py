"""
Exact verification of operator identities on basis words.

Both sides are evaluated on every basis word of tail length <= L (or on a
seeded sample when an explicit budget is given). Words whose
evaluation touches an overflowed product are excluded and counted; the report
states which lengths were certified.

Usage:
    report = check_identity(Delta(0) @ He(), Zero(), lam, Sector.CE, 4, name="delta0-he")
    print(report.status, report.counterexample)
"""

import logging
import multiprocessing as mp
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from cyclic_connections.algebra.superalg import NonUnital, NotZGraded, SuperAlgebra, TruncationOverflow
from cyclic_connections.chains.operators import ChainOperator, Zero
from cyclic_connections.chains.words import Sector, Word, format_terms, format_word, word_window
from cyclic_connections.utils.constants import DEFAULT_CHUNK_SIZE, DEFAULT_SAMPLE_SEED, DEFAULT_WORD_BUDGET

logger = logging.getLogger(__name__)

OK = "ok"
OVERFLOW = "overflow"
FAIL = "fail"


def operator_powers(op) -> Dict[int, ChainOperator]:
    """u-power -> coefficient; plain chain operators sit at power 0."""
    coeffs = getattr(op, "coeffs", None)
    if coeffs is not None:
        return dict(coeffs)
    return {0: op}


class WordCheck:
    """
    A per-word equality test. Subclasses return both sides for one word as
    (label, lhs, rhs) triples; sides must support `==` and `str`.
    """

    algebra: SuperAlgebra

    def sides(self, w: Word) -> List[Tuple[str, object, object]]:
        raise NotImplementedError

    def __call__(self, w: Word) -> Tuple[str, Optional[Dict[str, str]]]:
        try:
            for label, lhs, rhs in self.sides(w):
                if lhs != rhs:
                    return FAIL, {
                        "word": format_word(self.algebra, w),
                        "component": label,
                        "lhs": str(lhs),
                        "rhs": str(rhs),
                    }
        except TruncationOverflow:
            return OVERFLOW, None
        return OK, None


class _Rendered:
    """Chain terms compared by value and printed over the right algebra."""

    __slots__ = ("terms", "algebra")

    def __init__(self, terms, algebra):
        self.terms = terms
        self.algebra = algebra

    def __eq__(self, other):
        return self.terms == other.terms

    def __str__(self):
        return format_terms(self.algebra, self.terms)


class OperatorCheck(WordCheck):
    """lhs == rhs power by power, for chain operators or u-operators."""

    def __init__(self, lhs, rhs, algebra: SuperAlgebra):
        self.lhs = operator_powers(lhs)
        self.rhs = operator_powers(rhs)
        self.algebra = algebra

    def sides(self, w):
        out = []
        for power in sorted(set(self.lhs) | set(self.rhs)):
            left = self.lhs.get(power, Zero())
            right = self.rhs.get(power, Zero())
            target = left.target(self.algebra) if not isinstance(left, Zero) else right.target(self.algebra)
            out.append((
                f"u^{power}",
                _Rendered(left.act({w: Fraction(1)}, self.algebra), target),
                _Rendered(right.act({w: Fraction(1)}, self.algebra), target),
            ))
        return out


@dataclass
class IdentityReport:
    name: str
    algebra: str
    sector: str
    max_length: int
    checked: int = 0
    overflowed: int = 0
    failed: int = 0
    window: Dict[int, Dict[str, object]] = field(default_factory=dict)
    counterexample: Optional[Dict[str, str]] = None
    skipped: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def status(self) -> str:
        if self.skipped is not None:
            return "skipped"
        if self.failed:
            return "fail"
        # every word overflowed, or the window was empty
        if self.checked == 0:
            return "inconclusive"
        return "pass"

    @property
    def certified_window(self) -> List[int]:
        return sorted(n for n, info in self.window.items() if info["checked"] > 0 and info["overflowed"] == 0)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "algebra": self.algebra,
            "sector": self.sector,
            "max_length": self.max_length,
            "status": self.status,
            "checked": self.checked,
            "overflowed": self.overflowed,
            "certified_window": self.certified_window,
            "window": {str(n): info for n, info in sorted(self.window.items())},
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.skipped is not None:
            out["skipped"] = self.skipped
        return out

    def __repr__(self):
        return f"[IdentityReport {self.name} on {self.algebra}: {self.status}, checked: {self.checked}]"


def _run_chunk(args):
    check, words = args
    return [(w, *check(w)) for w in words]


def run_word_checks(
    check: WordCheck,
    algebra: SuperAlgebra,
    sector: Sector,
    max_length: int,
    name: str = "identity",
    lengths: Optional[Sequence[int]] = None,
    budget: Optional[int] = DEFAULT_WORD_BUDGET,
    seed: int = DEFAULT_SAMPLE_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> IdentityReport:
    """
    Run a WordCheck over the basis word window and assemble a report.

    Args:
        lengths: restrict to these tail lengths (intersected with 0..max_length)
        jobs: worker processes; results are sorted by word either way
    """
    wanted = range(max_length + 1) if lengths is None else [n for n in lengths if 0 <= n <= max_length]
    window = word_window(algebra, wanted, sector, budget, seed)
    words = window.all_words()
    report = IdentityReport(name, algebra.name, Sector(sector).value, max_length)
    for n in window.words:
        report.window[n] = {
            "available": window.available[n],
            "checked": 0,
            "overflowed": 0,
            "sampled": window.sampled[n],
        }
    chunks = [words[i:i + DEFAULT_CHUNK_SIZE] for i in range(0, len(words), DEFAULT_CHUNK_SIZE)]
    results = []
    try:
        if jobs > 1 and len(chunks) > 1:
            with mp.Pool(jobs) as pool:
                res = pool.imap(_run_chunk, [(check, chunk) for chunk in chunks])
                for part in tqdm(res, total=len(chunks), desc=name, disable=not progress):
                    results.extend(part)
        else:
            for chunk in tqdm(chunks, desc=name, disable=not progress):
                results.extend(_run_chunk((check, chunk)))
    except (NonUnital, NotZGraded) as e:
        report.skipped = str(e)
        return report

    for w, status, detail in sorted(results, key=lambda r: (len(r[0]), r[0])):
        n = len(w) - 1
        if status == OVERFLOW:
            report.overflowed += 1
            report.window[n]["overflowed"] += 1
            continue
        report.checked += 1
        report.window[n]["checked"] += 1
        if status == FAIL:
            report.failed += 1
            if report.counterexample is None:
                report.counterexample = detail
    if report.overflowed:
        logger.debug("%s: %d words overflowed on %s" % (name, report.overflowed, algebra.name))
    return report


def check_identity(
    lhs,
    rhs,
    algebra: SuperAlgebra,
    sector: Sector = Sector.CE,
    max_length: int = 4,
    name: str = "identity",
    lengths: Optional[Sequence[int]] = None,
    budget: Optional[int] = DEFAULT_WORD_BUDGET,
    seed: int = DEFAULT_SAMPLE_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> IdentityReport:
    """Check lhs == rhs exactly; chain operators and u-operators are both accepted."""
    check = OperatorCheck(lhs, rhs, algebra)
    return run_word_checks(check, algebra, sector, max_length, name, lengths, budget, seed, jobs, progress)


@dataclass
class IdentityCase:
    name: str
    lhs: object
    rhs: object
    sector: Sector = Sector.CE
    lengths: Optional[Sequence[int]] = None


@dataclass
class SuiteReport:
    suite: str
    algebra: str
    max_length: int
    entries: List[IdentityReport] = field(default_factory=list)
    skipped: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(e.status in ("pass", "skipped") for e in self.entries)

    @property
    def status(self) -> str:
        if self.skipped is not None:
            return "skipped"
        return "pass" if self.passed else "fail"

    def failures(self) -> List[IdentityReport]:
        return [e for e in self.entries if e.status in ("fail", "inconclusive")]

    def to_json(self) -> dict:
        out = {
            "suite": self.suite,
            "algebra": self.algebra,
            "max_length": self.max_length,
            "status": self.status,
            "identities": len(self.entries),
            "failed": [e.to_json() for e in self.failures()],
            "checked_words": sum(e.checked for e in self.entries),
            "overflowed_words": sum(e.overflowed for e in self.entries),
            "sampled": any(info["sampled"] for e in self.entries for info in e.window.values()),
        }
        if self.skipped is not None:
            out["skipped"] = self.skipped
        return out

    def __repr__(self):
        return f"[SuiteReport {self.suite} on {self.algebra}: {self.status}, identities: {len(self.entries)}]"


def run_cases(
    suite: str,
    cases: Sequence[IdentityCase],
    algebra: SuperAlgebra,
    max_length: int,
    budget: Optional[int] = DEFAULT_WORD_BUDGET,
    seed: int = DEFAULT_SAMPLE_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> SuiteReport:
    report = SuiteReport(suite, algebra.name, max_length)
    for case in tqdm(cases, desc=suite, disable=not progress):
        entry = check_identity(
            case.lhs, case.rhs, algebra, case.sector, max_length, case.name,
            case.lengths, budget, seed, jobs,
        )
        if entry.status == "fail":
            logger.info("%s: %s fails at %s" % (suite, case.name, entry.counterexample["word"]))
        report.entries.append(entry)
    return report
