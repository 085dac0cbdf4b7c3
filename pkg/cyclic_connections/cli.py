#!/usr/bin/env python3
"""
Command line for the cyclic connection checker.

Subcommands:
    verify    run identity and certificate suites on an algebra
    mf        the matrix factorization pipeline for a polynomial w
    spectrum  connection matrix and spectrum of the twisted de Rham side
    hp        experimental u-totalized cohomology ranks per truncation

Usage:
    python -m cyclic_connections.cli verify --suite all --algebra lambda --max-length 4
    python -m cyclic_connections.cli verify --suite cert-C4 --algebra aw:x^2
    python -m cyclic_connections.cli mf --poly "x^3" --vars x --decomp "x: x^2"
    python -m cyclic_connections.cli spectrum --poly "x^3" --vars x --format json
    python -m cyclic_connections.cli hp --algebra lambda --max-length 3

Exit codes: 0 all suites pass, 1 some suite fails, 2 input error.
"""

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import List, Optional

from cyclic_connections.algebra.polynomials import (
    BadDecomposition,
    PolynomialParseError,
    parse_decomposition,
    parse_poly,
    poly_str,
)
from cyclic_connections.algebra.scalars import fraction_str
from cyclic_connections.algebra.superalg import (
    InvalidAlgebra,
    NonUnital,
    NotZGraded,
    SuperAlgebra,
    build_algebra,
    dual_numbers,
    end_odd_variables,
    exterior_algebra,
)
from cyclic_connections.chains.identities import SuiteReport
from cyclic_connections.chains.suites import SUITES as IDENTITY_SUITES
from cyclic_connections.chains.suites import run_suite
from cyclic_connections.connections.certificates import SUITES as CERTIFICATE_SUITES
from cyclic_connections.homology.cohomology import derham_cohomology, hp_table
from cyclic_connections.homology.reduction import NonTermination, connection_matrix
from cyclic_connections.homology.series_matrix import PrecisionExhausted
from cyclic_connections.homology.spectrum import (
    IrrationalEigenvalues,
    NotRegularSingular,
    ResonantResidue,
    psi_filtration,
    residue_spectrum,
)
from cyclic_connections.mf.aw import MFAlgebra, NotCritical, NotIsolatedOrTruncationTooLow, build_Aw
from cyclic_connections.mf.pipeline import MF_SUITES, run_mf_suites, surjectivity_check
from cyclic_connections.utils.constants import (
    BUILTIN_ALGEBRAS,
    DEFAULT_MAX_LENGTH,
    DEFAULT_SAMPLE_SEED,
    DEFAULT_U_PRECISION,
    DEFAULT_WORD_BUDGET,
    EXIT_FAILURE,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    JOBS_ENV_VAR,
    TOOL_VERSION,
)
from cyclic_connections.utils.io import dumps_report, read_json, write_report

logger = logging.getLogger(__name__)

INPUT_ERRORS = (
    PolynomialParseError,
    BadDecomposition,
    InvalidAlgebra,
    NonUnital,
    NotZGraded,
    NotCritical,
    NotIsolatedOrTruncationTooLow,
    NonTermination,
    NotRegularSingular,
    IrrationalEigenvalues,
    ResonantResidue,
    PrecisionExhausted,
    FileNotFoundError,
    json.JSONDecodeError,
)


class ConfigError(ValueError):
    pass


# ==================================================
# Configuration
# ==================================================


@dataclass
class RunConfig:
    command: str
    algebra: Optional[str] = None
    poly: Optional[str] = None
    vars: Optional[List[str]] = None
    decomp: Optional[str] = None
    suites: List[str] = field(default_factory=lambda: ["all"])
    max_length: int = DEFAULT_MAX_LENGTH
    max_degree: Optional[int] = None
    u_precision: int = DEFAULT_U_PRECISION
    budget: Optional[int] = DEFAULT_WORD_BUDGET
    seed: int = DEFAULT_SAMPLE_SEED
    jobs: int = 1
    format: str = "text"
    out: Optional[str] = None
    progress: bool = False

    def __post_init__(self):
        if self.max_length < 1:
            raise ConfigError(f"--max-length must be >= 1, got {self.max_length}")
        if self.u_precision < 2:
            raise ConfigError(f"--u-precision must be >= 2, got {self.u_precision}")
        if self.budget is not None and self.budget < 1:
            raise ConfigError(f"--sample-budget must be >= 1, got {self.budget}")
        if self.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {self.jobs}")
        if self.format not in ("json", "text"):
            raise ConfigError(f"--format must be json or text, got {self.format}")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command,
            algebra=getattr(args, "algebra", None),
            poly=getattr(args, "poly", None),
            vars=[v.strip() for v in args.vars.split(",") if v.strip()] if getattr(args, "vars", None) else None,
            decomp=getattr(args, "decomp", None),
            suites=[s.strip() for s in getattr(args, "suite", "all").split(",") if s.strip()],
            max_length=args.max_length,
            max_degree=getattr(args, "max_degree", None),
            u_precision=getattr(args, "u_precision", DEFAULT_U_PRECISION),
            budget=args.budget,
            seed=args.seed,
            jobs=args.jobs,
            format=args.format,
            out=args.out,
            progress=args.progress,
        )

    def echo(self) -> dict:
        return asdict(self)


def _default_jobs() -> int:
    value = os.environ.get(JOBS_ENV_VAR)
    if not value:
        return 1
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{JOBS_ENV_VAR}={value!r} is not an integer")


def _infer_vars(text: str) -> List[str]:
    return sorted(set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text)))


def load_polynomial(cfg: RunConfig, text: Optional[str] = None):
    text = text if text is not None else cfg.poly
    if not text:
        raise ConfigError("a polynomial is required (--poly or --algebra aw:<poly>)")
    variables = cfg.vars or _infer_vars(text)
    return parse_poly(text, variables)


def load_mf(cfg: RunConfig, text: Optional[str] = None) -> MFAlgebra:
    w = load_polynomial(cfg, text)
    dec = parse_decomposition(cfg.decomp, [str(g) for g in w.gens], w) if cfg.decomp else None
    return build_Aw(w, dec, cfg.max_degree)


def load_algebra(cfg: RunConfig):
    """Returns (algebra, MFAlgebra or None)."""
    name = cfg.algebra or "lambda"
    if name == "lambda":
        return exterior_algebra(), None
    if name == "lambda-graded":
        return exterior_algebra(graded=True), None
    if name == "dual":
        return dual_numbers(), None
    if name == "mat2":
        return end_odd_variables(1), None
    if name.startswith("aw:"):
        mfa = load_mf(cfg, name[3:])
        return mfa.algebra, mfa
    if os.path.exists(name):
        return build_algebra(read_json(name)), None
    raise ConfigError(f"Unknown algebra {name!r}; use one of {BUILTIN_ALGEBRAS} or a JSON description file")


# ==================================================
# Suites
# ==================================================


def _select_suites(cfg: RunConfig, mfa: Optional[MFAlgebra]) -> List[str]:
    known = list(IDENTITY_SUITES) + list(CERTIFICATE_SUITES) + (list(MF_SUITES) if mfa is not None else [])
    if cfg.suites == ["all"]:
        return known
    unknown = [s for s in cfg.suites if s not in known]
    if unknown:
        raise ConfigError(f"Unknown suite(s) {unknown}; choose from {known}")
    return cfg.suites


def run_selected(cfg: RunConfig, alg: SuperAlgebra, mfa: Optional[MFAlgebra], names: List[str]) -> List[SuiteReport]:
    reports = []
    for name in names:
        if name in IDENTITY_SUITES:
            report = run_suite(name, alg, cfg.max_length, cfg.budget, cfg.seed, cfg.jobs, cfg.progress)
        elif name in CERTIFICATE_SUITES:
            report = CERTIFICATE_SUITES[name](alg, cfg.max_length, cfg.budget, cfg.seed, cfg.jobs, cfg.progress)
        else:
            report = run_mf_suites(mfa, cfg.max_length, [name], cfg.budget, cfg.seed, cfg.jobs, cfg.progress)[0]
        if cfg.format == "text":
            print(f"{name:<16} {report.status}")
        reports.append(report)
    return reports


def _entries_status(reports: List[SuiteReport]) -> str:
    return "pass" if all(r.status != "fail" for r in reports) else "fail"


# ==================================================
# Commands
# ==================================================


def cmd_verify(cfg: RunConfig) -> dict:
    alg, mfa = load_algebra(cfg)
    names = _select_suites(cfg, mfa)
    reports = run_selected(cfg, alg, mfa, names)
    return {
        "command": "verify",
        "algebra": alg.name,
        "suites": [r.to_json() for r in reports],
        "status": _entries_status(reports),
    }


def _spectrum_payload(w, cfg: RunConfig) -> dict:
    report = residue_spectrum(w, cfg.u_precision)
    payload = report.to_json()
    payload["psi"] = psi_filtration(report).to_json()
    payload["connection_matrix_classical"] = connection_matrix(w, "classical").to_json()
    return payload


def cmd_mf(cfg: RunConfig) -> dict:
    mfa = load_mf(cfg)
    names = list(MF_SUITES) if cfg.suites == ["all"] else cfg.suites
    unknown = [s for s in names if s not in MF_SUITES]
    if unknown:
        raise ConfigError(f"Unknown mf suite(s) {unknown}; choose from {list(MF_SUITES)}")
    reports = []
    for name in names:
        report = run_mf_suites(mfa, cfg.max_length, [name], cfg.budget, cfg.seed, cfg.jobs, cfg.progress)[0]
        if cfg.format == "text":
            print(f"{name:<16} {report.status}")
        reports.append(report)
    derham = derham_cohomology(mfa.w)
    top = derham.free.get(mfa.k, 0)
    rank_ok = top == mfa.validation.milnor and derham.free_rank == top
    surjectivity = surjectivity_check(mfa)
    status = _entries_status(reports)
    if not rank_ok:
        status = "fail"
    return {
        "command": "mf",
        "w": poly_str(mfa.w),
        "validation": mfa.validation.to_json(),
        "suites": [r.to_json() for r in reports],
        "derham": derham.to_json(),
        "derham_rank_matches_milnor": rank_ok,
        "spectrum": _spectrum_payload(mfa.w, cfg),
        "surjectivity": surjectivity.to_json(),
        "status": status,
    }


def cmd_spectrum(cfg: RunConfig) -> dict:
    w = load_polynomial(cfg)
    return {"command": "spectrum", "w": poly_str(w), **_spectrum_payload(w, cfg), "status": "pass"}


def cmd_hp(cfg: RunConfig) -> dict:
    alg, _ = load_algebra(cfg)
    return {"command": "hp", "algebra": alg.name, "table": hp_table(alg, cfg.max_length, cfg.progress),
            "status": "pass"}


COMMANDS = {"verify": cmd_verify, "mf": cmd_mf, "spectrum": cmd_spectrum, "hp": cmd_hp}


# ==================================================
# Rendering
# ==================================================


def _values(values) -> str:
    return ", ".join(fraction_str(v) for v in values)


def render_text(report: dict) -> str:
    lines = ["=" * 60, f"{report['command']} ({TOOL_VERSION})", "=" * 60]
    for suite in report.get("suites", []):
        lines.append(f"{suite['suite']:<16} {suite['status']:<8} identities: {suite['identities']}, "
                     f"words: {suite['checked_words']}")
        for failed in suite["failed"]:
            ce = failed.get("counterexample") or {}
            lines.append(f"    FAIL {failed['name']} at {ce.get('word')}")
    if "derham" in report:
        lines.append(f"de Rham free ranks: {report['derham']['free']}, "
                     f"matches Milnor: {report['derham_rank_matches_milnor']}")
    spectrum = report.get("spectrum", report if report["command"] == "spectrum" else None)
    if spectrum:
        lines.append(f"Milnor number: {spectrum['milnor']}")
        residues = [fraction_str(v) + (f" (x{m})" if m > 1 else "") for v, m in spectrum["residues"]]
        lines.append(f"Residues: {', '.join(residues)}")
        lines.append(f"Spectrum (shifted): {_values(spectrum['spectrum_shifted'])}")
        lines.append(f"Spectrum (classical): {_values(spectrum['spectrum_classical'])}")
    for row in report.get("table", []):
        lines.append(str(row))
    lines.append("=" * 60)
    lines.append(f"Status: {report['status']}")
    lines.append("=" * 60)
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Exact checks for cyclic homology connections.")
    parser.add_argument("--version", action="version", version=TOOL_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH,
                        help=f"Maximal tail length of basis words (default: {DEFAULT_MAX_LENGTH})")
    common.add_argument("--sample-budget", dest="budget", type=int, default=DEFAULT_WORD_BUDGET,
                        help="Check a seeded sample of this many words per tail length (default: every word)")
    common.add_argument("--seed", type=int, default=DEFAULT_SAMPLE_SEED)
    common.add_argument("--jobs", type=int, default=None, help=f"Worker processes (default: ${JOBS_ENV_VAR} or 1)")
    common.add_argument("--format", choices=["json", "text"], default="text")
    common.add_argument("--out", default=None, help="Write the JSON report to this file")
    common.add_argument("--progress", action="store_true", help="Show progress bars")
    common.add_argument("--log-level", default="WARNING")

    poly = argparse.ArgumentParser(add_help=False)
    poly.add_argument("--poly", default=None, help="Polynomial w, e.g. \"x^3+y^2\"")
    poly.add_argument("--vars", default=None, help="Comma separated variables (default: sorted names in w)")
    poly.add_argument("--decomp", default=None, help="Decomposition w = sum y_i w_i, e.g. \"x: x^2\"")
    poly.add_argument("--max-degree", type=int, default=None, help="Polynomial truncation degree")
    poly.add_argument("--u-precision", type=int, default=DEFAULT_U_PRECISION)

    verify = sub.add_parser("verify", parents=[common, poly], help="Run identity and certificate suites")
    verify.add_argument("--algebra", default="lambda", help=f"One of {BUILTIN_ALGEBRAS} or a JSON file")
    verify.add_argument("--suite", default="all", help="Comma separated suite ids or 'all'")

    mf = sub.add_parser("mf", parents=[common, poly], help="Matrix factorization pipeline")
    mf.add_argument("--suite", default="all", help="Comma separated mf suite ids or 'all'")

    sub.add_parser("spectrum", parents=[common, poly], help="Spectrum of the twisted de Rham connection")

    hp = sub.add_parser("hp", parents=[common, poly], help="Experimental cohomology ranks per truncation")
    hp.add_argument("--algebra", default="lambda")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        if args.jobs is None:
            args.jobs = _default_jobs()
        cfg = RunConfig.from_args(args)
        report = COMMANDS[cfg.command](cfg)
    except (ConfigError,) + INPUT_ERRORS as e:
        print(f"ERROR: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    report["tool_version"] = TOOL_VERSION
    report["config"] = cfg.echo()
    if cfg.out:
        write_report(report, cfg.out)
        print(f"Report written to {cfg.out}", file=sys.stderr)
    if cfg.format == "json":
        print(dumps_report(report))
    else:
        print(render_text(report))
    return EXIT_OK if report["status"] == "pass" else EXIT_FAILURE


if __name__ == "__main__":
    exit(main())
