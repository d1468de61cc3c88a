"""
Check - Kör ett scenario med matrisorakel och formelkriterier.
"""

import argparse
from typing import Optional, Tuple

from ..core.criteria import CPSI_PROPERTIES, crit_cpsi, evaluate_criterion
from ..core.exceptions import (
    InvalidWeightError,
    NotInAdjointAlgebraError,
    NotPositiveError,
    SemiHilbertError,
)
from ..core.logger import get_logger, log_error_with_context
from ..core.measure_space import support
from ..core.operators import composition_operator, multiplication_operator
from ..core.report import CheckRecord, Report
from ..core.scenario import VALID_MODES, Scenario
from ..core.semi_hilbert import SemiInnerProduct, oracle_is, require_nonnegative_weight
from ..core.settings import EXIT_DISAGREEMENT, EXIT_OK

logger = get_logger()


def _matrix_setup(scenario: Scenario) -> Tuple[Optional[SemiInnerProduct], Optional[SemiHilbertError]]:
    """A = C_ψ om ψ finns, annars A = M_u."""
    try:
        psi = scenario.psi_map()
        if psi is not None:
            return SemiInnerProduct(composition_operator(psi)), None
        u = scenario.weight()
        require_nonnegative_weight(u)
        return SemiInnerProduct(multiplication_operator(u)), None
    except (NotPositiveError, InvalidWeightError) as e:
        log_error_with_context(
            logger, None,
            {"phi": scenario.phi, "psi": scenario.psi},
            f"A är inte positiv: {e.message}"
        )
        return None, e


def evaluate_scenario(
    scenario: Scenario,
    mode: Optional[str] = None,
    tol: Optional[float] = None
) -> Report:
    """
    Kör scenariots egenskaper i valt läge.

    Fel per egenskap (icke-positiv A, T ∉ B_A(H), ogiltig u) registreras i
    posten och avbryter inte övriga kontroller.
    """
    mode = mode or scenario.mode
    tol = tol if tol is not None else scenario.tol
    phi = scenario.phi_map()
    psi = scenario.psi_map()
    u = scenario.weight()
    t = composition_operator(phi)

    report = Report(
        "check",
        metadata={"tolerance": tol, "mode": mode, "relative_to": "C_psi" if psi is not None else "M_u"},
    )

    semi, semi_error = (None, None)
    if mode in ("matrix", "both"):
        semi, semi_error = _matrix_setup(scenario)

    for prop in scenario.checks:
        record = CheckRecord(property=prop)
        errors = []

        if mode in ("matrix", "both"):
            if semi_error is not None:
                errors.append(semi_error.user_message)
            else:
                try:
                    verdict = oracle_is(prop, semi, t, tol)
                    record.matrix_verdict = verdict.verdict
                    record.matrix_residual = verdict.residual
                    record.witness = verdict.witness
                    record.details["matrix"] = verdict.to_dict()
                except NotInAdjointAlgebraError as e:
                    log_error_with_context(logger, None, {"property": prop}, e.message)
                    errors.append(e.user_message)

        if mode in ("formula", "both"):
            if prop == "hyponormal":
                record.details["formula"] = {"note": "inget formelkriterium för A-hyponormalitet"}
            elif psi is not None and prop not in CPSI_PROPERTIES:
                record.details["formula"] = {"note": f"inget C_ψ-kriterium för {prop}"}
            else:
                try:
                    if psi is not None:
                        cv = crit_cpsi(prop, psi, phi, tol)
                    else:
                        cv = evaluate_criterion(prop, u, phi, tol)
                    record.formula_verdict = cv.verdict
                    record.formula_residual = cv.residual
                    if cv.witness_atom is not None:
                        record.witness = (record.witness + "; " if record.witness else "") + f"atom {cv.witness_atom}"
                    record.components = {name: f.to_pairs() for name, f in sorted(cv.components.items())}
                    record.details["formula"] = {"details": cv.details, "notes": cv.notes}
                    for note in cv.notes:
                        report.add_finding("note", note, property=prop, phi=scenario.phi)
                except (NotPositiveError, InvalidWeightError) as e:
                    log_error_with_context(logger, None, {"property": prop, "psi": scenario.psi}, e.message)
                    errors.append(e.user_message)

        if record.matrix_verdict is not None and record.formula_verdict is not None:
            record.agree = record.matrix_verdict == record.formula_verdict
        if errors:
            record.error = " | ".join(dict.fromkeys(errors))
        # Posterna normaliseras till JSON-typer vid konstruktion
        report.checks.append(CheckRecord.from_dict(record.to_dict()))

    disagreements = report.disagreements
    if disagreements and not support(u) == frozenset(range(u.space.n)):
        report.add_finding(
            "degenerate_u",
            "Oenighet med en vikt u som har nollor; satsernas hypotes kräver u > 0.",
            properties=[c.property for c in disagreements],
        )
    report.summary = {
        "checks": len(report.checks),
        "disagreements": len(disagreements),
        "errors": sum(1 for c in report.checks if c.error),
    }
    return report


def run_check(
    path: str,
    mode: Optional[str] = None,
    tol: Optional[float] = None
) -> Tuple[Report, int]:
    """Läser scenariofilen och kör den; exitkod 2 vid oenighet."""
    scenario = Scenario.load(path)
    logger.info(f"Kör scenario {path}: {', '.join(scenario.checks)}")
    report = evaluate_scenario(scenario, mode, tol)
    code = EXIT_DISAGREEMENT if report.disagreements else EXIT_OK
    if report.disagreements:
        logger.warning(f"{len(report.disagreements)} oenigheter i {path}")
    return report, code


def add_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("check", help="kör en scenariofil")
    parser.add_argument("file", help="scenario i JSON")
    parser.add_argument("--out", help="skriv rapporten hit i stället för stdout")
    parser.add_argument("--mode", choices=VALID_MODES, help="matrix, formula eller both")
    parser.add_argument("--tol", type=float, help="verdikttolerans (ersätter scenariots tol)")
    parser.add_argument("--findings-out", help="skriv fynd till en separat fil")
    parser.set_defaults(func=execute)
    return parser


def execute(args: argparse.Namespace) -> Tuple[Report, int]:
    return run_check(args.file, args.mode, args.tol)
