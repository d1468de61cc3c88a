"""
Douglas - Slumpade demonstrationer av Douglas sats och den reducerade lösningen.
"""

import argparse
from typing import Any, Dict, List, Tuple

import numpy as np

from ..core.exceptions import ScenarioError
from ..core.logger import get_logger
from ..core.operators import OperatorMatrix, moore_penrose, nullspace
from ..core.report import CheckRecord, Report
from ..core.sampling import random_operator, random_positive_operator, random_space
from ..core.semi_hilbert import (
    douglas_check,
    douglas_reduced_solution,
    douglas_uniqueness_probe,
)
from ..core.settings import DEFAULT_TOL, EXIT_DISAGREEMENT, EXIT_OK

logger = get_logger()

MIN_ATOMS = 3
MAX_ATOMS = 8
MATCH_TOL = 1e-9


def construct_pair(rng: np.random.Generator, inclusion: bool) -> Tuple[OperatorMatrix, OperatorMatrix]:
    """
    Positiv A med rang < n och B med känt utfall.

    Med inclusion är B = AC; annars ersätts en kolumn i AC med en vektor
    ur N(A), som inte ligger i R(A).
    """
    n = int(rng.integers(MIN_ATOMS, MAX_ATOMS + 1))
    space = random_space(rng, n)
    rank = int(rng.integers(1, n))
    a = random_positive_operator(rng, space, rank)
    b = a @ random_operator(rng, space)
    if not inclusion:
        kernel = nullspace(a, DEFAULT_TOL).orthonormal()
        entries = b.entries.copy()
        column = int(rng.integers(0, n))
        entries[:, column] = kernel.basis[:, 0]
        b = OperatorMatrix(space, entries)
    return a, b


def run_trial(rng: np.random.Generator, inclusion: bool) -> Dict[str, Any]:
    """Kör en instans; returnerar utfall och eventuella överträdelser."""
    a, b = construct_pair(rng, inclusion)
    report = douglas_check(a, b, DEFAULT_TOL)
    violations: List[str] = []
    if not report.consistent:
        violations.append("de tre villkoren är oense")
    if report.range_inclusion != inclusion:
        violations.append(f"R(B) ⊆ R(A) gav {report.range_inclusion}, väntat {inclusion}")

    result: Dict[str, Any] = {"n": a.n, "rank_a": report.rank_a, "douglas": report.to_dict()}
    if inclusion and report.range_inclusion:
        reduced = douglas_reduced_solution(a, b, DEFAULT_TOL)
        if not reduced.ok:
            violations.append(f"reducerad lösning: {reduced.to_dict()}")
        reference = moore_penrose(a, DEFAULT_TOL) @ b
        gap = (reduced.solution - reference).flat_norm() / max(1.0, reference.flat_norm())
        if gap > MATCH_TOL:
            violations.append(f"W avviker från A†B med {gap:.3e}")
        if not douglas_uniqueness_probe(a, b, reduced.solution, rng, DEFAULT_TOL):
            violations.append("störd lösning uppfyller fortfarande R(W) ⊆ R(A*)")
        result.update(equation_residual=reduced.equation_residual, pinv_gap=gap)
    result["violations"] = violations
    return result


def run_douglas(seed: int = 0, trials: int = 100) -> Tuple[Report, int]:
    """
    Varannan instans konstrueras med R(B) ⊆ R(A), varannan utan.

    Raises:
        ScenarioError: om trials < 1
    """
    if trials < 1:
        raise ScenarioError("minst ett försök krävs", field="trials")
    rng = np.random.default_rng(seed)
    report = Report("douglas", metadata={"seed": seed, "trials": trials, "tolerance": DEFAULT_TOL})

    passed = 0
    for trial in range(trials):
        inclusion = trial % 2 == 0
        result = run_trial(rng, inclusion)
        if result["violations"]:
            report.checks.append(CheckRecord(
                property="douglas",
                matrix_verdict=result["douglas"]["range_inclusion"],
                formula_verdict=inclusion,
                witness=f"försök {trial}",
                agree=False,
                details=result,
                error="; ".join(result["violations"]),
            ))
            logger.warning(f"Douglas försök {trial}: {'; '.join(result['violations'])}")
        else:
            passed += 1

    report.summary = {
        "trials": trials,
        "inclusion_true": (trials + 1) // 2,
        "inclusion_false": trials // 2,
        "passed": passed,
        "violations": trials - passed,
    }
    logger.info(f"Douglas: {passed} av {trials} försök utan överträdelser")
    return report, EXIT_DISAGREEMENT if report.disagreements else EXIT_OK


def add_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("douglas", help="slumpade Douglas-instanser")
    parser.add_argument("--seed", type=int, default=0, help="seed för slumpgeneratorn")
    parser.add_argument("--trials", type=int, default=100, help="antal försök")
    parser.add_argument("--out", help="skriv rapporten hit i stället för stdout")
    parser.add_argument("--findings-out", help="skriv fynd till en separat fil")
    parser.set_defaults(func=execute)
    return parser


def execute(args: argparse.Namespace) -> Tuple[Report, int]:
    return run_douglas(args.seed, args.trials)
