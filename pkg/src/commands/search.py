"""
Search - Uttömmande klassificering av alla n^n avbildningar.

Varje avbildning klassas både med matrisoraklet (A = M_u) och med
formelkriteriet. Arbetet delas i block av avbildningsindex som kan köras i
en processpool; raderna sätts ihop i indexordning så att katalogen blir
densamma oavsett antal processer.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..core.cache import get_cache
from ..core.criteria import CRITERION_PROPERTIES, evaluate_criterion
from ..core.exceptions import NotInAdjointAlgebraError, ScenarioError, SearchLimitError
from ..core.logger import get_logger, log_function_call
from ..core.measure_space import FiniteMeasureSpace, MeasurableFunction, support
from ..core.operators import composition_operator
from ..core.report import CheckRecord, Report, finite_or_none
from ..core.sampling import map_from_index
from ..core.scenario import normalize_check, parse_measure_spec, parse_weight_spec
from ..core.semi_hilbert import SemiInnerProduct, oracle_is, require_nonnegative_weight
from ..core.settings import EXIT_DISAGREEMENT, EXIT_OK, MAX_SEARCH_ATOMS, SWEEP_TOL

logger = get_logger()

REPRESENTATIVES = 10
CHUNK_SIZE = 512


def _classify_chunk(args: Tuple[List[float], List[complex], str, float, int, int]) -> List[Dict[str, Any]]:
    """
    Klassar avbildningarna start ≤ index < stop.

    Ligger på modulnivå så att processpoolen kan pickla den.
    """
    weights, u_values, prop, tol, start, stop = args
    space = FiniteMeasureSpace(np.array(weights, dtype=float))
    u = MeasurableFunction(space, np.array(u_values, dtype=complex))
    semi = SemiInnerProduct.from_weight(u)

    rows = []
    for index in range(start, stop):
        phi = map_from_index(space, index)
        row: Dict[str, Any] = {"index": index, "phi": list(phi.as_tuple())}
        try:
            verdict = oracle_is(prop, semi, composition_operator(phi), tol)
            row["matrix"] = verdict.verdict
            row["matrix_residual"] = verdict.residual
            if prop == "unitary":
                row["variant"] = verdict.details.get("variant_verdict")
        except NotInAdjointAlgebraError:
            row["matrix"] = None
            row["matrix_residual"] = None
            row["error"] = "T ∉ B_A(H)"
        formula = evaluate_criterion(prop, u, phi, tol)
        row["formula"] = formula.verdict
        row["formula_residual"] = finite_or_none(formula.residual)
        row["formula_unbounded"] = row["formula_residual"] is None
        rows.append(row)
    return rows


def _chunks(total: int, size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def build_catalog(
    space: FiniteMeasureSpace,
    u: MeasurableFunction,
    prop: str,
    tol: float = SWEEP_TOL,
    workers: int = 1
) -> List[Dict[str, Any]]:
    """Alla rader i avbildningsordning."""
    total = space.n ** space.n
    jobs = [
        (space.weights.tolist(), u.values.tolist(), prop, tol, start, stop)
        for start, stop in _chunks(total, CHUNK_SIZE)
    ]
    if workers > 1 and len(jobs) > 1:
        logger.info(f"Klassar {total} avbildningar med {workers} processer")
        with ProcessPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(_classify_chunk, jobs))
    else:
        logger.info(f"Klassar {total} avbildningar")
        parts = [_classify_chunk(job) for job in jobs]
    return [row for part in parts for row in part]


def _classified_true(row: Dict[str, Any]) -> bool:
    """Formelverdiktet, eller matrisverdiktet om formeln saknas."""
    if row.get("formula") is not None:
        return bool(row["formula"])
    return bool(row.get("matrix"))


def export_csv(rows: List[Dict[str, Any]], path: str) -> None:
    """Skriver klassificeringstabellen med en rad per avbildning."""
    df = pd.DataFrame(rows)
    df["phi"] = df["phi"].apply(lambda t: " ".join(str(x) for x in t))
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out, index=False, encoding="utf-8")
    logger.info(f"Exporterade {len(df)} rader till {out}")


def run_search(
    n: int,
    prop: str,
    u_spec: str = "ones",
    mu_spec: str = "uniform",
    workers: int = 1,
    cache_dir: Optional[str] = None,
    csv: Optional[str] = None,
    tol: float = SWEEP_TOL
) -> Tuple[Report, int]:
    """
    Klassar alla n^n avbildningar för egenskapen prop.

    Raises:
        SearchLimitError: om n > MAX_SEARCH_ATOMS
        ScenarioError: ogiltig egenskap, vikt eller mått
    """
    log_function_call(logger, "run_search", (n, prop), {"u": u_spec, "mu": mu_spec, "workers": workers})
    if n > MAX_SEARCH_ATOMS:
        raise SearchLimitError(n, MAX_SEARCH_ATOMS)
    if n < 1:
        raise ScenarioError("n måste vara minst 1", field="n")
    prop = normalize_check(prop)
    if prop not in CRITERION_PROPERTIES:
        raise ScenarioError(
            f"inget formelkriterium för {prop} (giltiga: {', '.join(CRITERION_PROPERTIES)})",
            field="property"
        )
    space = parse_measure_spec(mu_spec, n)
    u = parse_weight_spec(u_spec, space)
    require_nonnegative_weight(u)

    params = {
        "n": n,
        "property": prop,
        "weights": space.weights.tolist(),
        "u": [[float(z.real), float(z.imag)] for z in u.values],
        "tol": tol,
    }
    cache = get_cache(cache_dir) if cache_dir else None
    cached = cache.get_catalog(params) if cache else None
    if cached is not None:
        logger.info("Katalogen hämtad från cache")
        rows = cached["rows"]
    else:
        rows = build_catalog(space, u, prop, tol, workers)
        if cache:
            cache.cache_catalog(params, {"params": params, "rows": rows})

    if csv:
        export_csv(rows, csv)

    positive_u = len(support(u)) == n
    report = Report(
        "search",
        metadata={"n": n, "property": prop, "u": u_spec, "mu": mu_spec, "tolerance": tol},
    )

    members = [row for row in rows if _classified_true(row)]
    disagreements = [
        row for row in rows
        if row.get("matrix") is not None and row["matrix"] != row["formula"]
    ]
    for row in disagreements:
        if positive_u:
            report.checks.append(CheckRecord(
                property=prop,
                matrix_verdict=row["matrix"],
                formula_verdict=row["formula"],
                matrix_residual=row["matrix_residual"],
                formula_residual=float("inf") if row.get("formula_unbounded") else row["formula_residual"],
                witness=f"phi={row['phi']}",
                agree=False,
            ))
        else:
            report.add_finding(
                "degenerate_u",
                "Oenighet mellan matris och formel för en vikt u med nollor.",
                phi=row["phi"],
                matrix_verdict=row["matrix"],
                formula_verdict=row["formula"],
            )

    if prop == "unitary":
        for row in rows:
            variant = row.get("variant")
            if variant is not None and variant != row["matrix"]:
                report.add_finding(
                    "unitary_convention",
                    "Konventionerna för A-unitär (TAT* = A mot T♯ A-isometri) skiljer sig.",
                    phi=row["phi"],
                    primary=row["matrix"],
                    variant=variant,
                )

    errors = sum(1 for row in rows if row.get("error"))
    report.summary = {
        "total_maps": len(rows),
        "classified_true": len(members),
        "matrix_true": sum(1 for row in rows if row.get("matrix")),
        "formula_true": sum(1 for row in rows if row.get("formula")),
        "members": [row["index"] for row in members],
        "representatives": [row["phi"] for row in members[:REPRESENTATIVES]],
        "disagreements": len(disagreements),
        "not_in_adjoint_algebra": errors,
    }
    logger.info(
        f"Sökning klar: {len(members)} av {len(rows)} avbildningar är {prop}, "
        f"{len(disagreements)} oenigheter"
    )
    code = EXIT_DISAGREEMENT if report.disagreements else EXIT_OK
    return report, code


def add_parser(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("search", help="klassa alla n^n avbildningar")
    parser.add_argument("--n", type=int, required=True, help=f"antal atomer (max {MAX_SEARCH_ATOMS})")
    parser.add_argument("--property", required=True, help="egenskap, t.ex. unitary")
    parser.add_argument("--u", default="ones", help="vikt: ones, exp, const:2 eller 1,2,3")
    parser.add_argument("--mu", default="uniform", help="mått: uniform eller 0.2,0.3,0.5")
    parser.add_argument("--tol", type=float, default=SWEEP_TOL, help="verdikttolerans")
    parser.add_argument("--out", help="skriv rapporten hit i stället för stdout")
    parser.add_argument("--findings-out", help="skriv fynd till en separat fil")
    parser.add_argument("--csv", help="exportera klassificeringstabellen som CSV")
    parser.add_argument("--workers", type=int, default=1, help="antal processer")
    parser.add_argument("--cache-dir", help="katalog för cachade kataloger")
    parser.set_defaults(func=execute)
    return parser


def execute(args: argparse.Namespace) -> Tuple[Report, int]:
    return run_search(
        args.n,
        args.property,
        args.u,
        args.mu,
        workers=args.workers,
        cache_dir=args.cache_dir,
        csv=args.csv,
        tol=args.tol,
    )
