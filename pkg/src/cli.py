"""
CLI - Kommandoradsgränssnitt för semihilbert-lab.

Delkommandon: check, search, example, douglas. Exitkoder: 0 ok,
1 indatafel, 2 matematisk oenighet.
"""

import argparse
import sys
import time
from typing import List, Optional

from .commands import check, douglas, example, search
from .core.exceptions import SemiHilbertError
from .core.logger import add_file_handler, get_logger, log_error_with_context, log_performance
from .core.report import write_findings
from .core.settings import EXIT_INPUT_ERROR, TOOL_VERSION

logger = get_logger()

COMMANDS = (check, search, example, douglas)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semihilbert-lab",
        description="Kontrollerar klasser av kompositionsoperatorer relativt en positiv operator A.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    parser.add_argument("--log-file", help="logga även till denna fil")
    parser.add_argument("--timing", action="store_true", help="lägg körtiden i rapportens metadata")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.add_parser(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Kör CLI:t och returnerar exitkoden."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse avslutar med 2 vid felaktiga argument; det är ett indatafel här
        return EXIT_INPUT_ERROR if e.code not in (0, None) else 0

    if args.log_file:
        add_file_handler(logger, args.log_file)

    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except SemiHilbertError as e:
        log_error_with_context(logger, e, {"command": args.command}, "Körningen avbröts")
        sys.stderr.write(e.user_message + "\n")
        return EXIT_INPUT_ERROR
    duration = time.perf_counter() - start
    log_performance(logger, args.command, duration)

    if args.timing:
        report.metadata["duration_seconds"] = round(duration, 6)

    findings_out = getattr(args, "findings_out", None)
    if findings_out:
        write_findings(report.findings, findings_out)
        report.metadata["findings_out"] = findings_out
        report.findings = []

    try:
        report.write(getattr(args, "out", None))
    except OSError as e:
        log_error_with_context(logger, e, {"out": args.out}, "Kunde inte skriva rapporten")
        sys.stderr.write(f"Kunde inte skriva rapporten: {e}\n")
        return EXIT_INPUT_ERROR
    return code
