"""Kör de medföljande scenariofilerna."""

from pathlib import Path

import pytest

from src.commands.check import run_check
from src.core.settings import EXIT_OK

SCENARIO_DIR = Path(__file__).resolve().parents[2] / "scenarios"


@pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_bundled_scenario_agrees(path):
    report, code = run_check(str(path))
    assert code == EXIT_OK
    assert report.summary["errors"] == 0
    assert all(c.agree is not False for c in report.checks)


def test_bundled_scenarios_exist():
    assert {p.stem for p in SCENARIO_DIR.glob("*.json")} >= {"swap_unitary", "constant_map"}
