"""Tester för Douglas-demonstrationerna."""

import numpy as np
import pytest

from src.commands.douglas import construct_pair, run_douglas
from src.core.exceptions import ScenarioError
from src.core.semi_hilbert import douglas_check
from src.core.settings import EXIT_OK


def test_two_hundred_trials_without_violations():
    report, code = run_douglas(seed=1, trials=200)
    assert code == EXIT_OK
    assert report.summary == {
        "trials": 200,
        "inclusion_true": 100,
        "inclusion_false": 100,
        "passed": 200,
        "violations": 0,
    }
    assert report.checks == []


def test_default_run_without_violations():
    report, code = run_douglas()
    assert code == EXIT_OK
    assert report.summary["violations"] == 0
    assert report.summary["passed"] == 100


def test_same_seed_same_report():
    assert run_douglas(seed=4, trials=10)[0].render() == run_douglas(seed=4, trials=10)[0].render()


@pytest.mark.parametrize("inclusion", [True, False])
def test_constructed_pairs(inclusion):
    rng = np.random.default_rng(9)
    for _ in range(20):
        a, b = construct_pair(rng, inclusion)
        report = douglas_check(a, b)
        assert report.range_inclusion == inclusion
        assert report.consistent


def test_needs_a_trial():
    with pytest.raises(ScenarioError):
        run_douglas(trials=0)
