"""Hjälpfixturer för scenariofiler."""

import json

import pytest


@pytest.fixture
def write_scenario(tmp_path):
    def write(name="scenario.json", **data):
        scenario = {"v": 1, "weights": [0.5, 0.5], "mode": "both"}
        scenario.update(data)
        path = tmp_path / name
        path.write_text(json.dumps(scenario), encoding="utf-8")
        return str(path)
    return write
