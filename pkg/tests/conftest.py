"""Gemensamma fixturer och hypothesis-profil för testsviten."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from src.core.measure_space import FiniteMeasureSpace, MeasurableFunction, PointMap

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def uniform2():
    return FiniteMeasureSpace.uniform(2)


@pytest.fixture
def swap(uniform2):
    return PointMap(uniform2, [1, 0])


@pytest.fixture
def constant_map(uniform2):
    return PointMap.constant(uniform2, 0)


@pytest.fixture
def ones2(uniform2):
    return MeasurableFunction.constant(uniform2, 1.0)
