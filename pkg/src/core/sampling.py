"""
Sampling - Slumpade och uppräknade instanser för svep och testsviter.

Alla generatorer tar en np.random.Generator så att körningar med samma
seed blir identiska.
"""

import itertools
from typing import Iterator, Optional

import numpy as np

from .exceptions import SearchLimitError
from .measure_space import FiniteMeasureSpace, MeasurableFunction, PointMap
from .operators import OperatorMatrix
from .settings import MAX_SEARCH_ATOMS


def random_space(
    rng: np.random.Generator,
    n: int,
    low: float = 0.1,
    high: float = 1.0,
    normalize: bool = True
) -> FiniteMeasureSpace:
    """Slumpade atomvikter i [low, high), normerade till massa 1 om normalize."""
    weights = rng.uniform(low, high, size=n)
    if normalize:
        weights = weights / weights.sum()
    return FiniteMeasureSpace(weights)


def random_map(rng: np.random.Generator, space: FiniteMeasureSpace) -> PointMap:
    return PointMap(space, rng.integers(0, space.n, size=space.n))


def random_weight(
    rng: np.random.Generator,
    space: FiniteMeasureSpace,
    low: float = 0.1,
    high: float = 2.0,
    zero_fraction: float = 0.0
) -> MeasurableFunction:
    """
    Reell vikt u ≥ 0.

    Med zero_fraction > 0 nollställs varje atom med den sannolikheten
    (degenererade vikter för utforskning).
    """
    values = rng.uniform(low, high, size=space.n)
    if zero_fraction > 0:
        values[rng.random(space.n) < zero_fraction] = 0.0
    return MeasurableFunction(space, values)


def random_function(rng: np.random.Generator, space: FiniteMeasureSpace) -> MeasurableFunction:
    """Komplexvärd standardnormal funktion."""
    return MeasurableFunction(
        space, rng.standard_normal(space.n) + 1j * rng.standard_normal(space.n)
    )


def random_operator(rng: np.random.Generator, space: FiniteMeasureSpace) -> OperatorMatrix:
    n = space.n
    return OperatorMatrix(space, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_positive_operator(
    rng: np.random.Generator,
    space: FiniteMeasureSpace,
    rank: Optional[int] = None
) -> OperatorMatrix:
    """Positiv operator med rang ≤ rank."""
    n = space.n
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    # Platt form G G^H är hermitesk och positiv
    return OperatorMatrix.from_flat(space, g @ g.conj().T)


def enumerate_maps(space: FiniteMeasureSpace, limit: int = MAX_SEARCH_ATOMS) -> Iterator[PointMap]:
    """
    Alla n^n avbildningar i lexikografisk ordning.

    Raises:
        SearchLimitError: om n > limit
    """
    if space.n > limit:
        raise SearchLimitError(space.n, limit)
    for targets in itertools.product(range(space.n), repeat=space.n):
        yield PointMap(space, np.array(targets, dtype=int))


def map_from_index(space: FiniteMeasureSpace, index: int) -> PointMap:
    """Avbildning nummer index i samma ordning som enumerate_maps."""
    n = space.n
    targets = []
    for _ in range(n):
        index, digit = divmod(index, n)
        targets.append(digit)
    return PointMap(space, np.array(targets[::-1], dtype=int))
