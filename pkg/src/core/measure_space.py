"""
Measure Space - Ändliga atomära måttrum, mätbara funktioner och punktavbildningar.

Atomerna indexeras 0…n−1. Alla måtteoretiska objekt reduceras till vektorer
och partitioner: σ-algebran φ⁻¹(F) motsvaras av fiberpartitionen av φ.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple, FrozenSet, Union

import numpy as np

from .exceptions import InvalidMeasureError, DimensionMismatchError
from .settings import SUPPORT_RTOL


Scalar = Union[int, float, complex]


@dataclass(frozen=True, eq=False)
class FiniteMeasureSpace:
    """Ändligt atomärt måttrum (X, F, μ) med strikt positiva atomvikter."""
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size < 1:
            raise InvalidMeasureError("Måttrummet måste ha minst en atom")
        for i, wi in enumerate(w):
            if not np.isfinite(wi) or wi <= 0:
                raise InvalidMeasureError(
                    f"Atom {i} har ogiltig vikt {wi}", atom=i, weight=float(wi)
                )
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return int(self.weights.size)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @classmethod
    def uniform(cls, n: int) -> "FiniteMeasureSpace":
        """Likformigt sannolikhetsmått på n atomer."""
        if n < 1:
            raise InvalidMeasureError("Måttrummet måste ha minst en atom")
        return cls(np.full(n, 1.0 / n))

    def same_as(self, other: "FiniteMeasureSpace") -> bool:
        return self is other or (
            self.n == other.n and np.array_equal(self.weights, other.weights)
        )

    def require_same(self, other: "FiniteMeasureSpace", what: str = "objekt") -> None:
        """Kastar DimensionMismatchError om rummen skiljer sig."""
        if not self.same_as(other):
            raise DimensionMismatchError(
                f"{what} lever på ett annat måttrum",
                expected=self.n,
                actual=other.n
            )

    def __repr__(self) -> str:
        return f"FiniteMeasureSpace(n={self.n}, weights={self.weights.tolist()})"


@dataclass(frozen=True, eq=False)
class MeasurableFunction:
    """Komplexvärd funktion på atomerna (element i L²(μ))."""
    space: FiniteMeasureSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if v.size != self.space.n:
            raise DimensionMismatchError(
                "Funktionens längd matchar inte antalet atomer",
                expected=self.space.n,
                actual=v.size
            )
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, space: FiniteMeasureSpace, value: Scalar = 1.0) -> "MeasurableFunction":
        return cls(space, np.full(space.n, value, dtype=complex))

    @classmethod
    def indicator(cls, space: FiniteMeasureSpace, atoms: Iterable[int]) -> "MeasurableFunction":
        """Karakteristisk funktion χ för en atommängd."""
        values = np.zeros(space.n, dtype=complex)
        for atom in atoms:
            values[int(atom)] = 1.0
        return cls(space, values)

    @property
    def real(self) -> np.ndarray:
        return self.values.real.copy()

    def _other_values(self, other: Union["MeasurableFunction", Scalar]) -> Union[np.ndarray, Scalar]:
        if isinstance(other, MeasurableFunction):
            self.space.require_same(other.space, "Funktionen")
            return other.values
        return other

    def __add__(self, other):
        return MeasurableFunction(self.space, self.values + self._other_values(other))

    def __sub__(self, other):
        return MeasurableFunction(self.space, self.values - self._other_values(other))

    def __mul__(self, other):
        return MeasurableFunction(self.space, self.values * self._other_values(other))

    __rmul__ = __mul__

    def conj(self) -> "MeasurableFunction":
        return MeasurableFunction(self.space, self.values.conj())

    def abs(self) -> "MeasurableFunction":
        return MeasurableFunction(self.space, np.abs(self.values))

    def sqrt(self) -> "MeasurableFunction":
        return MeasurableFunction(self.space, np.sqrt(self.values))

    def compose(self, phi: "PointMap") -> "MeasurableFunction":
        """f∘φ."""
        self.space.require_same(phi.space, "Avbildningen")
        return MeasurableFunction(self.space, self.values[phi.targets])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= tol))

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return self.is_real(tol) and bool(np.all(self.values.real >= -tol))

    def allclose(self, other: "MeasurableFunction", atol: float = 1e-12) -> bool:
        self.space.require_same(other.space, "Funktionen")
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    def to_pairs(self) -> List[List[float]]:
        """Kanonisk JSON-kodning: lista av [re, im]-par."""
        return [[float(z.real), float(z.imag)] for z in self.values]

    def __repr__(self) -> str:
        return f"MeasurableFunction({np.round(self.values, 12).tolist()})"


@dataclass(frozen=True, eq=False)
class PointMap:
    """Transformation φ på atomerna; targets[i] = φ(i)."""
    space: FiniteMeasureSpace
    targets: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.targets).reshape(-1)
        if t.size != self.space.n:
            raise DimensionMismatchError(
                "Avbildningens längd matchar inte antalet atomer",
                expected=self.space.n,
                actual=t.size
            )
        if t.size and not np.issubdtype(t.dtype, np.integer):
            if not np.all(np.equal(np.mod(t, 1), 0)):
                raise DimensionMismatchError(
                    "Avbildningens mål måste vara heltal",
                    expected="heltal",
                    actual=t.tolist()
                )
        t = t.astype(int)
        bad = np.flatnonzero((t < 0) | (t >= self.space.n))
        if bad.size:
            raise DimensionMismatchError(
                f"Atom {int(bad[0])} avbildas utanför rummet",
                expected=f"[0, {self.space.n})",
                actual=int(t[bad[0]])
            )
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "targets", t)

    @classmethod
    def identity(cls, space: FiniteMeasureSpace) -> "PointMap":
        return cls(space, np.arange(space.n))

    @classmethod
    def constant(cls, space: FiniteMeasureSpace, atom: int = 0) -> "PointMap":
        return cls(space, np.full(space.n, atom, dtype=int))

    @classmethod
    def from_permutation(cls, space: FiniteMeasureSpace, permutation: Iterable[int]) -> "PointMap":
        """Bijektiv avbildning; kastar DimensionMismatchError om det inte är en permutation."""
        targets = np.asarray(list(permutation), dtype=int)
        if sorted(targets.tolist()) != list(range(space.n)):
            raise DimensionMismatchError(
                "Avbildningen är inte en permutation",
                expected=list(range(space.n)),
                actual=targets.tolist()
            )
        return cls(space, targets)

    @property
    def n(self) -> int:
        return self.space.n

    def __call__(self, atom: int) -> int:
        return int(self.targets[atom])

    def compose(self, other: "PointMap") -> "PointMap":
        """self∘other, dvs. i ↦ self(other(i))."""
        self.space.require_same(other.space, "Avbildningen")
        return PointMap(self.space, self.targets[other.targets])

    def iterate(self, k: int) -> "PointMap":
        """φ^k (k ≥ 0)."""
        result = PointMap.identity(self.space)
        for _ in range(k):
            result = self.compose(result)
        return result

    def range_atoms(self) -> FrozenSet[int]:
        return frozenset(int(j) for j in np.unique(self.targets))

    def is_injective(self) -> bool:
        return len(self.range_atoms()) == self.n

    def as_tuple(self) -> Tuple[int, ...]:
        return tuple(int(t) for t in self.targets)

    def __repr__(self) -> str:
        return f"PointMap({list(self.as_tuple())})"


@dataclass(frozen=True, eq=False)
class Partition:
    """Partition av atomerna; ändliga σ-algebror motsvaras av partitioner."""
    space: FiniteMeasureSpace
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        canonical = tuple(sorted(tuple(sorted(int(a) for a in b)) for b in self.blocks))
        seen: List[int] = []
        for block in canonical:
            if not block:
                raise DimensionMismatchError(
                    "Partitionen innehåller ett tomt block", expected="icke-tomma block", actual=block
                )
            seen.extend(block)
        if sorted(seen) != list(range(self.space.n)):
            raise DimensionMismatchError(
                "Blocken måste vara disjunkta och täcka alla atomer",
                expected=list(range(self.space.n)),
                actual=sorted(seen)
            )
        object.__setattr__(self, "blocks", canonical)

    def block_index(self) -> np.ndarray:
        """Array som avbildar atom → blockindex."""
        index = np.empty(self.space.n, dtype=int)
        for k, block in enumerate(self.blocks):
            index[list(block)] = k
        return index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.space.same_as(other.space) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __repr__(self) -> str:
        return f"Partition({[set(b) for b in self.blocks]})"


def _fiber_sums(phi: PointMap, f: MeasurableFunction) -> Tuple[np.ndarray, np.ndarray]:
    """Summerar μ·f och μ över varje fiber φ⁻¹({j}); indexeras med j."""
    phi.space.require_same(f.space, "Funktionen")
    mu = phi.space.weights
    mass = np.bincount(phi.targets, weights=mu, minlength=phi.n)
    weighted = np.zeros(phi.n, dtype=complex)
    np.add.at(weighted, phi.targets, mu * f.values)
    return weighted, mass


def fibers(phi: PointMap) -> Partition:
    """Atomerna i φ⁻¹(F): de icke-tomma urbilderna φ⁻¹({j})."""
    blocks = {}
    for i, j in enumerate(phi.targets):
        blocks.setdefault(int(j), []).append(i)
    return Partition(phi.space, tuple(tuple(b) for b in blocks.values()))


def radon_nikodym(phi: PointMap) -> MeasurableFunction:
    """
    Radon–Nikodym-derivatan h_φ = d(μ∘φ⁻¹)/dμ.

    På atomer: h(j) = μ(φ⁻¹({j})) / μ({j}); noll utanför φ:s värdemängd.
    """
    mass = np.bincount(phi.targets, weights=phi.space.weights, minlength=phi.n)
    return MeasurableFunction(phi.space, mass / phi.space.weights)


def cond_expectation(phi: PointMap, f: MeasurableFunction) -> MeasurableFunction:
    """
    Villkorligt väntevärde E(f | φ⁻¹(F)).

    Viktat medelvärde av f över fibern som innehåller atomen; resultatet
    är konstant på varje fiber.
    """
    weighted, mass = _fiber_sums(phi, f)
    return MeasurableFunction(phi.space, weighted[phi.targets] / mass[phi.targets])


def push_inverse(phi: PointMap, g: MeasurableFunction) -> MeasurableFunction:
    """
    Faktorn "∘ φ⁻¹": r(j) = E(g)(i) för valfritt i med φ(i) = j.

    Noll för j utanför φ:s värdemängd. Uppfyller push_inverse(φ, g)∘φ = E(g).
    """
    weighted, mass = _fiber_sums(phi, g)
    in_range = mass > 0
    values = np.zeros(phi.n, dtype=complex)
    values[in_range] = weighted[in_range] / mass[in_range]
    return MeasurableFunction(phi.space, values)


def refines(p: Partition, q: Partition) -> bool:
    """Sant om varje block i P ligger i något block i Q (då σ(Q) ⊆ σ(P))."""
    p.space.require_same(q.space, "Partitionen")
    q_index = q.block_index()
    return all(len({int(q_index[a]) for a in block}) == 1 for block in p.blocks)


def support(f: MeasurableFunction, tol: Optional[float] = None) -> FrozenSet[int]:
    """
    Stödet S(f) = {i : |f(i)| > tol}.

    Args:
        f: Funktionen
        tol: Absolut tröskel; None ger SUPPORT_RTOL · max |f|

    Returns:
        Mängd av atomindex
    """
    magnitude = np.abs(f.values)
    if tol is None:
        threshold = SUPPORT_RTOL * (float(magnitude.max()) if magnitude.size else 0.0)
    else:
        if tol < 0:
            raise ValueError("tol måste vara icke-negativ")
        threshold = tol
    return frozenset(int(i) for i in np.flatnonzero(magnitude > threshold))


def change_of_variables_gap(phi: PointMap, f: MeasurableFunction) -> float:
    """|∫ f∘φ dμ − ∫ h_φ f dμ|; noll upp till avrundning."""
    mu = phi.space.weights
    lhs = np.sum(mu * f.values[phi.targets])
    rhs = np.sum(mu * radon_nikodym(phi).values * f.values)
    return float(abs(lhs - rhs))

