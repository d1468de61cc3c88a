"""
Interval Maps - Styckvis affina avbildningar av [0,1] med Lebesguemått.

Radon–Nikodym-derivatan och det villkorliga väntevärdet beräknas med
generella fibermedelvärden över grenarnas urbilder; kriterierna utvärderas
punktvis på mittpunktsnätet x_k = (k + ½)/N.
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple, Union

import numpy as np

from .criteria import CriterionVerdict
from .exceptions import InvalidWeightError, ScenarioError
from .logger import get_logger
from .measure_space import FiniteMeasureSpace, MeasurableFunction, PointMap
from .settings import DEFAULT_CHECK_TOL, DEFAULT_GRID

logger = get_logger()

RealFunction = Callable[[np.ndarray], np.ndarray]

# Tolerans för gränser mellan grenar och bildintervall
EDGE_TOL = 1e-12


@dataclass(frozen=True)
class Branch:
    """Affin gren x ↦ slope·x + intercept på [start, end)."""
    start: float
    end: float
    slope: float
    intercept: float

    def __post_init__(self):
        if not (0.0 <= self.start < self.end <= 1.0):
            raise ValueError(f"Ogiltig grendomän [{self.start}, {self.end})")
        if self.slope == 0:
            raise ValueError("Grenens lutning måste vara nollskild")

    def __call__(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept

    @property
    def image(self) -> Tuple[float, float]:
        a = self.slope * self.start + self.intercept
        b = self.slope * self.end + self.intercept
        return (min(a, b), max(a, b))

    def image_contains(self, y: float) -> bool:
        lo, hi = self.image
        return lo - EDGE_TOL <= y <= hi + EDGE_TOL

    def inverse(self, y: float) -> float:
        return (y - self.intercept) / self.slope


@dataclass(frozen=True)
class BranchMap:
    """Styckvis affin självavbildning av [0,1]; domänerna partitionerar [0,1]."""
    name: str
    branches: Tuple[Branch, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.branches, key=lambda b: b.start))
        if not ordered:
            raise ValueError("Avbildningen måste ha minst en gren")
        if abs(ordered[0].start) > EDGE_TOL or abs(ordered[-1].end - 1.0) > EDGE_TOL:
            raise ValueError("Grenarnas domäner måste täcka [0,1]")
        for left, right in zip(ordered, ordered[1:]):
            if abs(left.end - right.start) > EDGE_TOL:
                raise ValueError(
                    f"Grenarna är inte sammanhängande vid {left.end} / {right.start}"
                )
        for branch in ordered:
            lo, hi = branch.image
            if lo < -EDGE_TOL or hi > 1.0 + EDGE_TOL:
                raise ValueError(f"Grenens bild [{lo}, {hi}] ligger utanför [0,1]")
        object.__setattr__(self, "branches", ordered)

    @classmethod
    def doubling(cls) -> "BranchMap":
        """x ↦ 2x på [0,½), x ↦ 2x − 1 på [½,1]."""
        return cls("doubling", (Branch(0.0, 0.5, 2.0, 0.0), Branch(0.5, 1.0, 2.0, -1.0)))

    @classmethod
    def tent(cls) -> "BranchMap":
        """x ↦ 1 − 2x på [0,½), x ↦ 2x − 1 på (½,1]."""
        return cls("tent", (Branch(0.0, 0.5, -2.0, 1.0), Branch(0.5, 1.0, 2.0, -1.0)))

    @classmethod
    def builtin(cls, name: str) -> "BranchMap":
        maps = {"doubling": cls.doubling, "tent": cls.tent}
        if name not in maps:
            raise ScenarioError(
                f"Okänd avbildning '{name}' (giltiga: {', '.join(sorted(maps))})", field="name"
            )
        return maps[name]()

    def branch_index(self, x: np.ndarray) -> np.ndarray:
        """Index för grenen som innehåller x (sista grenen inkluderar 1)."""
        starts = np.array([b.start for b in self.branches])
        idx = np.searchsorted(starts, np.asarray(x, dtype=float), side="right") - 1
        return np.clip(idx, 0, len(self.branches) - 1)

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        idx = self.branch_index(xs)
        slopes = np.array([b.slope for b in self.branches])[idx]
        intercepts = np.array([b.intercept for b in self.branches])[idx]
        out = slopes * xs + intercepts
        return float(out) if out.ndim == 0 else out

    def slope_at(self, x: float) -> float:
        return self.branches[int(self.branch_index(np.asarray(x)))].slope

    def preimages(self, y: float) -> List[Tuple[float, float]]:
        """Alla urbilder z av y som (z, |s|), en per gren vars bild innehåller y."""
        result = []
        for branch in self.branches:
            if branch.image_contains(y):
                z = min(max(branch.inverse(y), branch.start), branch.end)
                result.append((z, abs(branch.slope)))
        return result


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Värden i mittpunkterna x_k = (k + ½)/N; linjär interpolation däremellan."""
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size < 2:
            raise ValueError("Nätet måste ha minst två punkter")
        if not np.all(np.isfinite(v)):
            raise ValueError("Nätfunktionens värden måste vara ändliga")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def points(self) -> np.ndarray:
        return grid_points(self.size)

    @classmethod
    def from_callable(cls, func: RealFunction, n: int) -> "GridFunction":
        return cls(np.asarray(func(grid_points(n)), dtype=float))

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.points, self.values)


def grid_points(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("Nätet måste ha minst två punkter")
    return (np.arange(n) + 0.5) / n


@dataclass(frozen=True)
class ClosedForm:
    """Sluten vikt från katalogen: const, exp, affine, step."""
    name: str
    param: float

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        if self.name == "const":
            return np.full_like(xs, self.param)
        if self.name == "exp":
            return np.exp(self.param * xs)
        if self.name == "affine":
            return 1.0 + self.param * xs
        # step: 1 på [0,½), param på [½,1]
        return np.where(xs < 0.5, 1.0, self.param)

    @property
    def label(self) -> str:
        return f"{self.name}:{self.param:g}"


CLOSED_FORM_DEFAULTS: Dict[str, float] = {"const": 1.0, "exp": 1.0, "affine": 1.0, "step": 2.0}


def parse_closed_form(arg: str) -> ClosedForm:
    """
    Tolkar "namn[:param]", t.ex. "exp", "const:2", "affine:0.5".

    Raises:
        ScenarioError: okänt namn eller ogiltig parameter
    """
    name, _, raw = arg.strip().partition(":")
    name = name.lower()
    if name not in CLOSED_FORM_DEFAULTS:
        raise ScenarioError(
            f"Okänd sluten form '{name}' (giltiga: {', '.join(sorted(CLOSED_FORM_DEFAULTS))})",
            field="u"
        )
    if raw:
        try:
            param = float(raw)
        except ValueError:
            raise ScenarioError(f"Ogiltig parameter '{raw}' för {name}", field="u") from None
    else:
        param = CLOSED_FORM_DEFAULTS[name]
    return ClosedForm(name, param)


IntervalFunction = Union[GridFunction, ClosedForm, RealFunction]


def h_interval(m: BranchMap) -> RealFunction:
    """h(y) = Σ 1/|s| över grenar vars bild innehåller y."""
    def h(y):
        ys = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.zeros_like(ys)
        for branch in m.branches:
            lo, hi = branch.image
            inside = (ys >= lo - EDGE_TOL) & (ys <= hi + EDGE_TOL)
            out[inside] += 1.0 / abs(branch.slope)
        return out if np.ndim(y) else float(out[0])
    return h


def push_inverse_interval(m: BranchMap, f: IntervalFunction, x: float) -> float:
    """E(f)∘φ⁻¹(x): 1/|s|-viktat medel av f över urbilderna av x; 0 utanför bilden."""
    pre = m.preimages(float(x))
    if not pre:
        return 0.0
    weights = np.array([1.0 / s for _, s in pre])
    values = np.array([float(f(z)) for z, _ in pre])
    return float(np.sum(weights * values) / np.sum(weights))


def cond_exp_interval(m: BranchMap, f: IntervalFunction, x: float) -> float:
    """E(f)(x): fibermedelvärdet över urbilderna av φ(x)."""
    return push_inverse_interval(m, f, float(m(float(x))))


INTERVAL_PROPERTIES = ("selfadjoint", "normal", "quasinormal", "isometry", "partial_isometry", "unitary")


def crit_interval(
    prop: str,
    m: BranchMap,
    u: IntervalFunction,
    n: int = DEFAULT_GRID,
    tol: float = DEFAULT_CHECK_TOL
) -> CriterionVerdict:
    """
    Utvärderar egenskapens identitet i varje nätpunkt.

    Residualen är max punktvis avvikelse; origin_violation är avvikelsen i
    nätpunkten närmast 0.

    Raises:
        InvalidWeightError: om u ≤ 0 i någon nätpunkt
        ValueError: okänd egenskap
    """
    key = prop[2:] if prop.startswith("a_") else prop
    if key not in INTERVAL_PROPERTIES:
        raise ValueError(f"Okänd egenskap '{prop}' (giltiga: {', '.join(INTERVAL_PROPERTIES)})")

    xs = grid_points(n)
    h = h_interval(m)
    u_vals = np.asarray(u(xs), dtype=float)
    bad = np.flatnonzero(~(u_vals > 0))
    if bad.size:
        raise InvalidWeightError(
            f"u måste vara strikt positiv på nätet (x={xs[bad[0]]:.6g})",
            atom=int(bad[0]),
            value=complex(u_vals[bad[0]])
        )

    def u_func(z):
        return float(np.asarray(u(z), dtype=float))

    phi_x = np.asarray(m(xs), dtype=float)
    h_x = np.asarray(h(xs), dtype=float)
    pushed_u = np.array([push_inverse_interval(m, u_func, x) for x in xs])
    j = h_x * pushed_u
    components = {"u": u_vals, "h": h_x, "J": j}
    details: Dict[str, object] = {"map": m.name, "grid": n}

    if key == "selfadjoint":
        period_gap = np.abs(np.asarray(m(phi_x), dtype=float) - xs)
        defects = np.flatnonzero((j > tol) & (period_gap > 1e-9))
        violation = np.abs(j - u_vals)
        if defects.size:
            violation = np.where((j > tol) & (period_gap > 1e-9), np.inf, violation)
        details["period_defects"] = int(defects.size)
    elif key == "normal":
        lhs = np.array([h(y) / u_func(y) for y in phi_x]) * u_vals
        rhs = j / u_vals
        components.update(lhs=lhs, rhs=rhs)
        violation = np.abs(lhs - rhs)
    elif key == "quasinormal":
        def g(z):
            return float(h(z)) * push_inverse_interval(m, u_func, z) / u_func(z)
        lhs = (j / u_vals) * h_x
        rhs = np.array([push_inverse_interval(m, g, x) for x in xs]) * h_x
        components.update(lhs=lhs, rhs=rhs)
        violation = np.abs(lhs - rhs)
    elif key == "isometry":
        violation = np.abs(j - u_vals)
    elif key == "partial_isometry":
        violation = np.where(j > tol, np.abs(j - u_vals), 0.0)
    else:
        uh_phi = np.array([u_func(y) * float(h(y)) for y in phi_x])
        components["(u·h)∘φ"] = uh_phi
        violation = np.maximum(np.abs(j - u_vals), np.abs(uh_phi - u_vals))

    index = int(np.argmax(violation))
    residual = float(violation[index])
    details["witness_x"] = float(xs[index])
    details["origin_witness_x"] = float(xs[0])
    details["origin_violation"] = float(violation[0])
    logger.debug(f"{m.name} {key}, N={n}: residual {residual:.3e} vid x={xs[index]:.6g}")

    space = FiniteMeasureSpace.uniform(n)
    return CriterionVerdict(
        property=key,
        verdict=bool(residual <= tol),
        residual=residual,
        tolerance=tol,
        witness_atom=index if residual > 0 else None,
        components={name: MeasurableFunction(space, values) for name, values in components.items()},
        details=details,
    )


def discretize(m: BranchMap, n: int) -> Tuple[FiniteMeasureSpace, PointMap]:
    """
    Ändlig modell på mittpunktsnätet: atom k ↦ atomen som innehåller φ(x_k).

    Med likformigt mått blir fibrerna de kontinuerliga fibrerna i nätet.
    """
    xs = grid_points(n)
    targets = np.clip(np.floor(np.asarray(m(xs)) * n + EDGE_TOL).astype(int), 0, n - 1)
    space = FiniteMeasureSpace.uniform(n)
    return space, PointMap(space, targets)

