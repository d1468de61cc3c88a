"""
Scenario - Scenariofiler och CLI-specifikationer för mått och vikter.

Ett scenario är en JSON-fil med schemaversion "v": 1:
{"v": 1, "weights": [...], "phi": [...], "psi": [...]?, "u": [...] | {"form": "exp", "param": 1.0}?,
 "checks": [...], "tol": 1e-9, "mode": "both"}
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from .exceptions import ScenarioError, SemiHilbertError
from .interval_maps import grid_points, parse_closed_form
from .logger import get_logger
from .measure_space import FiniteMeasureSpace, MeasurableFunction, PointMap
from .settings import DEFAULT_CHECK_TOL, SCHEMA_VERSION

logger = get_logger()


VALID_MODES = ("matrix", "formula", "both")
VALID_CHECKS = (
    "selfadjoint",
    "normal",
    "quasinormal",
    "isometry",
    "partial_isometry",
    "unitary",
    "hyponormal",
)


def normalize_check(name: str) -> str:
    """"a_unitary" och "unitary" betyder samma sak."""
    key = str(name).strip().lower()
    if key.startswith("a_"):
        key = key[2:]
    if key not in VALID_CHECKS:
        raise ScenarioError(
            f"okänd egenskap '{name}' (giltiga: {', '.join(VALID_CHECKS)})", field="checks"
        )
    return key


def _parse_complex(value: Any, field_name: str) -> complex:
    """Tal eller [re, im]-par."""
    if isinstance(value, bool):
        raise ScenarioError(f"ogiltigt värde {value!r}", field=field_name)
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(value[0], value[1])
    raise ScenarioError(f"ogiltigt värde {value!r}", field=field_name)


def closed_form_on_atoms(name: str, param: Optional[float], n: int) -> np.ndarray:
    """Sluten form utvärderad i atomernas mittpunkter (k + ½)/n."""
    arg = name if param is None else f"{name}:{param}"
    form = parse_closed_form(arg)
    if n == 1:
        return np.asarray(form(np.array([0.5])), dtype=float)
    return np.asarray(form(grid_points(n)), dtype=float)


def parse_measure_spec(arg: str, n: int) -> FiniteMeasureSpace:
    """
    "uniform" eller kommaseparerade vikter, t.ex. "0.2,0.3,0.5".

    Raises:
        ScenarioError: fel längd eller ogiltiga tal
    """
    text = arg.strip().lower()
    if text == "uniform":
        return FiniteMeasureSpace.uniform(n)
    try:
        weights = [float(x) for x in text.split(",")]
    except ValueError:
        raise ScenarioError(f"kan inte tolka måttet '{arg}'", field="mu") from None
    if len(weights) != n:
        raise ScenarioError(f"måttet har {len(weights)} vikter, n={n}", field="mu")
    try:
        return FiniteMeasureSpace(np.array(weights))
    except SemiHilbertError as e:
        raise ScenarioError(e.message, field="mu") from e


def parse_weight_spec(arg: str, space: FiniteMeasureSpace) -> MeasurableFunction:
    """
    Vikt u från CLI: "ones", en sluten form ("exp", "const:2", …) eller
    kommaseparerade värden "1,2,3".
    """
    text = arg.strip().lower()
    if text == "ones":
        return MeasurableFunction.constant(space, 1.0)
    if "," in text or _is_number(text):
        try:
            values = [float(x) for x in text.split(",")]
        except ValueError:
            raise ScenarioError(f"kan inte tolka vikten '{arg}'", field="u") from None
        if len(values) != space.n:
            raise ScenarioError(f"u har {len(values)} värden, n={space.n}", field="u")
        return MeasurableFunction(space, np.array(values))
    name, _, raw = text.partition(":")
    return MeasurableFunction(
        space, closed_form_on_atoms(name, float(raw) if raw else None, space.n)
    )


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


@dataclass
class Scenario:
    """Ett kontrollscenario: mått, avbildningar, vikt och egenskaper."""
    weights: List[float]
    phi: List[int]
    checks: List[str]
    psi: Optional[List[int]] = None
    u: Optional[Union[List[Any], Dict[str, Any]]] = None
    tol: float = DEFAULT_CHECK_TOL
    mode: str = "both"
    version: int = SCHEMA_VERSION
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        """Kastar ScenarioError med namnet på det felaktiga fältet."""
        if self.version != SCHEMA_VERSION:
            raise ScenarioError(f"schemaversion {self.version} stöds inte", field="v")
        if not isinstance(self.weights, list) or not self.weights:
            raise ScenarioError("måste vara en icke-tom lista", field="weights")
        n = len(self.weights)
        for name, targets in (("phi", self.phi), ("psi", self.psi)):
            if targets is None:
                continue
            if not isinstance(targets, list) or len(targets) != n:
                raise ScenarioError(f"måste ha längd {n}", field=name)
            for t in targets:
                if isinstance(t, bool) or not isinstance(t, int) or not 0 <= t < n:
                    raise ScenarioError(f"ogiltigt atomindex {t!r}", field=name)
        if not isinstance(self.checks, list) or not self.checks:
            raise ScenarioError("måste vara en icke-tom lista", field="checks")
        self.checks = [normalize_check(c) for c in self.checks]
        if not isinstance(self.tol, (int, float)) or isinstance(self.tol, bool) or not self.tol > 0:
            raise ScenarioError("måste vara ett positivt tal", field="tol")
        if self.mode not in VALID_MODES:
            raise ScenarioError(f"måste vara en av {', '.join(VALID_MODES)}", field="mode")
        if isinstance(self.u, list) and len(self.u) != n:
            raise ScenarioError(f"måste ha längd {n}", field="u")
        if self.u is not None and not isinstance(self.u, (list, dict)):
            raise ScenarioError("måste vara en lista eller {\"form\": …}", field="u")
        # Bygg objekten en gång för att fånga fel tidigt
        self.space()
        self.weight()

    @property
    def n(self) -> int:
        return len(self.weights)

    def space(self) -> FiniteMeasureSpace:
        try:
            return FiniteMeasureSpace(np.array(self.weights, dtype=float))
        except (SemiHilbertError, TypeError, ValueError) as e:
            raise ScenarioError(str(e), field="weights") from e

    def phi_map(self) -> PointMap:
        return PointMap(self.space(), np.array(self.phi, dtype=int))

    def psi_map(self) -> Optional[PointMap]:
        if self.psi is None:
            return None
        return PointMap(self.space(), np.array(self.psi, dtype=int))

    def weight(self) -> MeasurableFunction:
        """u som funktion på atomerna; saknas u blir den ≡ 1."""
        space = self.space()
        if self.u is None:
            return MeasurableFunction.constant(space, 1.0)
        if isinstance(self.u, dict):
            form = self.u.get("form")
            if not isinstance(form, str):
                raise ScenarioError("saknar \"form\"", field="u")
            param = self.u.get("param")
            if param is not None and (isinstance(param, bool) or not isinstance(param, (int, float))):
                raise ScenarioError("\"param\" måste vara ett tal", field="u")
            return MeasurableFunction(space, closed_form_on_atoms(form, param, space.n))
        values = [_parse_complex(v, "u") for v in self.u]
        return MeasurableFunction(space, np.array(values, dtype=complex))

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "v": self.version,
            "weights": self.weights,
            "phi": self.phi,
            "checks": self.checks,
            "tol": self.tol,
            "mode": self.mode,
        }
        if self.psi is not None:
            data["psi"] = self.psi
        if self.u is not None:
            data["u"] = self.u
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: Optional[str] = None) -> "Scenario":
        """Skapar från dictionary; saknade obligatoriska fält ger ScenarioError."""
        if not isinstance(data, dict):
            raise ScenarioError("scenariot måste vara ett JSON-objekt", field="<rot>")
        for required in ("weights", "phi", "checks"):
            if required not in data:
                raise ScenarioError("fältet saknas", field=required)
        known = {"v", "weights", "phi", "psi", "u", "checks", "tol", "mode"}
        unknown = sorted(set(data) - known)
        if unknown:
            logger.warning(f"Okända fält i scenariot ignoreras: {', '.join(unknown)}")
        return cls(
            weights=data["weights"],
            phi=data["phi"],
            checks=data["checks"],
            psi=data.get("psi"),
            u=data.get("u"),
            tol=data.get("tol", DEFAULT_CHECK_TOL),
            mode=data.get("mode", "both"),
            version=data.get("v", SCHEMA_VERSION),
            source=source,
        )

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Scenario":
        """
        Läser ett scenario från fil.

        Raises:
            ScenarioError: fil saknas, ogiltig JSON eller schemafel
        """
        file_path = Path(path)
        if not file_path.exists():
            raise ScenarioError(f"filen {file_path} finns inte", field="<fil>")
        try:
            with open(file_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"ogiltig JSON: {e}", field="<fil>") from e
        return cls.from_dict(data, source=str(file_path))
