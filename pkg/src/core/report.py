"""
Report - Maskinläsbara rapporter och fynd.

Rapporter skrivs som UTF-8-JSON med sorterade nycklar så att samma
indata och seed ger byte-identisk utdata.
"""

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from .logger import get_logger
from .settings import SCHEMA_VERSION, TOOL_VERSION

logger = get_logger()


def finite_or_none(value: Optional[float]) -> Optional[float]:
    """±∞ och NaN har ingen JSON-form och blir None."""
    if value is None or not np.isfinite(value):
        return None
    return float(value)


def to_native(value: Any) -> Any:
    """Rekursiv konvertering av numpy-värden och tupler till JSON-typer."""
    if isinstance(value, dict):
        return {str(k): to_native(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_native(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_native(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return finite_or_none(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [finite_or_none(value.real), finite_or_none(value.imag)]
    return value


RESIDUAL_FIELDS = ("matrix_residual", "formula_residual")


def _residual_from(data: Dict[str, Any], key: str) -> Optional[float]:
    if data.get(f"{key}_unbounded"):
        return float("inf")
    return data.get(key)


@dataclass
class CheckRecord:
    """
    Resultat för en egenskap; agree finns bara när båda lägena körts.

    En obegränsad residual skrivs som null med flaggan <fält>_unbounded.
    """
    property: str
    matrix_verdict: Optional[bool] = None
    formula_verdict: Optional[bool] = None
    matrix_residual: Optional[float] = None
    formula_residual: Optional[float] = None
    witness: Optional[str] = None
    agree: Optional[bool] = None
    components: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    def __post_init__(self):
        self.components = to_native(self.components)
        self.details = to_native(self.details)

    def to_dict(self) -> Dict[str, Any]:
        """Utelämnar fält som saknar värde."""
        data: Dict[str, Any] = {"property": self.property}
        for key in RESIDUAL_FIELDS:
            value = getattr(self, key)
            if value is not None and not np.isfinite(value):
                data[key] = None
                data[f"{key}_unbounded"] = True
        for key in (
            "matrix_verdict",
            "formula_verdict",
            "matrix_residual",
            "formula_residual",
            "witness",
            "agree",
            "error",
        ):
            value = getattr(self, key)
            if value is not None:
                data[key] = to_native(value)
        if self.components:
            data["components"] = self.components
        if self.details:
            data["details"] = self.details
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckRecord":
        return cls(
            property=data["property"],
            matrix_verdict=data.get("matrix_verdict"),
            formula_verdict=data.get("formula_verdict"),
            matrix_residual=_residual_from(data, "matrix_residual"),
            formula_residual=_residual_from(data, "formula_residual"),
            witness=data.get("witness"),
            agree=data.get("agree"),
            components=data.get("components", {}),
            details=data.get("details", {}),
            error=data.get("error"),
        )


@dataclass
class Finding:
    """Observation som inte är ett fel, t.ex. en oenighet för degenererad u."""
    kind: str
    message: str
    context: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.context = to_native(self.context)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "message": self.message, "context": self.context}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Finding":
        return cls(kind=data["kind"], message=data["message"], context=data.get("context", {}))


@dataclass
class Report:
    """Rapport från ett delkommando."""
    command: str
    checks: List[CheckRecord] = field(default_factory=list)
    findings: List[Finding] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.summary = to_native(self.summary)
        meta = {"tool_version": TOOL_VERSION, "v": SCHEMA_VERSION}
        meta.update(to_native(self.metadata))
        self.metadata = meta

    @property
    def disagreements(self) -> List[CheckRecord]:
        return [c for c in self.checks if c.agree is False]

    def add_finding(self, kind: str, message: str, **context: Any) -> Finding:
        finding = Finding(kind, message, dict(context))
        self.findings.append(finding)
        logger.info(f"Fynd [{kind}]: {message}")
        return finding

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "checks": [c.to_dict() for c in self.checks],
            "findings": [f.to_dict() for f in self.findings],
            "summary": self.summary,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Report":
        return cls(
            command=data["command"],
            checks=[CheckRecord.from_dict(c) for c in data.get("checks", [])],
            findings=[Finding.from_dict(f) for f in data.get("findings", [])],
            summary=data.get("summary", {}),
            metadata=data.get("metadata", {}),
        )

    def render(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
        return text + "\n"

    @classmethod
    def parse(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def write(self, out: Optional[Union[str, Path]] = None) -> None:
        """Skriver till fil, eller till stdout om out saknas."""
        text = self.render()
        if out is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Rapport sparad: {path}")


def write_findings(findings: List[Finding], path: Union[str, Path]) -> None:
    """Fynd skrivs till en egen fil, skild från rapportens verdikt."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    data = {"v": SCHEMA_VERSION, "findings": [f.to_dict() for f in findings]}
    with open(out, "w", encoding="utf-8") as f:
        f.write(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n")
    logger.info(f"{len(findings)} fynd sparade: {out}")
