"""
Settings - Konstanter och toleranser för verktygslådan.
"""

import os
from dataclasses import dataclass


TOOL_VERSION = "1.0.0"
SCHEMA_VERSION = 1

# Relativ trunkering för rang och egenvärden (tol · λ_max)
DEFAULT_TOL = 1e-10
# Stödtröskel relativt max |f|
SUPPORT_RTOL = 1e-10
# Verdikttolerans när scenariot saknar "tol"
DEFAULT_CHECK_TOL = 1e-9
# Tolerans för ekvivalenssvep (formel mot matris)
SWEEP_TOL = 1e-8

JACOBI_MAX_SWEEPS = 100
JACOBI_RTOL = 1e-15

MAX_SEARCH_ATOMS = 6
DEFAULT_GRID = 1024

MEMORY_CACHE_ITEMS = 50  # Max antal kataloger i minnet


@dataclass(frozen=True)
class Tolerances:
    """Samlade toleranser för en körning."""
    rank: float = DEFAULT_TOL
    support: float = SUPPORT_RTOL
    verdict: float = DEFAULT_CHECK_TOL

    @classmethod
    def from_env(cls) -> "Tolerances":
        """Läser SEMIHILBERT_TOL (verdikttolerans) om den är satt."""
        raw = os.environ.get("SEMIHILBERT_TOL")
        if not raw:
            return cls()
        try:
            verdict = float(raw)
        except ValueError:
            return cls()
        if verdict <= 0:
            return cls()
        return cls(verdict=verdict)


# Exitkoder för CLI:t
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_DISAGREEMENT = 2
