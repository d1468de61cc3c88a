"""
Jacobi - Cyklisk Jacobi-diagonalisering av komplexa hermiteska matriser.

Används av spektraluppdelningen i operators.py efter att operatorn har
konjugerats till den platta metriken D^{1/2} T D^{-1/2}.
"""

from typing import Tuple

import numpy as np

from .settings import JACOBI_MAX_SWEEPS, JACOBI_RTOL
from .logger import get_logger

logger = get_logger()


def _off_norm(a: np.ndarray) -> float:
    """Frobeniusnorm av allt utanför diagonalen."""
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotation(a_pp: float, a_qq: float, z: complex) -> np.ndarray:
    """
    Unitär 2×2-rotation G med G^H [[a_pp, z], [z̄, a_qq]] G diagonal.

    Fasen i z flyttas först till den andra koordinaten; därefter återstår en
    reell symmetrisk Jacobi-rotation.
    """
    r = abs(z)
    phase = z / r
    tau = (a_qq - a_pp) / (2.0 * r)
    sign = 1.0 if tau >= 0 else -1.0
    t = sign / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    conj_phase = np.conj(phase)
    return np.array([[c, s], [-s * conj_phase, c * conj_phase]], dtype=complex)


def jacobi_eigh(
    h: np.ndarray,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    rtol: float = JACOBI_RTOL
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Egenvärden och egenvektorer för en hermitesk matris.

    Roterar bort ett element utanför diagonalen i taget, rad för rad, tills
    off(A) ≤ max(rtol, n·eps)·‖A‖_F eller max_sweeps svep har körts.

    Args:
        h: Hermitesk n×n-matris (hermitiseras som (h + h^H)/2)
        max_sweeps: Maximalt antal fulla svep
        rtol: Relativ stopptolerans

    Returns:
        (egenvärden i stigande ordning, unitär matris med egenvektorer som kolumner)
    """
    a = np.array(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"Matrisen måste vara kvadratisk, fick form {a.shape}")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)

    scale = float(np.linalg.norm(a))
    if n < 2 or scale == 0.0:
        values = np.real(np.diag(a)).copy()
        order = np.argsort(values, kind="stable")
        return values[order], v[:, order]

    # Flyttalsgolv: avrundningsbruset växer med n
    threshold = max(rtol, n * np.finfo(float).eps) * scale
    # Element under eps²·‖A‖ påverkar inte spektrum och roteras inte
    negligible = np.finfo(float).eps ** 2 * scale

    sweeps = 0
    while sweeps < max_sweeps and _off_norm(a) > threshold:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = a[p, q]
                if abs(z) <= negligible:
                    continue
                g = _rotation(float(a[p, p].real), float(a[q, q].real), z)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

    if sweeps >= max_sweeps and _off_norm(a) > threshold:
        logger.warning(
            f"Jacobi konvergerade inte på {max_sweeps} svep "
            f"(off={_off_norm(a):.3e}, tröskel={threshold:.3e})"
        )
    else:
        logger.debug(f"Jacobi klar efter {sweeps} svep (n={n})")

    values = np.real(np.diag(a)).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]
