"""
Criteria - Måtteoretiska kriterier för M_u- och C_ψ-relativa klasser av C_φ.

Varje kriterium räknar ut sina mellanliggande funktioner (J, h, E(u)∘φ⁻¹,
(u·h)∘φ, …) och returnerar dem tillsammans med verdikt, residual och den
atom där avvikelsen är störst.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .exceptions import NotPositiveError
from .logger import get_logger
from .measure_space import (
    MeasurableFunction,
    PointMap,
    fibers,
    push_inverse,
    radon_nikodym,
    refines,
    support,
)
from .operators import (
    Subspace,
    composition_operator,
    multiplication_operator,
    ortho_complement,
    positive_spectrum,
)
from .semi_hilbert import (
    DouglasReport,
    ReducedSolution,
    douglas_check,
    douglas_reduced_solution,
    require_nonnegative_weight,
)
from .settings import DEFAULT_TOL, DEFAULT_CHECK_TOL

logger = get_logger()


CRITERION_PROPERTIES = (
    "selfadjoint",
    "normal",
    "quasinormal",
    "isometry",
    "partial_isometry",
    "unitary",
)
CPSI_PROPERTIES = ("selfadjoint", "isometry", "partial_isometry", "unitary")


@dataclass
class CriterionVerdict:
    """Verdikt från ett formelkriterium med alla mellanled."""
    property: str
    verdict: bool
    residual: float
    tolerance: float
    witness_atom: Optional[int]
    components: Dict[str, MeasurableFunction] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "property": self.property,
            "verdict": self.verdict,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "witness_atom": self.witness_atom,
            "components": {name: f.to_pairs() for name, f in sorted(self.components.items())},
            "details": self.details,
            "notes": list(self.notes),
        }


def j_weight(u: MeasurableFunction, phi: PointMap) -> MeasurableFunction:
    """J = h_φ · E(u)∘φ⁻¹."""
    return radon_nikodym(phi) * push_inverse(phi, u)


def _inverse_on_support(u: MeasurableFunction) -> MeasurableFunction:
    """(1/u)·χ_{S(u)}."""
    values = np.zeros(u.space.n, dtype=complex)
    for i in support(u):
        values[i] = 1.0 / u.values[i]
    return MeasurableFunction(u.space, values)


def _pointwise(
    name: str,
    lhs: MeasurableFunction,
    rhs: MeasurableFunction,
    tol: float,
    components: Dict[str, MeasurableFunction]
) -> CriterionVerdict:
    diff = np.abs(lhs.values - rhs.values)
    atom = int(np.argmax(diff)) if diff.size else None
    residual = float(diff.max()) if diff.size else 0.0
    return CriterionVerdict(
        property=name,
        verdict=bool(residual <= tol),
        residual=residual,
        tolerance=tol,
        witness_atom=atom if residual > 0 else None,
        components=components,
    )


def crit_selfadjoint(u: MeasurableFunction, phi: PointMap, tol: float = DEFAULT_CHECK_TOL) -> CriterionVerdict:
    """
    φ är 2-periodisk på S_J och J = u.

    En periodavvikelse ger residual +∞ med avvikande atom som vittne.
    """
    require_nonnegative_weight(u)
    h = radon_nikodym(phi)
    pushed = push_inverse(phi, u)
    j = h * pushed
    s_j = sorted(support(j))
    defects = [i for i in s_j if phi(phi(i)) != i]

    diff = np.abs(j.values - u.values)
    gap = float(diff.max())
    if defects:
        residual = float("inf")
        atom: Optional[int] = defects[0]
    else:
        residual = gap
        atom = int(np.argmax(diff)) if gap > 0 else None

    return CriterionVerdict(
        property="selfadjoint",
        verdict=bool(residual <= tol),
        residual=residual,
        tolerance=tol,
        witness_atom=atom,
        components={"u": u, "h": h, "E(u)∘φ⁻¹": pushed, "J": j},
        details={"support_J": s_j, "period_defects": defects, "max_abs_J_minus_u": gap},
    )


def crit_normal(u: MeasurableFunction, phi: PointMap, tol: float = DEFAULT_CHECK_TOL) -> CriterionVerdict:
    """((1/u)χ_{S(u)} h)∘φ · u = (1/u)χ_{S(u)} · J."""
    require_nonnegative_weight(u)
    h = radon_nikodym(phi)
    j = j_weight(u, phi)
    inv_u = _inverse_on_support(u)
    g = inv_u * h
    lhs = g.compose(phi) * u
    rhs = inv_u * j
    return _pointwise("normal", lhs, rhs, tol, {"u": u, "h": h, "J": j, "lhs": lhs, "rhs": rhs})


def crit_quasinormal(u: MeasurableFunction, phi: PointMap, tol: float = DEFAULT_CHECK_TOL) -> CriterionVerdict:
    """(1/u)χ_{S(u)} J · h = ((1/u)χ_{S(u)} J)∘φ⁻¹ · h."""
    require_nonnegative_weight(u)
    h = radon_nikodym(phi)
    j = j_weight(u, phi)
    g = _inverse_on_support(u) * j
    lhs = g * h
    rhs = push_inverse(phi, g) * h
    return _pointwise("quasinormal", lhs, rhs, tol, {"u": u, "h": h, "J": j, "lhs": lhs, "rhs": rhs})


def crit_isometry(u: MeasurableFunction, phi: PointMap, tol: float = DEFAULT_CHECK_TOL) -> CriterionVerdict:
    """u = J."""
    require_nonnegative_weight(u)
    h = radon_nikodym(phi)
    j = j_weight(u, phi)
    return _pointwise("isometry", j, u, tol, {"u": u, "h": h, "J": j})


def crit_unitary(u: MeasurableFunction, phi: PointMap, tol: float = DEFAULT_CHECK_TOL) -> CriterionVerdict:
    """u = J = (u·h)∘φ."""
    require_nonnegative_weight(u)
    h = radon_nikodym(phi)
    j = j_weight(u, phi)
    uh_phi = (u * h).compose(phi)

    first = np.abs(j.values - u.values)
    second = np.abs(uh_phi.values - u.values)
    worst = np.maximum(first, second)
    residual = float(worst.max())
    verdict = CriterionVerdict(
        property="unitary",
        verdict=bool(residual <= tol),
        residual=residual,
        tolerance=tol,
        witness_atom=int(np.argmax(worst)) if residual > 0 else None,
        components={"u": u, "h": h, "J": j, "(u·h)∘φ": uh_phi},
        details={"max_abs_J_minus_u": float(first.max()), "max_abs_uh_phi_minus_u": float(second.max())},
    )
    if verdict.verdict and not phi.is_injective():
        # C M_u C* = M_{(u h)∘φ}·E skiljer sig från M_u när E ≠ I
        verdict.notes.append(
            "Formeln godtar en icke-injektiv φ; på operatornivå är "
            "C_φ M_u C_φ* = M_{(u·h)∘φ}·E skild från M_u eftersom E ≠ I."
        )
    return verdict


def crit_partial_isometry(
    u: MeasurableFunction,
    phi: PointMap,
    tol: float = DEFAULT_CHECK_TOL
) -> CriterionVerdict:
    """
    ∫ (J − u)|f|² dμ = 0 för alla f ∈ (u·L²(X∖S_J))^⊥.

    Formen f ↦ Σ μ_i (J − u)_i |f_i|² komprimeras till en μ-ortonormerad
    bas för K = (u·L²(X∖S_J))^⊥; residualen är komprimeringens spektralnorm.
    """
    require_nonnegative_weight(u)
    space = u.space
    h = radon_nikodym(phi)
    j = j_weight(u, phi)
    s_j = support(j)
    s_u = support(u)

    outside = [k for k in range(space.n) if k not in s_j and k in s_u]
    v = Subspace.from_functions(
        space, [u * MeasurableFunction.indicator(space, [k]) for k in outside]
    )
    k_space = ortho_complement(v).orthonormal()

    if k_space.dim == 0:
        residual = 0.0
        atom: Optional[int] = None
    else:
        b = k_space.basis
        form = space.weights * (j.values - u.values)
        compressed = b.conj().T @ (form[:, None] * b)
        residual = float(np.linalg.norm(compressed, 2))
        # Atomen med störst bidrag till formen på K
        weight_on_k = np.sum(np.abs(b) ** 2, axis=1) * np.abs(form)
        atom = int(np.argmax(weight_on_k)) if residual > 0 else None

    return CriterionVerdict(
        property="partial_isometry",
        verdict=bool(residual <= tol),
        residual=residual,
        tolerance=tol,
        witness_atom=atom,
        components={"u": u, "h": h, "J": j, "J − u": j - u},
        details={"support_J": sorted(s_j), "excluded_atoms": outside, "k_dim": k_space.dim},
    )


CRITERIA: Dict[str, Callable[..., CriterionVerdict]] = {
    "selfadjoint": crit_selfadjoint,
    "normal": crit_normal,
    "quasinormal": crit_quasinormal,
    "isometry": crit_isometry,
    "partial_isometry": crit_partial_isometry,
    "unitary": crit_unitary,
}


def _criterion_name(prop: str) -> str:
    key = str(getattr(prop, "value", prop)).strip().lower()
    if key.startswith("a_"):
        key = key[2:]
    if key not in CRITERIA:
        raise ValueError(
            f"Inget formelkriterium för '{prop}' (giltiga: {', '.join(CRITERION_PROPERTIES)})"
        )
    return key


def evaluate_criterion(
    prop: str,
    u: MeasurableFunction,
    phi: PointMap,
    tol: float = DEFAULT_CHECK_TOL
) -> CriterionVerdict:
    """Kör kriteriet för egenskapen prop ("unitary" eller "a_unitary")."""
    return CRITERIA[_criterion_name(prop)](u, phi, tol)


def sigma_containment(psi: PointMap, phi: PointMap) -> bool:
    """ψ⁻¹(Σ) ⊆ φ⁻¹(Σ): varje φ-fiber ligger i en ψ-fiber."""
    return refines(fibers(phi), fibers(psi))


def crit_cpsi(
    prop: str,
    psi: PointMap,
    phi: PointMap,
    tol: float = DEFAULT_CHECK_TOL
) -> CriterionVerdict:
    """
    C_ψ-relativa kriterier för C_φ.

    C_ψ måste vara positiv; då är C_ψ = |C_ψ| = M_{√h_ψ} och kriteriet
    delegeras med u = √h_ψ. För unitary krävs dessutom ψ⁻¹(Σ) ⊆ φ⁻¹(Σ).

    Raises:
        NotPositiveError: om C_ψ inte är positiv
        ValueError: för egenskaper utan C_ψ-kriterium
    """
    name = _criterion_name(prop)
    if name not in CPSI_PROPERTIES:
        raise ValueError(
            f"Inget C_ψ-kriterium för '{prop}' (giltiga: {', '.join(CPSI_PROPERTIES)})"
        )
    psi.space.require_same(phi.space, "Avbildningen ψ")
    try:
        positive_spectrum(composition_operator(psi), DEFAULT_TOL, "C_ψ")
    except NotPositiveError:
        logger.info(f"C_ψ är inte positiv för ψ={list(psi.as_tuple())}")
        raise

    u = MeasurableFunction(psi.space, np.sqrt(radon_nikodym(psi).real))
    verdict = CRITERIA[name](u, phi, tol)
    verdict.property = f"cpsi_{name}"
    verdict.components["√h_ψ"] = u

    if name == "unitary":
        contained = sigma_containment(psi, phi)
        verdict.details["sigma_containment"] = contained
        if not contained:
            verdict.verdict = False
            verdict.notes.append(
                "φ-fibrerna förfinar inte ψ-fibrerna, så C_φ kan inte vara C_ψ-unitär."
            )
    if psi.as_tuple() == PointMap.identity(psi.space).as_tuple():
        verdict.notes.append(
            "Positiv C_ψ på ett ändligt atomärt rum tvingar ψ = id; kriteriet "
            "reduceras till fallet u ≡ 1."
        )
    return verdict


@dataclass
class RangeFactorization:
    """Douglas-paret (C_φ, M_u) och lösningen X av C_φ X = M_u."""
    report: DouglasReport
    solution: Optional[ReducedSolution]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "douglas": self.report.to_dict(),
            "reduced_solution": self.solution.to_dict() if self.solution else None,
        }


def unitary_range_factorization(
    u: MeasurableFunction,
    phi: PointMap,
    tol: float = DEFAULT_TOL
) -> RangeFactorization:
    """
    R(M_u) ⊆ R(C_φ) för M_u-unitär C_φ; löser C_φ X = M_u.

    Lösningen saknas (None) när inklusionen inte håller.
    """
    require_nonnegative_weight(u)
    c_phi = composition_operator(phi)
    m_u = multiplication_operator(u)
    report = douglas_check(c_phi, m_u, tol)
    solution = douglas_reduced_solution(c_phi, m_u, tol) if report.range_inclusion else None
    return RangeFactorization(report=report, solution=solution)
