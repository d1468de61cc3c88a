"""
Semi Hilbert - A-relativ maskineri för en positiv operator A.

Innehåller semi-skalärprodukten ⟨f, g⟩_A = ⟨Af, g⟩_μ, A-ortokomplement,
Douglas faktorisering med reducerad lösning, B_A(H)-medlemskap, den skarpa
adjungerade T♯ = A†T*A, A-seminormen och matrisnivåns orakel för alla
operatorklasser.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Union

import numpy as np
import scipy.linalg

from .exceptions import (
    InvalidWeightError,
    NotInAdjointAlgebraError,
    RangeInclusionError,
)
from .logger import get_logger
from .measure_space import MeasurableFunction
from .operators import (
    OperatorMatrix,
    Subspace,
    column_space,
    matrix_rank,
    moore_penrose,
    mu_adjoint,
    mu_inner,
    mu_norm,
    mu_pinv,
    multiplication_operator,
    nullspace,
    operator_sqrt,
    ortho_complement,
    positive_spectrum,
    projection,
    range_space,
    spectral_decomposition,
)
from .settings import DEFAULT_TOL, DEFAULT_CHECK_TOL

logger = get_logger()

# Relativ tolerans för verifieringssteg i Douglas-kontrollen
VERIFY_RTOL = 1e-9


class OperatorProperty(str, Enum):
    """Operatorklasser som oraklet kan avgöra."""
    A_SELFADJOINT = "a_selfadjoint"
    A_NORMAL = "a_normal"
    A_QUASINORMAL = "a_quasinormal"
    A_ISOMETRY = "a_isometry"
    A_UNITARY = "a_unitary"
    A_PARTIAL_ISOMETRY = "a_partial_isometry"
    A_HYPONORMAL = "a_hyponormal"

    @property
    def short(self) -> str:
        """Namnet utan prefix, t.ex. "unitary"."""
        return self.value[2:]

    @classmethod
    def parse(cls, name: Union[str, "OperatorProperty"]) -> "OperatorProperty":
        """Accepterar både "unitary" och "a_unitary"."""
        if isinstance(name, OperatorProperty):
            return name
        key = name.strip().lower()
        if not key.startswith("a_"):
            key = "a_" + key
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(p.short for p in cls)
            raise ValueError(f"Okänd egenskap '{name}' (giltiga: {valid})") from None


@dataclass
class ClassVerdict:
    """Orakelverdikt för en operatorklass."""
    property: str
    verdict: bool
    residual: float
    raw_residual: float
    tolerance: float
    witness: str
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "property": self.property,
            "verdict": self.verdict,
            "residual": self.residual,
            "raw_residual": self.raw_residual,
            "tolerance": self.tolerance,
            "witness": self.witness,
            "details": self.details,
        }


class SemiInnerProduct:
    """
    Semi-skalärprodukten ⟨f, g⟩_A = ⟨Af, g⟩_μ för en positiv operator A.

    A^{1/2}, A† och R(A) beräknas vid konstruktion och delas sedan av alla
    anrop, så instansen kan läsas från flera trådar.
    """

    def __init__(self, a: OperatorMatrix, tol: float = DEFAULT_TOL):
        spectrum = positive_spectrum(a, tol, "SemiInnerProduct")
        self.a = a
        self.tol = tol
        self.space = a.space
        self.sqrt = operator_sqrt(a, tol)
        self.pinv = moore_penrose(a, tol)
        self.range = range_space(a, tol)
        self.max_eigenvalue = spectrum.max_eigenvalue

        # Stickprov: ⟨e_i, e_i⟩_A ≥ −tol
        diagonal = np.real(np.diag(a.entries)) * self.space.weights
        if diagonal.size and diagonal.min() < -tol * max(self.max_eigenvalue, 1.0):
            logger.warning(f"Negativt diagonalelement i A: {diagonal.min():.3e}")

        logger.debug(f"SemiInnerProduct: n={self.space.n}, rang(A)={self.rank}")

    @classmethod
    def from_weight(cls, u: MeasurableFunction, tol: float = DEFAULT_TOL) -> "SemiInnerProduct":
        """A = M_u; u måste vara reell och icke-negativ."""
        require_nonnegative_weight(u, tol)
        return cls(multiplication_operator(MeasurableFunction(u.space, u.real)), tol)

    @property
    def rank(self) -> int:
        return self.range.dim

    def is_definite(self) -> bool:
        return self.rank == self.space.n

    def __repr__(self) -> str:
        return f"SemiInnerProduct(n={self.space.n}, rang={self.rank})"


def require_nonnegative_weight(u: MeasurableFunction, tol: float = DEFAULT_TOL) -> None:
    """Kastar InvalidWeightError om u inte är reell och ≥ 0."""
    scale = max(u.max_abs(), 1.0)
    for i, value in enumerate(u.values):
        if abs(value.imag) > tol * scale or value.real < -tol * scale:
            raise InvalidWeightError(
                f"Vikten u är inte reell och icke-negativ i atom {i}",
                atom=i,
                value=complex(value)
            )


def a_inner(s: SemiInnerProduct, f: MeasurableFunction, g: MeasurableFunction) -> complex:
    """⟨f, g⟩_A = ⟨Af, g⟩_μ."""
    return mu_inner(s.a.apply(f), g)


def a_norm(s: SemiInnerProduct, f: MeasurableFunction) -> float:
    """‖f‖_A = ‖A^{1/2} f‖_μ."""
    return mu_norm(s.sqrt.apply(f))


def a_orthocomplement(s: SemiInnerProduct, subspace: Subspace) -> Subspace:
    """ℒ^{⊥_A} = (Aℒ)^⊥ (vanligt μ-ortokomplement)."""
    image = column_space(s.a.entries @ subspace.basis, s.space, s.tol)
    return ortho_complement(image)


def a_orthocomplement_preimage(s: SemiInnerProduct, subspace: Subspace) -> Subspace:
    """A⁻¹(ℒ^⊥) = N(P_ℒ A); sammanfaller med a_orthocomplement."""
    return nullspace(projection(subspace) @ s.a, s.tol)


@dataclass
class DouglasReport:
    """Resultat av de tre ekvivalenta villkoren i Douglas sats."""
    range_inclusion: bool
    majorization: bool
    factorization: bool
    rank_a: int
    rank_augmented: int
    lambda_min: Optional[float] = None
    factor: Optional[OperatorMatrix] = None
    factor_residual: float = float("inf")

    @property
    def consistent(self) -> bool:
        return self.range_inclusion == self.majorization == self.factorization

    def to_dict(self) -> Dict[str, Any]:
        return {
            "range_inclusion": self.range_inclusion,
            "majorization": self.majorization,
            "factorization": self.factorization,
            "consistent": self.consistent,
            "rank_a": self.rank_a,
            "rank_augmented": self.rank_augmented,
            "lambda": self.lambda_min,
            "factor_residual": self.factor_residual,
        }


def _majorization(a: OperatorMatrix, b: OperatorMatrix, tol: float) -> Optional[float]:
    """
    Minsta λ ≥ 0 med BB* ⪯ λAA*, eller None om inget λ finns.

    Löses i platt metrik: största generaliserade egenvärdet av (P, Q)
    begränsat till R(Q), därefter kontroll av λQ − P ⪰ 0 i hela rummet.
    """
    fa, fb = a.flat(), b.flat()
    q = fa @ fa.conj().T
    p = fb @ fb.conj().T
    p_norm = float(np.linalg.norm(p, 2))
    if p_norm == 0.0:
        return 0.0

    u, s, _ = np.linalg.svd(fa)
    rank = matrix_rank(fa, tol)
    if rank == 0:
        return None
    basis = u[:, :rank]
    q_r = basis.conj().T @ q @ basis
    p_r = basis.conj().T @ p @ basis
    q_r = 0.5 * (q_r + q_r.conj().T)
    p_r = 0.5 * (p_r + p_r.conj().T)
    lam = float(scipy.linalg.eigh(p_r, q_r, eigvals_only=True).max())
    lam = max(lam, 0.0)

    gap = lam * q - p
    gap = 0.5 * (gap + gap.conj().T)
    lowest = float(np.linalg.eigvalsh(gap).min())
    scale = max(lam * float(np.linalg.norm(q, 2)), p_norm)
    if lowest < -VERIFY_RTOL * scale:
        return None
    return lam


def douglas_check(a: OperatorMatrix, b: OperatorMatrix, tol: float = DEFAULT_TOL) -> DouglasReport:
    """
    Testar Douglas tre villkor för paret (A, B).

    (1) R(B) ⊆ R(A) via rang([A | B]) = rang(A); (2) BB* ⪯ λAA* för något λ;
    (3) AC = B lösbar, C = pinv(A)·B verifieras.
    """
    a.space.require_same(b.space, "Operatorn B")
    rank_a = matrix_rank(a.entries, tol)
    rank_augmented = matrix_rank(np.hstack([a.entries, b.entries]), tol)
    range_inclusion = rank_augmented == rank_a

    lam = _majorization(a, b, tol)

    c = scipy.linalg.pinv(a.entries, atol=0.0, rtol=tol) @ b.entries
    factor = OperatorMatrix(a.space, c)
    residual = float(np.linalg.norm(a.entries @ c - b.entries))
    factorization = residual <= VERIFY_RTOL * max(1.0, float(np.linalg.norm(b.entries)))

    report = DouglasReport(
        range_inclusion=range_inclusion,
        majorization=lam is not None,
        factorization=factorization,
        rank_a=rank_a,
        rank_augmented=rank_augmented,
        lambda_min=lam,
        factor=factor if factorization else None,
        factor_residual=residual,
    )
    if not report.consistent:
        logger.warning(f"Douglas-villkoren är oense: {report.to_dict()}")
    return report


@dataclass
class ReducedSolution:
    """Den reducerade lösningen W av AX = B med kontrollerna."""
    solution: OperatorMatrix
    equation_residual: float
    range_ok: bool
    kernel_ok: bool
    report: DouglasReport

    @property
    def ok(self) -> bool:
        return self.equation_residual <= VERIFY_RTOL and self.range_ok and self.kernel_ok

    def to_dict(self) -> Dict[str, Any]:
        return {
            "equation_residual": self.equation_residual,
            "range_ok": self.range_ok,
            "kernel_ok": self.kernel_ok,
            "ok": self.ok,
            "douglas": self.report.to_dict(),
        }


def _range_within(columns: np.ndarray, container: np.ndarray, tol: float) -> bool:
    """R(columns) ⊆ R(container) via rangtest."""
    return matrix_rank(np.hstack([container, columns]), tol) == matrix_rank(container, tol)


def _same_kernel(w: OperatorMatrix, b: OperatorMatrix, tol: float) -> bool:
    """N(W) = N(B): N(B) ⊆ N(W) och lika dimension."""
    null_b = nullspace(b, tol)
    if nullspace(w, tol).dim != null_b.dim:
        return False
    if null_b.dim == 0:
        return True
    image = w.entries @ null_b.basis
    scale = max(1.0, w.flat_norm())
    return float(np.linalg.norm(image)) <= VERIFY_RTOL * scale


def douglas_reduced_solution(
    a: OperatorMatrix,
    b: OperatorMatrix,
    tol: float = DEFAULT_TOL
) -> ReducedSolution:
    """
    Den reducerade lösningen W = A†B av AX = B.

    A† är μ-metrikens Moore–Penrose-invers, så R(W) ⊆ R(A*) gäller med
    μ-adjungering.

    Raises:
        RangeInclusionError: om R(B) ⊄ R(A)
    """
    report = douglas_check(a, b, tol)
    if not report.range_inclusion:
        raise RangeInclusionError(
            f"R(B) ⊄ R(A): rang {report.rank_augmented} mot {report.rank_a}",
            report=report
        )
    w = mu_pinv(a, tol) @ b
    scale = max(1.0, b.flat_norm())
    equation_residual = (a @ w - b).flat_norm() / scale
    range_ok = _range_within(w.entries, mu_adjoint(a).entries, tol)
    kernel_ok = _same_kernel(w, b, tol)
    return ReducedSolution(
        solution=w,
        equation_residual=equation_residual,
        range_ok=range_ok,
        kernel_ok=kernel_ok,
        report=report,
    )


def douglas_uniqueness_probe(
    a: OperatorMatrix,
    b: OperatorMatrix,
    w: OperatorMatrix,
    rng: np.random.Generator,
    tol: float = DEFAULT_TOL
) -> bool:
    """
    Stör W inom N(A) och kontrollerar att R(W′) ⊆ R(A*) då bryts.

    W′ = W + P_{N(A)} G löser fortfarande AX = B. Sant om störningen
    förstör intervallvillkoret (eller om N(A) = {0}, då W′ = W).
    """
    kernel = nullspace(a, tol)
    if kernel.dim == 0:
        return True
    n = a.n
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    perturbed = w + projection(kernel) @ OperatorMatrix(a.space, g)
    still_solves = (a @ perturbed - b).flat_norm() <= VERIFY_RTOL * max(1.0, b.flat_norm())
    breaks_range = not _range_within(perturbed.entries, mu_adjoint(a).entries, tol)
    if not still_solves:
        logger.warning("Störd lösning löser inte längre AX = B")
    return still_solves and breaks_range


def admits_a_adjoint(s: SemiInnerProduct, t: OperatorMatrix) -> bool:
    """T ∈ B_A(H) ⟺ R(T*A) ⊆ R(A)."""
    return _adjoint_ranks(s, t)[0]


def _adjoint_ranks(s: SemiInnerProduct, t: OperatorMatrix):
    t_star_a = (mu_adjoint(t) @ s.a).entries
    rank_a = matrix_rank(s.a.entries, s.tol)
    rank_augmented = matrix_rank(np.hstack([s.a.entries, t_star_a]), s.tol)
    return rank_augmented == rank_a, rank_a, rank_augmented


def sharp(s: SemiInnerProduct, t: OperatorMatrix) -> OperatorMatrix:
    """
    Den A-adjungerade T♯ = A† T* A.

    Raises:
        NotInAdjointAlgebraError: om T ∉ B_A(H)
    """
    admits, rank_a, rank_augmented = _adjoint_ranks(s, t)
    if not admits:
        raise NotInAdjointAlgebraError(
            "T saknar A-adjungerad", rank_a=rank_a, rank_augmented=rank_augmented
        )
    t_sharp = s.pinv @ mu_adjoint(t) @ s.a
    gap = (s.a @ t_sharp - mu_adjoint(t) @ s.a).flat_norm()
    if gap > VERIFY_RTOL * max(1.0, s.a.flat_norm() * max(1.0, t.flat_norm())):
        logger.warning(f"A·T♯ avviker från T*·A med {gap:.3e}")
    return t_sharp


def a_operator_seminorm(s: SemiInnerProduct, t: OperatorMatrix) -> float:
    """
    ‖T‖_A = sup över ξ ∈ R(A), ξ ≠ 0, av ‖Tξ‖_A / ‖ξ‖_A.

    Största egenvärdet i pennan (V*T*ATV, V*AV) med V en bas för R(A).
    """
    if s.rank == 0:
        return 0.0
    v = s.range.basis
    d = s.space.weights[:, None]
    form = (mu_adjoint(t) @ s.a @ t).entries
    m1 = v.conj().T @ (d * (form @ v))
    m2 = v.conj().T @ (d * (s.a.entries @ v))
    m1 = 0.5 * (m1 + m1.conj().T)
    m2 = 0.5 * (m2 + m2.conj().T)
    top = float(scipy.linalg.eigh(m1, m2, eigvals_only=True).max())
    return float(np.sqrt(max(top, 0.0)))


def bounded_in_a_seminorm(s: SemiInnerProduct, t: OperatorMatrix) -> bool:
    """
    T ∈ B_{A^{1/2}}(H): ‖Tξ‖_A ≤ c‖ξ‖_A för något c.

    Via Douglas: T*AT ⪯ c²A ⟺ R(T*A^{1/2}) ⊆ R(A^{1/2}).
    """
    return douglas_check(s.sqrt, mu_adjoint(t) @ s.sqrt, s.tol).range_inclusion


def _scale(s: SemiInnerProduct, t: OperatorMatrix) -> float:
    """‖A‖·max(1, ‖T‖²) i platt Frobeniusnorm."""
    return s.a.flat_norm() * max(1.0, t.flat_norm() ** 2)


def _matrix_witness(diff: OperatorMatrix, label: str) -> str:
    flat = np.abs(diff.flat())
    i, j = np.unravel_index(int(np.argmax(flat)), flat.shape)
    return f"{label}: största avvikelse i element ({i}, {j}) = {flat[i, j]:.3e}"


def _verdict(
    prop: OperatorProperty,
    s: SemiInnerProduct,
    t: OperatorMatrix,
    raw: float,
    tol: float,
    witness: str,
    details: Optional[Dict[str, Any]] = None
) -> ClassVerdict:
    scale = _scale(s, t)
    residual = raw / scale if scale > 0 else raw
    return ClassVerdict(
        property=prop.value,
        verdict=bool(residual <= tol),
        residual=float(residual),
        raw_residual=float(raw),
        tolerance=tol,
        witness=witness,
        details=details or {},
    )


def _isometry_gap(s: SemiInnerProduct, t: OperatorMatrix) -> OperatorMatrix:
    """T*AT − A."""
    return mu_adjoint(t) @ s.a @ t - s.a


def _partial_isometry_compression(s: SemiInnerProduct, t: OperatorMatrix):
    """Komprimering av T*AT − A till K = N_A(T)^{⊥_A}; (matris, dim K)."""
    kernel = nullspace(s.sqrt @ t, s.tol)
    k = a_orthocomplement(s, kernel).orthonormal()
    if k.dim == 0:
        return np.zeros((0, 0), dtype=complex), 0
    gap = _isometry_gap(s, t).entries
    b = k.basis
    compressed = b.conj().T @ (s.space.weights[:, None] * (gap @ b))
    return compressed, k.dim


def oracle_is(
    prop: Union[str, OperatorProperty],
    s: SemiInnerProduct,
    t: OperatorMatrix,
    tol: float = DEFAULT_CHECK_TOL
) -> ClassVerdict:
    """
    Matrisnivåns predikat för en operatorklass relativt A.

    Raises:
        NotInAdjointAlgebraError: för a_normal/a_quasinormal när T ∉ B_A(H)
    """
    prop = OperatorProperty.parse(prop)
    s.space.require_same(t.space, "Operatorn")
    t_star = mu_adjoint(t)

    if prop is OperatorProperty.A_SELFADJOINT:
        diff = s.a @ t - t_star @ s.a
        return _verdict(prop, s, t, diff.flat_norm(), tol, _matrix_witness(diff, "AT − T*A"))

    if prop in (OperatorProperty.A_NORMAL, OperatorProperty.A_QUASINORMAL):
        t_sharp = sharp(s, t)
        if prop is OperatorProperty.A_NORMAL:
            diff = t @ t_sharp - t_sharp @ t
            label = "TT♯ − T♯T"
        else:
            diff = t @ t_sharp @ t - t_sharp @ t @ t
            label = "TT♯T − T♯T²"
        return _verdict(prop, s, t, diff.flat_norm(), tol, _matrix_witness(diff, label))

    if prop is OperatorProperty.A_ISOMETRY:
        diff = _isometry_gap(s, t)
        return _verdict(prop, s, t, diff.flat_norm(), tol, _matrix_witness(diff, "T*AT − A"))

    if prop is OperatorProperty.A_UNITARY:
        first = _isometry_gap(s, t)
        second = t @ s.a @ t_star - s.a
        raw = max(first.flat_norm(), second.flat_norm())
        worst, label = (first, "T*AT − A") if first.flat_norm() >= second.flat_norm() else (second, "TAT* − A")
        verdict = _verdict(prop, s, t, raw, tol, _matrix_witness(worst, label))
        verdict.details.update(_unitary_variant(s, t, first, tol, verdict.verdict))
        return verdict

    if prop is OperatorProperty.A_PARTIAL_ISOMETRY:
        compressed, k_dim = _partial_isometry_compression(s, t)
        raw = float(np.linalg.norm(compressed, 2)) if k_dim else 0.0
        witness = f"komprimering till K (dim {k_dim}), spektralnorm {raw:.3e}"
        return _verdict(prop, s, t, raw, tol, witness, {"k_dim": k_dim})

    # A_HYPONORMAL
    diff = mu_adjoint(t) @ s.a @ t - t @ s.a @ t_star
    spectrum = spectral_decomposition(diff, max(s.tol, 1e-8))
    raw = max(0.0, -spectrum.min_eigenvalue)
    witness = f"λ_min(T*AT − TAT*) = {spectrum.min_eigenvalue:.3e}"
    return _verdict(prop, s, t, raw, tol, witness)


def _unitary_variant(
    s: SemiInnerProduct,
    t: OperatorMatrix,
    isometry_gap: OperatorMatrix,
    tol: float,
    primary: bool
) -> Dict[str, Any]:
    """
    Alternativ konvention: T och T♯ är båda A-isometrier.

    Beräknas bara när T ∈ B_A(H); skillnad mot huvudverdiktet loggas.
    """
    if not admits_a_adjoint(s, t):
        return {"variant_verdict": None, "conventions_agree": None}
    t_sharp = sharp(s, t)
    sharp_gap = mu_adjoint(t_sharp) @ s.a @ t_sharp - s.a
    raw = max(isometry_gap.flat_norm(), sharp_gap.flat_norm())
    scale = _scale(s, t)
    residual = raw / scale if scale > 0 else raw
    variant = bool(residual <= tol)
    if variant != primary:
        logger.info(
            f"A-unitär: konventionerna skiljer sig (TAT* ger {primary}, T♯ ger {variant})"
        )
    return {
        "variant_verdict": variant,
        "variant_residual": float(residual),
        "conventions_agree": variant == primary,
    }
