"""
Operators - Täta operatorer på L²(μ) med μ-viktad adjungering.

Operatorerna lagras som vanliga matriser; viktningen finns bara i
μ-skalärprodukten och μ-adjungeringen. Spektralteori görs i den platta
metriken D^{1/2} T D^{-1/2} där D = diag(μ).
"""

from dataclasses import dataclass
from typing import Callable, Iterable, List

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatchError,
    LinearDependenceError,
    NotPositiveError,
    NotSelfAdjointError,
)
from .jacobi import jacobi_eigh
from .logger import get_logger
from .measure_space import (
    FiniteMeasureSpace,
    MeasurableFunction,
    PointMap,
)
from .settings import DEFAULT_TOL

logger = get_logger()


def _sqrt_weights(space: FiniteMeasureSpace) -> np.ndarray:
    return np.sqrt(space.weights)


def _relative_rank(singular_values: np.ndarray, tol: float) -> int:
    """Antal singulärvärden över tol · s_max."""
    if singular_values.size == 0:
        return 0
    s_max = float(singular_values.max())
    if s_max == 0.0:
        return 0
    return int(np.sum(singular_values > tol * s_max))


def matrix_rank(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Rang med relativ trunkering (tol · s_max)."""
    m = np.asarray(matrix, dtype=complex)
    if m.size == 0:
        return 0
    return _relative_rank(np.linalg.svd(m, compute_uv=False), tol)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """
    Tät operator på L²(μ).

    entries[i, j] är koefficienten för indataatom j i utdataatom i.
    """
    space: FiniteMeasureSpace
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        n = self.space.n
        if m.ndim != 2 or m.shape != (n, n):
            raise DimensionMismatchError(
                "Operatorns matris matchar inte måttrummet",
                expected=(n, n),
                actual=m.shape
            )
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def identity(cls, space: FiniteMeasureSpace) -> "OperatorMatrix":
        return cls(space, np.eye(space.n))

    @classmethod
    def zero(cls, space: FiniteMeasureSpace) -> "OperatorMatrix":
        return cls(space, np.zeros((space.n, space.n)))

    @classmethod
    def from_flat(cls, space: FiniteMeasureSpace, flat: np.ndarray) -> "OperatorMatrix":
        """Inversen till flat(): T = D^{-1/2} F D^{1/2}."""
        r = _sqrt_weights(space)
        return cls(space, (np.asarray(flat) / r[:, None]) * r[None, :])

    @property
    def n(self) -> int:
        return self.space.n

    def apply(self, f: MeasurableFunction) -> MeasurableFunction:
        self.space.require_same(f.space, "Funktionen")
        return MeasurableFunction(self.space, self.entries @ f.values)

    def __matmul__(self, other):
        if isinstance(other, MeasurableFunction):
            return self.apply(other)
        if isinstance(other, OperatorMatrix):
            self.space.require_same(other.space, "Operatorn")
            return OperatorMatrix(self.space, self.entries @ other.entries)
        return NotImplemented

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self.space.require_same(other.space, "Operatorn")
        return OperatorMatrix(self.space, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self.space.require_same(other.space, "Operatorn")
        return OperatorMatrix(self.space, self.entries - other.entries)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, -self.entries)

    def adjoint(self) -> "OperatorMatrix":
        return mu_adjoint(self)

    def flat(self) -> np.ndarray:
        """D^{1/2} T D^{-1/2}; μ-adjungering blir vanlig konjugattransponering."""
        r = _sqrt_weights(self.space)
        return (self.entries * r[:, None]) / r[None, :]

    def flat_norm(self) -> float:
        """Frobeniusnorm i den platta metriken."""
        return float(np.linalg.norm(self.flat()))

    def rank(self, tol: float = DEFAULT_TOL) -> int:
        return matrix_rank(self.entries, tol)

    def asymmetry(self) -> float:
        """‖T − T*‖ / ‖T‖ i platt metrik (0 för nolloperatorn)."""
        f = self.flat()
        norm = float(np.linalg.norm(f))
        if norm == 0.0:
            return 0.0
        return float(np.linalg.norm(f - f.conj().T)) / norm

    def is_self_adjoint(self, tol: float = DEFAULT_TOL) -> bool:
        return self.asymmetry() <= tol

    def allclose(self, other: "OperatorMatrix", atol: float = 1e-10) -> bool:
        self.space.require_same(other.space, "Operatorn")
        return bool(np.allclose(self.entries, other.entries, rtol=0.0, atol=atol))

    def to_pairs(self) -> List[List[List[float]]]:
        """JSON-kodning: matris av [re, im]-par."""
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.entries]

    def __repr__(self) -> str:
        return f"OperatorMatrix(n={self.n}, entries={np.round(self.entries, 10).tolist()})"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Delrum av L²(μ) givet av linjärt oberoende basvektorer (kolumner)."""
    space: FiniteMeasureSpace
    basis: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex)
        n = self.space.n
        if b.size == 0:
            b = np.zeros((n, 0), dtype=complex)
        if b.ndim == 1:
            b = b.reshape(n, 1) if b.size == n else b
        if b.ndim != 2 or b.shape[0] != n:
            raise DimensionMismatchError(
                "Basvektorerna matchar inte måttrummet",
                expected=n,
                actual=b.shape
            )
        k = b.shape[1]
        if k:
            rank = matrix_rank(b * _sqrt_weights(self.space)[:, None], self.tol)
            if rank < k:
                raise LinearDependenceError(
                    f"Basen har rang {rank} men {k} vektorer", rank=rank, size=k
                )
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_functions(
        cls,
        space: FiniteMeasureSpace,
        functions: Iterable[MeasurableFunction],
        tol: float = DEFAULT_TOL
    ) -> "Subspace":
        columns = []
        for f in functions:
            space.require_same(f.space, "Funktionen")
            columns.append(f.values)
        if not columns:
            return cls.trivial(space)
        return cls(space, np.column_stack(columns), tol)

    @classmethod
    def trivial(cls, space: FiniteMeasureSpace) -> "Subspace":
        return cls(space, np.zeros((space.n, 0)))

    @classmethod
    def whole(cls, space: FiniteMeasureSpace) -> "Subspace":
        return cls(space, np.diag(1.0 / _sqrt_weights(space)))

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def vectors(self) -> List[MeasurableFunction]:
        return [MeasurableFunction(self.space, self.basis[:, k]) for k in range(self.dim)]

    def orthonormal(self) -> "Subspace":
        """
        μ-ortonormerad bas via modifierad Gram–Schmidt.

        Kolumnerna normeras i tur och ordning; varje senare kolumn
        reduceras mot de redan normerade.
        """
        w = self.space.weights
        q = np.array(self.basis, dtype=complex)
        for i in range(self.dim):
            norm = np.sqrt(np.sum(w * np.abs(q[:, i]) ** 2))
            q[:, i] = q[:, i] / norm
            for j in range(i + 1, self.dim):
                coeff = np.sum(w * q[:, j] * np.conj(q[:, i]))
                q[:, j] = q[:, j] - coeff * q[:, i]
        return Subspace(self.space, q, self.tol)

    def flat_basis(self) -> np.ndarray:
        """Basen i platta koordinater, D^{1/2} B."""
        return self.basis * _sqrt_weights(self.space)[:, None]

    def contains(self, f: MeasurableFunction, tol: float = 1e-9) -> bool:
        """Sant om f ligger i delrummet (relativt residual ≤ tol)."""
        self.space.require_same(f.space, "Funktionen")
        norm = mu_norm(f)
        if norm == 0.0:
            return True
        residual = f.values - projection(self).entries @ f.values
        return float(np.sqrt(np.sum(self.space.weights * np.abs(residual) ** 2))) <= tol * norm

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, n={self.space.n})"


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """T = Σ λ_k ⟨·, v_k⟩_μ v_k med μ-ortonormerade v_k (kolumner)."""
    space: FiniteMeasureSpace
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def max_eigenvalue(self) -> float:
        return float(self.eigenvalues.max())

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues.min())

    @property
    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max())

    def apply_function(self, func: Callable[[np.ndarray], np.ndarray]) -> OperatorMatrix:
        """Funktionalkalkyl: f(T) = V diag(f(λ)) V^H D."""
        v = self.eigenvectors
        values = np.asarray(func(self.eigenvalues), dtype=complex)
        entries = (v * values[None, :]) @ v.conj().T * self.space.weights[None, :]
        return OperatorMatrix(self.space, entries)

    def reconstruct(self) -> OperatorMatrix:
        return self.apply_function(lambda lam: lam)


def mu_inner(f: MeasurableFunction, g: MeasurableFunction) -> complex:
    """⟨f, g⟩_μ = Σ μ_i f_i conj(g_i)."""
    f.space.require_same(g.space, "Funktionen")
    return complex(np.sum(f.space.weights * f.values * np.conj(g.values)))


def mu_norm(f: MeasurableFunction) -> float:
    return float(np.sqrt(max(mu_inner(f, f).real, 0.0)))


def mu_adjoint(t: OperatorMatrix) -> OperatorMatrix:
    """T* = D⁻¹ T^H D, den unika operatorn med ⟨Tf, g⟩_μ = ⟨f, T*g⟩_μ."""
    w = t.space.weights
    return OperatorMatrix(t.space, (t.entries.conj().T / w[:, None]) * w[None, :])


def composition_operator(phi: PointMap) -> OperatorMatrix:
    """C_φ f = f∘φ; element (i, φ(i)) = 1."""
    entries = np.zeros((phi.n, phi.n))
    entries[np.arange(phi.n), phi.targets] = 1.0
    return OperatorMatrix(phi.space, entries)


def multiplication_operator(u: MeasurableFunction) -> OperatorMatrix:
    """M_u f = u·f."""
    return OperatorMatrix(u.space, np.diag(u.values))


def weighted_composition_operator(u: MeasurableFunction, phi: PointMap) -> OperatorMatrix:
    """W f = u·(f∘φ) = M_u C_φ."""
    u.space.require_same(phi.space, "Avbildningen")
    return multiplication_operator(u) @ composition_operator(phi)


def push_inverse_matrix(phi: PointMap) -> OperatorMatrix:
    """Matrisen för g ↦ E(g)∘φ⁻¹ (noll utanför värdemängden)."""
    w = phi.space.weights
    mass = np.bincount(phi.targets, weights=w, minlength=phi.n)
    entries = np.zeros((phi.n, phi.n))
    for i, j in enumerate(phi.targets):
        entries[j, i] = w[i] / mass[j]
    return OperatorMatrix(phi.space, entries)


def cond_expectation_matrix(phi: PointMap) -> OperatorMatrix:
    """Matrisen för E(· | φ⁻¹(F)); en μ-ortogonal projektion."""
    return composition_operator(phi) @ push_inverse_matrix(phi)


def spectral_decomposition(t: OperatorMatrix, tol: float = DEFAULT_TOL) -> SpectralDecomposition:
    """
    Spektraluppdelning av en μ-självadjungerad operator.

    T konjugeras till H = D^{1/2} T D^{-1/2}, diagonaliseras med cyklisk
    Jacobi och egenvektorerna transformeras tillbaka, v_k = D^{-1/2} u_k.

    Raises:
        NotSelfAdjointError: om ‖T − T*‖ > tol·‖T‖
    """
    asymmetry = t.asymmetry()
    if asymmetry > tol:
        raise NotSelfAdjointError(
            f"Operatorn är inte μ-självadjungerad (asymmetri {asymmetry:.3e})",
            asymmetry=asymmetry
        )
    values, u = jacobi_eigh(t.flat())
    vectors = u / _sqrt_weights(t.space)[:, None]
    return SpectralDecomposition(t.space, values, vectors)


def positive_spectrum(a: OperatorMatrix, tol: float, what: str) -> SpectralDecomposition:
    """Spektraluppdelning som kräver λ_min ≥ −tol·max|λ|."""
    try:
        spectrum = spectral_decomposition(a, tol)
    except NotSelfAdjointError as e:
        raise NotPositiveError(
            f"{what}: operatorn är inte självadjungerad",
            asymmetry=e.asymmetry
        ) from e
    radius = spectrum.spectral_radius
    if spectrum.min_eigenvalue < -tol * radius:
        raise NotPositiveError(
            f"{what}: negativt egenvärde {spectrum.min_eigenvalue:.6g}",
            eigenvalue=spectrum.min_eigenvalue
        )
    return spectrum


def is_positive(t: OperatorMatrix, tol: float = DEFAULT_TOL) -> bool:
    try:
        positive_spectrum(t, tol, "is_positive")
    except NotPositiveError:
        return False
    return True


def moore_penrose(a: OperatorMatrix, tol: float = DEFAULT_TOL) -> OperatorMatrix:
    """
    Moore–Penrose-invers av en positiv operator via spektral trunkering.

    A† = Σ_{λ_k > tol·λ_max} λ_k⁻¹ ⟨·, v_k⟩_μ v_k. För A = M_u ger detta
    M_{(1/u)χ_{S(u)}}.
    """
    spectrum = positive_spectrum(a, tol, "moore_penrose")
    cutoff = tol * max(spectrum.max_eigenvalue, 0.0)

    def invert(lam: np.ndarray) -> np.ndarray:
        out = np.zeros_like(lam)
        keep = lam > cutoff
        out[keep] = 1.0 / lam[keep]
        return out

    if spectrum.max_eigenvalue <= 0.0:
        return OperatorMatrix.zero(a.space)
    return spectrum.apply_function(invert)


def mu_pinv(t: OperatorMatrix, tol: float = DEFAULT_TOL) -> OperatorMatrix:
    """
    Moore–Penrose-invers i μ-metriken för godtycklig operator.

    Platt: pinv(D^{1/2} T D^{-1/2}); Penrose-identiteterna gäller då med
    μ-adjungering.
    """
    flat_inverse = scipy.linalg.pinv(t.flat(), atol=0.0, rtol=tol)
    return OperatorMatrix.from_flat(t.space, flat_inverse)


def operator_sqrt(a: OperatorMatrix, tol: float = DEFAULT_TOL) -> OperatorMatrix:
    """Positiva kvadratroten A^{1/2}."""
    spectrum = positive_spectrum(a, tol, "operator_sqrt")
    return spectrum.apply_function(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))


def operator_abs(t: OperatorMatrix, tol: float = DEFAULT_TOL) -> OperatorMatrix:
    """|T| = (T*T)^{1/2} med μ-adjungering."""
    return operator_sqrt(mu_adjoint(t) @ t, tol)


def nullspace(t: OperatorMatrix, tol: float = DEFAULT_TOL) -> Subspace:
    """N(T) med μ-ortonormerad bas."""
    r = _sqrt_weights(t.space)
    _, s, vh = np.linalg.svd(t.flat())
    rank = _relative_rank(s, tol)
    flat_null = vh[rank:].conj().T
    return Subspace(t.space, flat_null / r[:, None], tol)


def range_space(t: OperatorMatrix, tol: float = DEFAULT_TOL) -> Subspace:
    """R(T) med μ-ortonormerad bas."""
    r = _sqrt_weights(t.space)
    u, s, _ = np.linalg.svd(t.flat())
    rank = _relative_rank(s, tol)
    return Subspace(t.space, u[:, :rank] / r[:, None], tol)


def ortho_complement(subspace: Subspace) -> Subspace:
    """μ-ortokomplementet S^⊥; S ⊕ S^⊥ = hela rummet."""
    space = subspace.space
    if subspace.dim == 0:
        return Subspace.whole(space).orthonormal()
    flat_complement = scipy.linalg.null_space(
        subspace.flat_basis().conj().T, rcond=subspace.tol
    )
    return Subspace(space, flat_complement / _sqrt_weights(space)[:, None], subspace.tol)


def projection(subspace: Subspace) -> OperatorMatrix:
    """Ortogonal projektion P = B B^H D för en μ-ortonormerad bas B."""
    space = subspace.space
    if subspace.dim == 0:
        return OperatorMatrix.zero(space)
    b = subspace.orthonormal().basis
    return OperatorMatrix(space, (b @ b.conj().T) * space.weights[None, :])


def operator_norm(t: OperatorMatrix) -> float:
    """Största singulärvärdet i μ-metriken."""
    return float(np.linalg.norm(t.flat(), 2))


def column_space(
    columns: np.ndarray,
    space: FiniteMeasureSpace,
    tol: float = DEFAULT_TOL
) -> Subspace:
    """Delrum som spänns upp av (möjligen beroende) kolumner."""
    cols = np.asarray(columns, dtype=complex).reshape(space.n, -1)
    if cols.shape[1] == 0:
        return Subspace.trivial(space)
    r = _sqrt_weights(space)
    u, s, _ = np.linalg.svd(cols * r[:, None], full_matrices=False)
    rank = _relative_rank(s, tol)
    return Subspace(space, u[:, :rank] / r[:, None], tol)

