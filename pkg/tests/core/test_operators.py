"""Tester för operatorer, μ-adjungering, spektralteori och delrum."""

import numpy as np
import pytest
from hypothesis import given

from src.core.exceptions import (
    DimensionMismatchError,
    LinearDependenceError,
    NotPositiveError,
    NotSelfAdjointError,
)
from src.core.measure_space import (
    FiniteMeasureSpace,
    MeasurableFunction,
    PointMap,
    cond_expectation,
    push_inverse,
    radon_nikodym,
)
from src.core.operators import (
    OperatorMatrix,
    Subspace,
    composition_operator,
    cond_expectation_matrix,
    is_positive,
    moore_penrose,
    mu_adjoint,
    mu_inner,
    mu_norm,
    mu_pinv,
    multiplication_operator,
    nullspace,
    operator_abs,
    operator_norm,
    operator_sqrt,
    ortho_complement,
    projection,
    push_inverse_matrix,
    range_space,
    spectral_decomposition,
    weighted_composition_operator,
)
from src.core.sampling import (
    random_function,
    random_map,
    random_operator,
    random_positive_operator,
    random_space,
    random_weight,
)
from tests.strategies import instances

REL = 1e-10


def op(space, rows):
    return OperatorMatrix(space, np.array(rows, dtype=complex))


def close(a, b, atol=1e-10):
    np.testing.assert_allclose(a.entries, b.entries, atol=atol)


class TestInnerProduct:
    def test_examples(self, uniform2):
        one = MeasurableFunction.constant(uniform2, 1.0)
        assert mu_inner(one, one) == pytest.approx(1.0)

        space = FiniteMeasureSpace(np.array([1 / 3, 2 / 3]))
        f = MeasurableFunction(space, [3.0, 0.0])
        assert mu_inner(f, MeasurableFunction.constant(space, 1.0)) == pytest.approx(1.0)
        assert mu_inner(MeasurableFunction(space, [1, 0]), MeasurableFunction(space, [0, 1])) == 0

    @given(instances())
    def test_conjugate_symmetric(self, instance):
        _, _, f, g = instance
        assert mu_inner(f, g) == pytest.approx(np.conj(mu_inner(g, f)), abs=1e-9)
        assert mu_norm(f) >= 0


class TestAdjoint:
    def test_uniform_is_conjugate_transpose(self, rng):
        space = FiniteMeasureSpace.uniform(4)
        t = random_operator(rng, space)
        np.testing.assert_allclose(mu_adjoint(t).entries, t.entries.conj().T)

    def test_constant_map_weighted(self):
        space = FiniteMeasureSpace(np.array([1 / 3, 2 / 3]))
        c = composition_operator(PointMap.constant(space))
        np.testing.assert_allclose(mu_adjoint(c).entries, [[1.0, 2.0], [0.0, 0.0]])

    def test_real_diagonal_self_adjoint(self, rng):
        space = random_space(rng, 3)
        m = multiplication_operator(random_weight(rng, space))
        close(mu_adjoint(m), m, 0.0)

    def test_defining_identity_and_involution(self, rng):
        for _ in range(100):
            space = random_space(rng, int(rng.integers(1, 7)))
            s, t = random_operator(rng, space), random_operator(rng, space)
            f, g = random_function(rng, space), random_function(rng, space)
            assert mu_inner(t @ f, g) == pytest.approx(mu_inner(f, mu_adjoint(t) @ g), rel=1e-10, abs=1e-10)
            close(mu_adjoint(mu_adjoint(t)), t)
            close(mu_adjoint(s @ t), mu_adjoint(t) @ mu_adjoint(s))


class TestConcreteOperators:
    def test_composition(self, uniform2, swap, constant_map):
        close(composition_operator(PointMap.identity(uniform2)), OperatorMatrix.identity(uniform2), 0.0)
        np.testing.assert_array_equal(composition_operator(swap).entries.real, [[0, 1], [1, 0]])
        np.testing.assert_array_equal(composition_operator(constant_map).entries.real, [[1, 0], [1, 0]])

    def test_multiplication(self, uniform2):
        m = multiplication_operator(MeasurableFunction(uniform2, [0.0, 3.0]))
        np.testing.assert_array_equal(m.entries.real, [[0, 0], [0, 3]])
        assert m.rank() == 1

    def test_weighted_composition(self, uniform2, swap):
        u = MeasurableFunction(uniform2, [1.0, 2.0])
        np.testing.assert_array_equal(weighted_composition_operator(u, swap).entries.real, [[0, 1], [2, 0]])
        close(weighted_composition_operator(MeasurableFunction.constant(uniform2), swap), composition_operator(swap))
        close(weighted_composition_operator(u, PointMap.identity(uniform2)), multiplication_operator(u))

    def test_push_inverse_and_expectation_matrices(self, rng):
        for _ in range(50):
            space = random_space(rng, int(rng.integers(1, 7)))
            phi = random_map(rng, space)
            f = random_function(rng, space)
            assert (push_inverse_matrix(phi) @ f).allclose(push_inverse(phi, f), 1e-12)
            assert (cond_expectation_matrix(phi) @ f).allclose(cond_expectation(phi, f), 1e-12)


class TestAdjointFormulas:
    """C_φ*, |C_φ|, W*W och WW* mot fiberformlerna."""

    def test_random_instances(self, rng):
        for _ in range(500):
            space = random_space(rng, int(rng.integers(1, 9)))
            phi = random_map(rng, space)
            u = random_weight(rng, space)
            h = radon_nikodym(phi)
            c = composition_operator(phi)
            m_h = multiplication_operator(h)
            push = push_inverse_matrix(phi)
            e = cond_expectation_matrix(phi)
            scale = max(1.0, c.flat_norm())

            assert (mu_adjoint(c) - m_h @ push).flat_norm() <= REL * scale
            assert (mu_adjoint(c) @ c - m_h).flat_norm() <= REL * scale
            assert (c @ mu_adjoint(c) - multiplication_operator(h.compose(phi)) @ e).flat_norm() <= REL * scale
            assert (operator_abs(c) - multiplication_operator(h.sqrt())).flat_norm() <= REL * scale

            w = weighted_composition_operator(u, phi)
            w_scale = max(1.0, w.flat_norm() ** 2)
            m_u = multiplication_operator(u)
            assert (mu_adjoint(w) - m_h @ push @ m_u).flat_norm() <= REL * w_scale
            gram = multiplication_operator(h * push_inverse(phi, u * u))
            assert (mu_adjoint(w) @ w - gram).flat_norm() <= REL * w_scale
            assert (operator_abs(w) - multiplication_operator((h * push_inverse(phi, u * u)).sqrt())).flat_norm() <= REL * w_scale
            for _ in range(10):
                f = random_function(rng, space)
                expected = u * h.compose(phi) * cond_expectation(phi, u * f)
                got = w @ (mu_adjoint(w) @ f)
                assert np.max(np.abs(got.values - expected.values)) <= REL * w_scale * max(1.0, f.max_abs())


class TestSpectral:
    def test_diagonal(self, uniform2):
        spectrum = spectral_decomposition(op(uniform2, [[1, 0], [0, 2]]))
        np.testing.assert_allclose(spectrum.eigenvalues, [1.0, 2.0])

    def test_swap(self, swap):
        spectrum = spectral_decomposition(composition_operator(swap))
        np.testing.assert_allclose(spectrum.eigenvalues, [-1.0, 1.0], atol=1e-14)

    def test_rank_one(self, uniform2):
        spectrum = spectral_decomposition(op(uniform2, [[1, 1], [1, 1]]))
        np.testing.assert_allclose(spectrum.eigenvalues, [0.0, 2.0], atol=1e-14)

    def test_rejects_non_self_adjoint(self, constant_map):
        with pytest.raises(NotSelfAdjointError):
            spectral_decomposition(composition_operator(constant_map))

    def test_arrow_matrix_reconstruction(self):
        space = FiniteMeasureSpace.uniform(3)
        t = op(space, [[0, 7, 1], [7, 0, 0], [1, 0, 0]])
        spectrum = spectral_decomposition(t)
        assert (spectrum.reconstruct() - t).flat_norm() <= 1e-9 * t.flat_norm()

    def test_reconstruction_and_orthonormality(self, rng):
        for _ in range(50):
            space = random_space(rng, int(rng.integers(1, 9)))
            a = random_positive_operator(rng, space)
            spectrum = spectral_decomposition(a, 1e-9)
            close(spectrum.reconstruct(), a, 1e-9 * max(1.0, a.flat_norm()))
            v = spectrum.eigenvectors
            gram = v.conj().T @ (space.weights[:, None] * v)
            np.testing.assert_allclose(gram, np.eye(space.n), atol=1e-10)


class TestMoorePenrose:
    def test_examples(self, uniform2):
        close(moore_penrose(op(uniform2, [[2, 0], [0, 0]])), op(uniform2, [[0.5, 0], [0, 0]]))
        close(moore_penrose(OperatorMatrix.identity(uniform2)), OperatorMatrix.identity(uniform2))
        close(moore_penrose(op(uniform2, [[1, 1], [1, 1]])), op(uniform2, [[0.25, 0.25], [0.25, 0.25]]))

    def test_multiplication_operator(self, rng):
        space = random_space(rng, 5)
        u = random_weight(rng, space, zero_fraction=0.4)
        inverse = np.array([1.0 / x if x > 0 else 0.0 for x in u.real])
        close(moore_penrose(multiplication_operator(u)), multiplication_operator(MeasurableFunction(space, inverse)))

    def test_penrose_identities(self, rng):
        for _ in range(50):
            space = random_space(rng, int(rng.integers(2, 8)))
            a = random_positive_operator(rng, space, rank=int(rng.integers(1, space.n)))
            p = moore_penrose(a)
            scale = max(1.0, a.flat_norm(), p.flat_norm())
            assert (a @ p @ a - a).flat_norm() <= 1e-9 * scale
            assert (p @ a @ p - p).flat_norm() <= 1e-9 * scale
            assert (a @ p - mu_adjoint(a @ p)).flat_norm() <= 1e-9 * scale
            assert (p @ a - mu_adjoint(p @ a)).flat_norm() <= 1e-9 * scale
            close(mu_pinv(a), p, 1e-8 * scale)

    def test_penrose_identities_rank_deficient(self):
        space = FiniteMeasureSpace.uniform(3)
        t = op(space, [[0, 7, 1], [7, 0, 0], [1, 0, 0]])
        a = t @ t
        p = moore_penrose(a)
        scale = a.flat_norm()
        assert (a @ p @ a - a).flat_norm() <= 1e-9 * scale
        assert (p @ a @ p - p).flat_norm() <= 1e-9 * max(1.0, p.flat_norm())

    def test_rejects_negative(self, swap):
        with pytest.raises(NotPositiveError):
            moore_penrose(composition_operator(swap))
        assert not is_positive(composition_operator(swap))

    def test_mu_pinv_general_operator(self, rng):
        space = random_space(rng, 4)
        t = random_operator(rng, space)
        p = mu_pinv(t)
        assert (t @ p @ t - t).flat_norm() <= 1e-9 * max(1.0, t.flat_norm())
        assert (t @ p - mu_adjoint(t @ p)).flat_norm() <= 1e-9 * max(1.0, t.flat_norm())


class TestRoots:
    def test_sqrt_example(self, uniform2):
        close(operator_sqrt(op(uniform2, [[4, 0], [0, 9]])), op(uniform2, [[2, 0], [0, 3]]))

    def test_sqrt_squares_back(self, rng):
        space = random_space(rng, 6)
        a = random_positive_operator(rng, space)
        root = operator_sqrt(a)
        close(root @ root, a, 1e-9 * max(1.0, a.flat_norm()))

    def test_abs_of_composition(self, constant_map, swap, uniform2):
        close(operator_abs(composition_operator(constant_map)), op(uniform2, [[np.sqrt(2), 0], [0, 0]]))
        close(operator_abs(composition_operator(swap)), OperatorMatrix.identity(uniform2))


class TestSubspaces:
    def test_nullspace_of_constant_map(self, constant_map):
        kernel = nullspace(composition_operator(constant_map))
        assert kernel.dim == 1
        assert kernel.contains(MeasurableFunction(constant_map.space, [0.0, 1.0]))

    def test_range_of_diagonal(self, uniform2):
        image = range_space(op(uniform2, [[1, 0], [0, 0]]))
        assert image.dim == 1
        assert image.contains(MeasurableFunction(uniform2, [1.0, 0.0]))

    def test_ortho_complement(self):
        space = FiniteMeasureSpace(np.array([1 / 3, 2 / 3]))
        e0 = Subspace.from_functions(space, [MeasurableFunction(space, [1.0, 0.0])])
        complement = ortho_complement(e0)
        assert complement.dim == 1
        assert complement.contains(MeasurableFunction(space, [0.0, 1.0]))
        assert ortho_complement(Subspace.trivial(space)).dim == 2

    def test_projection_is_orthogonal(self, rng):
        space = random_space(rng, 6)
        vectors = [random_function(rng, space) for _ in range(3)]
        p = projection(Subspace.from_functions(space, vectors))
        close(p @ p, p, 1e-9)
        close(mu_adjoint(p), p, 1e-9)
        for v in vectors:
            assert (p @ v).allclose(v, 1e-9 * max(1.0, v.max_abs()))

    def test_complement_dimension(self, rng):
        space = random_space(rng, 7)
        sub = Subspace.from_functions(space, [random_function(rng, space) for _ in range(3)])
        assert sub.dim + ortho_complement(sub).dim == space.n

    def test_dependent_basis_rejected(self, uniform2):
        f = MeasurableFunction(uniform2, [1.0, 2.0])
        with pytest.raises(LinearDependenceError):
            Subspace.from_functions(uniform2, [f, f * 2.0])

    @pytest.mark.parametrize("basis", [[1.0, 0.0, 0.0], [[1.0], [0.0], [0.0]]])
    def test_wrong_length_basis_rejected(self, uniform2, basis):
        with pytest.raises(DimensionMismatchError):
            Subspace(uniform2, np.array(basis))

    def test_operator_norm(self, constant_map):
        assert operator_norm(composition_operator(constant_map)) == pytest.approx(np.sqrt(2))
