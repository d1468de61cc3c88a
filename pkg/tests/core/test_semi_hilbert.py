"""Tester för semi-skalärprodukten, Douglas faktorisering, T♯ och oraklet."""

import numpy as np
import pytest

from src.core.exceptions import (
    InvalidWeightError,
    NotInAdjointAlgebraError,
    NotPositiveError,
    RangeInclusionError,
)
from src.core.measure_space import FiniteMeasureSpace, MeasurableFunction, PointMap
from src.core.operators import (
    OperatorMatrix,
    Subspace,
    composition_operator,
    matrix_rank,
    moore_penrose,
    mu_adjoint,
    mu_inner,
    multiplication_operator,
    operator_norm,
    ortho_complement,
)
from src.core.sampling import (
    enumerate_maps,
    random_map,
    random_operator,
    random_positive_operator,
    random_space,
    random_weight,
)
from src.core.semi_hilbert import (
    OperatorProperty,
    SemiInnerProduct,
    a_inner,
    a_norm,
    a_operator_seminorm,
    a_orthocomplement,
    a_orthocomplement_preimage,
    admits_a_adjoint,
    bounded_in_a_seminorm,
    douglas_check,
    douglas_reduced_solution,
    douglas_uniqueness_probe,
    oracle_is,
    require_nonnegative_weight,
    sharp,
)


def op(space, rows):
    return OperatorMatrix(space, np.array(rows, dtype=complex))


def semi(space, diagonal):
    return SemiInnerProduct(multiplication_operator(MeasurableFunction(space, diagonal)))


class TestSemiInnerProduct:
    def test_identity_matches_mu_inner(self, rng):
        space = random_space(rng, 4)
        s = SemiInnerProduct(OperatorMatrix.identity(space))
        f = MeasurableFunction(space, rng.standard_normal(4))
        g = MeasurableFunction(space, rng.standard_normal(4))
        assert a_inner(s, f, g) == pytest.approx(mu_inner(f, g))
        assert s.is_definite()

    def test_degenerate_norm(self, uniform2):
        s = semi(uniform2, [1.0, 0.0])
        assert a_norm(s, MeasurableFunction(uniform2, [0.0, 5.0])) == pytest.approx(0.0, abs=1e-12)
        assert s.rank == 1

    def test_weighted_norm(self, uniform2):
        s = semi(uniform2, [1.0, 2.0])
        assert a_norm(s, MeasurableFunction.constant(uniform2)) ** 2 == pytest.approx(1.5)

    def test_rejects_non_positive(self, swap):
        with pytest.raises(NotPositiveError):
            SemiInnerProduct(composition_operator(swap))

    def test_rejects_negative_weight(self, uniform2):
        with pytest.raises(InvalidWeightError) as exc:
            require_nonnegative_weight(MeasurableFunction(uniform2, [1.0, -1.0]))
        assert exc.value.atom == 1
        with pytest.raises(InvalidWeightError):
            SemiInnerProduct.from_weight(MeasurableFunction(uniform2, [1.0, 1j]))


class TestOrthocomplement:
    def test_identity_gives_plain_complement(self, rng):
        space = random_space(rng, 4)
        s = SemiInnerProduct(OperatorMatrix.identity(space))
        sub = Subspace.from_functions(space, [MeasurableFunction(space, rng.standard_normal(4))])
        assert a_orthocomplement(s, sub).dim == 3
        assert ortho_complement(sub).dim == 3

    def test_degenerate_metric_gives_whole_space(self, uniform2):
        s = semi(uniform2, [1.0, 0.0])
        e1 = Subspace.from_functions(uniform2, [MeasurableFunction(uniform2, [0.0, 1.0])])
        assert a_orthocomplement(s, e1).dim == 2

    def test_unit_weight(self, uniform2):
        s = semi(uniform2, [1.0, 1.0])
        e1 = Subspace.from_functions(uniform2, [MeasurableFunction(uniform2, [0.0, 1.0])])
        complement = a_orthocomplement(s, e1)
        assert complement.dim == 1
        assert complement.contains(MeasurableFunction(uniform2, [1.0, 0.0]))

    def test_matches_preimage_form(self, rng):
        for _ in range(30):
            space = random_space(rng, int(rng.integers(2, 7)))
            a = random_positive_operator(rng, space, rank=int(rng.integers(1, space.n + 1)))
            s = SemiInnerProduct(a)
            sub = Subspace.from_functions(
                space, [MeasurableFunction(space, rng.standard_normal(space.n)) for _ in range(int(rng.integers(1, space.n)))]
            )
            left = a_orthocomplement(s, sub)
            right = a_orthocomplement_preimage(s, sub)
            assert left.dim == right.dim
            for v in right.vectors():
                assert left.contains(v, 1e-7)


class TestDouglas:
    def test_inclusion_true(self, uniform2):
        a = op(uniform2, [[1, 0], [0, 0]])
        b = op(uniform2, [[0, 1], [0, 0]])
        report = douglas_check(a, b)
        assert report.range_inclusion and report.majorization and report.factorization
        assert report.lambda_min == pytest.approx(1.0)

    def test_inclusion_false(self, uniform2):
        report = douglas_check(op(uniform2, [[1, 0], [0, 0]]), op(uniform2, [[0, 0], [0, 1]]))
        assert not report.range_inclusion and not report.majorization and not report.factorization

    def test_invertible_a(self, rng):
        space = random_space(rng, 4)
        report = douglas_check(random_positive_operator(rng, space), random_operator(rng, space))
        assert report.range_inclusion and report.majorization and report.factorization

    def test_random_coherence(self, rng):
        for trial in range(1000):
            space = random_space(rng, int(rng.integers(2, 9)))
            a = random_positive_operator(rng, space, rank=int(rng.integers(1, space.n + 1)))
            if trial % 2:
                b = a @ random_operator(rng, space)
            else:
                b = random_operator(rng, space)
            report = douglas_check(a, b)
            assert report.consistent, report.to_dict()

    def test_reduced_solution_examples(self, uniform2):
        a = op(uniform2, [[1, 0], [0, 0]])
        reduced = douglas_reduced_solution(a, a)
        np.testing.assert_allclose(reduced.solution.entries, a.entries, atol=1e-12)
        assert reduced.ok

        b = op(uniform2, [[0, 1], [0, 0]])
        reduced = douglas_reduced_solution(a, b)
        np.testing.assert_allclose(reduced.solution.entries, b.entries, atol=1e-12)
        assert reduced.kernel_ok and reduced.range_ok

    def test_reduced_solution_error(self, uniform2):
        with pytest.raises(RangeInclusionError) as exc:
            douglas_reduced_solution(op(uniform2, [[1, 0], [0, 0]]), op(uniform2, [[0, 0], [0, 1]]))
        assert not exc.value.report.range_inclusion

    def test_reduced_solution_random(self, rng):
        for _ in range(100):
            space = random_space(rng, int(rng.integers(3, 9)))
            a = random_positive_operator(rng, space, rank=int(rng.integers(1, space.n)))
            b = a @ random_operator(rng, space)
            reduced = douglas_reduced_solution(a, b)
            assert reduced.ok, reduced.to_dict()
            reference = moore_penrose(a) @ b
            assert (reduced.solution - reference).flat_norm() <= 1e-9 * max(1.0, reference.flat_norm())
            assert douglas_uniqueness_probe(a, b, reduced.solution, rng)


class TestSharp:
    def test_identity_gives_adjoint(self, rng):
        space = random_space(rng, 3)
        s = SemiInnerProduct(OperatorMatrix.identity(space))
        t = random_operator(rng, space)
        np.testing.assert_allclose(sharp(s, t).entries, mu_adjoint(t).entries, atol=1e-10)

    def test_weighted_swap(self, uniform2, swap):
        s = semi(uniform2, [1.0, 2.0])
        t = composition_operator(swap)
        t_sharp = sharp(s, t)
        np.testing.assert_allclose(t_sharp.entries, [[0, 2], [0.5, 0]], atol=1e-12)
        np.testing.assert_allclose((s.a @ t_sharp).entries, [[0, 2], [1, 0]], atol=1e-12)

    def test_not_in_adjoint_algebra(self, uniform2, swap):
        s = semi(uniform2, [1.0, 0.0])
        t = composition_operator(swap)
        assert not admits_a_adjoint(s, t)
        with pytest.raises(NotInAdjointAlgebraError):
            sharp(s, t)

    def test_trivial_cases(self, uniform2, swap, rng):
        zero = SemiInnerProduct(OperatorMatrix.zero(uniform2))
        assert admits_a_adjoint(zero, composition_operator(swap))
        invertible = semi(uniform2, [1.0, 3.0])
        assert admits_a_adjoint(invertible, random_operator(rng, uniform2))

    def test_sharp_consistency_sweep(self, rng):
        for n in (3, 4, 8):
            for _ in range(40):
                space = random_space(rng, n)
                s = SemiInnerProduct.from_weight(random_weight(rng, space))
                t = composition_operator(random_map(rng, space))
                t_sharp = sharp(s, t)
                gap = (s.a @ t_sharp - mu_adjoint(t) @ s.a).flat_norm()
                assert gap <= 1e-10 * max(1.0, s.a.flat_norm() * t.flat_norm())
                assert matrix_rank(np.hstack([s.a.entries, t_sharp.entries])) == matrix_rank(s.a.entries)


class TestSeminorm:
    def test_examples(self, uniform2, swap, constant_map):
        identity = SemiInnerProduct(OperatorMatrix.identity(uniform2))
        assert a_operator_seminorm(identity, composition_operator(swap)) == pytest.approx(1.0)
        assert a_operator_seminorm(identity, composition_operator(constant_map)) == pytest.approx(np.sqrt(2))
        assert a_operator_seminorm(identity, OperatorMatrix.zero(uniform2)) == pytest.approx(0.0, abs=1e-12)

    def test_identity_gives_operator_norm(self, rng):
        space = random_space(rng, 5)
        identity = SemiInnerProduct(OperatorMatrix.identity(space))
        t = random_operator(rng, space)
        assert a_operator_seminorm(identity, t) == pytest.approx(operator_norm(t), rel=1e-9)

    def test_bounded_membership(self, uniform2, swap):
        assert bounded_in_a_seminorm(semi(uniform2, [1.0, 2.0]), composition_operator(swap))
        assert not bounded_in_a_seminorm(semi(uniform2, [1.0, 0.0]), composition_operator(swap))


class TestOracle:
    def test_parse(self):
        assert OperatorProperty.parse("unitary") is OperatorProperty.A_UNITARY
        assert OperatorProperty.parse("a_normal").short == "normal"
        with pytest.raises(ValueError):
            OperatorProperty.parse("compact")

    def test_swap_unit_weight(self, uniform2, swap):
        s = semi(uniform2, [1.0, 1.0])
        t = composition_operator(swap)
        for prop in ("selfadjoint", "isometry", "unitary", "normal"):
            assert oracle_is(prop, s, t).verdict, prop

    def test_constant_map_identity_metric(self, uniform2, constant_map):
        s = SemiInnerProduct(OperatorMatrix.identity(uniform2))
        t = composition_operator(constant_map)
        assert not oracle_is("normal", s, t).verdict
        assert not oracle_is("quasinormal", s, t).verdict
        partial = oracle_is("partial_isometry", s, t)
        assert not partial.verdict
        assert partial.raw_residual == pytest.approx(1.0)
        assert partial.details["k_dim"] == 1

    def test_weighted_swap_not_selfadjoint(self, uniform2, swap):
        verdict = oracle_is("a_selfadjoint", semi(uniform2, [1.0, 2.0]), composition_operator(swap))
        assert not verdict.verdict
        assert verdict.raw_residual == pytest.approx(np.sqrt(2.0))

    def test_normal_requires_adjoint_algebra(self, uniform2, swap):
        with pytest.raises(NotInAdjointAlgebraError):
            oracle_is("normal", semi(uniform2, [1.0, 0.0]), composition_operator(swap))

    def test_hyponormal(self, uniform2, swap, constant_map):
        s = semi(uniform2, [1.0, 1.0])
        assert oracle_is("hyponormal", s, composition_operator(swap)).verdict
        # T*T = diag(2,0), TT* = alla ettor: skillnaden är indefinit
        assert not oracle_is("hyponormal", s, composition_operator(constant_map)).verdict

    def test_verdict_matches_residual(self, rng):
        space = random_space(rng, 3)
        s = SemiInnerProduct.from_weight(random_weight(rng, space))
        for phi in enumerate_maps(space):
            t = composition_operator(phi)
            for prop in OperatorProperty:
                verdict = oracle_is(prop, s, t, 1e-8)
                assert verdict.verdict == (verdict.residual <= 1e-8)

    @pytest.mark.parametrize("weights", [[1 / 3] * 3, [0.2, 0.3, 0.5]])
    def test_sanity_implications(self, weights):
        space = FiniteMeasureSpace(np.array(weights))
        for u in ([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]):
            s = semi(space, u)
            for phi in enumerate_maps(space):
                t = composition_operator(phi)
                verdicts = {p.short: oracle_is(p, s, t, 1e-8).verdict for p in OperatorProperty}
                if verdicts["unitary"]:
                    assert verdicts["isometry"]
                if verdicts["isometry"]:
                    assert verdicts["partial_isometry"]
                if verdicts["selfadjoint"]:
                    assert verdicts["normal"]

    def test_unitary_conventions_reported(self, uniform2, swap):
        verdict = oracle_is("unitary", semi(uniform2, [1.0, 1.0]), composition_operator(swap))
        assert verdict.details["variant_verdict"] is True
        assert verdict.details["conventions_agree"] is True

    def test_unitary_conventions_agree_on_small_sweep(self):
        for n in (2, 3):
            space = FiniteMeasureSpace.uniform(n)
            for u in (np.ones(n), np.arange(1.0, n + 1)):
                s = semi(space, u)
                for phi in enumerate_maps(space):
                    details = oracle_is("unitary", s, composition_operator(phi), 1e-8).details
                    assert details["conventions_agree"] is not False, list(phi.as_tuple())

    def test_identity_map_everything(self, rng):
        space = random_space(rng, 3)
        s = SemiInnerProduct.from_weight(random_weight(rng, space))
        t = composition_operator(PointMap.identity(space))
        assert all(oracle_is(p, s, t).verdict for p in OperatorProperty)
