"""Tester för måttrum, fibrer, Radon–Nikodym och villkorligt väntevärde."""

import numpy as np
import pytest
from hypothesis import given

from src.core.exceptions import DimensionMismatchError, InvalidMeasureError
from src.core.measure_space import (
    FiniteMeasureSpace,
    MeasurableFunction,
    Partition,
    PointMap,
    change_of_variables_gap,
    cond_expectation,
    fibers,
    push_inverse,
    radon_nikodym,
    refines,
    support,
)
from src.core.sampling import random_function, random_map, random_space
from tests.strategies import instances


def values(f):
    return np.round(f.values.real, 12).tolist()


class TestConstruction:
    def test_zero_mass_atom_rejected(self):
        with pytest.raises(InvalidMeasureError) as exc:
            FiniteMeasureSpace(np.array([0.5, 0.0]))
        assert exc.value.atom == 1

    def test_empty_space_rejected(self):
        with pytest.raises(InvalidMeasureError):
            FiniteMeasureSpace(np.array([]))

    def test_target_out_of_range(self, uniform2):
        with pytest.raises(DimensionMismatchError):
            PointMap(uniform2, [0, 2])

    def test_function_length_mismatch(self, uniform2):
        with pytest.raises(DimensionMismatchError):
            MeasurableFunction(uniform2, [1.0, 2.0, 3.0])

    def test_from_permutation(self):
        space = FiniteMeasureSpace.uniform(3)
        assert PointMap.from_permutation(space, [2, 0, 1]).is_injective()
        with pytest.raises(DimensionMismatchError):
            PointMap.from_permutation(space, [0, 0, 1])

    def test_total_mass_need_not_be_one(self):
        space = FiniteMeasureSpace(np.array([2.0, 3.0]))
        assert space.total_mass == pytest.approx(5.0)

    def test_values_are_immutable(self, ones2):
        with pytest.raises(ValueError):
            ones2.values[0] = 3.0


class TestPointMap:
    def test_compose_and_iterate(self):
        space = FiniteMeasureSpace.uniform(3)
        rotate = PointMap(space, [1, 2, 0])
        assert rotate.iterate(3).as_tuple() == (0, 1, 2)
        assert rotate.compose(rotate).as_tuple() == (2, 0, 1)

    def test_range_and_injectivity(self, constant_map, swap):
        assert constant_map.range_atoms() == frozenset({0})
        assert not constant_map.is_injective()
        assert swap.is_injective()


class TestFibers:
    def test_identity(self):
        space = FiniteMeasureSpace.uniform(3)
        assert fibers(PointMap.identity(space)).blocks == ((0,), (1,), (2,))

    def test_constant(self, constant_map):
        assert fibers(constant_map).blocks == ((0, 1),)

    def test_paired(self):
        space = FiniteMeasureSpace.uniform(4)
        assert fibers(PointMap(space, [0, 2, 0, 2])).blocks == ((0, 2), (1, 3))

    def test_partition_rejects_overlap(self):
        space = FiniteMeasureSpace.uniform(3)
        with pytest.raises(DimensionMismatchError):
            Partition(space, ((0, 1), (1, 2)))


class TestRadonNikodym:
    def test_identity_is_one(self, rng):
        space = random_space(rng, 5, normalize=False)
        assert values(radon_nikodym(PointMap.identity(space))) == [1.0] * 5

    def test_constant_map(self, constant_map):
        assert values(radon_nikodym(constant_map)) == [2.0, 0.0]

    def test_paired_map(self):
        space = FiniteMeasureSpace.uniform(4)
        assert values(radon_nikodym(PointMap(space, [0, 2, 0, 2]))) == [2.0, 0.0, 2.0, 0.0]

    def test_total_mass_preserved(self, rng):
        for _ in range(50):
            space = random_space(rng, int(rng.integers(1, 9)), normalize=False)
            h = radon_nikodym(random_map(rng, space))
            assert np.sum(space.weights * h.real) == pytest.approx(space.total_mass, rel=1e-12)


class TestCondExpectation:
    def test_bijection_is_identity(self, swap):
        f = MeasurableFunction(swap.space, [3.0, -1.0 + 2j])
        assert cond_expectation(swap, f).allclose(f)

    def test_constant_map_average(self, constant_map):
        f = MeasurableFunction(constant_map.space, [1.0, 3.0])
        assert values(cond_expectation(constant_map, f)) == [2.0, 2.0]

    def test_weighted_average(self):
        space = FiniteMeasureSpace(np.array([1 / 3, 2 / 3]))
        f = MeasurableFunction(space, [3.0, 0.0])
        assert values(cond_expectation(PointMap.constant(space), f)) == [1.0, 1.0]

    def test_axioms_on_random_instances(self, rng):
        for _ in range(500):
            space = random_space(rng, int(rng.integers(1, 9)))
            phi = random_map(rng, space)
            f = random_function(rng, space)
            g = random_function(rng, space)
            one = MeasurableFunction.constant(space, 1.0)
            ef = cond_expectation(phi, f)
            g_phi = g.compose(phi)

            assert cond_expectation(phi, one).allclose(one, 1e-12)
            assert cond_expectation(phi, ef).allclose(ef, 1e-12)
            lhs = np.sum(space.weights * ef.values * np.conj(g_phi.values))
            rhs = np.sum(space.weights * f.values * np.conj(g_phi.values))
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
            module = cond_expectation(phi, f * g_phi)
            np.testing.assert_allclose(module.values, (ef * g_phi).values, atol=1e-12 * max(1.0, (f * g_phi).max_abs()))


class TestPushInverse:
    def test_identity(self):
        space = FiniteMeasureSpace.uniform(3)
        g = MeasurableFunction(space, [1.0, 2.0, 3.0])
        assert push_inverse(PointMap.identity(space), g).allclose(g)

    def test_constant_map(self, constant_map):
        g = MeasurableFunction(constant_map.space, [2.0, 0.0])
        assert values(push_inverse(constant_map, g)) == [1.0, 0.0]

    def test_swap(self, swap):
        g = MeasurableFunction(swap.space, [5.0, 7.0])
        assert values(push_inverse(swap, g)) == [7.0, 5.0]

    @given(instances())
    def test_push_inverse_then_compose_is_expectation(self, instance):
        _, phi, f, _ = instance
        pushed = push_inverse(phi, f).compose(phi)
        np.testing.assert_allclose(pushed.values, cond_expectation(phi, f).values, atol=1e-10)


class TestRefines:
    def test_examples(self):
        space = FiniteMeasureSpace.uniform(3)
        singletons = Partition(space, ((0,), (1,), (2,)))
        coarse = Partition(space, ((0, 1), (2,)))
        assert refines(singletons, coarse)
        assert not refines(coarse, singletons)

        space4 = FiniteMeasureSpace.uniform(4)
        assert refines(Partition(space4, ((0, 2), (1, 3))), Partition(space4, ((0, 1, 2, 3),)))

    def test_partial_order(self):
        space = FiniteMeasureSpace.uniform(4)
        a = Partition(space, ((0,), (1,), (2, 3)))
        b = Partition(space, ((0, 1), (2, 3)))
        c = Partition(space, ((0, 1, 2, 3),))
        assert refines(a, a)
        assert refines(a, b) and refines(b, c) and refines(a, c)
        assert not refines(b, a)
        assert Partition(space, ((3, 2), (1, 0))) == b


class TestSupport:
    def test_examples(self):
        space3 = FiniteMeasureSpace.uniform(3)
        assert support(MeasurableFunction(space3, [0, 1, 0]), 1e-12) == {1}
        space2 = FiniteMeasureSpace.uniform(2)
        assert support(MeasurableFunction(space2, [2, 0]), 0.0) == {0}

    def test_j_support_for_constant_map(self, constant_map, ones2):
        j = radon_nikodym(constant_map) * push_inverse(constant_map, ones2)
        assert support(j) == {0}

    def test_relative_default(self, uniform2):
        assert support(MeasurableFunction(uniform2, [1.0, 1e-14])) == {0}

    def test_negative_tol(self, ones2):
        with pytest.raises(ValueError):
            support(ones2, -1.0)


@given(instances())
def test_change_of_variables(instance):
    _, phi, f, _ = instance
    assert change_of_variables_gap(phi, f) <= 1e-10 * max(1.0, f.max_abs())
