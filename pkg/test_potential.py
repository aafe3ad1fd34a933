import math
from fractions import Fraction

import pytest

from berkdyn.models.berkpoints import Order, compare
from berkdyn.models.dynamics import image_point
from berkdyn.models.potential import (
    NEG_INFINITE,
    WeightedMeasure,
    energy,
    equilibrium,
    green,
    log_capacity,
    potential_value,
    simplex_grid_oracle,
    transfinite_diameter,
    tree_equilibrium,
)
from berkdyn.utils.errors import BaseInE, BasePointInSupport, EmptyInput, MixedTypes, TooLarge
from berkdyn.utils.sampling import random_disk_point, random_disk_set, random_pole, random_unimodular_mobius
from conftest import P, classical, zeta


def test_energy_and_potential_of_a_dirac(infinity, gauss):
    nu = WeightedMeasure.dirac(zeta(0, -1))
    assert energy(nu, infinity) == -1
    assert potential_value(nu, infinity, gauss) == 0
    assert potential_value(nu, infinity, zeta(0, -3)) == -1
    with pytest.raises(BasePointInSupport):
        energy(nu, zeta(0, -1))


def test_potential_of_classical_support(infinity):
    nu = WeightedMeasure.dirac(classical(0))
    assert energy(nu, infinity) == NEG_INFINITE
    assert potential_value(nu, infinity, classical(0)) == NEG_INFINITE


def test_weighted_measure_validation(gauss):
    with pytest.raises(ValueError):
        WeightedMeasure((gauss,), (Fraction(1, 2),))
    with pytest.raises(ValueError):
        WeightedMeasure((gauss, gauss), (Fraction(1, 2), Fraction(1, 2)))


def test_ball_capacity(infinity):
    for twice in range(-6, 7):
        r = Fraction(twice, 2)
        assert log_capacity([zeta(0, r)], infinity) == r


def test_equilibrium_of_a_pair(infinity):
    result = equilibrium([zeta(0, -1), zeta(1, -1)], infinity)
    assert result.log_capacity == Fraction(-1, 2)
    assert result.measure.weights == (Fraction(1, 2), Fraction(1, 2))


def test_equilibrium_of_a_skew_pair(infinity):
    result = equilibrium([zeta(0, -1), zeta(1, -2)], infinity)
    assert result.log_capacity == Fraction(-2, 3)
    assert result.measure.weights == (Fraction(2, 3), Fraction(1, 3))
    assert result.energy == result.log_capacity


def test_nested_points_carry_no_mass(infinity, gauss):
    result = equilibrium([gauss, zeta(0, -2)], infinity)
    assert result.measure.weights == (Fraction(1), Fraction(0))
    assert result.log_capacity == 0


def test_equilibrium_input_errors(infinity, gauss):
    with pytest.raises(EmptyInput):
        equilibrium([], infinity)
    with pytest.raises(MixedTypes):
        equilibrium([gauss, classical(0)], infinity)
    with pytest.raises(BaseInE):
        equilibrium([gauss, zeta(0, -1)], gauss)


def test_green_function(infinity, gauss):
    E = [zeta(0, -1), zeta(1, -1)]
    assert green(E, infinity, zeta(0, -1)) == 0
    assert green(E, infinity, gauss) == Fraction(1, 2)
    assert green(E, infinity, zeta(0, 2)) == Fraction(5, 2)


def test_potential_is_infinite_at_a_classical_pole():
    S0 = classical(0)
    nu = WeightedMeasure.dirac(zeta(1, 0))
    assert potential_value(nu, S0, S0) == math.inf


def test_green_is_nonnegative_for_pole_at_infinity(rng, infinity):
    for _ in range(30):
        E = random_disk_set(rng, P, 5)
        result = equilibrium(E, infinity)
        for _ in range(10):
            S = random_disk_point(rng, P)
            assert green(E, infinity, S, result) >= 0


def test_transfinite_diameter_of_a_pair():
    E = [zeta(0, -1), zeta(1, -1)]
    for n in (2, 4, 6, 8):
        assert transfinite_diameter(E, n) == -Fraction(n // 2 - 1, n - 1)
    assert transfinite_diameter(E, 3) == Fraction(-1, 3)


def test_transfinite_diameter_edge_cases():
    assert transfinite_diameter([zeta(0, -1)], 5) == -1
    assert transfinite_diameter([classical(0)], 2) == NEG_INFINITE
    with pytest.raises(ValueError):
        transfinite_diameter([zeta(0, -1)], 1)
    with pytest.raises(TooLarge):
        transfinite_diameter([zeta(0, -1), zeta(1, -1), zeta(2, -1)], 4, budget=10)


def test_transfinite_diameter_bounds_capacity_from_above(rng, infinity):
    for _ in range(15):
        E = random_disk_set(rng, P, 3)
        assert transfinite_diameter(E, 6) >= log_capacity(E, infinity)


def test_frostman_conditions(rng):
    checked = 0
    while checked < 25:
        E = random_disk_set(rng, P, 5)
        S0 = random_pole(rng, P, E)
        if any(compare(S0, x) is Order.LESS for x in E):
            continue
        result = equilibrium(E, S0)
        V = result.log_capacity
        for S, w in result.measure.items():
            assert potential_value(result.measure, S0, S) == V
        for S in E:
            assert potential_value(result.measure, S0, S) >= V
        checked += 1


def test_equilibrium_transports_under_unimodular_mobius(rng):
    checked = 0
    while checked < 20:
        E = random_disk_set(rng, P, 5)
        S0 = random_disk_point(rng, P)
        if S0 in E or any(compare(S0, x) is Order.LESS for x in E):
            continue
        M = random_unimodular_mobius(rng, P)
        result = equilibrium(E, S0)
        moved = equilibrium([image_point(M, x) for x in E], image_point(M, S0))
        assert moved.log_capacity == result.log_capacity
        for x in E:
            assert moved.measure.weight_of(image_point(M, x)) == result.measure.weight_of(x)
        checked += 1



def test_capacity_is_monotone(rng, infinity):
    for _ in range(30):
        F = random_disk_set(rng, P, 6, min_size=2)
        E = F[: int(rng.integers(1, len(F)))]
        assert log_capacity(E, infinity) <= log_capacity(F, infinity)


def test_tree_equilibrium_matches_linear_solver(rng, infinity):
    for _ in range(30):
        E = random_disk_set(rng, P, 7)
        linear = equilibrium(E, infinity)
        tree = tree_equilibrium(E)
        assert tree.log_capacity == linear.log_capacity
        assert tree.measure.weights == linear.measure.weights


def test_large_sets_use_the_tree(rng, infinity):
    E = random_disk_set(rng, P, 14, min_size=12)
    result = equilibrium(E, infinity)
    assert sum(result.measure.weights) == 1
    for S, _ in result.measure.items():
        assert potential_value(result.measure, infinity, S) == result.log_capacity


def test_simplex_grid_oracle(infinity):
    weights, value = simplex_grid_oracle([zeta(0, -1), zeta(1, -2)], infinity)
    assert value == pytest.approx(-2 / 3)
    assert weights == pytest.approx([2 / 3, 1 / 3])


def test_simplex_grid_oracle_never_beats_exact(rng, infinity):
    for _ in range(10):
        E = random_disk_set(rng, P, 4)
        _, value = simplex_grid_oracle(E, infinity, resolution=12)
        assert value <= float(log_capacity(E, infinity)) + 1e-9
