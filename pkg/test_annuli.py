from fractions import Fraction

import pytest

from berkdyn.models.annuli import (
    INFINITE,
    Annulus,
    bounded_moduli_constant,
    brute_force_moduli_constant,
    modulus,
    separates,
)
from berkdyn.models.berkpoints import interval_point, rho
from berkdyn.models.dynamics import image_point
from berkdyn.utils.errors import DegenerateAnnulus, EmptyInput
from berkdyn.utils.sampling import random_disk_point, random_disk_set, random_unimodular_mobius
from conftest import P, classical, zeta


def test_modulus_is_hyperbolic_length(gauss):
    assert modulus(Annulus(zeta(0, -2), gauss)) == 2
    assert modulus(Annulus(zeta(0, -1), zeta(1, -1))) == 2


def test_annulus_membership(gauss):
    A = Annulus(zeta(0, -3), gauss)
    assert A.contains(zeta(0, -2))
    assert A.contains(zeta(5, -2))
    assert not A.contains(zeta(0, -3))
    assert not A.contains(zeta(1, -1))
    assert not A.contains(zeta(0, -4))


def test_separates(gauss):
    A = Annulus(zeta(0, -2), gauss)
    assert separates(A, [zeta(0, -2), zeta(1, -1)])
    assert not separates(A, [zeta(0, -3)])
    assert not separates(A, [zeta(0, -3), zeta(5, -1), zeta(1, -1)])


def test_degenerate_annulus(gauss):
    with pytest.raises(DegenerateAnnulus):
        Annulus(gauss, gauss)
    with pytest.raises(DegenerateAnnulus):
        Annulus(classical(0), gauss)


def test_moduli_constant_examples(gauss):
    assert bounded_moduli_constant([zeta(0, 0), zeta(0, -2)]) == 2
    assert bounded_moduli_constant([zeta(0, -1), zeta(1, -1)]) == 1
    assert bounded_moduli_constant([gauss]) == 0
    assert bounded_moduli_constant([gauss, gauss]) == 0
    assert bounded_moduli_constant([classical(0), classical(1)]) == INFINITE
    with pytest.raises(EmptyInput):
        bounded_moduli_constant([])


def test_chart_free_joins_root_edges():
    E = [zeta(0, -1), zeta(1, -1)]
    assert bounded_moduli_constant(E, chart_free=True) == 2
    assert brute_force_moduli_constant(E, chart_free=True) == 2
    assert brute_force_moduli_constant(E) == 1


def test_matches_brute_force(rng):
    for _ in range(30):
        E = random_disk_set(rng, P, 5)
        assert bounded_moduli_constant(E) == brute_force_moduli_constant(E)


def test_refinement_along_hull_never_increases(rng):
    for _ in range(30):
        E = random_disk_set(rng, P, 5, min_size=2)
        S, T = E[0], E[1]
        mid = interval_point(S, T, rho(S, T) * Fraction(int(rng.integers(1, 4)), 4))
        assert bounded_moduli_constant(E + [mid]) <= bounded_moduli_constant(E)


def test_moduli_invariant_under_unimodular_mobius(rng):
    for _ in range(20):
        M = random_unimodular_mobius(rng, P)
        S, T = random_disk_point(rng, P), random_disk_point(rng, P)
        if S == T:
            continue
        assert modulus(Annulus(image_point(M, S), image_point(M, T))) == modulus(Annulus(S, T))


def test_chart_free_constant_invariant_under_unimodular_mobius(rng):
    for _ in range(20):
        M = random_unimodular_mobius(rng, P)
        E = random_disk_set(rng, P, 5, min_size=2)
        moved = [image_point(M, x) for x in E]
        assert bounded_moduli_constant(moved, chart_free=True) == bounded_moduli_constant(E, chart_free=True)
