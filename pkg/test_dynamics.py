import math
from fractions import Fraction

import numpy as np
import pytest

from berkdyn.models import dynamics
from berkdyn.models.annuli import brute_force_moduli_constant
from berkdyn.models.berkpoints import BerkPoint, Direction, leq
from berkdyn.models.dynamics import (
    RationalMap,
    Verdict,
    default_candidates,
    directional_degree,
    dump_gnuplot,
    fiber_multiplicities,
    find_good_reduction,
    good_reduction_at,
    holder_experiment,
    image_point,
    invert,
    quad_backward_cylinders,
    reduction_at,
    resultant_logmag,
    subsample_words,
    uniform_perfectness_experiment,
)
from berkdyn.models.kernels import chordal
from berkdyn.models.scalars import PadicConfig
from berkdyn.utils.errors import (
    DegenerateMap,
    EvenPrime,
    IrrationalDirection,
    NonEscapingParameter,
    NonResidueBranch,
    NotFixed,
    OddValuation,
)
from berkdyn.utils.sampling import random_classical_point, random_disk_point, random_polynomial_map
from conftest import P, classical, zeta

SQUARE = RationalMap.polynomial((0, 0, 1), P)
CANTOR = RationalMap.quadratic(Fraction(-1, 25), P)


def test_resultant_of_normalized_lift():
    assert resultant_logmag(SQUARE) == 0
    assert resultant_logmag(RationalMap.polynomial((0, 0, 5), P)) == -2
    assert resultant_logmag(CANTOR) == -8
    assert SQUARE.res_log() == 0


def test_degenerate_maps():
    with pytest.raises(DegenerateMap):
        RationalMap((0, 1), (0, 1), P)
    with pytest.raises(DegenerateMap):
        RationalMap((1,), (1,), P)
    with pytest.raises(DegenerateMap):
        RationalMap((0, 1), (0,), P)


def test_evaluate_classical_points(infinity):
    assert SQUARE.evaluate(classical("1/5")) == classical("1/25")
    assert SQUARE.evaluate(infinity).is_infinity
    assert RationalMap.mobius(0, 1, 1, 0, P).evaluate(classical(0)).is_infinity
    assert RationalMap.mobius(0, 1, 1, 0, P).evaluate(infinity) == classical(0)


def test_image_point_examples(gauss):
    assert image_point(SQUARE, zeta(0, -1)) == zeta(0, -2)
    assert image_point(SQUARE, gauss) == gauss
    assert image_point(RationalMap.polynomial((0, 0, 5), P), gauss) == zeta(0, -1)
    assert image_point(CANTOR, zeta("1/5", 0)) == zeta(0, 1)


def test_image_point_through_a_pole(gauss):
    reciprocal = RationalMap.mobius(0, 1, 1, 0, P)
    assert image_point(reciprocal, gauss) == gauss
    assert image_point(reciprocal, zeta(0, -1)) == zeta(0, 1)


def test_invert():
    assert invert(zeta(0, -1)) == zeta(0, 1)
    assert invert(zeta("1/5", -1)) == zeta(5, -3)
    assert invert(classical(0)).is_infinity
    assert invert(BerkPoint.infinity(P)) == classical(0)


def test_compose():
    shift = RationalMap.polynomial((1, 1), P)
    composed = SQUARE.compose(shift)
    assert composed.num == (1, 2, 1)
    assert composed.degree == 2


def test_image_point_respects_composition(rng):
    for _ in range(40):
        f, g = random_polynomial_map(rng, P), random_polynomial_map(rng, P)
        S = random_disk_point(rng, P)
        assert image_point(f.compose(g), S) == image_point(f, image_point(g, S))


def test_reduction_examples(gauss):
    red = reduction_at(SQUARE, gauss)
    assert red.degree == 2
    assert red.num == (0, 0, 1)
    assert red.den == (1,)
    assert good_reduction_at(RationalMap.polynomial((0, 0, 5), P), zeta(0, 1))
    assert not good_reduction_at(CANTOR, gauss)
    with pytest.raises(NotFixed):
        reduction_at(CANTOR, gauss)


def test_fiber_multiplicities_sum_to_degree(gauss):
    red = reduction_at(SQUARE, gauss)
    for value in (0, 1, 4, None):
        assert sum(fiber_multiplicities(red, value).values()) == 2
    assert fiber_multiplicities(red, 2) == {}


def test_directional_degrees(gauss, infinity):
    assert directional_degree(SQUARE, gauss, Direction(gauss, zeta(0, -1))) == 2
    assert directional_degree(SQUARE, gauss, Direction(gauss, zeta(1, -1))) == 1
    assert directional_degree(SQUARE, gauss, Direction(gauss, infinity)) == 2
    S = zeta(0, Fraction(1, 2))
    with pytest.raises(IrrationalDirection):
        directional_degree(SQUARE, S, Direction(S, zeta(0, -1)))


def test_detector_finds_good_reduction(gauss):
    verdict = find_good_reduction(SQUARE)
    assert verdict.verdict is Verdict.FOUND
    assert verdict.point == gauss
    assert gauss in default_candidates(P)


def test_detector_reports_cantor_julia_sets():
    candidates = default_candidates(P)
    verdict = find_good_reduction(CANTOR, candidates)
    assert verdict.verdict is Verdict.NO_CANDIDATE_FOUND
    assert verdict.point is None
    assert verdict.checked == len(candidates)


def test_lipschitz_bound(rng):
    res = resultant_logmag(CANTOR)
    for _ in range(200):
        z, w = random_classical_point(rng, P), random_classical_point(rng, P)
        if z == w:
            continue
        lhs = chordal(CANTOR.evaluate(z), CANTOR.evaluate(w))
        rhs = chordal(z, w)
        assert lhs.is_bottom or lhs.exponent <= rhs.exponent - res


def test_first_cylinder_levels(cfg):
    tree = quad_backward_cylinders(Fraction(-1, 25), 2, cfg)
    assert tree.cylinders[""] == zeta(0, 1)
    assert tree.tops(1) == [zeta("1/5", 0), zeta("-1/5", 0)]
    assert len(tree.level(2)) == 4
    assert all(D.logr == -1 for D in tree.tops(2))
    assert tree.children("0") == ["00", "01"]


def test_cylinder_invariance_and_nesting(cfg):
    tree = quad_backward_cylinders(Fraction(-1, 25), 8, cfg)
    assert len(tree.level(8)) == 256
    for w, D in tree.cylinders.items():
        if not w:
            continue
        assert image_point(tree.map, D) == tree.cylinders[tree.image_parent(w)]
        assert leq(D, tree.cylinders[tree.nest_parent(w)])


def test_cylinders_do_not_depend_on_working_precision():
    low = PadicConfig(p=P, working_precision=32)
    high = PadicConfig(p=P, working_precision=64)
    c = Fraction(-1, 25)
    assert quad_backward_cylinders(c, 7, low).cylinders == quad_backward_cylinders(c, 7, high).cylinders
    assert uniform_perfectness_experiment(c, 5, low) == uniform_perfectness_experiment(c, 5, high)



def test_cylinder_parameter_errors(cfg):
    with pytest.raises(NonResidueBranch):
        quad_backward_cylinders(Fraction(2, 25), 2, cfg)
    with pytest.raises(OddValuation):
        quad_backward_cylinders(Fraction(1, 5), 2, cfg)
    with pytest.raises(NonEscapingParameter):
        quad_backward_cylinders(Fraction(1), 2, cfg)
    with pytest.raises(NonEscapingParameter):
        quad_backward_cylinders(Fraction(0), 2, cfg)
    with pytest.raises(EvenPrime):
        quad_backward_cylinders(Fraction(1, 4), 2, PadicConfig(p=2))


def test_uniform_perfectness_experiment(cfg, gauss):
    table = uniform_perfectness_experiment(Fraction(-1, 25), 10, cfg, point_cap=1024)
    assert not good_reduction_at(CANTOR, gauss)
    assert table.good_reduction is False
    assert [row.n for row in table.rows] == list(range(1, 11))
    assert [row.points for row in table.rows] == [2**n for n in range(1, 11)]
    assert all(row.c_E_log == 1 for row in table.rows)
    assert all(row.best_c_log >= -2 * row.c_E_log for row in table.rows)

    tree = quad_backward_cylinders(Fraction(-1, 25), 4, cfg)
    for n in (1, 2, 3, 4):
        assert brute_force_moduli_constant(tree.tops(n)) == 1


def test_experiment_dichotomy_row(cfg):
    for c in (Fraction(0), Fraction(1)):
        table = uniform_perfectness_experiment(c, 5, cfg)
        assert table.good_reduction
        assert len(table.rows) == 1
        row = table.rows[0]
        assert (row.n, row.points, row.c_E_log, row.best_c_log) == (0, 1, 0, None)


def test_experiment_reports_the_reduction_verdict(cfg, gauss, monkeypatch):
    seen = []

    def verdict(f, S):
        seen.append(S)
        return True

    monkeypatch.setattr(dynamics, "good_reduction_at", verdict)
    table = uniform_perfectness_experiment(Fraction(-1, 25), 2, cfg)
    assert table.good_reduction is True
    assert seen == [gauss]



def test_subsample_words():
    words = [(format(i, "04b"), None) for i in range(10)]
    picked = subsample_words(words, 4)
    assert [w for w, _ in picked] == ["0000", "0011", "0110", "1001"]
    assert subsample_words(words, 20) == sorted(words)


def test_holder_experiment(cfg):
    rows = holder_experiment(Fraction(-1, 25), [6, 8, 10], cfg)
    assert [row.n for row in rows] == [6, 8, 10]
    assert [row.alpha for row in rows] == [Fraction(32, 127), Fraction(128, 511), Fraction(512, 2047)]
    assert all(math.isfinite(row.constant) and row.constant > 0 for row in rows)
    for earlier, later in zip(rows, rows[1:]):
        assert later.constant <= 1.05 * earlier.constant


def test_dump_gnuplot(cfg, tmp_path):
    table = uniform_perfectness_experiment(Fraction(-1, 25), 3, cfg)
    path = tmp_path / "cE.dat"
    dump_gnuplot(table, str(path))
    data = np.loadtxt(path)
    assert data.shape == (3, 3)
    assert list(data[:, 1]) == [1.0, 1.0, 1.0]
