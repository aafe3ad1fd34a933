from fractions import Fraction

import pytest

from berkdyn.models.density import (
    capacity_exponent,
    choquet_lower_bound,
    green_upper_bound,
    holder_certify,
    holder_exponent,
    lcd_constant,
    pommerenke_net,
    shell_pick,
)
from berkdyn.models.annuli import bounded_moduli_constant
from berkdyn.models.berkpoints import join
from berkdyn.models.scalars import LogMag
from berkdyn.utils.errors import BadScale, NoDensity, ShellEmpty, TooFew, TypeIPresent
from berkdyn.utils.sampling import make_rng, random_disk_set
from conftest import P, classical, zeta

# hull: gauss -> {zeta(0,-1) -> {zeta(0,-2) -> {0, 25}, 5}, 1}; c_E = 3
NET_SET = [zeta(0, -3), zeta(25, -3), zeta(5, -3), zeta(1, -3)]


def test_lcd_constant_example(gauss):
    report = lcd_constant([gauss, zeta(0, -2)])
    assert report.best_c_log == -2
    assert report.c_E_log == 2
    assert report.theorem_lcd_margin == 2
    witness = report.witnesses[0]
    assert witness.point == zeta(0, -2)
    assert witness.radius == LogMag.of(0)
    assert witness.cap_log == -2


def test_lcd_constant_rejects_bad_sets(gauss):
    with pytest.raises(TooFew):
        lcd_constant([gauss])
    with pytest.raises(TypeIPresent):
        lcd_constant([gauss, classical(0)])


def test_lcd_lower_bound_holds_on_random_sets(rng):
    for _ in range(40):
        E = random_disk_set(rng, P, 7, min_size=2)
        report = lcd_constant(E)
        assert report.theorem_lcd_margin >= 0
        assert report.witnesses


def test_capacity_exponent_tends_to_two():
    assert capacity_exponent(1) == Fraction(1, 2)
    assert capacity_exponent(2) == 1
    assert capacity_exponent(20) < 2
    assert 2 - capacity_exponent(20) < Fraction(1, 10**4)


def test_pommerenke_net_collapses_on_a_dense_cluster():
    S0 = NET_SET[0]
    net = pommerenke_net(NET_SET, S0, Fraction(-1, 2), Fraction(-4), 3)
    assert net.c_E_log == 3
    assert len(net.level(3)) == 8
    assert all(S == S0 for _, S in net.level(3))
    assert net.separation_violations() == []
    for j in range(1, 4):
        assert net.discrete_energy(j) > net.product_bound(j)
    assert net.net_log_capacity(2) == -3


def test_pommerenke_net_spreads_over_a_branching_set():
    E = [zeta(0, -2), zeta(5, -2), zeta(1, -1)]
    S0 = E[0]
    r_log, s_log = Fraction(-1, 2), Fraction(-3, 2)
    net = pommerenke_net(E, S0, r_log, s_log, 1)
    assert net.c_E_log == 1
    assert [S for _, S in net.level(1)] == [zeta(0, -2), zeta(5, -2)]
    assert net.separation_violations() == []
    assert net.discrete_energy(1) == -1
    assert net.product_bound(1) == -2
    # the equilibrium capacity of the net sits below the partial-sum estimate
    assert net.net_log_capacity(1) == Fraction(-3, 2)
    assert net.net_log_capacity(1) < s_log * capacity_exponent(1) + r_log


def test_pommerenke_nets_on_random_sets_are_separated():
    rng = make_rng(5)
    for _ in range(20):
        E = random_disk_set(rng, P, 6, min_size=2)
        S0 = min(E, key=lambda x: x.logr)
        top = join(E).logr
        r_log = (S0.logr + top) / 2
        s_log = -bounded_moduli_constant(E) - Fraction(1, 2)
        net = pommerenke_net(E, S0, r_log, s_log, 6)
        assert net.separation_violations() == []
        for j in range(1, 7):
            assert net.discrete_energy(j) >= net.product_bound(j)


def test_shell_pick_prefers_the_largest_point_and_reports_empty_shells():
    E = [zeta(0, -2), zeta(5, -2), zeta(1, -1)]
    assert shell_pick(E, zeta(0, -2), Fraction(-2), Fraction(0)) == zeta(1, -1)
    assert shell_pick(E, zeta(0, -2), Fraction(-3, 2), Fraction(-1, 2)) == zeta(5, -2)
    with pytest.raises(ShellEmpty):
        shell_pick(E, zeta(0, -2), Fraction(-7, 4), Fraction(-5, 4))


def test_pommerenke_net_scale_checks():
    S0 = NET_SET[0]
    with pytest.raises(BadScale):
        pommerenke_net(NET_SET, S0, Fraction(-1, 2), Fraction(-3), 2)
    with pytest.raises(BadScale):
        pommerenke_net(NET_SET, S0, Fraction(1), Fraction(-4), 2)
    with pytest.raises(BadScale):
        pommerenke_net(NET_SET, zeta(2, -3), Fraction(-1, 2), Fraction(-4), 2)
    with pytest.raises(BadScale):
        pommerenke_net(NET_SET, S0, Fraction(-1, 2), Fraction(-4), 0)


def test_holder_exponent_example(gauss):
    E = [zeta(0, -1), zeta(0, -3)]
    assert holder_exponent(E, gauss, 2, 1) == Fraction(1, 4)
    assert holder_exponent(E, gauss, 3, 1) < holder_exponent(E, gauss, 2, 1)


def test_holder_exponent_errors(gauss, infinity):
    E = [zeta(0, -1), zeta(0, -3)]
    with pytest.raises(BadScale):
        holder_exponent(E, gauss, 1, 1)
    with pytest.raises(BadScale):
        holder_exponent(E, gauss, 2, 0)
    with pytest.raises(NoDensity):
        holder_exponent([zeta(0, -1)], infinity, 2, 1)


def test_choquet_lower_bound():
    assert choquet_lower_bound(Fraction(1, 4), 2, 1) == Fraction(1, 4)
    assert choquet_lower_bound(Fraction(1, 2), 5, 1) == 2


def test_holder_certify_singleton(infinity):
    E = [zeta(0, -1)]
    on_ray = holder_certify(E, infinity, Fraction(1, 2), [classical(0)])
    assert on_ray.constant == 0.0
    assert len(on_ray.samples) == 8
    assert all(s.G_value == 0 for s in on_ray.samples)

    off_ray = holder_certify(E, infinity, 0, [classical(1)])
    assert off_ray.constant == 1.0
    assert all(s.G_value == 1 for s in off_ray.samples)


def test_holder_certify_skips_balls_around_the_pole():
    S0 = zeta(1, -3)
    cert = holder_certify([zeta(0, -1)], S0, 0, [classical(1)])
    assert len(cert.samples) == 5
    assert all(s.delta < LogMag.of(-3) for s in cert.samples)


def test_green_upper_bound(infinity):
    E = [zeta(0, -1), zeta(0, -3)]
    assert green_upper_bound(E, infinity, zeta(0, -3), -3, 2) == 2
    with pytest.raises(TooFew):
        green_upper_bound(E, infinity, zeta(1, -3), -3, 2)
