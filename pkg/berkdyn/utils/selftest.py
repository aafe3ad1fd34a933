"""Desk-scale acceptance checks behind the `selftest` subcommand."""
import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Tuple

from berkdyn.models.annuli import bounded_moduli_constant
from berkdyn.models.berkpoints import BerkPoint, Order, compare, gauss_point, join, rho
from berkdyn.models.density import lcd_constant, pommerenke_net
from berkdyn.models.dynamics import (
    RationalMap,
    good_reduction_at,
    holder_experiment,
    image_point,
    quad_backward_cylinders,
    reduction_at,
    resultant_logmag,
    uniform_perfectness_experiment,
)
from berkdyn.models.kernels import chordal, gromov_product, hsia_gauss, hsia_rel
from berkdyn.models.potential import equilibrium, log_capacity, potential_value, transfinite_diameter
from berkdyn.models.scalars import PadicConfig
from berkdyn.utils.errors import BaseInE, BasePointInSupport
from berkdyn.utils.sampling import (
    make_rng,
    random_classical_point,
    random_disk_point,
    random_disk_set,
    random_pole,
    random_unimodular_mobius,
)

logger = logging.getLogger(__name__)


class SelfTestRunner:
    """Runs each check, logging a pass/fail marker, and collects a table"""

    def __init__(self, cfg: PadicConfig, seed: int = 0):
        self.cfg = cfg
        self.seed = seed
        self.checks: List[Tuple[str, Callable[[], bool]]] = [
            ("ball_capacity", self.check_ball_capacity),
            ("transfinite_pair", self.check_transfinite_pair),
            ("equilibrium_examples", self.check_equilibrium_examples),
            ("frostman", self.check_frostman),
            ("lcd_theorem", self.check_lcd_theorem),
            ("pommerenke_net", self.check_pommerenke_net),
            ("kernel_invariance", self.check_kernel_invariance),
            ("strong_triangle", self.check_strong_triangle),
            ("dichotomy", self.check_dichotomy),
            ("cylinder_invariance", self.check_cylinder_invariance),
            ("lipschitz", self.check_lipschitz),
            ("holder_trend", self.check_holder_trend),
        ]

    def check_ball_capacity(self) -> bool:
        for p in (3, 5, 7):
            for twice in range(-6, 7):
                r = Fraction(twice, 2)
                if log_capacity([BerkPoint.disk(0, r, p)], BerkPoint.infinity(p)) != r:
                    return False
        return True

    def check_transfinite_pair(self) -> bool:
        p = self.cfg.p
        E = [BerkPoint.disk(0, -1, p), BerkPoint.disk(1, -1, p)]
        values = [transfinite_diameter(E, n) for n in range(2, 9, 2)]
        expected = [-Fraction(n // 2 - 1, n - 1) for n in range(2, 9, 2)]
        return values == expected and all(v >= Fraction(-1, 2) for v in values)

    def check_equilibrium_examples(self) -> bool:
        p = self.cfg.p
        infinity = BerkPoint.infinity(p)
        pair = equilibrium([BerkPoint.disk(0, -1, p), BerkPoint.disk(1, -1, p)], infinity)
        skew = equilibrium([BerkPoint.disk(0, -1, p), BerkPoint.disk(1, -2, p)], infinity)
        return (
            pair.log_capacity == Fraction(-1, 2)
            and pair.measure.weights == (Fraction(1, 2), Fraction(1, 2))
            and skew.log_capacity == Fraction(-2, 3)
        )

    def check_frostman(self) -> bool:
        rng = make_rng(self.seed)
        p = self.cfg.p
        for _ in range(20):
            E = random_disk_set(rng, p, 5)
            S0 = random_pole(rng, p, E)
            if any(compare(S0, x) is Order.LESS for x in E):
                continue
            try:
                result = equilibrium(E, S0)
            except (BaseInE, BasePointInSupport) as e:
                logger.debug(f"Skipping sample with pole {S0}: {str(e)}")
                continue
            for S, w in result.measure.items():
                if potential_value(result.measure, S0, S) != result.log_capacity:
                    return False
            for S in E:
                if potential_value(result.measure, S0, S) < result.log_capacity:
                    return False
        return True

    def check_lcd_theorem(self) -> bool:
        rng = make_rng(self.seed + 1)
        p = self.cfg.p
        for _ in range(20):
            E = random_disk_set(rng, p, 6, min_size=2)
            report = lcd_constant(E)
            if report.best_c_log < -2 * report.c_E_log or report.c_E_log > -report.best_c_log:
                return False
        return True

    def check_pommerenke_net(self) -> bool:
        rng = make_rng(self.seed + 4)
        p = self.cfg.p
        for _ in range(20):
            E = random_disk_set(rng, p, 6, min_size=2)
            S0 = min(E, key=lambda x: x.logr)
            r_log = (S0.logr + join(E).logr) / 2
            s_log = -bounded_moduli_constant(E) - Fraction(1, 2)
            net = pommerenke_net(E, S0, r_log, s_log, 6)
            if net.separation_violations():
                return False
            if any(net.discrete_energy(j) < net.product_bound(j) for j in range(1, 7)):
                return False
        return True

    def check_kernel_invariance(self) -> bool:
        rng = make_rng(self.seed + 5)
        p = self.cfg.p
        for _ in range(200):
            S, T, S0 = (random_disk_point(rng, p) for _ in range(3))
            if gromov_product(S, T, S0) != (rho(S0, S) + rho(S0, T) - rho(S, T)) / 2:
                return False
        for _ in range(20):
            M = random_unimodular_mobius(rng, p)
            S, T, S0 = (random_disk_point(rng, p) for _ in range(3))
            if hsia_rel(image_point(M, S), image_point(M, T), image_point(M, S0)) != hsia_rel(S, T, S0):
                return False
        return True


    def check_strong_triangle(self) -> bool:
        rng = make_rng(self.seed + 2)
        p = self.cfg.p
        points = [random_disk_point(rng, p) for _ in range(12)]
        for x, y, z in combinations(points, 3):
            if hsia_gauss(x, z) > max(hsia_gauss(x, y), hsia_gauss(y, z)):
                return False
        return True

    def check_dichotomy(self) -> bool:
        p = self.cfg.p
        square = RationalMap.polynomial((0, 0, 1), p)
        if not good_reduction_at(square, gauss_point(p)) or reduction_at(square, gauss_point(p)).degree != 2:
            return False
        if p == 2:
            return True
        table = uniform_perfectness_experiment(Fraction(-1, p * p), 4, self.cfg)
        return all(row.c_E_log == 1 for row in table.rows)

    def check_cylinder_invariance(self) -> bool:
        if self.cfg.p == 2:
            return True
        tree = quad_backward_cylinders(Fraction(-1, self.cfg.p**2), 5, self.cfg)
        for w, D in tree.cylinders.items():
            if w and image_point(tree.map, D) != tree.cylinders[tree.image_parent(w)]:
                return False
        return True

    def check_lipschitz(self) -> bool:
        rng = make_rng(self.seed + 3)
        p = self.cfg.p
        f = RationalMap.polynomial((Fraction(-1, p * p), 0, 1), p)
        res = resultant_logmag(f)
        for _ in range(100):
            z, w = random_classical_point(rng, p), random_classical_point(rng, p)
            if z == w:
                continue
            lhs = chordal(f.evaluate(z), f.evaluate(w))
            rhs = chordal(z, w)
            if not lhs.is_bottom and lhs.exponent > rhs.exponent - res:
                return False
        return True

    def check_holder_trend(self) -> bool:
        if self.cfg.p == 2:
            return True
        rows = holder_experiment(Fraction(-1, self.cfg.p**2), [6, 8, 10], self.cfg)
        if not all(math.isfinite(row.constant) for row in rows):
            return False
        return all(later.constant <= 1.05 * earlier.constant for earlier, later in zip(rows, rows[1:]))


    def run(self) -> Dict[str, object]:
        results = []
        for name, check in self.checks:
            try:
                ok = check()
            except Exception as e:
                logger.error(f"Error running check {name}: {str(e)}")
                ok = False
            logger.info(f"{'✅' if ok else '❌'} {name}")
            results.append({"name": name, "passed": ok})
        passed = sum(1 for r in results if r["passed"])
        return {"passed": passed, "failed": len(results) - passed, "checks": results}
