"""
Lower capacity density, Pommerenke nets and Hoelder certificates for Green
functions.

For a finite set E of disk points both sides of Cap_oo(E n B(S,r)) >= c r are
step functions of r whose jumps sit at the hull-tree radii above S: for r in
[diam N_k, diam N_{k+1}) the ball B(S, r) meets E exactly in the inputs below
N_k, where N_0 = S, N_1, ... is the ancestor chain of S in the hull tree. The
ratio Cap/r is therefore smallest at the left limits r -> diam N_{k+1}, and
scanning those limits is exhaustive.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from berkdyn.models.annuli import bounded_moduli_constant
from berkdyn.models.berkpoints import (
    BerkPoint,
    HullTree,
    Order,
    compare,
    gauss_point,
    hsia_inf,
    hull_tree,
    join,
    leq,
    wedge,
)
from berkdyn.models.kernels import chordal_ball_top, hsia_gauss
from berkdyn.models.potential import (
    equilibrium,
    potential_on_hull,
    potential_value,
    subtree_log_capacities,
)
from berkdyn.models.scalars import LogMag
from berkdyn.utils.errors import (
    BadScale,
    BerkovichError,
    ClassicalPoint,
    NoDensity,
    ShellEmpty,
    TooFew,
    TypeIPresent,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DensityWitness:
    point: BerkPoint
    radius: LogMag  # left limit of the critical radius
    cap_log: Fraction


@dataclass(frozen=True)
class DensityReport:
    best_c_log: Fraction
    witnesses: Tuple[DensityWitness, ...]
    c_E_log: Union[Fraction, float]
    theorem_lcd_margin: Union[Fraction, float]


def _disk_points(E: Sequence[BerkPoint]) -> List[BerkPoint]:
    unique = list(dict.fromkeys(E))
    if any(x.is_classical for x in unique):
        raise TypeIPresent("density needs disk points only")
    return unique


def lcd_constant(E: Sequence[BerkPoint]) -> DensityReport:
    """
    Largest c (in log_p units) with Cap_oo(E n B(S,r)) >= c r over the critical grid

    Args:
        E: at least two disk points

    Returns:
        DensityReport with witnesses attaining the minimum
    """
    unique = _disk_points(E)
    if len(unique) < 2:
        raise TooFew("density needs at least two points", {"count": len(unique)})
    tree = hull_tree(unique)
    caps = subtree_log_capacities(tree)

    best: Optional[Fraction] = None
    witnesses: List[DensityWitness] = []
    for i in tree.input_indices():
        chain = tree.ancestors(i)
        for below, above in zip(chain, chain[1:]):
            r_log = tree.point(above).logr
            value = caps[below] - r_log
            if best is None or value < best:
                best, witnesses = value, []
            if value == best:
                witnesses.append(DensityWitness(tree.point(i), LogMag.of(r_log), caps[below]))

    c_E = bounded_moduli_constant(unique)
    return DensityReport(best, tuple(witnesses), c_E, best + 2 * c_E)


@dataclass
class PommerenkeNet:
    base: BerkPoint
    r_log: Fraction
    s_log: Fraction
    depth: int
    c_E_log: Fraction
    points: Dict[str, BerkPoint] = field(default_factory=dict)

    def level(self, j: int) -> List[Tuple[str, BerkPoint]]:
        return sorted((w, S) for w, S in self.points.items() if len(w) == j)

    def separation_violations(self) -> List[Tuple[str, str]]:
        """Word pairs breaking |a_w - a_w'|_oo > s^(m+1) r, m the common prefix length"""
        bad = []
        for j in range(1, self.depth + 1):
            for (w, S), (u, T) in combinations(self.level(j), 2):
                m = next((k for k in range(j) if w[k] != u[k]), j)
                if hsia_inf(S, T).exponent <= (m + 1) * self.s_log + self.r_log:
                    bad.append((w, u))
        return bad

    def discrete_energy(self, j: int) -> Fraction:
        """Mean of log_p |a_w - a_w'|_oo over ordered pairs of distinct words of length j"""
        words = self.level(j)
        total = sum(hsia_inf(S, T).exponent for (_, S), (_, T) in combinations(words, 2))
        n = len(words)
        return 2 * total / (n * (n - 1))

    def product_bound(self, j: int) -> Fraction:
        n = 2**j
        exponent = sum((m + 1) * 2 ** (j - m - 1) for m in range(j))
        return self.s_log * Fraction(exponent, n - 1) + self.r_log

    def net_log_capacity(self, j: int) -> Fraction:
        distinct = list(dict.fromkeys(S for _, S in self.level(j)))
        return equilibrium(distinct, BerkPoint.infinity(self.base.p)).log_capacity


def capacity_exponent(j: int) -> Fraction:
    """sum_{m<j} (m+1) / 2^(m+1); tends to 2"""
    return sum((Fraction(m + 1, 2 ** (m + 1)) for m in range(j)), Fraction(0))


def shell_pick(E: Sequence[BerkPoint], S: BerkPoint, low: Fraction, high: Fraction) -> BerkPoint:
    """Largest point x of E with low <= log_p [x, S]_oo <= high"""
    shell = []
    for x in E:
        d = hsia_inf(x, S).exponent
        if low <= d <= high:
            shell.append((-x.logr, d, repr(x), x))
    if not shell:
        raise ShellEmpty("no point of E in the selection shell", {"S": S, "low": low, "high": high})
    return min(shell)[3]


def pommerenke_net(
    E: Sequence[BerkPoint], S0: BerkPoint, r_log: Fraction, s_log: Fraction, depth: int
) -> PommerenkeNet:
    """
    Binary net a_w in E n B(S0, r) with a_{w0} = a_w and a_{w1} = [a_w]_{|w|}

    Args:
        E: disk points containing S0
        S0: base point
        r_log: log_p r, strictly between diam S0 and diam_oo E
        s_log: log_p s, below -c_E
        depth: word length

    Returns:
        PommerenkeNet
    """
    unique = _disk_points(E)
    if S0 not in unique:
        raise BadScale("base point must belong to E", {"S0": S0})
    if depth < 1:
        raise BadScale("depth must be positive", {"depth": depth})
    c_E = bounded_moduli_constant(unique)
    r_log, s_log = Fraction(r_log), Fraction(s_log)
    if s_log >= -c_E:
        raise BadScale("s must be below exp(-c_E)", {"s_log": s_log, "c_E": c_E})
    top = join(unique).logr
    if not S0.logr < r_log < top:
        raise BadScale("r outside (diam S0, diam E)", {"r_log": r_log, "diam_S0": S0.logr, "diam_E": top})

    def select(S: BerkPoint, j: int) -> BerkPoint:
        high = j * s_log + r_log
        if S.logr >= high - c_E:
            return S
        return shell_pick(unique, S, high - c_E, high)

    net = PommerenkeNet(S0, r_log, s_log, depth, c_E, {"": S0})
    for j in range(depth):
        for bits in product("01", repeat=j):
            w = "".join(bits)
            a = net.points[w]
            net.points[w + "0"] = a
            net.points[w + "1"] = select(a, j)
    return net


def _gauss_offset(S0: BerkPoint) -> Fraction:
    # 2 log_p(diam(S_g ^ S0) / diam S0); zero for the pole at infinity
    if S0.is_infinity:
        return Fraction(0)
    if S0.is_classical:
        raise ClassicalPoint("base point must be hyperbolic", {"S0": S0})
    return 2 * (wedge(gauss_point(S0.p), S0).logr - S0.logr)


def c0_lower_log(E: Sequence[BerkPoint], S0: BerkPoint, report: DensityReport) -> Fraction:
    """log_p of the lower bound c * (inf_E [., oo]_g)^2 for Cap_{S0}(E n B(a,t))/t"""
    if S0.is_infinity:
        return report.best_c_log
    infinity = BerkPoint.infinity(S0.p)
    inf_log = min(hsia_gauss(x, infinity).exponent for x in E)
    return report.best_c_log + 2 * inf_log


def holder_exponent(
    E: Sequence[BerkPoint],
    S0: BerkPoint,
    R_log: Fraction,
    r_log: Fraction,
    report: Optional[DensityReport] = None,
) -> Fraction:
    """
    The Hoelder exponent 1 / (2 log(diam(S_g ^ S0)/diam S0) + log(R/c0))

    Args:
        E: disk points
        S0: pole (hyperbolic, or infinity)
        R_log: log_p R
        r_log: log_p r, with R_log > r_log > 0
        report: precomputed density report for E

    Returns:
        Positive rational exponent in log_p units
    """
    R_log, r_log = Fraction(R_log), Fraction(r_log)
    if not R_log > r_log > 0:
        raise BadScale("need R_log > r_log > 0", {"R_log": R_log, "r_log": r_log})
    if report is None:
        try:
            report = lcd_constant(E)
        except (TooFew, TypeIPresent) as e:
            raise NoDensity(f"no density report: {e.name}") from e
    c0 = c0_lower_log(E, S0, report)
    return 1 / (_gauss_offset(S0) + R_log - c0)


def choquet_lower_bound(ell: Fraction, R_log: Fraction, r_log: Fraction) -> Fraction:
    """Lower bound ell * log(R/r) for the Wiener-chain constant c(t)"""
    return ell * (Fraction(R_log) - Fraction(r_log))


def green_upper_bound(
    E: Sequence[BerkPoint], S0: BerkPoint, a: BerkPoint, t_log: Fraction, R_log: Fraction
) -> Fraction:
    """Upper bound for G_{S0, E n B(a,t)} at zeta(a, R t)"""
    local = [x for x in E if hsia_inf(x, a).exponent <= t_log]
    if not local:
        raise TooFew("E misses B(a, t)", {"a": a, "t_log": t_log})
    cap = equilibrium(local, S0).log_capacity
    return _gauss_offset(S0) + Fraction(R_log) - (cap - Fraction(t_log))


@dataclass(frozen=True)
class HolderSample:
    a: BerkPoint
    delta: LogMag
    G_value: Fraction


@dataclass(frozen=True)
class HoelderCertificate:
    alpha: Fraction
    delta0: LogMag
    constant: float
    samples: Tuple[HolderSample, ...]


def default_delta_grid() -> List[LogMag]:
    return [LogMag.of(-k) for k in range(1, 9)]


def _nodes_in_ball(tree: HullTree, top: BerkPoint) -> List[int]:
    inside, stack = [], [tree.root]
    while stack:
        i = stack.pop()
        order = compare(tree.point(i), top)
        if order in (Order.LESS, Order.EQUAL):
            sub = [i]
            while sub:
                k = sub.pop()
                inside.append(k)
                sub.extend(tree.children(k))
        elif order is Order.GREATER:
            stack.extend(tree.children(i))
    return inside


def holder_certify(
    E: Sequence[BerkPoint],
    S0: BerkPoint,
    alpha: Fraction,
    boundary_samples: Sequence[BerkPoint],
    delta_grid: Optional[Sequence[LogMag]] = None,
) -> HoelderCertificate:
    """
    Sup of G_{S0,E} / delta^alpha over chordal balls B_#(a, delta)

    Args:
        E: disk points
        S0: pole
        alpha: exponent (0 gives sup G)
        boundary_samples: classical points near the boundary of the pole's component
        delta_grid: radii; defaults to p^-1 ... p^-8

    Returns:
        HoelderCertificate; balls containing the pole are skipped
    """
    alpha = Fraction(alpha)
    grid = list(delta_grid) if delta_grid is not None else default_delta_grid()
    unique = _disk_points(E)
    p = unique[0].p
    result = equilibrium(unique, S0)
    V = result.log_capacity
    tree = hull_tree(unique)
    if S0.is_infinity:
        node_values = potential_on_hull(tree, result.measure)
    else:
        node_values = {i: potential_value(result.measure, S0, tree.point(i)) for i in range(len(tree))}

    samples: List[HolderSample] = []
    ratios: Dict[Fraction, float] = {}
    for a in boundary_samples:
        if a.is_infinity:
            continue
        for delta in grid:
            top = chordal_ball_top(a, delta)
            if top is None or (not S0.is_infinity and leq(S0, top)):
                continue
            G = potential_value(result.measure, S0, top) - V
            for i in _nodes_in_ball(tree, top):
                G = max(G, node_values[i] - V)
            samples.append(HolderSample(a, delta, G))
            ratio = float(G) * p ** float(-alpha * delta.exponent)
            ratios[delta.exponent] = max(ratios.get(delta.exponent, 0.0), ratio)

    constant = max(ratios.values(), default=0.0)
    delta0 = min(grid) if grid else LogMag.of(0)
    previous = -math.inf
    for d in sorted(ratios):
        if ratios[d] < previous:
            break
        delta0, previous = LogMag.of(d), ratios[d]
    return HoelderCertificate(alpha, delta0, constant, tuple(samples))


def run_density_report(E: Sequence[BerkPoint]) -> DensityReport:
    """lcd_constant with the logging wrapper used by the CLI"""
    try:
        report = lcd_constant(E)
        logger.info(f"Density on {len(E)} points: best_c_log={report.best_c_log}, c_E={report.c_E_log}")
        return report
    except BerkovichError as e:
        logger.error(f"Error computing density report: {str(e)}")
        raise
