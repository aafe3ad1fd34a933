"""
Energies, equilibrium measures, capacities, transfinite diameters, potentials
and Green functions for finitely supported measures.

Everything is exact and in log_p units. A capacity-zero situation is reported
as NEG_INFINITE, never as an exception.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Matrix, Rational

from berkdyn.models.berkpoints import BerkPoint, HullTree, hsia_inf, hull_tree
from berkdyn.models.kernels import hsia_rel
from berkdyn.utils.errors import (
    BaseInE,
    BasePointInSupport,
    EmptyInput,
    InfinityOperand,
    MixedTypes,
    SolverFailure,
    TooLarge,
)

logger = logging.getLogger(__name__)

NEG_INFINITE = -math.inf
Value = Union[Fraction, float]

# above this size the pole-infinity equilibrium is read off the hull tree
LINEAR_SOLVER_LIMIT = 8


@dataclass(frozen=True)
class WeightedMeasure:
    support: Tuple[BerkPoint, ...]
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights differ in length")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support points must be distinct")
        if any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")

    @classmethod
    def dirac(cls, point: BerkPoint) -> "WeightedMeasure":
        return cls((point,), (Fraction(1),))

    @classmethod
    def uniform(cls, points: Sequence[BerkPoint]) -> "WeightedMeasure":
        return cls(tuple(points), tuple(Fraction(1, len(points)) for _ in points))

    def items(self) -> List[Tuple[BerkPoint, Fraction]]:
        return [(s, w) for s, w in zip(self.support, self.weights) if w > 0]

    def weight_of(self, point: BerkPoint) -> Fraction:
        return dict(zip(self.support, self.weights)).get(point, Fraction(0))


@dataclass(frozen=True)
class EquilibriumResult:
    measure: WeightedMeasure
    log_capacity: Fraction
    energy: Fraction
    base: BerkPoint


def log_kernel(S: BerkPoint, T: BerkPoint, S0: BerkPoint) -> Value:
    """log_p [S, T]_{S0}; TOP operands are rejected"""
    k = hsia_rel(S, T, S0)
    if k.is_top:
        raise BasePointInSupport("kernel is infinite at the base point", {"S": S, "T": T, "S0": S0})
    return NEG_INFINITE if k.is_bottom else k.exponent


def energy(nu: WeightedMeasure, S0: BerkPoint) -> Value:
    """I_{S0,nu} = sum_ij w_i w_j log_p [S_i, S_j]_{S0}"""
    if S0 in nu.support and nu.weight_of(S0) > 0:
        raise BasePointInSupport("base point carries mass", {"S0": S0})
    items = nu.items()
    total = Fraction(0)
    for S, w in items:
        for T, v in items:
            k = log_kernel(S, T, S0)
            if k == NEG_INFINITE:
                return NEG_INFINITE
            total += w * v * k
    return total


def potential_value(nu: WeightedMeasure, S0: BerkPoint, S: BerkPoint) -> Value:
    """p_{S0,nu}(S) = sum_i w_i log_p [S, S_i]_{S0}; +inf at a classical pole"""
    total = Fraction(0)
    low = high = False
    for T, w in nu.items():
        k = hsia_rel(S, T, S0)
        if k.is_top:
            high = True
        elif k.is_bottom:
            low = True
        else:
            total += w * k.exponent
    if low and high:
        raise ValueError("potential is undefined (both infinities present)")
    if high:
        return math.inf
    return NEG_INFINITE if low else total


def subtree_log_capacities(tree: HullTree) -> Dict[int, Fraction]:
    """log_p Cap_oo of the inputs below each node of a hull tree of disk points"""
    caps: Dict[int, Fraction] = {}
    for i in tree.postorder():
        L = tree.point(i).logr
        if tree.is_input(i):
            caps[i] = L
        else:
            s = sum(1 / (caps[c] - L) for c in tree.children(i))
            caps[i] = L + 1 / s
    return caps


def _tree_equilibrium(E: List[BerkPoint]) -> Tuple[Dict[BerkPoint, Fraction], Fraction]:
    tree = hull_tree(E)
    caps = subtree_log_capacities(tree)
    weights = {x: Fraction(0) for x in E}
    stack = [(tree.root, Fraction(1))]
    while stack:
        i, mass = stack.pop()
        if tree.is_input(i):
            weights[tree.point(i)] += mass
            continue
        L = tree.point(i).logr
        for c in tree.children(i):
            stack.append((c, mass * (caps[i] - L) / (caps[c] - L)))
    return weights, caps[tree.root]


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _solve_bordered(K: List[List[Fraction]], idx: Sequence[int]) -> Optional[Tuple[List[Fraction], Fraction]]:
    m = len(idx)
    rows = [[Rational(K[i][j].numerator, K[i][j].denominator) for j in idx] + [-1] for i in idx]
    rows.append([1] * m + [0])
    rhs = Matrix([0] * m + [1])
    try:
        sol = Matrix(rows).LUsolve(rhs)
    except ValueError:
        return None
    if not all(x.is_Rational for x in sol):
        return None
    values = [_to_fraction(x) for x in sol]
    return values[:m], values[m]


def _frostman_ok(K: List[List[Fraction]], idx: Sequence[int], w: Sequence[Fraction], V: Fraction) -> bool:
    active = dict(zip(idx, w))
    for i in range(len(K)):
        if i in active:
            continue
        if sum(wj * K[i][j] for j, wj in active.items()) > V:
            return False
    return True


def _linear_equilibrium(E: List[BerkPoint], S0: BerkPoint) -> Tuple[List[Fraction], Fraction]:
    n = len(E)
    K = [[log_kernel(S, T, S0) for T in E] for S in E]

    def accept(idx):
        solved = _solve_bordered(K, idx)
        if solved is None:
            return None
        w, V = solved
        if any(x < 0 for x in w) or not _frostman_ok(K, idx, w, V):
            return solved, False
        return solved, True

    idx = list(range(n))
    while idx:
        outcome = accept(idx)
        if outcome is None:
            break
        (w, V), ok = outcome
        if ok:
            return _spread(n, idx, w), V
        kept = [i for i, x in zip(idx, w) if x > 0]
        if len(kept) == len(idx) or not kept:
            break
        idx = kept

    logger.debug(f"Active-set descent stalled on {n} points, enumerating subsets")
    for size in range(n, 0, -1):
        for idx in combinations(range(n), size):
            outcome = accept(list(idx))
            if outcome is not None and outcome[1]:
                w, V = outcome[0]
                return _spread(n, idx, w), V
    raise SolverFailure("no active set satisfied the Frostman conditions", {"n": n})


def _spread(n: int, idx: Sequence[int], w: Sequence[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * n
    for i, x in zip(idx, w):
        out[i] = x
    return out


def _check_support(E: Sequence[BerkPoint], S0: BerkPoint) -> List[BerkPoint]:
    unique = list(dict.fromkeys(E))
    if not unique:
        raise EmptyInput("equilibrium of an empty set")
    classical = [x for x in unique if x.is_classical]
    if classical:
        raise MixedTypes("supports must consist of disk points", {"classical": classical[0]})
    if S0 in unique:
        raise BaseInE("base point lies in E", {"S0": S0})
    return unique


def equilibrium(E: Sequence[BerkPoint], S0: BerkPoint) -> EquilibriumResult:
    """
    Equilibrium measure and capacity of a finite set of disk points

    Args:
        E: disk points
        S0: pole (infinity or any point outside E)

    Returns:
        EquilibriumResult with Frostman equality on the positive-weight support
    """
    unique = _check_support(E, S0)
    if S0.is_infinity and len(unique) > LINEAR_SOLVER_LIMIT:
        by_point, V = _tree_equilibrium(unique)
        weights = [by_point[x] for x in unique]
    else:
        weights, V = _linear_equilibrium(unique, S0)
    return EquilibriumResult(WeightedMeasure(tuple(unique), tuple(weights)), V, V, S0)


def tree_equilibrium(E: Sequence[BerkPoint]) -> EquilibriumResult:
    """Pole-infinity equilibrium read off the hull tree"""
    if not E:
        raise EmptyInput("equilibrium of an empty set")
    infinity = BerkPoint.infinity(E[0].p)
    unique = _check_support(E, infinity)
    by_point, V = _tree_equilibrium(unique)
    return EquilibriumResult(WeightedMeasure(tuple(unique), tuple(by_point[x] for x in unique)), V, V, infinity)


def log_capacity(E: Sequence[BerkPoint], S0: BerkPoint) -> Fraction:
    return equilibrium(E, S0).log_capacity


def green(E: Sequence[BerkPoint], S0: BerkPoint, S: BerkPoint, result: Optional[EquilibriumResult] = None) -> Value:
    """G_{S0,E}(S) = p_{S0,nu}(S) - log_p Cap_{S0}(E)"""
    result = result or equilibrium(E, S0)
    value = potential_value(result.measure, S0, S)
    if value == math.inf:
        return value
    return value - result.log_capacity


def potential_on_hull(tree: HullTree, nu: WeightedMeasure) -> Dict[int, Fraction]:
    """Pole-infinity potential at every node of a hull tree containing the support"""
    below = {i: Fraction(0) for i in range(len(tree))}
    for S, w in nu.items():
        below[tree.index_of(S)] += w
    for i in tree.postorder():
        for c in tree.children(i):
            below[i] += below[c]
    values = {tree.root: below[tree.root] * tree.point(tree.root).logr}
    stack = [tree.root]
    while stack:
        i = stack.pop()
        L = tree.point(i).logr
        for c in tree.children(i):
            values[c] = values[i] - below[c] * (L - tree.point(c).logr)
            stack.append(c)
    return values


def _compositions(n: int, parts: int):
    for bars in combinations(range(n + parts - 1), parts - 1):
        prev, out = -1, []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(n + parts - 2 - prev)
        yield out


def transfinite_diameter(E: Sequence[BerkPoint], n: int, budget: int = 200000) -> Value:
    """
    log_p of the n-th diameter with pole infinity

    Args:
        E: finite points
        n: configuration size, at least 2
        budget: max number of weight compositions enumerated

    Returns:
        Exact rational, or NEG_INFINITE when every configuration repeats a classical point
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    unique = list(dict.fromkeys(E))
    if not unique:
        raise EmptyInput("transfinite diameter of an empty set")
    m = len(unique)
    count = comb(n + m - 1, m - 1)
    if count > budget:
        raise TooLarge("composition enumeration exceeds budget", {"count": count, "budget": budget})
    K: List[List[Value]] = []
    for S in unique:
        row = []
        for T in unique:
            if S.is_infinity or T.is_infinity:
                raise InfinityOperand("transfinite diameter uses the pole at infinity")
            k = hsia_inf(S, T)
            row.append(NEG_INFINITE if k.is_bottom else k.exponent)
        K.append(row)

    best: Value = NEG_INFINITE
    for ks in _compositions(n, m):
        total = Fraction(0)
        for e in range(m):
            if ks[e] == 0:
                continue
            for f in range(m):
                pairs = ks[e] * (ks[e] - 1) if e == f else ks[e] * ks[f]
                if pairs == 0:
                    continue
                if K[e][f] == NEG_INFINITE:
                    total = NEG_INFINITE
                    break
                total += pairs * K[e][f]
            if total == NEG_INFINITE:
                break
        if total != NEG_INFINITE:
            value = total / (n * (n - 1))
            if best == NEG_INFINITE or value > best:
                best = value
    return best


def simplex_grid_oracle(E: Sequence[BerkPoint], S0: BerkPoint, resolution: int = 24) -> Tuple[np.ndarray, float]:
    """Best energy over the simplex grid with step 1/resolution (float cross-check)"""
    unique = _check_support(E, S0)
    K = np.array([[float(log_kernel(S, T, S0)) for T in unique] for S in unique])
    grid = np.array(list(_compositions(resolution, len(unique))), dtype=float) / resolution
    energies = np.einsum("ki,ij,kj->k", grid, K, grid)
    best = int(np.argmax(energies))
    return grid[best], float(energies[best])
