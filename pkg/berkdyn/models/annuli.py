"""Open Berkovich annuli, moduli, separation and the bounded-moduli constant c_E."""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Sequence, Union

from berkdyn.models.berkpoints import (
    BerkPoint,
    Order,
    compare,
    hull_tree,
    interval_point,
    rho,
    same_direction,
    wedge,
)
from berkdyn.utils.errors import DegenerateAnnulus, EmptyInput

INFINITE = math.inf


@dataclass(frozen=True)
class Annulus:
    """A(S, S') = U_{S->S'} intersected with U_{S'->S}"""

    inner: BerkPoint
    outer: BerkPoint

    def __post_init__(self):
        if self.inner.is_classical or self.outer.is_classical:
            raise DegenerateAnnulus("annulus endpoints must be hyperbolic", {"inner": self.inner, "outer": self.outer})
        if self.inner == self.outer:
            raise DegenerateAnnulus("annulus endpoints coincide", {"point": self.inner})

    def contains(self, X: BerkPoint) -> bool:
        if X == self.inner or X == self.outer:
            return False
        return same_direction(self.inner, X, self.outer) and same_direction(self.outer, X, self.inner)


def modulus(A: Annulus) -> Fraction:
    return rho(A.inner, A.outer)


def _outside(base: BerkPoint, toward: BerkPoint, X: BerkPoint) -> bool:
    # X in P^1 minus U_{base->toward}
    return X == base or not same_direction(base, X, toward)


def separates(A: Annulus, E: Sequence[BerkPoint]) -> bool:
    if any(A.contains(x) for x in E):
        return False
    return any(_outside(A.inner, A.outer, x) for x in E) and any(
        _outside(A.outer, A.inner, x) for x in E
    )


def bounded_moduli_constant(E: Sequence[BerkPoint], chart_free: bool = False) -> Union[Fraction, float]:
    """
    c_E for a finite set: the longest hull edge

    Args:
        E: finite point set
        chart_free: also admit annuli through a two-child branch root

    Returns:
        Exact rational, 0 for singletons, INFINITE when a classical point is present
    """
    unique = list(dict.fromkeys(E))
    if not unique:
        raise EmptyInput("c_E of an empty set")
    if len(unique) == 1:
        return Fraction(0)
    if any(x.is_classical for x in unique):
        return INFINITE
    tree = hull_tree(unique)
    best = tree.max_edge()
    root_children = tree.children(tree.root)
    if chart_free and not tree.is_input(tree.root) and len(root_children) == 2:
        best = max(best, sum(tree.parent_edge(c).length for c in root_children))
    return best


def _wedge_closure(E: List[BerkPoint]) -> List[BerkPoint]:
    nodes = dict.fromkeys(E)
    for x, y in combinations(E, 2):
        nodes[wedge(x, y)] = None
    return list(nodes)


def brute_force_moduli_constant(E: Sequence[BerkPoint], chart_free: bool = False) -> Union[Fraction, float]:
    """Sup of moduli over annuli with endpoints among wedge points and edge midpoints"""
    unique = list(dict.fromkeys(E))
    if not unique:
        raise EmptyInput("c_E of an empty set")
    if len(unique) > 1 and any(x.is_classical for x in unique):
        return INFINITE
    nodes = _wedge_closure(unique)
    candidates = list(nodes)
    for x in nodes:
        above = [y for y in nodes if compare(x, y) is Order.LESS]
        if above:
            parent = min(above, key=lambda y: y.logr)
            candidates.append(interval_point(x, parent, rho(x, parent) / 2))
    best: Fraction = Fraction(0)
    for a, b in combinations(candidates, 2):
        if a == b:
            continue
        if not chart_free and compare(a, b) is Order.INCOMPARABLE:
            continue
        A = Annulus(a, b)
        if separates(A, unique):
            best = max(best, modulus(A))
    return best
