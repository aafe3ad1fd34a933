"""
Points of the Berkovich projective line over Q_p.

A point is either the classical point infinity, a classical point a in Q_p
(logr = None), or the disk point zeta(a, p^logr) with logr rational. Disk
points are normalized on construction: the center is replaced by the
truncation of its expansion below the disk's valuation threshold, so equal
disks compare and hash equal.
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from berkdyn.models.scalars import (
    BOTTOM,
    TOP,
    ExactRational,
    Expansion,
    LogMag,
    Scalar,
    fraction_valuation,
)
from berkdyn.utils.errors import ClassicalPoint, EmptyInput, IndeterminateZero, InfinityOperand

Number = Union[int, str, Fraction, Scalar]


class Chart(str, Enum):
    Z = "z"
    INFTY = "inf"


class Order(str, Enum):
    LESS = "LESS"
    GREATER = "GREATER"
    EQUAL = "EQUAL"
    INCOMPARABLE = "INCOMPARABLE"


def _scalar(x: Number, p: int) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return ExactRational(Fraction(x), p)


@dataclass(frozen=True)
class BerkPoint:
    p: int
    chart: Chart = Chart.Z
    center: Optional[Scalar] = None
    logr: Optional[Fraction] = None

    def __post_init__(self):
        if self.chart is Chart.INFTY:
            object.__setattr__(self, "center", None)
            object.__setattr__(self, "logr", None)
            return
        if self.center is None:
            raise ValueError("a finite point needs a center")
        if self.logr is not None:
            logr = Fraction(self.logr)
            threshold = math.ceil(-logr)
            object.__setattr__(self, "logr", logr)
            object.__setattr__(
                self, "center", ExactRational(self.center.truncate(threshold), self.p)
            )

    @classmethod
    def disk(cls, center: Number, logr: Union[int, str, Fraction], p: int) -> "BerkPoint":
        return cls(p, Chart.Z, _scalar(center, p), Fraction(logr))

    @classmethod
    def classical(cls, center: Number, p: int) -> "BerkPoint":
        return cls(p, Chart.Z, _scalar(center, p), None)

    @classmethod
    def infinity(cls, p: int) -> "BerkPoint":
        return cls(p, Chart.INFTY)

    @property
    def is_infinity(self) -> bool:
        return self.chart is Chart.INFTY

    @property
    def is_classical(self) -> bool:
        return self.is_infinity or self.logr is None

    @property
    def is_hyperbolic(self) -> bool:
        return not self.is_classical

    @property
    def point_type(self) -> int:
        # every rational log-radius lies in the value group of C_p
        return 1 if self.is_classical else 2

    @property
    def diam(self) -> LogMag:
        if self.is_infinity:
            return TOP
        return BOTTOM if self.logr is None else LogMag.of(self.logr)

    def __repr__(self) -> str:
        if self.is_infinity:
            return "oo"
        c = self.center.value if isinstance(self.center, ExactRational) else self.center
        if self.logr is None:
            return f"<{c}>"
        return f"zeta({c}, p^{self.logr})"


def zeta(center: Number, logr: Union[int, str, Fraction], p: int) -> BerkPoint:
    return BerkPoint.disk(center, logr, p)


def gauss_point(p: int) -> BerkPoint:
    return BerkPoint.disk(0, 0, p)


def center_distance(a: Scalar, b: Scalar) -> LogMag:
    """|a - b|; two expansions agreeing to full precision count as equal"""
    if isinstance(a, ExactRational) and isinstance(b, ExactRational):
        v = fraction_valuation(a.value - b.value, a.p)
        return BOTTOM if v is None else LogMag.of(-v)
    try:
        return (a - b).logmag()
    except IndeterminateZero:
        return BOTTOM


def abs_point(S: BerkPoint) -> LogMag:
    """|S - 0|_inf = max(diam S, |center|)"""
    if S.is_infinity:
        return TOP
    return max(S.diam, S.center.logmag())


def compare(S: BerkPoint, T: BerkPoint) -> Order:
    if S == T:
        return Order.EQUAL
    if S.is_infinity:
        return Order.GREATER
    if T.is_infinity:
        return Order.LESS
    d = center_distance(S.center, T.center)
    rs, rt = S.diam, T.diam
    if rs == rt and d <= rs:
        return Order.EQUAL
    if rs < rt and d <= rt:
        return Order.LESS
    if rt < rs and d <= rs:
        return Order.GREATER
    return Order.INCOMPARABLE


def leq(S: BerkPoint, T: BerkPoint) -> bool:
    return compare(S, T) in (Order.LESS, Order.EQUAL)


def wedge(S: BerkPoint, T: BerkPoint) -> BerkPoint:
    if S.is_infinity or T.is_infinity:
        return BerkPoint.infinity(S.p)
    r = max(S.diam, T.diam, center_distance(S.center, T.center))
    if r.is_bottom:
        return S
    return BerkPoint(S.p, Chart.Z, S.center, r.exponent)


def join(points: Iterable[BerkPoint]) -> BerkPoint:
    return reduce(wedge, points)


def hsia_inf(S: BerkPoint, T: BerkPoint) -> LogMag:
    """|S - T|_inf = diam(S ^ T)"""
    if S.is_infinity or T.is_infinity:
        raise InfinityOperand("the Hsia kernel at infinity is unbounded", {"S": S, "T": T})
    return max(S.diam, T.diam, center_distance(S.center, T.center))


def rho(S: BerkPoint, T: BerkPoint) -> Fraction:
    """Hyperbolic distance in log_p units"""
    if S.is_classical or T.is_classical:
        raise ClassicalPoint("rho is defined on hyperbolic points only", {"S": S, "T": T})
    top = hsia_inf(S, T).exponent
    return 2 * top - S.logr - T.logr


def interval_point(S: BerkPoint, T: BerkPoint, t: Fraction) -> BerkPoint:
    """The point of [S, T] at rho-distance t from S"""
    total = rho(S, T)
    if not 0 <= t <= total:
        raise ValueError(f"t must lie in [0, {total}]")
    up = hsia_inf(S, T).exponent - S.logr
    if t <= up:
        return BerkPoint(S.p, Chart.Z, S.center, S.logr + t)
    return BerkPoint(T.p, Chart.Z, T.center, T.logr + (total - t))


def same_direction(S: BerkPoint, X: BerkPoint, Y: BerkPoint) -> bool:
    """Whether X and Y (both distinct from S) lie in one component of P^1 minus S"""
    if S.is_classical:
        return True
    x_below = compare(X, S) is Order.LESS
    y_below = compare(Y, S) is Order.LESS
    if x_below and y_below:
        return wedge(X, Y) != S
    return not x_below and not y_below


@dataclass(frozen=True, eq=False)
class Direction:
    """The germ of the segment from `at` toward `toward`"""

    at: BerkPoint
    toward: BerkPoint

    def __post_init__(self):
        if self.at == self.toward:
            raise ValueError("a direction needs a toward-point distinct from its base")

    def contains(self, X: BerkPoint) -> bool:
        return X != self.at and same_direction(self.at, X, self.toward)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Direction):
            return NotImplemented
        return self.at == other.at and self.contains(other.toward)

    __hash__ = None


class NodeKind(str, Enum):
    INPUT = "INPUT"
    BRANCH = "BRANCH"


@dataclass(frozen=True)
class HullNode:
    point: BerkPoint
    kind: NodeKind


@dataclass(frozen=True)
class HullEdge:
    parent: int
    child: int
    length: Union[Fraction, float]  # math.inf toward classical leaves


class HullTree:
    """Finite tree spanned by a point set, rooted at its top (or at infinity)"""

    def __init__(self, nodes: Sequence[HullNode], edges: Sequence[HullEdge], root: int):
        self.nodes = tuple(nodes)
        self.edges = tuple(edges)
        self.root = root
        self._parent: Dict[int, HullEdge] = {e.child: e for e in self.edges}
        self._children: Dict[int, List[int]] = {i: [] for i in range(len(self.nodes))}
        for e in self.edges:
            self._children[e.parent].append(e.child)
        self._index = {node.point: i for i, node in enumerate(self.nodes)}

    def __len__(self) -> int:
        return len(self.nodes)

    def point(self, i: int) -> BerkPoint:
        return self.nodes[i].point

    def index_of(self, point: BerkPoint) -> int:
        return self._index[point]

    def children(self, i: int) -> List[int]:
        return self._children[i]

    def parent(self, i: int) -> Optional[int]:
        edge = self._parent.get(i)
        return None if edge is None else edge.parent

    def parent_edge(self, i: int) -> Optional[HullEdge]:
        return self._parent.get(i)

    def is_input(self, i: int) -> bool:
        return self.nodes[i].kind is NodeKind.INPUT

    def input_indices(self) -> List[int]:
        return [i for i, node in enumerate(self.nodes) if node.kind is NodeKind.INPUT]

    def ancestors(self, i: int) -> List[int]:
        """i, its parent, ..., the root"""
        chain = [i]
        while chain[-1] in self._parent:
            chain.append(self._parent[chain[-1]].parent)
        return chain

    def path_length(self, i: int, j: int) -> Union[Fraction, float]:
        up_i, up_j = self.ancestors(i), self.ancestors(j)
        common = set(up_j)
        meet = next(k for k in up_i if k in common)
        total: Union[Fraction, float] = Fraction(0)
        for chain in (up_i, up_j):
            for k in chain[: chain.index(meet)]:
                total += self._parent[k].length
        return total

    def max_edge(self) -> Union[Fraction, float]:
        return max((e.length for e in self.edges), default=Fraction(0))

    def postorder(self) -> List[int]:
        order, stack = [], [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                order.append(i)
                continue
            stack.append((i, True))
            stack.extend((c, False) for c in self._children[i])
        return order


def _direction_key(X: BerkPoint, top: BerkPoint) -> Fraction:
    # X below top = zeta(c, p^q): the class of X's center modulo p^(floor(-q)+1)
    return X.center.truncate(math.floor(-top.logr) + 1)


def hull_tree(points: Sequence[BerkPoint]) -> HullTree:
    """
    Tree on the input points and all their pairwise wedges

    Args:
        points: finite points, with infinity allowed

    Returns:
        HullTree with rho_p edge lengths; edges into classical points are infinite
    """
    unique = list(dict.fromkeys(points))
    if not unique:
        raise EmptyInput("hull of an empty set")
    inputs = set(unique)
    finite = [x for x in unique if not x.is_infinity]
    nodes: List[HullNode] = []
    edges: List[HullEdge] = []

    def add(point: BerkPoint) -> int:
        nodes.append(HullNode(point, NodeKind.INPUT if point in inputs else NodeKind.BRANCH))
        return len(nodes) - 1

    def build(group: List[BerkPoint]) -> int:
        top = join(group)
        idx = add(top)
        below = [x for x in group if x != top]
        if not below:
            return idx
        groups: Dict[Fraction, List[BerkPoint]] = {}
        for x in below:
            groups.setdefault(_direction_key(x, top), []).append(x)
        for key in sorted(groups):
            child = build(groups[key])
            child_point = nodes[child].point
            length = math.inf if child_point.is_classical else rho(top, child_point)
            edges.append(HullEdge(idx, child, length))
        return idx

    root = build(finite) if finite else None
    if len(finite) < len(unique):
        inf_idx = add(BerkPoint.infinity(unique[0].p))
        if root is not None:
            edges.append(HullEdge(inf_idx, root, math.inf))
        root = inf_idx
    return HullTree(nodes, edges, root)
