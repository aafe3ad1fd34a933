"""
Rational maps over Q_p acting on the Berkovich line.

Covers normalized lifts and resultants, images of disk points, reduction at
disk points, directional degrees, the good-reduction detector, the quadratic
backward-orbit cylinders and the uniform-perfectness / Hoelder experiments.

Worked conjugation, f = p z^2 at zeta(0, p): with M(z) = p^-1 z one gets
M^-1(f(M(z))) = p * p * (p^-1 z)^2 = z^2 after renormalizing the lift, so the
reduction is z^2 of degree 2 and f has good reduction at zeta(0, p).
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import GF, Matrix, Poly, QQ, Rational, symbols
from sympy.ntheory import legendre_symbol

from berkdyn.models.annuli import bounded_moduli_constant
from berkdyn.models.berkpoints import (
    BerkPoint,
    Direction,
    Order,
    compare,
    gauss_point,
    leq,
)
from berkdyn.models.density import holder_certify, holder_exponent, lcd_constant
from berkdyn.models.scalars import (
    ExactRational,
    Expansion,
    LogMag,
    PadicConfig,
    Scalar,
    fraction_valuation,
    hensel_sqrt,
    newton_polygon_root_logmags,
    polynomial_gauss_logmag,
    reduce_mod_m,
)
from berkdyn.utils.errors import (
    BerkovichError,
    DegenerateMap,
    EvenPrime,
    IrrationalDirection,
    NonEscapingParameter,
    NonIntegralRadius,
    NonResidueBranch,
    NotClassicalOrTypeII,
    NotFixed,
    OddValuation,
    PoleInDiskAllCharts,
)

logger = logging.getLogger(__name__)

x = symbols("x")


def _poly(coeffs: Sequence[Fraction]) -> Poly:
    return Poly([Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x, domain=QQ)


def _coeffs(poly: Poly) -> Tuple[Fraction, ...]:
    return tuple(Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs()))


def _trim(coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _pad(coeffs: Sequence[Fraction], d: int) -> List[Fraction]:
    return list(coeffs) + [Fraction(0)] * (d + 1 - len(coeffs))


def _as_fraction(c: Union[int, str, Fraction, Scalar]) -> Fraction:
    if isinstance(c, ExactRational):
        return c.value
    if isinstance(c, Expansion):
        raise TypeError("map coefficients must be exact rationals")
    return Fraction(c)


def _sylvester(F: Sequence[Fraction], G: Sequence[Fraction], d: int) -> Fraction:
    """Homogeneous resultant of two degree-d forms"""
    rows = []
    for form in (F, G):
        top_first = [Rational(c.numerator, c.denominator) for c in reversed(form)]
        for shift in range(d):
            rows.append([0] * shift + top_first + [0] * (d - 1 - shift))
    det = Matrix(rows).det(method="bareiss")
    return Fraction(int(det.p), int(det.q))


@dataclass(frozen=True)
class RationalMap:
    """num(z) / den(z) with rational coefficients listed low degree first"""

    num: Tuple[Fraction, ...]
    den: Tuple[Fraction, ...]
    p: int

    def __post_init__(self):
        num = _trim([_as_fraction(c) for c in self.num])
        den = _trim([_as_fraction(c) for c in self.den])
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        if all(c == 0 for c in den):
            raise DegenerateMap("denominator vanishes identically")
        if max(len(num), len(den)) < 2:
            raise DegenerateMap("constant map", {"num": num, "den": den})
        if self.resultant() == 0:
            raise DegenerateMap("numerator and denominator share a root", {"num": num, "den": den})

    @classmethod
    def polynomial(cls, coeffs: Sequence, p: int) -> "RationalMap":
        return cls(tuple(coeffs), (Fraction(1),), p)

    @classmethod
    def quadratic(cls, c: Union[Fraction, Scalar], p: int) -> "RationalMap":
        return cls.polynomial((_as_fraction(c), 0, 1), p)

    @classmethod
    def mobius(cls, a, b, c, d, p: int) -> "RationalMap":
        """(a z + b) / (c z + d)"""
        return cls((Fraction(b), Fraction(a)), (Fraction(d), Fraction(c)), p)

    @property
    def degree(self) -> int:
        return max(len(self.num), len(self.den)) - 1

    def normalized_lift(self) -> Tuple[List[Fraction], List[Fraction]]:
        """Homogeneous coefficients (index i = coefficient of X^i Y^(d-i)) with max |c| = 1"""
        d = self.degree
        F, G = _pad(self.num, d), _pad(self.den, d)
        v_min = min(fraction_valuation(c, self.p) for c in F + G if c != 0)
        scale = Fraction(self.p) ** (-v_min)
        return [c * scale for c in F], [c * scale for c in G]

    def resultant(self) -> Fraction:
        d = self.degree
        return _sylvester(_pad(self.num, d), _pad(self.den, d), d)

    def res_log(self) -> Fraction:
        return resultant_logmag(self)

    def reciprocal(self) -> "RationalMap":
        return RationalMap(self.den, self.num, self.p)

    def inverse_chart(self) -> "RationalMap":
        """w -> f(1/w)"""
        d = self.degree
        return RationalMap(tuple(reversed(_pad(self.num, d))), tuple(reversed(_pad(self.den, d))), self.p)

    def compose(self, g: "RationalMap") -> "RationalMap":
        """self o g, built from homogeneous forms"""
        d = self.degree
        Ng, Dg = _poly(g.num), _poly(g.den)
        out = []
        for form in (_pad(self.num, d), _pad(self.den, d)):
            acc = Poly(0, x, domain=QQ)
            for i, c in enumerate(form):
                if c:
                    acc += Ng**i * Dg ** (d - i) * Rational(c.numerator, c.denominator)
            out.append(_coeffs(acc))
        return RationalMap(out[0], out[1], self.p)

    def _horner(self, coeffs: Sequence[Fraction], z: Scalar) -> Scalar:
        acc: Scalar = ExactRational(Fraction(0), self.p)
        for c in reversed(coeffs):
            acc = acc * z + ExactRational(c, self.p)
        return acc

    def evaluate(self, z: BerkPoint) -> BerkPoint:
        """f at a classical point"""
        if not z.is_classical:
            raise NotClassicalOrTypeII("evaluate takes classical points", {"z": z})
        if z.is_infinity:
            d = self.degree
            a, b = _pad(self.num, d)[d], _pad(self.den, d)[d]
            if b == 0:
                return BerkPoint.infinity(self.p)
            return BerkPoint.classical(a / b, self.p)
        D = self._horner(self.den, z.center)
        if isinstance(D, Expansion) and D.is_zero_to_precision() or D.is_zero():
            return BerkPoint.infinity(self.p)
        return BerkPoint.classical(self._horner(self.num, z.center) / D, self.p)


def resultant_logmag(f: RationalMap) -> Fraction:
    """log_p |Res| of the normalized lift (nonpositive)"""
    F, G = f.normalized_lift()
    res = _sylvester(F, G, f.degree)
    if res == 0:
        raise DegenerateMap("resultant vanishes")
    return Fraction(-fraction_valuation(res, f.p))


def invert(S: BerkPoint) -> BerkPoint:
    """The action of z -> 1/z"""
    p = S.p
    if S.is_infinity:
        return BerkPoint.classical(0, p)
    if S.is_classical:
        if S.center.is_zero():
            return BerkPoint.infinity(p)
        return BerkPoint.classical(ExactRational(Fraction(1), p) / S.center, p)
    a = S.center.logmag()
    if a > S.diam:
        return BerkPoint.disk(ExactRational(1 / S.center.value, p), S.logr - 2 * a.exponent, p)
    return BerkPoint.disk(0, -S.logr, p)


def _disk_image(g: RationalMap, S: BerkPoint) -> Optional[BerkPoint]:
    # image of zeta(a, r) read off a residue class whose open disk has no pole
    p, q, a = g.p, S.logr, S.center.value
    centers = [a]
    if q.denominator == 1:
        step = Fraction(p) ** (-int(q))
        centers += [a + d * step for d in range(1, p)]
    N, D = _poly(g.num), _poly(g.den)
    radius = LogMag.of(q)
    for b in centers:
        rb = Rational(b.numerator, b.denominator)
        Ns, Ds = _coeffs(N.shift(rb)), _coeffs(D.shift(rb))
        D_scalars = [ExactRational(c, p) for c in Ds]
        if len(D_scalars) > 1 and any(lm < radius for lm, _ in newton_polygon_root_logmags(D_scalars)):
            continue
        if Ds[0] == 0:
            continue
        Nb, Db = Ns[0], Ds[0]
        size = max(len(Ns), len(Ds))
        M = [ExactRational(n * Db - Nb * d, p) for n, d in zip(_pad(Ns, size - 1), _pad(Ds, size - 1))]
        top = polynomial_gauss_logmag(M, q)
        bottom = ExactRational(Db, p).logmag() * polynomial_gauss_logmag(D_scalars, q)
        s = top / bottom
        if s.is_bottom:
            return None
        return BerkPoint.disk(Nb / Db, s.exponent, p)
    return None


def image_point(f: RationalMap, S: BerkPoint) -> BerkPoint:
    """
    f(S) for classical and disk points

    Args:
        f: rational map
        S: point of type I or II

    Returns:
        The image point; retries in the 1/z and 1/f charts when poles interfere
    """
    if S.is_classical:
        return f.evaluate(S)
    if S.point_type != 2:
        raise NotClassicalOrTypeII("unsupported point type", {"S": S})
    for flip_source, flip_target in ((False, False), (False, True), (True, False), (True, True)):
        g = f.inverse_chart() if flip_source else f
        if flip_target:
            g = g.reciprocal()
        image = _disk_image(g, invert(S) if flip_source else S)
        if image is not None:
            return invert(image) if flip_target else image
    raise PoleInDiskAllCharts("every chart has a pole in each residue class", {"S": S})


@dataclass(frozen=True)
class ReducedMap:
    """A rational map over F_p; num/den low degree first, homogeneous degree `degree`"""

    num: Tuple[int, ...]
    den: Tuple[int, ...]
    degree: int
    p: int

    def _forms(self, residue: Optional[int]) -> Tuple[Poly, Poly, int]:
        num, den = list(self.num), list(self.den)
        if residue is None:
            num = list(reversed(num + [0] * (self.degree + 1 - len(num))))
            den = list(reversed(den + [0] * (self.degree + 1 - len(den))))
            residue = 0
        dom = GF(self.p)
        return Poly(list(reversed(num)), x, domain=dom), Poly(list(reversed(den)), x, domain=dom), residue

    def value_at(self, residue: Optional[int]) -> Optional[int]:
        N, D, r = self._forms(residue)
        n, d = int(N.eval(r)) % self.p, int(D.eval(r)) % self.p
        if d == 0:
            return None
        return n * pow(d, -1, self.p) % self.p

    def multiplicity_at(self, residue: Optional[int]) -> int:
        """Local degree of the reduced map at a point of P^1(F_p) (None = infinity)"""
        N, D, r = self._forms(residue)
        value = self.value_at(residue)
        H = D if value is None else N - D * value
        linear = Poly([1, -r], x, domain=GF(self.p))
        m = 0
        while not H.is_zero and int(H.eval(r)) % self.p == 0:
            H = H.quo(linear)
            m += 1
        return m

    def __str__(self) -> str:
        def show(coeffs):
            terms = [f"{c}*z^{i}" if i else f"{c}" for i, c in enumerate(coeffs) if c]
            return " + ".join(terms) or "0"

        return f"({show(self.num)}) / ({show(self.den)})"


def fiber_multiplicities(red: ReducedMap, value: Optional[int]) -> Dict[Optional[int], int]:
    """Multiplicities over the F_p-rational points mapping to `value`"""
    points: List[Optional[int]] = list(range(red.p)) + [None]
    return {P: red.multiplicity_at(P) for P in points if red.value_at(P) == value}


def _scaling(S: BerkPoint) -> Tuple[Fraction, Fraction]:
    if S.is_classical:
        raise NotClassicalOrTypeII("reduction needs a disk point", {"S": S})
    if S.logr.denominator != 1:
        raise NonIntegralRadius("no Q_p scalar has this magnitude", {"logr": S.logr})
    return S.center.value, Fraction(S.p) ** (-int(S.logr))


def reduction_between(f: RationalMap, S: BerkPoint, T: BerkPoint) -> ReducedMap:
    """Reduction of M_T^-1 o f o M_S with M_X(z) = a_X + lambda_X z"""
    a_s, lam_s = _scaling(S)
    a_t, lam_t = _scaling(T)
    p = f.p
    inner = Poly([Rational(lam_s.numerator, lam_s.denominator), Rational(a_s.numerator, a_s.denominator)], x, domain=QQ)
    N, D = _poly(f.num).compose(inner), _poly(f.den).compose(inner)
    num = N - D * Rational(a_t.numerator, a_t.denominator)
    den = D * Rational(lam_t.numerator, lam_t.denominator)
    g = RationalMap(_coeffs(num), _coeffs(den), p)
    F, G = g.normalized_lift()
    d = g.degree
    Fr = [reduce_mod_m(ExactRational(c, p)) for c in F]
    Gr = [reduce_mod_m(ExactRational(c, p)) for c in G]

    dom = GF(p)
    Fp = Poly(list(reversed(Fr)), x, domain=dom)
    Gp = Poly(list(reversed(Gr)), x, domain=dom)
    deg_f = Fp.degree() if not Fp.is_zero else -math.inf
    deg_g = Gp.degree() if not Gp.is_zero else -math.inf
    y_power = min(d - deg_f, d - deg_g)
    common = Fp.gcd(Gp)
    reduced_degree = int(d - common.degree() - y_power)
    Fq, Gq = Fp.quo(common), Gp.quo(common)
    lead = Gq if not Gq.is_zero else Fq
    inv = pow(int(lead.LC()) % p, -1, p)

    def ints(P: Poly) -> Tuple[int, ...]:
        coeffs = [int(c) * inv % p for c in reversed(P.all_coeffs())] if not P.is_zero else [0]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return tuple(coeffs)

    return ReducedMap(ints(Fq), ints(Gq), reduced_degree, p)


def reduction_at(f: RationalMap, S: BerkPoint) -> ReducedMap:
    """
    Reduction of f at a fixed disk point zeta(a, p^k), k integral

    Args:
        f: rational map
        S: disk point with integral log-radius and f(S) = S

    Returns:
        ReducedMap whose degree is the degree of the reduction
    """
    _scaling(S)
    image = image_point(f, S)
    if image != S:
        raise NotFixed("point is not fixed", {"S": S, "f(S)": image})
    return reduction_between(f, S, S)


def good_reduction_at(f: RationalMap, S: BerkPoint) -> bool:
    try:
        red = reduction_at(f, S)
    except NotFixed:
        return False
    return red.degree == f.degree


def direction_residue(S: BerkPoint, v: Direction) -> Optional[int]:
    """The point of P^1(F_p) matching a direction at S (None = infinity)"""
    a, lam = _scaling(S)
    if compare(v.toward, S) is not Order.LESS:
        return None
    t = v.toward.center
    if not isinstance(t, ExactRational):
        t = ExactRational(t.truncate(int(S.logr) * -1 + 1), S.p)
    return reduce_mod_m(ExactRational((t.value - a) / lam, S.p))


def directional_degree(f: RationalMap, S: BerkPoint, v: Direction) -> int:
    """m_v(f): multiplicity of the reduction at the residue point of v"""
    if v.at != S:
        raise ValueError("direction is based elsewhere")
    T = image_point(f, S)
    try:
        red = reduction_between(f, S, T)
        residue = direction_residue(S, v)
    except NonIntegralRadius as e:
        raise IrrationalDirection("residue field at this point is not F_p", e.context) from e
    return red.multiplicity_at(residue)


class Verdict(str, Enum):
    FOUND = "FOUND"
    NO_CANDIDATE_FOUND = "NO_CANDIDATE_FOUND"


@dataclass(frozen=True)
class GoodReductionVerdict:
    verdict: Verdict
    point: Optional[BerkPoint]
    checked: int


def default_candidates(p: int) -> List[BerkPoint]:
    """zeta(a, p^k) for a = n / p^j (0 <= n < p^2, j <= 2) and k in [-6, 6]"""
    out: Dict[BerkPoint, None] = {}
    for j in range(3):
        for n in range(p * p):
            for k in range(-6, 7):
                out[BerkPoint.disk(Fraction(n, p**j), k, p)] = None
    return list(out)


def find_good_reduction(f: RationalMap, candidates: Optional[Sequence[BerkPoint]] = None) -> GoodReductionVerdict:
    """Semi-decision: the first candidate where f has good reduction"""
    pool = list(candidates) if candidates is not None else default_candidates(f.p)
    logger.info(f"Sweeping {len(pool)} candidates for good reduction")
    for n, S in enumerate(pool, start=1):
        try:
            if good_reduction_at(f, S):
                logger.info(f"Good reduction found at {S}")
                return GoodReductionVerdict(Verdict.FOUND, S, n)
        except PoleInDiskAllCharts as e:
            logger.debug(f"Skipping candidate {S}: {str(e)}")
    return GoodReductionVerdict(Verdict.NO_CANDIDATE_FOUND, None, len(pool))


@dataclass
class CylinderTree:
    """Cylinders D_w of z^2 + c: D_"" = B(0, p^m), f(D_{iw}) = D_w, D_{iw} inside D_i"""

    map: RationalMap
    c: Fraction
    depth: int
    cylinders: Dict[str, BerkPoint] = field(default_factory=dict)

    def level(self, k: int) -> List[Tuple[str, BerkPoint]]:
        return sorted((w, D) for w, D in self.cylinders.items() if len(w) == k)

    def tops(self, k: Optional[int] = None) -> List[BerkPoint]:
        return [D for _, D in self.level(self.depth if k is None else k)]

    @staticmethod
    def nest_parent(word: str) -> str:
        return word[:-1]

    @staticmethod
    def image_parent(word: str) -> str:
        return word[1:]

    def children(self, word: str) -> List[str]:
        return [word + b for b in "01" if word + b in self.cylinders]


def _escape_exponent(c: Fraction, p: int) -> int:
    v = fraction_valuation(c, p)
    if v is None or v >= 0:
        raise NonEscapingParameter("parameter must have negative valuation", {"c": c})
    if v % 2:
        raise OddValuation("parameter valuation must be even", {"valuation": v})
    return -v // 2


def quad_backward_cylinders(c: Union[Fraction, Scalar], depth: int, cfg: PadicConfig) -> CylinderTree:
    """
    Cylinders of f = z^2 + c down to `depth` via exact inverse branches

    Args:
        c: parameter with even negative valuation -2m
        depth: number of levels
        cfg: prime and working precision

    Returns:
        CylinderTree with every level 0..depth
    """
    p = cfg.p
    if p == 2:
        raise EvenPrime("the quadratic family needs an odd prime")
    c = _as_fraction(c)
    m = _escape_exponent(c, p)
    residue = reduce_mod_m(ExactRational(-c * Fraction(p) ** (2 * m), p))
    if legendre_symbol(residue, p) != 1:
        raise NonResidueBranch("-c p^(2m) is not a square mod p", {"residue": residue})

    tree = CylinderTree(RationalMap.quadratic(c, p), c, depth, {"": BerkPoint.disk(0, m, p)})
    minus_c = ExactRational(-c, p)
    for k in range(depth):
        logr = Fraction(-m * k)
        for w, D in tree.level(k):
            t = hensel_sqrt(D.center + minus_c, cfg)
            for i, branch in enumerate("01"):
                if k == 0:
                    root = t if i == 0 else -t
                else:
                    anchor = tree.cylinders[branch]
                    root = t if leq(BerkPoint(p, D.chart, t, logr), anchor) else -t
                tree.cylinders[branch + w] = BerkPoint(p, D.chart, root, logr)
        logger.info(f"Built cylinder level {k + 1}: {2 ** (k + 1)} disks")
    return tree


def subsample_words(words: Sequence[Tuple[str, BerkPoint]], cap: int) -> List[Tuple[str, BerkPoint]]:
    """Every ceil(n/cap)-th entry in lexicographic word order"""
    ordered = sorted(words)
    if len(ordered) <= cap:
        return ordered
    step = math.ceil(len(ordered) / cap)
    return ordered[::step]


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    points: int
    c_E_log: Union[Fraction, float]
    best_c_log: Optional[Fraction]


@dataclass(frozen=True)
class ExperimentTable:
    c: Fraction
    p: int
    good_reduction: bool
    rows: Tuple[ExperimentRow, ...]


def uniform_perfectness_experiment(
    c: Union[Fraction, Scalar], n_max: int, cfg: PadicConfig, point_cap: int = 1024
) -> ExperimentTable:
    """
    c_E and the lcd constant of the level-n cylinder tops for n = 1..n_max

    A parameter with v(c) >= 0 gives good reduction at the Gauss point; the
    table then holds the single dichotomy row for the Julia set {S_g}.
    """
    c = _as_fraction(c)
    p = cfg.p
    try:
        v = fraction_valuation(c, p)
        f = RationalMap.quadratic(c, p)
        good = good_reduction_at(f, gauss_point(p))
        if v is None or v >= 0:
            row = ExperimentRow(0, 1, bounded_moduli_constant([gauss_point(p)]), None)
            return ExperimentTable(c, p, good, (row,))

        tree = quad_backward_cylinders(c, n_max, cfg)
        rows = []
        for n in range(1, n_max + 1):
            tops = [D for _, D in subsample_words(tree.level(n), point_cap)]
            c_E = bounded_moduli_constant(tops)
            best = lcd_constant(tops).best_c_log
            logger.info(f"Depth {n}: {len(tops)} points, c_E={c_E}, best_c_log={best}")
            rows.append(ExperimentRow(n, len(tops), c_E, best))
        return ExperimentTable(c, p, good, tuple(rows))
    except BerkovichError as e:
        logger.error(f"Error running uniform perfectness experiment: {str(e)}")
        raise


@dataclass(frozen=True)
class HolderRow:
    n: int
    alpha: Fraction
    constant: float
    delta0: LogMag


def holder_experiment(
    c: Union[Fraction, Scalar],
    depths: Sequence[int],
    cfg: PadicConfig,
    R_log: Fraction = Fraction(2),
    r_log: Fraction = Fraction(1),
    point_cap: int = 1024,
    boundary_cap: int = 64,
) -> List[HolderRow]:
    """Hoelder certificates for the Green function of the cylinder tops, pole at infinity"""
    c = _as_fraction(c)
    infinity = BerkPoint.infinity(cfg.p)
    try:
        tree = quad_backward_cylinders(c, max(depths), cfg)
        rows = []
        for n in depths:
            level = subsample_words(tree.level(n), point_cap)
            tops = [D for _, D in level]
            report = lcd_constant(tops)
            alpha = holder_exponent(tops, infinity, R_log, r_log, report)
            boundary = [BerkPoint.classical(D.center, cfg.p) for _, D in subsample_words(level, boundary_cap)]
            cert = holder_certify(tops, infinity, alpha, boundary)
            logger.info(f"Depth {n}: alpha={alpha}, constant={cert.constant:.6f}")
            rows.append(HolderRow(n, alpha, cert.constant, cert.delta0))
        return rows
    except BerkovichError as e:
        logger.error(f"Error running Hoelder experiment: {str(e)}")
        raise


def dump_gnuplot(table: ExperimentTable, path: str) -> None:
    """Columns n, c_E, best_c_log for plotting c_E against depth"""
    data = np.array(
        [[r.n, float(r.c_E_log), float(r.best_c_log) if r.best_c_log is not None else np.nan] for r in table.rows]
    )
    np.savetxt(path, data, fmt="%.10g", header=f"c={table.c} p={table.p}\nn c_E best_c_log")
