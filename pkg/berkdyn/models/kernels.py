"""
Chordal metric, generalized Hsia kernels and the two ball families.

All kernel values are LogMag; TOP stands for +infinity under the 1/0 = 0/0^2
convention of the relative kernel.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from berkdyn.models.berkpoints import (
    BerkPoint,
    abs_point,
    gauss_point,
    hsia_inf,
    rho,
)
from berkdyn.models.scalars import BOTTOM, ONE, LogMag
from berkdyn.utils.errors import ClassicalPoint


def chordal(z: BerkPoint, w: BerkPoint) -> LogMag:
    """[z, w] on classical points"""
    if not (z.is_classical and w.is_classical):
        raise ValueError("the chordal metric takes classical points")
    return hsia_gauss(z, w)


def hsia_gauss(S: BerkPoint, T: BerkPoint) -> LogMag:
    """[S, T]_g, the kernel with respect to the Gauss point"""
    if S.is_infinity and T.is_infinity:
        return BOTTOM
    if S.is_infinity:
        S, T = T, S
    if T.is_infinity:
        return ONE / max(ONE, abs_point(S))
    return hsia_inf(S, T) / (max(ONE, abs_point(S)) * max(ONE, abs_point(T)))


def hsia_rel(S: BerkPoint, T: BerkPoint, S0: BerkPoint) -> LogMag:
    """[S, T]_{S0} = [S, T]_g / ([S, S0]_g [T, S0]_g); may be TOP"""
    if S0.is_infinity and not (S.is_infinity or T.is_infinity):
        return hsia_inf(S, T)
    return hsia_gauss(S, T) / (hsia_gauss(S, S0) * hsia_gauss(T, S0))


def gromov_product(S: BerkPoint, T: BerkPoint, S0: BerkPoint) -> Fraction:
    """rho(S0, S ^_{S0} T) in log_p units"""
    if S.is_classical or T.is_classical or S0.is_classical:
        raise ClassicalPoint("the Gromov product needs hyperbolic points", {"S": S, "T": T, "S0": S0})
    return -hsia_rel(S, T, S0).exponent + rho(gauss_point(S0.p), S0)


class BallFlavor(str, Enum):
    HSIA = "HSIA"
    CHORDAL = "CHORDAL"


@dataclass(frozen=True)
class BerkBall:
    flavor: BallFlavor
    center: BerkPoint
    radius: LogMag

    def __post_init__(self):
        if self.flavor is BallFlavor.HSIA:
            if self.center.is_infinity or self.radius < self.center.diam:
                raise ValueError("a Hsia ball needs a finite center and radius >= its diameter")
        elif not self.center.is_classical or self.radius > ONE:
            raise ValueError("a chordal ball needs a classical center and radius <= 1")

    def contains(self, X: BerkPoint) -> bool:
        if self.flavor is BallFlavor.HSIA:
            return not X.is_infinity and hsia_inf(X, self.center) <= self.radius
        return hsia_gauss(X, self.center) <= self.radius

    def top(self) -> Optional[BerkPoint]:
        """The disk point bounding the ball, or None when the ball contains infinity"""
        if self.flavor is BallFlavor.HSIA:
            return BerkPoint(self.center.p, self.center.chart, self.center.center, self.radius.exponent)
        return chordal_ball_top(self.center, self.radius)


def hsia_ball(S: BerkPoint, radius: LogMag) -> BerkBall:
    return BerkBall(BallFlavor.HSIA, S, radius)


def chordal_ball(a: BerkPoint, delta: LogMag) -> BerkBall:
    return BerkBall(BallFlavor.CHORDAL, a, delta)


def chordal_ball_top(a: BerkPoint, delta: LogMag) -> Optional[BerkPoint]:
    """zeta(a, delta * max(1,|a|)^2) when delta < [a, oo]_g; None otherwise"""
    if a.is_infinity or delta.is_bottom:
        return None if a.is_infinity else a
    if delta >= hsia_gauss(a, BerkPoint.infinity(a.p)):
        return None
    scale = max(ONE, a.center.logmag())
    return BerkPoint(a.p, a.chart, a.center, (delta * scale * scale).exponent)
