"""Seeded generators for random points, point sets and maps."""
from fractions import Fraction
from typing import List, Optional

import numpy as np

from berkdyn.models.berkpoints import BerkPoint
from berkdyn.models.dynamics import RationalMap


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_rational(rng: np.random.Generator, p: int, max_val: int = 2, digits: int = 4) -> Fraction:
    """n / p^k with |value| <= p^max_val and a few p-adic digits"""
    k = int(rng.integers(0, max_val + 1))
    n = int(rng.integers(-(p**digits), p**digits + 1))
    return Fraction(n, p**k)


def random_disk_point(
    rng: np.random.Generator, p: int, logr_range: int = 3, half_steps: bool = False
) -> BerkPoint:
    denominator = 2 if half_steps else 1
    logr = Fraction(int(rng.integers(-logr_range * denominator, logr_range * denominator + 1)), denominator)
    return BerkPoint.disk(random_rational(rng, p), logr, p)


def random_classical_point(rng: np.random.Generator, p: int) -> BerkPoint:
    return BerkPoint.classical(random_rational(rng, p, max_val=2, digits=6), p)


def random_disk_set(
    rng: np.random.Generator, p: int, max_size: int, min_size: int = 1, logr_range: int = 3
) -> List[BerkPoint]:
    """Distinct disk points; the size is drawn from [min_size, max_size]"""
    size = int(rng.integers(min_size, max_size + 1))
    points: dict = {}
    while len(points) < size:
        points[random_disk_point(rng, p, logr_range)] = None
    return list(points)


def random_pole(rng: np.random.Generator, p: int, avoid: List[BerkPoint]) -> BerkPoint:
    """Infinity or a disk point outside `avoid`"""
    if rng.random() < 0.5:
        return BerkPoint.infinity(p)
    while True:
        S0 = random_disk_point(rng, p)
        if S0 not in avoid:
            return S0


def random_unimodular_mobius(rng: np.random.Generator, p: int, bound: int = 6) -> RationalMap:
    """(a z + b) / (c z + d) with integer entries and a d - b c = +-1"""
    while True:
        a, b, c = (int(v) for v in rng.integers(-bound, bound + 1, size=3))
        if a == 0:
            continue
        # solve a d - b c = 1 for d when a divides 1 + b c
        for target in (1, -1):
            if (target + b * c) % a == 0:
                d = (target + b * c) // a
                return RationalMap.mobius(a, b, c, d, p)


def random_polynomial_map(
    rng: np.random.Generator, p: int, degree: int = 2, max_val: int = 1, leading: Optional[Fraction] = None
) -> RationalMap:
    coeffs = [random_rational(rng, p, max_val=max_val, digits=2) for _ in range(degree)]
    coeffs.append(leading if leading is not None else Fraction(1))
    return RationalMap.polynomial(coeffs, p)
