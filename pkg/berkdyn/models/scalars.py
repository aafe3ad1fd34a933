"""
Exact arithmetic in Q_p.

Two scalar forms are supported: exact rationals (embedded in Q_p) and
truncated p-adic expansions p^v * u with the unit u known modulo p^precision.
Magnitudes are carried as LogMag exponents in log_p units, so |x| = p^e.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import isqrt
from typing import List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator
from sympy import isprime
from sympy.ntheory import legendre_symbol, multiplicity, sqrt_mod

from berkdyn.utils.errors import (
    EvenCharacteristic,
    IndeterminateZero,
    NonResidue,
    NotIntegral,
    OddValuation,
    PrecisionExhausted,
    ZeroPolynomial,
)

DEFAULT_PRECISION = 64


class PadicConfig(BaseModel):
    """Prime and working precision shared by a computation"""

    model_config = ConfigDict(frozen=True)

    p: int = Field(5, ge=2, description="Residue characteristic (prime)")
    working_precision: int = Field(
        DEFAULT_PRECISION, ge=1, description="Number of p-adic digits carried"
    )

    @field_validator("p")
    @classmethod
    def _check_prime(cls, value: int) -> int:
        if not isprime(value):
            raise ValueError(f"p must be prime, got {value}")
        return value


@total_ordering
@dataclass(frozen=True)
class LogMag:
    """Magnitude p^exponent, extended by BOTTOM (zero) and TOP (+infinity)"""

    exponent: Optional[Fraction] = None
    rank: int = 0  # -1 bottom, 0 finite, 1 top

    @classmethod
    def of(cls, exponent: Union[int, Fraction]) -> "LogMag":
        return cls(Fraction(exponent), 0)

    @property
    def is_bottom(self) -> bool:
        return self.rank < 0

    @property
    def is_top(self) -> bool:
        return self.rank > 0

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    def _key(self) -> Tuple[int, Fraction]:
        return (self.rank, self.exponent if self.rank == 0 else Fraction(0))

    def __lt__(self, other: "LogMag") -> bool:
        return self._key() < other._key()

    def __mul__(self, other: "LogMag") -> "LogMag":
        if self.is_bottom or other.is_bottom:
            if self.is_top or other.is_top:
                raise ValueError("0 * infinity is undefined")
            return BOTTOM
        if self.is_top or other.is_top:
            return TOP
        return LogMag.of(self.exponent + other.exponent)

    def __truediv__(self, other: "LogMag") -> "LogMag":
        # 1/0 = 0/0^2 = +infinity
        if other.is_bottom:
            return TOP
        if other.is_top:
            if self.is_top:
                raise ValueError("infinity / infinity is undefined")
            return BOTTOM
        if not self.is_finite:
            return self
        return LogMag.of(self.exponent - other.exponent)

    def __pow__(self, k: int) -> "LogMag":
        if k == 0:
            return ONE
        if not self.is_finite:
            return self
        return LogMag.of(self.exponent * k)

    def __repr__(self) -> str:
        if self.is_bottom:
            return "LogMag(-inf)"
        if self.is_top:
            return "LogMag(+inf)"
        return f"LogMag({self.exponent})"


BOTTOM = LogMag(None, -1)
TOP = LogMag(None, 1)
ONE = LogMag(Fraction(0), 0)


def fraction_valuation(q: Fraction, p: int) -> Optional[int]:
    """v_p(q); None for q = 0"""
    if q == 0:
        return None
    return int(multiplicity(p, abs(q.numerator))) - int(multiplicity(p, q.denominator))


def _split(q: Fraction, p: int) -> Tuple[int, int, int]:
    """q = p^v * n/d with n, d prime to p"""
    v = fraction_valuation(q, p)
    n, d = q.numerator, q.denominator
    if v > 0:
        n //= p**v
    elif v < 0:
        d //= p ** (-v)
    return v, n, d


class Scalar(ABC):
    """An element of Q_p in one of two exact representations"""

    p: int

    @abstractmethod
    def valuation(self) -> Optional[int]:
        """v_p(x), or None when x is the exact zero"""

    @abstractmethod
    def is_zero(self) -> bool:
        """True only for an exact (sentinel) zero"""

    @abstractmethod
    def truncate(self, n: int) -> Fraction:
        """The rational sum of the digits of index < n"""

    @abstractmethod
    def unit_residue(self) -> int:
        """Leading digit of the unit part"""

    def logmag(self) -> LogMag:
        v = self.valuation()
        return BOTTOM if v is None else LogMag.of(-v)

    def __add__(self, other):
        return _binary(self, other, "+")

    def __radd__(self, other):
        return _binary(other, self, "+")

    def __sub__(self, other):
        return _binary(self, other, "-")

    def __rsub__(self, other):
        return _binary(other, self, "-")

    def __mul__(self, other):
        return _binary(self, other, "*")

    def __rmul__(self, other):
        return _binary(other, self, "*")

    def __truediv__(self, other):
        return _binary(self, other, "/")

    def __rtruediv__(self, other):
        return _binary(other, self, "/")


@dataclass(frozen=True, eq=True)
class ExactRational(Scalar):
    value: Fraction
    p: int

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    def valuation(self) -> Optional[int]:
        return fraction_valuation(self.value, self.p)

    def is_zero(self) -> bool:
        return self.value == 0

    def __neg__(self) -> "ExactRational":
        return ExactRational(-self.value, self.p)

    def unit_residue(self) -> int:
        if self.value == 0:
            return 0
        _, n, d = _split(self.value, self.p)
        return n * pow(d, -1, self.p) % self.p

    def truncate(self, n: int) -> Fraction:
        if self.value == 0:
            return Fraction(0)
        num, den = self.value.numerator, self.value.denominator
        e = int(multiplicity(self.p, den))
        width = n + e
        if width <= 0:
            return Fraction(0)
        modulus = self.p**width
        rest = den // self.p**e
        return Fraction(num * pow(rest, -1, modulus) % modulus, self.p**e)

    def to_expansion(self, precision: int) -> "Expansion":
        """Expansion carrying `precision` digits after the leading one"""
        if self.value == 0:
            return Expansion.zero(self.p)
        v, n, d = _split(self.value, self.p)
        modulus = self.p**precision
        return Expansion(self.p, v, n * pow(d, -1, modulus) % modulus, precision)

    def __repr__(self) -> str:
        return f"ExactRational({self.value}, p={self.p})"


@dataclass(frozen=True, eq=True)
class Expansion(Scalar):
    """
    p^valuation * unit with unit known mod p^precision.

    An indeterminate zero has unit 0: it only records x = 0 mod p^valuation.
    The exact zero is the sentinel flagged by `zero`.
    """

    p: int
    valuation_: int
    unit: int
    precision: int
    zero_sentinel: bool = False

    @classmethod
    def zero(cls, p: int) -> "Expansion":
        return cls(p, 0, 0, 0, True)

    @classmethod
    def from_digits(cls, p: int, valuation: int, digits: Sequence[int]) -> "Expansion":
        if not digits:
            raise ValueError("an expansion needs at least one digit")
        if any(not 0 <= d < p for d in digits):
            raise ValueError(f"digits must lie in [0, {p})")
        unit = sum(d * p**i for i, d in enumerate(digits))
        if unit == 0:
            return cls(p, valuation + len(digits), 0, 0)
        shift = int(multiplicity(p, unit))
        return cls(p, valuation + shift, unit // p**shift, len(digits) - shift)

    @property
    def is_indeterminate(self) -> bool:
        return self.unit == 0 and not self.zero_sentinel

    @property
    def absolute_precision(self) -> Optional[int]:
        if self.zero_sentinel:
            return None
        return self.valuation_ + self.precision

    @property
    def digits(self) -> List[int]:
        out, u = [], self.unit
        for _ in range(self.precision):
            u, d = divmod(u, self.p)
            out.append(d)
        return out

    def valuation(self) -> Optional[int]:
        if self.zero_sentinel:
            return None
        if self.is_indeterminate:
            raise IndeterminateZero(
                "all known digits are zero", {"known_below": self.valuation_}
            )
        return self.valuation_

    def is_zero(self) -> bool:
        return self.zero_sentinel

    def is_zero_to_precision(self) -> bool:
        return self.zero_sentinel or self.is_indeterminate

    def unit_residue(self) -> int:
        return self.unit % self.p

    def __neg__(self) -> "Expansion":
        if self.unit == 0:
            return self
        return Expansion(self.p, self.valuation_, (-self.unit) % self.p**self.precision, self.precision)

    def truncate(self, n: int) -> Fraction:
        if self.zero_sentinel or n <= self.valuation_:
            return Fraction(0)
        if n > self.valuation_ + self.precision:
            raise PrecisionExhausted(
                "not enough digits", {"requested": n, "known": self.valuation_ + self.precision}
            )
        return Fraction(self.unit % self.p ** (n - self.valuation_)) * Fraction(self.p) ** self.valuation_

    def __repr__(self) -> str:
        if self.zero_sentinel:
            return "Expansion(0)"
        return f"Expansion(p={self.p}, v={self.valuation_}, digits={self.digits})"


def _normalized(p: int, v: int, value: int, absolute: int) -> Expansion:
    """Expansion of p^v * value known mod p^absolute"""
    width = absolute - v
    if width <= 0:
        return Expansion(p, absolute, 0, 0)
    value %= p**width
    if value == 0:
        return Expansion(p, absolute, 0, 0)
    shift = int(multiplicity(p, value))
    return Expansion(p, v + shift, value // p**shift, width - shift)


def _coerce(x, p: int) -> Scalar:
    if isinstance(x, Scalar):
        if x.p != p:
            raise ValueError(f"mixed primes {x.p} and {p}")
        return x
    return ExactRational(Fraction(x), p)


def _binary(x, y, op: str) -> Scalar:
    p = x.p if isinstance(x, Scalar) else y.p
    x, y = _coerce(x, p), _coerce(y, p)
    if isinstance(x, ExactRational) and isinstance(y, ExactRational):
        a, b = x.value, y.value
        if op == "+":
            return ExactRational(a + b, p)
        if op == "-":
            return ExactRational(a - b, p)
        if op == "*":
            return ExactRational(a * b, p)
        return ExactRational(a / b, p)
    if op in "+-":
        return _expansion_add(x, y, op == "-")
    if op == "*":
        return _expansion_mul(x, y)
    return _expansion_div(x, y)


def _as_expansion(x: Scalar, like: Expansion, absolute: bool) -> Expansion:
    if isinstance(x, Expansion):
        return x
    if x.is_zero():
        return Expansion.zero(x.p)
    if absolute and like.absolute_precision is not None:
        width = like.absolute_precision - x.valuation()
        if width <= 0:
            return Expansion(x.p, like.absolute_precision, 0, 0)
        return x.to_expansion(width)
    return x.to_expansion(like.precision if not like.zero_sentinel else DEFAULT_PRECISION)


def _expansion_add(x: Scalar, y: Scalar, subtract: bool) -> Scalar:
    if isinstance(x, ExactRational):
        x = _as_expansion(x, y, absolute=True)
    if isinstance(y, ExactRational):
        y = _as_expansion(y, x, absolute=True)
    if y.zero_sentinel:
        return x
    if x.zero_sentinel:
        return -y if subtract else y
    p = x.p
    absolute = min(x.absolute_precision, y.absolute_precision)
    v = min(x.valuation_, y.valuation_)
    a = x.unit * p ** (x.valuation_ - v)
    b = y.unit * p ** (y.valuation_ - v)
    return _normalized(p, v, a - b if subtract else a + b, absolute)


def _expansion_mul(x: Scalar, y: Scalar) -> Scalar:
    if isinstance(x, ExactRational):
        x = _as_expansion(x, y, absolute=False)
    if isinstance(y, ExactRational):
        y = _as_expansion(y, x, absolute=False)
    if x.zero_sentinel or y.zero_sentinel:
        return Expansion.zero(x.p)
    p = x.p
    if x.is_indeterminate or y.is_indeterminate:
        return Expansion(p, x.valuation_ + y.valuation_, 0, 0)
    precision = min(x.precision, y.precision)
    return Expansion(p, x.valuation_ + y.valuation_, x.unit * y.unit % p**precision, precision)


def _expansion_div(x: Scalar, y: Scalar) -> Scalar:
    if isinstance(x, ExactRational):
        x = _as_expansion(x, y, absolute=False)
    if isinstance(y, ExactRational):
        y = _as_expansion(y, x, absolute=False)
    if y.zero_sentinel:
        raise ZeroDivisionError("division by the exact zero")
    if y.is_indeterminate:
        raise IndeterminateZero("divisor is an indeterminate zero", {"known_below": y.valuation_})
    p = x.p
    if x.zero_sentinel:
        return x
    if x.is_indeterminate:
        return Expansion(p, x.valuation_ - y.valuation_, 0, 0)
    precision = min(x.precision, y.precision)
    modulus = p**precision
    return Expansion(p, x.valuation_ - y.valuation_, x.unit * pow(y.unit, -1, modulus) % modulus, precision)


def rational(q: Union[int, str, Fraction], p: int) -> ExactRational:
    return ExactRational(Fraction(q), p)


def logmag(x: Scalar) -> LogMag:
    """|x| as a LogMag; BOTTOM iff x is exactly zero"""
    return x.logmag()


def hensel_sqrt(u: Scalar, cfg: PadicConfig) -> Scalar:
    """
    Square root in Q_p with the first digit of the unit part in [1, p/2)

    Args:
        u: radicand with even valuation and square unit residue
        cfg: prime and working precision

    Returns:
        An exact rational root when u is a rational square, else an Expansion
    """
    p = cfg.p
    if p == 2:
        raise EvenCharacteristic("square roots need an odd prime", {"p": p})
    if u.is_zero():
        return u
    v = u.valuation()
    if v % 2:
        raise OddValuation("odd valuation has no square root", {"valuation": v})
    residue = u.unit_residue()
    if legendre_symbol(residue, p) != 1:
        raise NonResidue("unit part is not a square mod p", {"residue": residue, "p": p})

    if isinstance(u, ExactRational) and u.value > 0:
        n, d = u.value.numerator, u.value.denominator
        rn, rd = isqrt(n), isqrt(d)
        if rn * rn == n and rd * rd == d:
            root = ExactRational(Fraction(rn, rd), p)
            return -root if root.unit_residue() > p // 2 else root

    expansion = u if isinstance(u, Expansion) else u.to_expansion(cfg.working_precision)
    modulus = p**expansion.precision
    root = int(sqrt_mod(expansion.unit % modulus, modulus))
    if root % p > p // 2:
        root = modulus - root
    return Expansion(p, v // 2, root, expansion.precision)


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon_root_logmags(coeffs: Sequence[Scalar]) -> List[Tuple[LogMag, int]]:
    """
    Absolute values of all roots of sum c_i z^i (coefficients low degree first)

    Returns:
        (LogMag, multiplicity) pairs, ascending, multiplicities summing to the degree
    """
    points = [(i, c.valuation()) for i, c in enumerate(coeffs) if not c.is_zero()]
    if not points:
        raise ZeroPolynomial("all coefficients vanish")
    roots: List[Tuple[LogMag, int]] = []
    if points[0][0] > 0:
        roots.append((BOTTOM, points[0][0]))

    hull: List[Tuple[int, int]] = []
    for pt in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)

    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        roots.append((LogMag.of(Fraction(y1 - y2, x2 - x1) * -1), x2 - x1))
    return sorted(roots, key=lambda item: item[0])


def polynomial_gauss_logmag(coeffs: Sequence[Scalar], logr: Fraction) -> LogMag:
    """log_p of max_i |c_i| r^i, the sup norm on the closed disk of radius p^logr"""
    best = BOTTOM
    for i, c in enumerate(coeffs):
        if c.is_zero():
            continue
        best = max(best, LogMag.of(-c.valuation() + i * logr))
    return best


def reduce_mod_m(x: Scalar) -> int:
    """The residue of an integral scalar, as an integer in [0, p)"""
    if x.is_zero():
        return 0
    if isinstance(x, Expansion) and x.is_indeterminate:
        if x.valuation_ >= 1:
            return 0
        raise IndeterminateZero("residue unknown", {"known_below": x.valuation_})
    v = x.valuation()
    if v < 0:
        raise NotIntegral("scalar lies outside the unit disk", {"valuation": v})
    if v > 0:
        return 0
    return x.unit_residue()
