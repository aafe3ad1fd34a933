"""Domain and input errors raised across berkdyn.

Every domain error carries the name used in CLI error documents and a small
context dict of the offending values (already stringified).
"""
from typing import Any, Dict, Optional


class BerkovichError(Exception):
    """Base class for domain errors (CLI exit status 2)"""

    def __init__(self, detail: str = "", context: Optional[Dict[str, Any]] = None):
        super().__init__(detail or self.__class__.__name__)
        self.detail = detail
        self.context = {k: str(v) for k, v in (context or {}).items()}

    @property
    def name(self) -> str:
        return self.__class__.__name__


class InputError(Exception):
    """Base class for malformed input (CLI exit status 1)"""

    @property
    def name(self) -> str:
        return self.__class__.__name__


class ParseError(InputError):
    pass


class UnknownSubcommand(InputError):
    pass


# scalars
class IndeterminateZero(BerkovichError):
    """Known digits are all zero but the value is not the exact zero"""


class NonResidue(BerkovichError):
    pass


class OddValuation(BerkovichError):
    pass


class EvenCharacteristic(BerkovichError):
    pass


class ZeroPolynomial(BerkovichError):
    pass


class NotIntegral(BerkovichError):
    pass


class PrecisionExhausted(BerkovichError):
    """A truncation asked for digits beyond the known precision"""


# berkpoints
class InfinityOperand(BerkovichError):
    pass


class ClassicalPoint(BerkovichError):
    pass


class EmptyInput(BerkovichError):
    pass


# annuli
class DegenerateAnnulus(BerkovichError):
    pass


# potential
class BasePointInSupport(BerkovichError):
    pass


class MixedTypes(BerkovichError):
    pass


class BaseInE(BerkovichError):
    pass


class TooLarge(BerkovichError):
    pass


class SolverFailure(BerkovichError):
    pass


# density
class TypeIPresent(BerkovichError):
    pass


class TooFew(BerkovichError):
    pass


class BadScale(BerkovichError):
    pass


class ShellEmpty(BerkovichError):
    pass


class NoDensity(BerkovichError):
    pass


# dynamics
class DegenerateMap(BerkovichError):
    pass


class PoleInDiskAllCharts(BerkovichError):
    pass


class NotClassicalOrTypeII(BerkovichError):
    pass


class NonIntegralRadius(BerkovichError):
    pass


class NotFixed(BerkovichError):
    pass


class IrrationalDirection(BerkovichError):
    pass


class NonResidueBranch(BerkovichError):
    pass


class EvenPrime(BerkovichError):
    pass


class NonEscapingParameter(BerkovichError):
    """The quadratic family needs a parameter of negative valuation"""
