"""
JSON codecs for scalars, log-magnitudes, points, measures, maps and hull trees.

Rationals travel as strings "a/b" so documents stay exact; infinities as
"inf" / "-inf".
"""
import math
from fractions import Fraction
from typing import Any, Dict, List, Union

from berkdyn.models.berkpoints import BerkPoint, Chart, HullTree
from berkdyn.models.dynamics import RationalMap, ReducedMap
from berkdyn.models.potential import WeightedMeasure
from berkdyn.models.scalars import ExactRational, Expansion, LogMag, Scalar
from berkdyn.utils.errors import ParseError

Value = Union[Fraction, float, int]


def encode_value(v: Value) -> str:
    if isinstance(v, float):
        if v == math.inf:
            return "inf"
        if v == -math.inf:
            return "-inf"
        raise ValueError(f"finite floats are not exact: {v}")
    return str(Fraction(v))


def decode_value(raw: Any) -> Value:
    if raw in ("inf", "+inf"):
        return math.inf
    if raw == "-inf":
        return -math.inf
    try:
        if isinstance(raw, float):
            raise ValueError("floats are not accepted; use 'a/b'")
        return Fraction(raw)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ParseError(f"bad rational {raw!r}: {str(e)}")


def decode_rational(raw: Any) -> Fraction:
    v = decode_value(raw)
    if not isinstance(v, Fraction):
        raise ParseError(f"expected a finite rational, got {raw!r}")
    return v


def encode_scalar(x: Scalar) -> Any:
    if isinstance(x, ExactRational):
        return str(x.value)
    if x.is_zero():
        return "0"
    return {"val": x.valuation_, "digits": x.digits, "prec": x.precision}


def decode_scalar(raw: Any, p: int) -> Scalar:
    if isinstance(raw, dict):
        try:
            digits = [int(d) for d in raw["digits"]]
            prec = int(raw.get("prec", len(digits)))
            if prec != len(digits):
                raise ParseError("prec must equal the number of digits")
            return Expansion.from_digits(p, int(raw["val"]), digits)
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"bad expansion {raw!r}: {str(e)}")
    return ExactRational(decode_rational(raw), p)


def encode_logmag(m: LogMag) -> Dict[str, str]:
    if m.is_bottom:
        return {"exp": "-inf"}
    if m.is_top:
        return {"exp": "+inf"}
    return {"exp": str(m.exponent)}


def encode_point(S: BerkPoint) -> Dict[str, Any]:
    if S.is_infinity:
        return {"chart": Chart.INFTY.value}
    return {
        "chart": Chart.Z.value,
        "center": encode_scalar(S.center),
        "logr": "-inf" if S.logr is None else str(S.logr),
    }


def decode_point(raw: Any, p: int) -> BerkPoint:
    if not isinstance(raw, dict):
        raise ParseError(f"a point must be an object, got {raw!r}")
    chart = raw.get("chart", Chart.Z.value)
    if chart == Chart.INFTY.value:
        return BerkPoint.infinity(p)
    if chart != Chart.Z.value or "center" not in raw:
        raise ParseError(f"bad point {raw!r}")
    center = decode_scalar(raw["center"], p)
    logr = raw.get("logr", "-inf")
    if logr == "-inf":
        return BerkPoint.classical(center, p)
    return BerkPoint(p, Chart.Z, center, decode_rational(logr))


def decode_points(raw: Any, p: int) -> List[BerkPoint]:
    if not isinstance(raw, list):
        raise ParseError("points must be a list")
    return [decode_point(item, p) for item in raw]


def encode_measure(nu: WeightedMeasure) -> Dict[str, Any]:
    return {
        "support": [encode_point(S) for S in nu.support],
        "weights": [str(w) for w in nu.weights],
    }


def decode_map(raw: Any, p: int) -> RationalMap:
    if not isinstance(raw, dict) or "num" not in raw or "den" not in raw:
        raise ParseError("a map needs 'num' and 'den' coefficient lists")
    return RationalMap(
        tuple(decode_rational(c) for c in raw["num"]),
        tuple(decode_rational(c) for c in raw["den"]),
        p,
    )


def encode_reduced(red: ReducedMap) -> Dict[str, Any]:
    return {"num": list(red.num), "den": list(red.den), "degree": red.degree}


def encode_hull(tree: HullTree) -> Dict[str, Any]:
    return {
        "root": tree.root,
        "nodes": [{"point": encode_point(n.point), "kind": n.kind.value} for n in tree.nodes],
        "edges": [
            {"parent": e.parent, "child": e.child, "length": encode_value(e.length)}
            for e in tree.edges
        ],
    }
