"""
berkdyn command-line front-end.

Usage: python -m berkdyn.main <subcommand> [--in FILE] [--out FILE] [--p P]
       [--precision N] [--seed S] [--format json|csv] [--natural]

Every subcommand reads one JSON document (stdin or --in) and writes one
document. Exit status: 0 on success, 2 on domain errors, 1 on malformed input.
"""
import argparse
import csv
import io
import json
import logging
import math
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from berkdyn.config import settings
from berkdyn.models.annuli import bounded_moduli_constant
from berkdyn.models.berkpoints import BerkPoint, hsia_inf, hull_tree, rho
from berkdyn.models.density import (
    holder_certify,
    holder_exponent,
    pommerenke_net,
    run_density_report,
)
from berkdyn.models.dynamics import (
    Verdict,
    dump_gnuplot,
    find_good_reduction,
    image_point,
    quad_backward_cylinders,
    reduction_at,
    resultant_logmag,
    uniform_perfectness_experiment,
)
from berkdyn.models.kernels import chordal, hsia_gauss, hsia_rel
from berkdyn.models.potential import equilibrium, green, transfinite_diameter
from berkdyn.models.scalars import LogMag, PadicConfig
from berkdyn.schemas.request_models import (
    CapacityRequest,
    CylinderRequest,
    ExperimentRequest,
    HolderRequest,
    Invocation,
    KernelRequest,
    MapImageRequest,
    MapReduceRequest,
    PointSetRequest,
    PommerenkeRequest,
    RhoRequest,
    TransfiniteRequest,
)
from berkdyn.schemas.response_models import (
    CapacityResponse,
    CylinderResponse,
    DensityResponse,
    EquilibriumResponse,
    ErrorResponse,
    ExperimentResponse,
    ExperimentRowDoc,
    GreenResponse,
    HolderResponse,
    HullResponse,
    KernelResponse,
    MapImageResponse,
    ModuliResponse,
    PommerenkeResponse,
    ReductionResponse,
    RhoResponse,
    SelfTestResponse,
    TransfiniteResponse,
    WitnessDoc,
)
from berkdyn.utils import codec
from berkdyn.utils.errors import BerkovichError, InputError, NotFixed, ParseError, UnknownSubcommand
from berkdyn.utils.selftest import SelfTestRunner

logger = logging.getLogger(__name__)

# keys whose values are log_p quantities; --natural rescales them by ln p
LOG_KEYS = {
    "exp", "rho", "c_E", "c_E_log", "log_cap", "energy", "green", "log_d",
    "best_c_log", "cap_log", "theorem_lcd_margin", "res_log",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="berkdyn", description="Potential theory and dynamics on the Berkovich line over Q_p")
    parser.add_argument("subcommand", help="one of: " + ", ".join(sorted(HANDLERS)))
    parser.add_argument("--in", dest="infile", default=None, help="input JSON file (default stdin)")
    parser.add_argument("--out", dest="outfile", default=None, help="output file (default stdout)")
    parser.add_argument("--p", type=int, default=settings.prime, help="residue characteristic")
    parser.add_argument("--precision", type=int, default=settings.precision, help="working precision")
    parser.add_argument("--seed", type=int, default=settings.seed, help="seed for randomized routines")
    parser.add_argument("--format", dest="output_format", choices=["json", "csv"], default="json")
    parser.add_argument("--natural", action="store_true", help="report logarithms in natural units")
    return parser


def _cfg(inv: Invocation) -> PadicConfig:
    return PadicConfig(p=inv.p, working_precision=inv.precision)


def _pole(raw: Optional[Dict[str, Any]], p: int) -> BerkPoint:
    return BerkPoint.infinity(p) if raw is None else codec.decode_point(raw, p)


def handle_kernel(inv: Invocation) -> Dict[str, Any]:
    req = KernelRequest.model_validate(inv.input)
    S, T = codec.decode_point(req.S, inv.p), codec.decode_point(req.S_prime, inv.p)
    kind = req.kind or ("rel" if req.S0 is not None else "inf")
    if kind == "inf":
        value = hsia_inf(S, T)
    elif kind == "gauss":
        value = hsia_gauss(S, T)
    elif kind == "chordal":
        value = chordal(S, T)
    elif kind == "rel":
        value = hsia_rel(S, T, _pole(req.S0, inv.p))
    else:
        raise ParseError(f"unknown kernel kind {kind!r}")
    return KernelResponse(**codec.encode_logmag(value)).model_dump()


def handle_rho(inv: Invocation) -> Dict[str, Any]:
    req = RhoRequest.model_validate(inv.input)
    value = rho(codec.decode_point(req.S, inv.p), codec.decode_point(req.S_prime, inv.p))
    return RhoResponse(rho=codec.encode_value(value)).model_dump()


def handle_hull(inv: Invocation) -> Dict[str, Any]:
    req = PointSetRequest.model_validate(inv.input)
    tree = hull_tree(codec.decode_points(req.points, inv.p))
    return HullResponse(**codec.encode_hull(tree)).model_dump()


def handle_ce(inv: Invocation) -> Dict[str, Any]:
    req = PointSetRequest.model_validate(inv.input)
    value = bounded_moduli_constant(codec.decode_points(req.points, inv.p), chart_free=req.chart_free)
    return ModuliResponse(c_E=codec.encode_value(value)).model_dump()


def handle_capacity(inv: Invocation) -> Dict[str, Any]:
    req = CapacityRequest.model_validate(inv.input)
    result = equilibrium(codec.decode_points(req.points, inv.p), _pole(req.pole, inv.p))
    return CapacityResponse(log_cap=codec.encode_value(result.log_capacity)).model_dump()


def handle_equilibrium(inv: Invocation) -> Dict[str, Any]:
    req = CapacityRequest.model_validate(inv.input)
    result = equilibrium(codec.decode_points(req.points, inv.p), _pole(req.pole, inv.p))
    return EquilibriumResponse(
        **codec.encode_measure(result.measure),
        log_cap=codec.encode_value(result.log_capacity),
        energy=codec.encode_value(result.energy),
    ).model_dump()


def handle_green(inv: Invocation) -> Dict[str, Any]:
    req = CapacityRequest.model_validate(inv.input)
    if req.at is None:
        raise ParseError("green needs an 'at' point")
    value = green(codec.decode_points(req.points, inv.p), _pole(req.pole, inv.p), codec.decode_point(req.at, inv.p))
    return GreenResponse(green=codec.encode_value(value)).model_dump()


def handle_transdiam(inv: Invocation) -> Dict[str, Any]:
    req = TransfiniteRequest.model_validate(inv.input)
    value = transfinite_diameter(codec.decode_points(req.points, inv.p), req.n, settings.enumeration_budget)
    return TransfiniteResponse(n=req.n, log_d=codec.encode_value(value)).model_dump()


def handle_lcd(inv: Invocation) -> Dict[str, Any]:
    req = PointSetRequest.model_validate(inv.input)
    report = run_density_report(codec.decode_points(req.points, inv.p))
    return DensityResponse(
        best_c_log=codec.encode_value(report.best_c_log),
        witnesses=[
            WitnessDoc(
                point=codec.encode_point(w.point),
                radius=codec.encode_logmag(w.radius),
                cap_log=codec.encode_value(w.cap_log),
            )
            for w in report.witnesses
        ],
        c_E_log=codec.encode_value(report.c_E_log),
        theorem_lcd_margin=codec.encode_value(report.theorem_lcd_margin),
    ).model_dump()


def handle_pommerenke(inv: Invocation) -> Dict[str, Any]:
    req = PommerenkeRequest.model_validate(inv.input)
    net = pommerenke_net(
        codec.decode_points(req.points, inv.p),
        codec.decode_point(req.base, inv.p),
        codec.decode_rational(req.r_log),
        codec.decode_rational(req.s_log),
        req.depth,
    )
    depths = range(1, req.depth + 1)
    return PommerenkeResponse(
        points={w: codec.encode_point(S) for w, S in sorted(net.points.items())},
        separation_violations=[list(pair) for pair in net.separation_violations()],
        discrete_energy={str(j): codec.encode_value(net.discrete_energy(j)) for j in depths},
        product_bound={str(j): codec.encode_value(net.product_bound(j)) for j in depths},
    ).model_dump()


def handle_holder(inv: Invocation) -> Dict[str, Any]:
    req = HolderRequest.model_validate(inv.input)
    E = codec.decode_points(req.points, inv.p)
    S0 = _pole(req.pole, inv.p)
    if req.alpha is not None:
        alpha = codec.decode_rational(req.alpha)
    else:
        alpha = holder_exponent(E, S0, codec.decode_rational(req.R_log), codec.decode_rational(req.r_log))
    if req.boundary is not None:
        boundary = codec.decode_points(req.boundary, inv.p)
    else:
        boundary = [BerkPoint.classical(S.center, inv.p) for S in E if not S.is_infinity]
        boundary = boundary[: settings.boundary_sample_cap]
    grid = None
    if req.delta_logs is not None:
        grid = [LogMag.of(codec.decode_rational(d)) for d in req.delta_logs]
    cert = holder_certify(E, S0, alpha, boundary, grid)
    return HolderResponse(
        alpha=codec.encode_value(cert.alpha),
        delta0=codec.encode_logmag(cert.delta0),
        constant=f"{cert.constant:.12g}",
        samples=len(cert.samples),
    ).model_dump()


def handle_map_image(inv: Invocation) -> Dict[str, Any]:
    req = MapImageRequest.model_validate(inv.input)
    f = codec.decode_map(req.map, inv.p)
    return MapImageResponse(image=codec.encode_point(image_point(f, codec.decode_point(req.point, inv.p)))).model_dump()


def handle_map_reduce_check(inv: Invocation) -> Dict[str, Any]:
    req = MapReduceRequest.model_validate(inv.input)
    f = codec.decode_map(req.map, inv.p)
    res_log = codec.encode_value(resultant_logmag(f))
    if req.point is None:
        found = find_good_reduction(f)
        return ReductionResponse(
            verdict=found.verdict.value,
            point=codec.encode_point(found.point) if found.verdict is Verdict.FOUND else None,
            checked=found.checked,
            res_log=res_log,
        ).model_dump()
    S = codec.decode_point(req.point, inv.p)
    try:
        red = reduction_at(f, S)
    except NotFixed:
        return ReductionResponse(verdict="NOT_GOOD", point=codec.encode_point(S), res_log=res_log).model_dump()
    return ReductionResponse(
        verdict="GOOD" if red.degree == f.degree else "NOT_GOOD",
        point=codec.encode_point(S),
        reduction=codec.encode_reduced(red),
        res_log=res_log,
    ).model_dump()


def handle_julia_cylinders(inv: Invocation) -> Dict[str, Any]:
    req = CylinderRequest.model_validate(inv.input)
    c = codec.decode_rational(req.c)
    tree = quad_backward_cylinders(c, req.depth, _cfg(inv))
    return CylinderResponse(
        c=str(c),
        depth=req.depth,
        cylinders={w: codec.encode_point(D) for w, D in sorted(tree.cylinders.items())},
    ).model_dump()


def handle_up_experiment(inv: Invocation) -> Dict[str, Any]:
    req = ExperimentRequest.model_validate(inv.input)
    c = codec.decode_rational(req.c)
    table = uniform_perfectness_experiment(c, req.n_max, _cfg(inv), settings.point_cap)
    if req.plot:
        dump_gnuplot(table, req.plot)
    rows = [
        ExperimentRowDoc(
            n=r.n,
            points=r.points,
            c_E_log=codec.encode_value(r.c_E_log),
            best_c_log=None if r.best_c_log is None else codec.encode_value(r.best_c_log),
        )
        for r in table.rows
    ]
    return ExperimentResponse(c=str(c), good_reduction=table.good_reduction, rows=rows).model_dump()


def handle_selftest(inv: Invocation) -> Dict[str, Any]:
    return SelfTestResponse(**SelfTestRunner(_cfg(inv), inv.seed).run()).model_dump()


HANDLERS: Dict[str, Callable[[Invocation], Dict[str, Any]]] = {
    "kernel": handle_kernel,
    "rho": handle_rho,
    "hull": handle_hull,
    "cE": handle_ce,
    "capacity": handle_capacity,
    "equilibrium": handle_equilibrium,
    "green": handle_green,
    "transdiam": handle_transdiam,
    "lcd": handle_lcd,
    "pommerenke": handle_pommerenke,
    "holder": handle_holder,
    "map-image": handle_map_image,
    "map-reduce-check": handle_map_reduce_check,
    "julia-cylinders": handle_julia_cylinders,
    "up-experiment": handle_up_experiment,
    "selftest": handle_selftest,
}

NO_INPUT = {"selftest"}


def _naturalize(doc: Any, ln_p: float, key: Optional[str] = None) -> Any:
    if isinstance(doc, dict):
        return {k: _naturalize(v, ln_p, k) for k, v in doc.items()}
    if isinstance(doc, list):
        return [_naturalize(v, ln_p, key) for v in doc]
    if key in LOG_KEYS and isinstance(doc, str):
        value = codec.decode_value(doc)
        if isinstance(value, Fraction):
            return f"{float(value) * ln_p:.12g}"
    return doc


def render(doc: Dict[str, Any], output_format: str) -> str:
    if output_format == "json":
        return json.dumps(doc, sort_keys=True, indent=2)
    buffer = io.StringIO()
    rows: List[Dict[str, Any]] = doc["rows"] if isinstance(doc.get("rows"), list) else [doc]
    fields = sorted({k for row in rows for k in row})
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v for k, v in row.items()})
    return buffer.getvalue()


def run(inv: Invocation) -> Tuple[int, str]:
    """
    Execute one invocation

    Args:
        inv: subcommand, input document and options

    Returns:
        (exit status, rendered output document)
    """
    try:
        handler = HANDLERS.get(inv.subcommand)
        if handler is None:
            raise UnknownSubcommand(f"unknown subcommand {inv.subcommand!r}")
        doc = handler(inv)
        if inv.natural:
            doc = _naturalize(doc, math.log(inv.p))
        return 0, render(doc, inv.output_format)
    except BerkovichError as e:
        logger.error(f"Error running {inv.subcommand}: {str(e)}")
        error = ErrorResponse(error=e.name, detail=e.detail or None, context=e.context)
        return 2, render(error.model_dump(), "json")
    except ArithmeticError as e:
        logger.error(f"Arithmetic error running {inv.subcommand}: {str(e)}")
        error = ErrorResponse(error=e.__class__.__name__, detail=str(e) or None)
        return 2, render(error.model_dump(), "json")
    except (InputError, ValidationError, ValueError, TypeError) as e:
        logger.error(f"Error parsing input for {inv.subcommand}: {str(e)}")
        name = e.name if isinstance(e, InputError) else ParseError.__name__
        return 1, render(ErrorResponse(error=name, detail=str(e)).model_dump(), "json")


def _read_input(subcommand: str, infile: Optional[str]) -> Dict[str, Any]:
    if subcommand not in HANDLERS:
        raise UnknownSubcommand(f"unknown subcommand {subcommand!r}")
    if subcommand in NO_INPUT:
        return {}
    if infile:
        with open(infile) as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"input is not JSON: {str(e)}")
    if not isinstance(doc, dict):
        raise ParseError("input must be a JSON object")
    return doc


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        args = build_parser().parse_args(argv)
        inv = Invocation(
            subcommand=args.subcommand,
            input=_read_input(args.subcommand, args.infile),
            p=args.p,
            precision=args.precision,
            seed=args.seed,
            output_format=args.output_format,
            natural=args.natural,
        )
        PadicConfig(p=inv.p, working_precision=inv.precision)
    except (InputError, ValidationError, OSError) as e:
        name = e.name if isinstance(e, InputError) else ParseError.__name__
        print(render(ErrorResponse(error=name, detail=str(e)).model_dump(), "json"))
        return 1

    status, output = run(inv)
    if args.outfile:
        with open(args.outfile, "w") as fh:
            fh.write(output + "\n")
    else:
        print(output)
    return status


if __name__ == "__main__":
    sys.exit(main())
