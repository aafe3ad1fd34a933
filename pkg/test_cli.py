import json
import math
from fractions import Fraction

import pytest

from berkdyn.main import HANDLERS, main, run
from berkdyn.models.berkpoints import BerkPoint
from berkdyn.models.scalars import Expansion, PadicConfig
from berkdyn.schemas.request_models import Invocation
from berkdyn.utils import codec, selftest
from berkdyn.utils.errors import ParseError, SolverFailure
from berkdyn.utils.selftest import SelfTestRunner
from conftest import P, classical, zeta

NESTED_PAIR = {"points": [{"chart": "z", "center": "0", "logr": "0"}, {"chart": "z", "center": "0", "logr": "-2"}]}
BALL = {"points": [{"chart": "z", "center": "0", "logr": "-2"}]}


def call(subcommand, doc=None, **options):
    status, text = run(Invocation(subcommand=subcommand, input=doc or {}, **options))
    return status, text


def call_json(subcommand, doc=None, **options):
    status, text = call(subcommand, doc, **options)
    return status, json.loads(text)


def test_ce_subcommand():
    assert call_json("cE", NESTED_PAIR) == (0, {"c_E": "2"})


def test_ce_chart_free():
    doc = {
        "points": [{"center": "0", "logr": "-1"}, {"center": "1", "logr": "-1"}],
        "chart_free": True,
    }
    assert call_json("cE", doc) == (0, {"c_E": "2"})


def test_capacity_subcommand():
    assert call_json("capacity", BALL) == (0, {"log_cap": "-2"})


def test_kernel_subcommand():
    doc = {"S": {"center": "0", "logr": "-1"}, "S'": {"center": "1", "logr": "-1"}}
    assert call_json("kernel", doc) == (0, {"exp": "0"})
    doc["kind"] = "gauss"
    doc["S"] = {"center": "0", "logr": "2"}
    assert call_json("kernel", doc) == (0, {"exp": "0"})
    doc["S0"] = {"chart": "inf"}
    doc["kind"] = "rel"
    assert call_json("kernel", doc) == (0, {"exp": "2"})


def test_equilibrium_subcommand():
    doc = {"points": [{"center": "0", "logr": "-1"}, {"center": "1", "logr": "-2"}]}
    status, out = call_json("equilibrium", doc)
    assert status == 0
    assert out["weights"] == ["2/3", "1/3"]
    assert out["log_cap"] == "-2/3"
    assert out["energy"] == "-2/3"


def test_transdiam_and_green():
    pair = {"points": [{"center": "0", "logr": "-1"}, {"center": "1", "logr": "-1"}]}
    assert call_json("transdiam", {**pair, "n": 4}) == (0, {"n": 4, "log_d": "-1/3"})
    status, out = call_json("green", {**pair, "at": {"center": "0", "logr": "0"}})
    assert (status, out["green"]) == (0, "1/2")


def test_lcd_subcommand():
    status, out = call_json("lcd", NESTED_PAIR)
    assert status == 0
    assert out["best_c_log"] == "-2"
    assert out["c_E_log"] == "2"
    assert out["theorem_lcd_margin"] == "2"


def test_map_subcommands():
    square = {"num": ["0", "0", "1"], "den": ["1"]}
    status, out = call_json("map-image", {"map": square, "point": {"center": "0", "logr": "-1"}})
    assert status == 0
    assert out["image"] == {"chart": "z", "center": "0", "logr": "-2"}

    status, out = call_json("map-reduce-check", {"map": square, "point": {"center": "0", "logr": "0"}})
    assert status == 0
    assert out["verdict"] == "GOOD"
    assert out["reduction"]["degree"] == 2
    assert out["res_log"] == "0"

    cantor = {"num": ["-1/25", "0", "1"], "den": ["1"]}
    status, out = call_json("map-reduce-check", {"map": cantor, "point": {"center": "0", "logr": "0"}})
    assert (status, out["verdict"]) == (0, "NOT_GOOD")


def test_julia_cylinders_subcommand():
    status, out = call_json("julia-cylinders", {"c": "-1/25", "depth": 1})
    assert status == 0
    assert out["cylinders"]["0"] == {"chart": "z", "center": "1/5", "logr": "0"}
    assert set(out["cylinders"]) == {"", "0", "1"}


def test_unknown_subcommand():
    status, out = call_json("nonsense")
    assert status == 1
    assert out["error"] == "UnknownSubcommand"


def test_domain_error_reports_name_and_context():
    doc = {"S": {"center": "0", "logr": "0"}, "S'": {"center": "0"}}
    status, out = call_json("rho", doc)
    assert status == 2
    assert out["error"] == "ClassicalPoint"
    assert "S" in out["context"]


def test_malformed_input():
    assert call_json("capacity", {"points": "nope"})[0] == 1
    status, out = call_json("capacity", {"points": [{"center": 0.5, "logr": "0"}]})
    assert (status, out["error"]) == (1, "ParseError")
    assert call_json("transdiam", {"points": BALL["points"], "n": 1})[0] == 1


def test_arithmetic_failures_report_a_domain_error(monkeypatch):
    def divide_by_zero(inv):
        return {"value": str(Fraction(1, 0))}

    monkeypatch.setitem(HANDLERS, "cE", divide_by_zero)
    status, out = call_json("cE", NESTED_PAIR)
    assert status == 2
    assert out["error"] == "ZeroDivisionError"



def test_output_is_deterministic():
    doc = {"points": [{"center": "0", "logr": "-1"}, {"center": "1", "logr": "-2"}, {"center": "5", "logr": "-3"}]}
    assert call("equilibrium", doc) == call("equilibrium", doc)
    assert call("lcd", doc, seed=3) == call("lcd", doc, seed=3)


def test_output_does_not_depend_on_working_precision():
    for subcommand, doc in (
        ("julia-cylinders", {"c": "-1/25", "depth": 4}),
        ("up-experiment", {"c": "-1/25", "n_max": 4}),
        ("map-image", {"map": {"num": ["-1/25", "0", "1"], "den": ["1"]}, "point": {"center": "1/5", "logr": "0"}}),
    ):
        assert call(subcommand, doc, precision=32) == call(subcommand, doc, precision=64)



def test_csv_output():
    status, text = call("up-experiment", {"c": "-1/25", "n_max": 2}, output_format="csv")
    assert status == 0
    lines = text.splitlines()
    assert lines[0] == "best_c_log,c_E_log,n,points"
    assert len(lines) == 3


def test_natural_units():
    status, out = call_json("capacity", BALL, natural=True)
    assert status == 0
    assert float(out["log_cap"]) == pytest.approx(-2 * math.log(P))


def test_selftest_passes():
    status, out = call_json("selftest")
    assert status == 0
    assert len(out["checks"]) == 12
    assert out["failed"] == 0


def test_frostman_check_propagates_solver_failures(monkeypatch):
    def broken(E, S0):
        raise SolverFailure("no active set satisfied the Frostman conditions")

    monkeypatch.setattr(selftest, "equilibrium", broken)
    runner = SelfTestRunner(PadicConfig(p=P), seed=0)
    with pytest.raises(SolverFailure):
        runner.check_frostman()



def test_main_reads_and_writes_files(tmp_path):
    infile, outfile = tmp_path / "in.json", tmp_path / "out.json"
    infile.write_text(json.dumps(NESTED_PAIR))
    assert main(["cE", "--in", str(infile), "--out", str(outfile)]) == 0
    assert json.loads(outfile.read_text()) == {"c_E": "2"}


def test_main_rejects_bad_arguments(tmp_path, capsys):
    assert main(["nonsense"]) == 1
    assert json.loads(capsys.readouterr().out)["error"] == "UnknownSubcommand"
    infile = tmp_path / "in.json"
    infile.write_text("[1, 2]")
    assert main(["cE", "--in", str(infile)]) == 1
    assert main(["cE", "--format", "xml", "--in", str(infile)]) == 1


def test_point_codec():
    for S in (zeta("1/5", -2), classical(3), BerkPoint.infinity(P), zeta(0, Fraction(1, 2))):
        assert codec.decode_point(codec.encode_point(S), P) == S
    with pytest.raises(ParseError):
        codec.decode_point({"chart": "w"}, P)
    with pytest.raises(ParseError):
        codec.decode_point("0", P)


def test_value_codec():
    assert codec.encode_value(math.inf) == "inf"
    assert codec.decode_value("-inf") == -math.inf
    assert codec.decode_rational("3/6") == Fraction(1, 2)
    with pytest.raises(ValueError):
        codec.encode_value(0.5)
    with pytest.raises(ParseError):
        codec.decode_rational("inf")


def test_expansion_codec():
    x = codec.decode_scalar({"val": 1, "digits": [2, 0, 3], "prec": 3}, P)
    assert isinstance(x, Expansion)
    assert x.truncate(4) == Fraction(2 * 5 + 3 * 125)
    with pytest.raises(ParseError):
        codec.decode_scalar({"val": 0, "digits": [1], "prec": 2}, P)
