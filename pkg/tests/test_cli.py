import json
import subprocess
import sys

import jsonschema
import pytest

from ptw.cli import main
from ptw.parser import parse_spec
from ptw.report import Options, exit_code, render_report, run_spec

from conftest import ROOT, SPECS

SCHEMA = json.loads((ROOT / "docs" / "report.schema.json").read_text())

EVEN_ODD = """
var x : int[0..31];
var y : int[0..31];
program p { if (x % 2 == 0) { y := y + 1 } else { y := 2 * y } }
"""


def write(tmp_path, text, name="s.ptw"):
    f = tmp_path / name
    f.write_text(text)
    return str(f)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expect_valid_exits_0(tmp_path, capsys):
    f = write(tmp_path, EVEN_ODD + "check partial_incorrectness [y==10] p [y==11] expect valid;")
    code, out, _ = run_cli(capsys, "check", f)
    assert code == 0 and "expect valid: ok" in out


def test_expect_mismatch_exits_1(tmp_path, capsys):
    f = write(tmp_path, EVEN_ODD + "check partial_incorrectness [y==10] p [y==11] expect invalid;")
    code, out, _ = run_cli(capsys, "check", f)
    assert code == 1 and "expect invalid: MISMATCH" in out


def test_witness_in_json(tmp_path, capsys):
    f = write(tmp_path, EVEN_ODD + "check total_incorrectness [y==10] p [y==11];")
    code, out, _ = run_cli(capsys, "check", f, "--json")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert code == 0
    assert report["directives"][0]["witness"] == {"x": 1, "y": 11}
    assert report["directives"][0]["valid"] is False


def test_bool_witness_rendered_as_bool(capsys):
    code, out, _ = run_cli(capsys, "check", str(SPECS / "cat.ptw"), "--json")
    d = json.loads(out)["directives"][1]
    assert code == 0 and d["witness"] == {"open": False, "dead": False, "spill": False}


def test_empty_directive_list(tmp_path, capsys):
    f = write(tmp_path, "var x : bool;")
    code, out, _ = run_cli(capsys, "check", f, "--json")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert code == 0 and report["directives"] == [] and report["engine_agreement"]


def test_injected_disagreement(capsys):
    code, out, _ = run_cli(capsys, "check", str(SPECS / "even_odd.ptw"), "--json",
                           "--inject-disagreement")
    report = json.loads(out)
    assert code == 1 and report["engine_agreement"] is False
    code, out, _ = run_cli(capsys, "check", str(SPECS / "even_odd.ptw"), "--inject-disagreement")
    assert code == 1 and "ENGINE DISAGREEMENT" in out


@pytest.mark.parametrize("argv", [
    ["check"], ["frobnicate"], ["check", "x.ptw", "--engine", "fast"], [],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_file_and_parse_errors_exit_2(tmp_path, capsys):
    code, _, err = run_cli(capsys, "check", str(tmp_path / "missing.ptw"))
    assert code == 2 and "cannot read" in err
    f = write(tmp_path, "var x : int[0..3];\nprogram p { y := 1 }")
    code, _, err = run_cli(capsys, "check", f)
    assert code == 2 and "2:13: assignment to undeclared variable 'y'" in err


def test_max_states_exit_2(capsys):
    code, _, err = run_cli(capsys, "check", str(SPECS / "even_odd.ptw"), "--max-states", "1000")
    assert code == 2 and "--max-states=1000" in err


@pytest.mark.parametrize("spec", ["even_odd.ptw", "cat.ptw", "variants.ptw"])
@pytest.mark.parametrize("flags", [[], ["--json"], ["--annotate", "--trace-fixpoints"],
                                   ["--json", "--annotate", "--trace-fixpoints"]])
def test_examples_pass_and_are_byte_identical(spec, flags):
    cmd = [sys.executable, "-m", "ptw", "check", str(SPECS / spec), *flags]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.returncode == 0, first.stdout.decode() + first.stderr.decode()
    assert first.stdout == second.stdout
    if "--json" in flags:
        jsonschema.validate(json.loads(first.stdout), SCHEMA)


@pytest.mark.parametrize("engine", ["semantic", "syntactic", "both"])
def test_engines_give_same_verdicts(engine):
    spec = parse_spec((SPECS / "even_odd.ptw").read_text())
    report = run_spec(spec, Options(engine=engine))
    assert [d["valid"] for d in report["directives"]] == [True, False, None, None, False]
    assert exit_code(report) == 0


def test_annotate_json(capsys):
    code, out, _ = run_cli(capsys, "check", str(SPECS / "even_odd.ptw"), "--json", "--annotate")
    query = json.loads(out)["directives"][2]
    assert [a["point"] for a in query["annotations"]] == \
        ["pre", "then.entry", "then.exit", "else.entry", "else.exit", "post"]
    assert query["annotations"][-1]["size"] == query["size"] == 272


def test_json_round_trips():
    spec = parse_spec((SPECS / "variants.ptw").read_text())
    report = run_spec(spec, Options(trace_fixpoints=True))
    data = render_report(report, "json")
    assert json.loads(data) == report


def test_timing_is_opt_in(capsys):
    _, out, _ = run_cli(capsys, "check", str(SPECS / "cat.ptw"), "--json")
    assert "timing_seconds" not in json.loads(out)
    _, out, _ = run_cli(capsys, "check", str(SPECS / "cat.ptw"), "--json", "--timing")
    assert json.loads(out)["timing_seconds"] >= 0


def test_fuzz_subcommand(capsys):
    code, out, _ = run_cli(capsys, "fuzz", "--seed", "4", "--count", "10", "--json")
    summary = json.loads(out)
    assert summary["seed"] == 4 and summary["count"] == 10
    oracle_checks = summary["suites"][0]["violations"]
    assert oracle_checks["oracle_wp"] == oracle_checks["syntactic_slp"] == 0
    assert code == (0 if summary["total_violations"] == 0 else 1)
