import csv
import json
import subprocess
import sys

import pytest

from schwartz_comp.cli import main
from schwartz_comp.corpus import BUILTIN


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def run_json(args, capsys):
    code, out = run(args + ["--format", "json"], capsys)
    return code, json.loads(out)


def test_parse_json(capsys):
    code, rep = run_json(["parse", "x^2+1"], capsys)
    assert code == 0
    assert rep["schema"] == "schwartz-comp/report/1" and rep["command"] == "parse"
    assert "wall_clock_s" not in rep


def test_syntax_error_exit_3(capsys):
    assert main(["parse", "x^^2"]) == 3
    assert "offset" in capsys.readouterr().err


def test_unknown_subcommand_exit_3(capsys):
    assert main(["frobnicate"]) == 3


@pytest.mark.parametrize("args,code", [
    (["symbol-check", "--phi", "x^2+1"], 0),
    (["symbol-check", "--phi", "sin(x)"], 1),
    (["seminorm", "--f", "exp(-x^2)", "--n", "1"], 0),
    (["seminorm", "--f", "1/(1+x^2)", "--n", "2"], 1),
    (["multiplier-check", "--F", "2*x"], 0),
    (["multiplier-check", "--F", "exp(-x^2)"], 1),
    (["closed-range", "--phi", "x^2"], 0),
    (["closed-range", "--phi", "x", "--cinf", "no"], 1),
])
def test_exit_codes(args, code, capsys):
    assert run(args, capsys)[0] == code


def test_seminorm_value(capsys):
    code, rep = run_json(["seminorm", "--f", "exp(-x^2)", "--n", "1"], capsys)
    assert rep["result"]["value"] == pytest.approx(4 / 2.718281828459045, abs=1e-5)


def test_compose_deriv(capsys):
    code, rep = run_json(["compose-deriv", "--f", "x^2", "--phi", "x^2+1", "--n", "4", "--at", "0.5"], capsys)
    assert code == 0 and float(rep["result"]["value"]) == pytest.approx(24.0)


def test_precondition_error_exit_3(capsys):
    assert main(["witness", "--phi", "x^3", "--violation", "lemma1"]) == 3


def test_not_a_symbol_exit_3(capsys):
    assert main(["closed-range", "--phi", "sin(x)"]) == 3


def test_witness_csv(tmp_path, capsys):
    path = tmp_path / "w.csv"
    code, _ = run(["witness", "--phi", "sin(x)", "--violation", "lemma1", "--count", "5", "--emit-csv", str(path)],
                  capsys)
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert len(rows) == 6


def test_output_file_and_set(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["seminorm", "--f", "exp(-x^2)", "--n", "1", "--set", "refine_depth=10", "--format", "json",
                 "--output", str(out)])
    rep = json.loads(out.read_text())
    assert code == 0 and rep["config"]["refine_depth"] == 10


def test_bad_set_key_exit_3():
    assert main(["parse", "x", "--set", "nope=1"]) == 3


def test_json_is_byte_identical(capsys):
    args = ["symbol-check", "--phi", "exp(x^2)", "--format", "json"]
    main(args)
    a = capsys.readouterr().out
    main(args)
    b = capsys.readouterr().out
    assert a == b


def test_timing_is_opt_in(capsys):
    code, rep = run_json(["parse", "x", "--timing"], capsys)
    assert rep["wall_clock_s"] >= 0


def test_empty_corpus_exit_3(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    assert main(["corpus", "--file", str(p)]) == 3


def test_flipped_corpus_reports_mismatch(tmp_path, capsys):
    entries = [{"name": "flip", "kind": "symbol", "input": "x^2+1", "expected": "Fails(lemma1)"},
               {"name": "ok", "kind": "multiplier", "input": "2*x", "expected": "Holds"}]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(entries))
    code, rep = run_json(["corpus", "--file", str(p)], capsys)
    assert code == 1
    assert rep["result"]["mismatches"] == ["flip"] and rep["result"]["matched"] == 1


def test_corpus_small_subset_matches(tmp_path, capsys):
    pick = [e for e in BUILTIN if e.name in ("sym-x3", "mul-gauss", "cr-x")]
    p = tmp_path / "c.json"
    p.write_text(json.dumps([{"name": e.name, "kind": e.kind, "input": e.input, "expected": e.expected,
                              "region": e.region, "rules": list(e.rules)} for e in pick]))
    code, rep = run_json(["corpus", "--file", str(p)], capsys)
    assert code == 0 and rep["result"]["matched"] == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "schwartz_comp", "parse", "x^3", "--format", "json"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["result"]["text"] == "x^3"
