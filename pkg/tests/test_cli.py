import csv
import json
import shutil
import subprocess

import pytest

from blockforge.cli import main
from blockforge.io import language_to_dict
from blockforge.languages import named_language


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    return code, json.loads(out)


@pytest.fixture
def not_language(tmp_path):
    path = tmp_path / "not.json"
    path.write_text(json.dumps(language_to_dict(named_language("NOT"))))
    return str(path)


def test_verify_realized(capsys, not_language):
    code, data = run_json(capsys, "verify", "NOT", not_language)
    assert code == 0
    assert data["realizes"] is True
    assert data["ground_states"] == 2


def test_verify_counterexample(capsys):
    code, out, err = run(capsys, "verify", "NOT", "expr:x1")
    assert code == 1
    assert "counterexample" in err


def test_search_infeasible_exit_one(capsys):
    code, out, _ = run(capsys, "search", "NOR", "--atoms", "4")
    assert code == 1
    assert "infeasible" in out


def test_search_feasible(capsys):
    code, data = run_json(capsys, "search", "NOR", "--atoms", "5", "--all", "--exact-size", "--geometry")
    assert code == 0
    assert data["distinct_solutions"] >= 2
    assert "embedded" in data["unit_disk"]


def test_search_budget_exit_three(capsys):
    assert run(capsys, "search", "SCU", "--atoms", "10", "--max-nodes", "3")[0] == 3
    assert run(capsys, "search", "NOR", "--atoms", "12")[0] == 3


def test_compile_nor(capsys, tmp_path):
    target = tmp_path / "nor.json"
    code, data = run_json(capsys, "compile", "--expr", "x1 nor x2", "-o", str(target))
    assert code == 0
    assert data["atoms"] == 5
    assert json.loads(target.read_text())["ports"]


def test_compile_table_with_constraint(capsys):
    code, data = run_json(capsys, "compile", "--table", "0b1001", "--inputs", "2", "--constrain", "1")
    assert code == 0
    assert data["ports"] == ["x1", "x2"]


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["search", "NOR"], ["compile"], ["gsm", "no-such-complex"],
    ["tessellate", "--model", "surface-code", "--dims", "2by2"], ["compile", "--table", "9"],
])
def test_usage_errors_exit_two(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_gsm_json_and_file(capsys, tmp_path):
    target = tmp_path / "gsm.json"
    code, data = run_json(capsys, "gsm", "NOR_ring", "-o", str(target))
    assert code == 0
    assert data["ground_energy"] == "-3"
    assert sorted(g["ports"] for g in data["ground_states"]) == ["001", "010", "100", "110"]
    assert json.loads(target.read_text()) == data


def test_gsm_vdw(capsys):
    code, data = run_json(capsys, "gsm", "NOR_triangle", "--vdw", "--c6", "1.0")
    assert code == 0
    v = data["vdw"]
    assert len(v["lowest"]) == 16
    assert v["ratio"] == pytest.approx(v["width"] / v["gap"])


def test_gsm_vdw_needs_c6(capsys):
    assert run(capsys, "gsm", "NOT", "--vdw")[0] == 2


def test_catalog_list_and_show(capsys, tmp_path):
    code, data = run_json(capsys, "catalog", "list")
    assert code == 0
    assert {r["name"] for r in data["entries"]} >= {"NOT", "SCU", "FMU"}
    lang = tmp_path / "lang.json"
    code, data = run_json(capsys, "catalog", "show", "XNOR", "--language-output", str(lang))
    assert data["language"] == ["001", "010", "100", "111"]
    assert json.loads(lang.read_text())["word_length"] == 3
    assert run(capsys, "catalog", "show")[0] == 2


def test_tessellate_verify(capsys):
    code, data = run_json(capsys, "tessellate", "--model", "fibonacci", "--dims", "1x1", "--boundary", "open",
                          "--verify")
    assert code == 0
    assert data["ground_states"] == 13
    assert data["verified"] is True


def test_tessellate_geometric(capsys, tmp_path):
    target = tmp_path / "patch.json"
    code, data = run_json(capsys, "tessellate", "--model", "surface-code", "--dims", "2x2", "--boundary", "rough",
                          "--geometric", "-o", str(target))
    assert code == 0
    assert data["geometric"] and data["atoms"] == 40
    assert run(capsys, "metrics", str(target))[0] == 0


def test_render(capsys, tmp_path):
    target = tmp_path / "scu.svg"
    assert run(capsys, "render", "SCU", "-o", str(target))[0] == 0
    assert target.read_text().startswith("<svg")
    assert run(capsys, "render", "NOT", "--no-disks", "-o", str(tmp_path / "n.svg"))[0] == 0


def test_lang_commands(capsys, tmp_path):
    code, data = run_json(capsys, "lang", "--expr", "x1 ^ x2")
    assert data["words"] == ["000", "011", "101", "110"]
    code, data = run_json(capsys, "lang", "--lattice", "square", "--dims", "2x2")
    assert data["size"] == 32
    code, data = run_json(capsys, "lang", "--name", "FMU", "-o", str(tmp_path / "fmu.json"))
    assert data["size"] == 13
    assert run(capsys, "lang")[0] == 2


def test_lang_modes(capsys):
    code, data = run_json(capsys, "lang", "truth-table", "--expr", "x1^x2")
    assert code == 0 and data["size"] == 4
    code, data = run_json(capsys, "lang", "tessellate", "--lattice", "square", "--dims", "2x2",
                          "--boundary", "periodic", "--check", "z2")
    assert code == 0 and data["size"] == 32
    assert run(capsys, "lang", "tessellate", "--expr", "x1")[0] == 2


def test_metrics(capsys):
    code, data = run_json(capsys, "metrics", "NOR_ring")
    assert code == 0
    assert data["robustness"] == pytest.approx(0.236, abs=1e-3)
    assert data["geometry_consistent"] is True


def test_optimize_with_trace(capsys, tmp_path):
    trace = tmp_path / "trace.csv"
    out = tmp_path / "opt.json"
    code, data = run_json(capsys, "optimize", "NOT", "--iterations", "20", "--restarts", "1", "--jobs", "1",
                          "--trace", str(trace), "-o", str(out))
    assert code == 0
    assert data["success"]
    assert next(csv.reader(trace.open())) == ["iteration", "best_objective", "current_objective"]
    assert json.loads(out.read_text())["atoms"]


def test_amalgamate(capsys, tmp_path):
    out = tmp_path / "or.json"
    code, data = run_json(capsys, "amalgamate", "NOR_ring", "NOT", "--gamma", "Q:A", "-o", str(out))
    assert code == 0
    assert data["atoms"] == 6
    assert data["ok"]
    code, out_text, err = run(capsys, "amalgamate", "NOR_triangle", "NOT", "--gamma", "Q:A")
    assert code == 2
    assert "error" in err


def test_console_script():
    exe = shutil.which("blockforge")
    if exe is None:
        pytest.skip("console script not on PATH")
    res = subprocess.run([exe, "verify", "NOT", "expr:!x1"], capture_output=True, text=True)
    assert res.returncode == 0
