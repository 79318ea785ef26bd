import json
import subprocess
import sys

import pytest

from fastchain.cli import main
from fastchain.graph import complete_graph, segment_graph


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def ham3_file(tmp_path):
    return write(tmp_path, "ham3.json",
                 {"n": 3, "rates": [[-1, 1, 0], [0, -1, 1], [1, 0, -1]]})


@pytest.fixture
def pi3_file(tmp_path):
    return write(tmp_path, "pi3.json", [1 / 3, 1 / 3, 1 / 3])


def test_eval_hamiltonian(ham3_file, pi3_file, capsys):
    code, out, _ = run_cli(["eval", "--generator", ham3_file, "--pi", pi3_file], capsys)
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["f"] - 1.0) <= 1e-10
    assert doc["checks"]["hitting_vs_spectral"] <= 1e-8
    assert doc["checks"]["kemeny_spread"] <= 1e-9
    assert len(doc["spectrum"]) == 2


def test_eval_derivatives_block(ham3_file, capsys):
    code, out, _ = run_cli(["eval", "--generator", ham3_file, "--derivatives"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert "m_bound" in doc
    entries = {tuple(d["cycle"]): d for d in doc["derivatives"]}
    assert abs(entries[(0, 1, 2)]["first"]) <= 1e-10


def test_eval_byte_determinism(ham3_file, pi3_file, capsys):
    _, out1, _ = run_cli(["eval", "--generator", ham3_file, "--pi", pi3_file], capsys)
    _, out2, _ = run_cli(["eval", "--generator", ham3_file, "--pi", pi3_file], capsys)
    assert out1 == out2


def test_optimize_command(tmp_path, pi3_file, capsys):
    gpath = write(tmp_path, "s2.json", segment_graph(2).to_json())
    code, out, _ = run_cli(["optimize", "--graph", gpath, "--pi", pi3_file,
                            "--seed", "3"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["f_min"] - 16 / 9) <= 1e-6
    assert doc["checks"]["stationarity_gap"] <= 1e-6
    assert doc["converged"] is True


def test_optimize_determinism(tmp_path, pi3_file, capsys):
    gpath = write(tmp_path, "k3.json", complete_graph(3).to_json())
    _, out1, _ = run_cli(["optimize", "--graph", gpath, "--pi", pi3_file, "--seed", "5"], capsys)
    _, out2, _ = run_cli(["optimize", "--graph", gpath, "--pi", pi3_file, "--seed", "5"], capsys)
    assert out1 == out2


def test_dp_command(tmp_path, capsys):
    gpath = write(tmp_path, "k4.json", complete_graph(4).to_json())
    code, out, _ = run_cli(["dp", "--graph", gpath, "--mode", "discrete"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == 6.0
    assert sorted(doc["path"]) == [0, 1, 2, 3]
    code, out, _ = run_cli(["dp", "--graph", gpath, "--mode", "discrete", "--full-set"], capsys)
    assert json.loads(out)["value"] == 10.0
    code, out, _ = run_cli(["dp", "--graph", gpath, "--mode", "continuous"], capsys)
    doc = json.loads(out)
    assert doc["value"] == 6.0
    assert doc["checks"]["continuous_matches_discrete_at_unit_budgets"] == 0.0


def test_discrete_kernel_command(tmp_path, pi3_file, capsys):
    kpath = write(tmp_path, "perm.json",
                  {"n": 3, "rates": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]})
    code, out, _ = run_cli(["discrete", "--kernel", kpath, "--pi", pi3_file], capsys)
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["frak_f"] - 1.0) <= 1e-10
    assert abs(doc["hunter_trace"] - 2.0) <= 1e-10
    assert doc["checks"]["hunter_vs_frak_f"] <= 1e-8
    assert doc["checks"]["roundtrip_if_k0"] <= 1e-12


def test_discrete_compare_command(tmp_path, pi3_file, capsys):
    gpath = write(tmp_path, "s2.json", segment_graph(2).to_json())
    code, out, _ = run_cli(["discrete", "--compare", "--graph", gpath,
                            "--pi", pi3_file], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["gap"] >= -1e-8


def test_counterexample_command(capsys):
    code, out, _ = run_cli(["counterexample"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["margin"] > 0
    assert doc["r_multiplicity"] == 1


def test_s2_command(tmp_path, capsys):
    ppath = write(tmp_path, "pi.json", [0.2, 0.3, 0.5])
    code, out, _ = run_cli(["s2", "--pi", ppath], capsys)
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["f_min"] - 1.62) <= 1e-12
    assert doc["checks"]["stationarity_gap"] <= 1e-8


def test_probe_command(tmp_path, capsys):
    gpath = write(tmp_path, "k3.json", complete_graph(3).to_json())
    code, out, _ = run_cli(["probe-theorem2", "--graph", gpath, "--size", "0.01",
                            "--trials", "3", "--seed", "1"], capsys)
    assert code == 0
    assert json.loads(out)["success_fraction"] == 1.0


def test_malformed_graph_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out, err = run_cli(["dp", "--graph", str(bad)], capsys)
    assert code == 2
    assert out == ""  # no partial output
    assert "error" in err


def test_missing_file_exits_2(capsys):
    code, out, err = run_cli(["eval", "--generator", "/nonexistent.json"], capsys)
    assert code == 2 and out == ""


def test_selftest_runs():
    proc = subprocess.run([sys.executable, "-m", "fastchain.cli", "--selftest"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "selftest: PASS" in proc.stdout


def test_float_serialization_roundtrip():
    from fastchain._serialize import dumps

    doc = {"x": 1.62, "y": [1 / 3, 2.0], "n": 4, "s": "ok", "b": True}
    text = dumps(doc)
    back = json.loads(text)
    assert back["x"] == 1.62 and back["y"][0] == 1 / 3 and back["y"][1] == 2.0
    assert dumps(doc) == text
