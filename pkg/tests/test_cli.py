import json
import subprocess
import sys

import pytest

from jensen_duality import cli
from jensen_duality.errors import SolverError

POLE = {"kind": "rational", "num": {"kind": "polynomial", "coeffs": [1]},
        "den": {"kind": "polynomial", "coeffs": [1, -1]}}
SMALL = {
    "blaschke": {"sequence": {"generator": "1 - 1/n^2", "N": 1000}},
    "pj-verify": {"random": {"count": 4, "degree": 3}, "seed": 2},
    "duality": {"grid": {"R": 1.0, "n": [4, 8]}, "x": {"preset": "log_abs", "a": [0.37, 0.21]}},
    "nevanlinna": {"function": POLE, "r_grid": [0.5, 0.9]},
    "quotient": {"function": POLE, "family": {"size": 12, "seed": 1}},
    "zero-set": {"sequence": {"points": [0.5]}, "family": {"size": 12, "seed": 1}},
    "nontrivial": {"weight": {"preset": "power", "alpha": 1.0, "p": 2.0},
                   "family": {"size": 12, "seed": 1}},
}


def run(tmp_path, command, doc, *flags):
    src = tmp_path / f"{command}.json"
    src.write_text(json.dumps(doc))
    out = tmp_path / f"{command}.out"
    code = cli.main([command, "--input", str(src), "--output", str(out), *flags])
    return code, (out.read_text() if out.exists() else None)


@pytest.mark.parametrize("command", sorted(SMALL))
def test_command_runs_and_is_deterministic(tmp_path, command):
    code, text = run(tmp_path, command, SMALL[command])
    assert code == cli.EXIT_OK
    first = json.loads(text)
    code, text = run(tmp_path, command, SMALL[command])
    second = json.loads(text)
    assert first["determinism_hash"] == second["determinism_hash"]
    assert first["determinism_hash"] == cli.determinism_hash(first)
    assert first["command"] == command and first["tool"] == "jensen-duality"
    assert {"config", "input", "provenance", "result", "timestamp"} <= set(first)


def test_results_of_small_runs(tmp_path):
    r = json.loads(run(tmp_path, "blaschke", SMALL["blaschke"])[1])["result"]
    assert r["verdict"] == "zero_set"
    r = json.loads(run(tmp_path, "pj-verify", SMALL["pj-verify"])[1])["result"]
    assert r["pass"] and r["max_diff"] <= 1e-8
    r = json.loads(run(tmp_path, "duality", SMALL["duality"])[1])["result"]
    assert r["max_gap"] <= 1e-9
    r = json.loads(run(tmp_path, "zero-set", SMALL["zero-set"])[1])["result"]
    assert r["agree"]


def test_seed_flag_overrides_and_changes_hash(tmp_path):
    a = json.loads(run(tmp_path, "quotient", SMALL["quotient"])[1])
    b = json.loads(run(tmp_path, "quotient", SMALL["quotient"], "--seed", "9")[1])
    assert a["determinism_hash"] != b["determinism_hash"]


def test_missing_seed_is_an_input_error(tmp_path):
    code, _ = run(tmp_path, "quotient", {"function": POLE, "family": {"size": 12}})
    assert code == cli.EXIT_INPUT
    code, _ = run(tmp_path, "pj-verify", {"random": {"count": 2}})
    assert code == cli.EXIT_INPUT


@pytest.mark.parametrize("doc", [
    {"polynomial": {"coeffs": [0, 1]}, "measure": {"kind": "circle", "center": 0, "radius": 0.5}},
    {"sequence": {"generator": "exp(-n)"}},
])
def test_bad_input_exit_code(tmp_path, doc):
    command = "pj-verify" if "polynomial" in doc else "blaschke"
    assert run(tmp_path, command, doc)[0] == cli.EXIT_INPUT


def test_invalid_test_object_exit_code(tmp_path):
    doc = {"polynomial": {"coeffs": [-0.5, 1]},
           "measure": {"kind": "circle", "center": [0.5, 0], "radius": 0.2}}
    assert run(tmp_path, "pj-verify", doc)[0] == cli.EXIT_INVALID


def test_solver_failure_exit_code(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise SolverError("iteration limit")
    monkeypatch.setattr(cli, "solve_instance", boom)
    assert run(tmp_path, "duality", SMALL["duality"])[0] == cli.EXIT_SOLVER


def test_unknown_flag_and_missing_file(tmp_path):
    assert cli.main(["blaschke", "--bogus"]) == cli.EXIT_INPUT
    assert cli.main(["blaschke", "--input", str(tmp_path / "nope.json")]) == cli.EXIT_INPUT


def test_csv_trace(tmp_path):
    code, text = run(tmp_path, "blaschke", SMALL["blaschke"], "--format", "csv")
    assert code == cli.EXIT_OK
    lines = text.splitlines()
    assert lines[0].startswith("# jensen-duality") and "determinism_hash=" in lines[0]
    assert lines[1] == "sequence,n,partial_sum"
    assert len(lines) > 3


def test_stdout_and_stdin(tmp_path, capsys, monkeypatch):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(SMALL["nevanlinna"])))
    assert cli.main(["nevanlinna", "--input", "-"]) == cli.EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["max_T"] > 0


def test_atomic_write_leaves_no_temp_files(tmp_path):
    run(tmp_path, "nevanlinna", SMALL["nevanlinna"])
    assert sorted(p.name for p in tmp_path.iterdir()) == ["nevanlinna.json", "nevanlinna.out"]
    cli.write_atomic(tmp_path / "x.json", "{}\n")
    assert (tmp_path / "x.json").read_text() == "{}\n"


def test_unwritable_output_is_an_input_error(tmp_path):
    src = tmp_path / "n.json"
    src.write_text(json.dumps(SMALL["nevanlinna"]))
    out = tmp_path / "missing_dir" / "r.json"
    assert cli.main(["nevanlinna", "--input", str(src), "--output", str(out)]) == cli.EXIT_INPUT


def test_canonical_json_handles_non_finite():
    assert cli.canonical_json(cli.to_jsonable({"a": float("inf"), "b": [float("nan")]})) == \
        '{"a":"inf","b":["nan"]}'


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "jensen_duality", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("jensen-duality ")
