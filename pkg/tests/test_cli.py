from __future__ import annotations

import json
import subprocess
import sys

import pytest

from dangular.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--degrees", "3")
    assert code == 0
    d = json.loads(out)
    assert d["schema"] == 1
    assert d["tau"] == pytest.approx(0.5) and d["rho"] == pytest.approx(0.25) and d["gamma"] == pytest.approx(0.5)


def test_constants_schema_check(capsys):
    code, out, _ = run(capsys, "constants", "--degrees", "3,4", "--schema-check")
    assert code == 0
    r = json.loads(out)["schemaResiduals"]
    assert max(r.values()) < 1e-10


def test_exact_series_json_and_csv(capsys):
    code, out, _ = run(capsys, "exact-series", "--surface", "cylinder", "--order", "5")
    assert code == 0
    assert json.loads(out)["coefficients"] == [0, 1, 4, 16, 64, 256]
    code, out, _ = run(capsys, "exact-series", "--surface", "disc", "--order", "5", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["n,coefficient", "0,0", "1,0", "2,1", "3,1", "4,2", "5,5"]


def test_tree_coeffs(capsys):
    code, out, _ = run(capsys, "tree-coeffs", "--degrees", "3", "--order", "6")
    assert json.loads(out)["coefficients"] == [0, 1, 1, 2, 5, 14, 42]
    code, out, _ = run(capsys, "tree-coeffs", "--degrees", "3", "--order", "6", "--legs", "1", "--route", "B")
    assert code == 0


def test_scheme_table(capsys):
    code, out, _ = run(capsys, "scheme-table", "--orientable", "--max-genus", "1", "--max-boundaries", "2")
    assert code == 0
    cells = {c["surface"]: c["a"] for c in json.loads(out)["table"]}
    assert cells["O1.1"] == 1 and cells["O0.2"] == 1


def test_asymptotic(capsys):
    code, out, _ = run(capsys, "asymptotic", "--surface", "O1.1", "--n", "100", "200")
    assert code == 0
    d = json.loads(out)
    assert d["estimate"]["base"] == pytest.approx(4.0)
    assert [r["n"] for r in d["convergence"]] == [100, 200]


def test_sample_csv(capsys, tmp_path):
    out_file = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sample", "--surface", "cylinder", "--n", "20", "--count", "5", "--seed", "3",
                     "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == "sampleIndex,structuringEdges,isDissection"
    assert len(lines) == 6
    code, out, _ = run(capsys, "sample", "--surface", "cylinder", "--n", "20", "--count", "5", "--seed", "3")
    assert out.splitlines() == lines


def test_limit_check(capsys):
    code, out, _ = run(capsys, "limit-check", "--surface", "cylinder", "--n", "30", "--samples", "200",
                       "--seed", "1", "--rmax", "2", "--no-4n")
    assert code == 0
    d = json.loads(out)
    assert d["seed"] == 1 and len(d["moments"]) == 3


def test_usage_errors_exit_2(capsys):
    for argv in (["constants", "--degrees", "1,2"], ["exact-series", "--surface", "X9", "--order", "3"],
                 ["sample", "--surface", "cylinder", "--n", "5", "--count", "2"],  # no seed
                 ["sample", "--surface", "cylinder", "--n", "0", "--count", "2", "--seed", "1"], []):
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == 2
    capsys.readouterr()


def test_computation_errors_exit_1(capsys):
    # even degrees force even sizes on the cylinder
    code, _, err = run(capsys, "sample", "--surface", "cylinder", "--degrees", "4", "--n", "5", "--count", "1",
                       "--seed", "1")
    assert code == 1
    e = json.loads(err)["error"]
    assert e["command"] == "sample" and e["type"] == "ContractViolation"
    code, _, err = run(capsys, "exact-series", "--surface", "disc", "--degrees", "4", "--order", "3")
    assert code == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "dangular", "constants"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["p"] == 1
