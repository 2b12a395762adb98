import json
import subprocess
import sys

import numpy as np
import pytest

from exspec.cli import main
from exspec.core import SquareMatrix, matrix_to_csv, matrix_to_json


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_writes_samples_and_manifest(tmp_path, capsys):
    out = tmp_path / "gen"
    code, stdout, _ = run_cli(
        ["gen", "--ensemble", "perm_sum_regular", "--n", "10", "--d", "3",
         "--count", "2", "--seed", "5", "--out", str(out)],
        capsys,
    )
    assert code == 0
    assert (out / "sample_0000.csv").exists()
    assert (out / "sample_0001.csv").exists()
    assert (out / "manifest.json").exists()
    prov = json.loads((out / "sample_0000.provenance.json").read_text())
    assert prov["seed"] == 5 and prov["index"] == 0
    manifest = json.loads(stdout)
    assert manifest["n"] == 10 and manifest["d"] == 3


def test_gen_rerun_is_byte_identical(tmp_path, capsys):
    args = ["gen", "--n", "8", "--d", "2", "--count", "3", "--seed", "9",
            "--format", "json"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(args + ["--out", str(a)], capsys)[0] == 0
    assert run_cli(args + ["--out", str(b)], capsys)[0] == 0
    for name in ("sample_0000.json", "sample_0002.json", "sample_0001.provenance.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_gen_invalid_d_exits_2(tmp_path, capsys):
    code, _, err = run_cli(
        ["gen", "--n", "4", "--d", "9", "--out", str(tmp_path / "x")], capsys
    )
    assert code == 2
    assert "error" in err


def test_analyze_identity_permutation_matrix(tmp_path, capsys):
    n = 4
    M = SquareMatrix(np.eye(n))
    f = tmp_path / "m.json"
    f.write_text(matrix_to_json(M))
    code, stdout, _ = run_cli(["analyze", str(f), "--d", "1"], capsys)
    assert code == 0
    rep = json.loads(stdout)
    assert rep["s1"] == pytest.approx(1.0)
    assert rep["s2"] == pytest.approx(1.0)
    assert rep["u"] == [1.0] * n
    assert rep["deg_membership"]["member"] is True
    assert rep["s2_via_centering"] == pytest.approx(1.0)
    assert rep["scaling"]["hypotheses_ok"] is True


def test_analyze_reads_csv_and_writes_out(tmp_path, capsys):
    M = SquareMatrix(np.array([[0.0, 2.0], [2.0, 0.0]]))
    f = tmp_path / "m.csv"
    f.write_text(matrix_to_csv(M))
    out = tmp_path / "report.json"
    code, _, _ = run_cli(["analyze", str(f), "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["s1"] == pytest.approx(2.0)


def test_verify_subset_suite_passes(capsys):
    code, stdout, _ = run_cli(["verify", "subset", "--seed", "3"], capsys)
    assert code == 0
    rep = json.loads(stdout)
    assert rep["passed"] is True
    assert all(r["passed"] for r in rep["records"])


def test_verify_all_suites_pass(capsys):
    code, stdout, _ = run_cli(["verify", "all"], capsys)
    assert code == 0
    assert json.loads(stdout)["passed"] is True


def test_tail_norm_writes_curve_files(tmp_path, capsys):
    out = tmp_path / "tail"
    code, stdout, _ = run_cli(
        ["tail", "norm", "--ensemble", "perm_sum_regular", "--n", "16",
         "--d", "2", "--zero-diagonal", "--trials", "120", "--seed", "4",
         "--c", "0.05", "--out", str(out)],
        capsys,
    )
    assert code == 0
    assert json.loads(stdout)["all_hold"] is True
    payload = json.loads((out / "curve.json").read_text())
    assert payload["manifest"]["trials"] == 120
    csv_lines = (out / "curve.csv").read_text().strip().split("\n")
    assert csv_lines[0] == "tau,p_left,ci_left,p_right,ci_right"
    assert len(csv_lines) == len(payload["thresholds"]) + 1


def test_tail_rerun_byte_identical(tmp_path, capsys):
    args = ["tail", "s2", "--n", "16", "--d", "3", "--delta", "2.0",
            "--trials", "80", "--seed", "11", "--grid", "0.5,1,2"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(args + ["--out", str(a)], capsys)[0] == 0
    assert run_cli(args + ["--out", str(b)], capsys)[0] == 0
    assert (a / "curve.csv").read_bytes() == (b / "curve.csv").read_bytes()
    assert (a / "curve.json").read_bytes() == (b / "curve.json").read_bytes()


def test_tail_corner_capture(tmp_path, capsys):
    E = np.ones((8, 8)) - np.eye(8)
    f = tmp_path / "m.json"
    f.write_text(matrix_to_json(SquareMatrix(E, zero_diagonal=True)))
    out = tmp_path / "cc"
    code, stdout, _ = run_cli(
        ["tail", "corner-capture", "--matrix", str(f), "--trials", "150",
         "--seed", "2", "--out", str(out)],
        capsys,
    )
    assert code == 0
    assert json.loads(stdout)["best_c"] > 0.0
    assert (out / "curve.csv").read_text().startswith("c,p_hat,ci")


def test_tail_degree_event(tmp_path, capsys):
    out = tmp_path / "de"
    code, stdout, _ = run_cli(
        ["tail", "degree-event", "--n", "20", "--d", "3", "--delta", "3.0",
         "--zero-diagonal", "--trials", "100", "--out", str(out)],
        capsys,
    )
    assert code == 0
    res = json.loads(stdout)
    assert 0.0 <= res["p_E"] <= 1.0
    assert (out / "curve.json").exists()


def test_tail_blocks(tmp_path, capsys):
    base_entries = np.arange(64, dtype=float).reshape(8, 8)
    f = tmp_path / "base.json"
    f.write_text(matrix_to_json(SquareMatrix(base_entries)))
    out = tmp_path / "blk"
    code, stdout, _ = run_cli(
        ["tail", "blocks", "--ensemble", "separately_exchangeable", "--n", "8",
         "--base", str(f), "--trials", "100", "--out", str(out)],
        capsys,
    )
    assert code == 0
    assert json.loads(stdout)["all_hold"] is True


def test_manifest_file_overrides_flags(tmp_path, capsys):
    mf = tmp_path / "manifest.json"
    mf.write_text(json.dumps({"n": 12, "d": 2, "count": 1, "seed": 21}))
    out = tmp_path / "g"
    code, stdout, _ = run_cli(
        ["gen", "--n", "6", "--d", "1", "--manifest", str(mf), "--out", str(out)],
        capsys,
    )
    assert code == 0
    effective = json.loads(stdout)
    assert effective["n"] == 12 and effective["d"] == 2 and effective["seed"] == 21
    first = (out / "sample_0000.csv").read_text()
    assert len(first.strip().split("\n")) == 12


def test_missing_out_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--n", "4", "--d", "1"])
    assert exc.value.code == 2


def test_unreadable_matrix_is_io_error(tmp_path, capsys):
    code, _, err = run_cli(["analyze", str(tmp_path / "nope.csv")], capsys)
    assert code == 3
    assert "I/O" in err


def test_console_entry_point_subprocess(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "exspec.cli", "verify", "subset"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True


def test_threads_env_does_not_change_output(tmp_path):
    import os

    outs = []
    for workers in ("1", "4", "8"):
        env = dict(os.environ, EXSPEC_THREADS=workers)
        out = tmp_path / f"w{workers}"
        proc = subprocess.run(
            [sys.executable, "-m", "exspec.cli", "tail", "norm", "--n", "16",
             "--d", "2", "--zero-diagonal", "--trials", "100", "--seed", "13",
             "--out", str(out)],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0
        outs.append((out / "curve.csv").read_bytes() + (out / "curve.json").read_bytes())
    assert outs[0] == outs[1] == outs[2]
