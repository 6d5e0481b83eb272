import csv
import json

import numpy as np
import pytest

from gatelab.bipartite import BipartiteOperator, Dims, haar_unitary, make_rng
from gatelab.cli import main, scatter_points
from gatelab.io import MatrixFileError, RunManifest, load_matrix, save_matrix
from gatelab.measures import gate_measures


def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_measure_named_gates(capsys):
    assert main(["measure", "cnot"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ep"] == pytest.approx(2 / 3) and out["gt"] == pytest.approx(1 / 3)
    assert main(["measure", "swap:n=2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ep"] == pytest.approx(0, abs=1e-15) and out["gt"] == pytest.approx(1)
    assert set(out) >= {"E", "E_swapped", "schmidt", "is_dual", "is_two_unitary"}


def test_measure_file_roundtrip_is_bitwise(tmp_path, capsys):
    op = BipartiteOperator(Dims(2, 3), haar_unitary(6, make_rng(1)))
    path = tmp_path / "gate.json"
    save_matrix(op, path)
    np.testing.assert_array_equal(load_matrix(path).mat, op.mat)
    assert main(["measure", f"file:{path}"]) == 0
    got = json.loads(capsys.readouterr().out)
    want = gate_measures(op).as_dict()
    for k in ("E", "E_swapped", "ep", "gt"):
        assert got[k] == want[k]
    assert main(["measure", "--input", str(path)]) == 0


def test_measure_csv_format(capsys):
    assert main(["measure", "dcnot", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "E,E_swapped,ep,gt,is_dual,is_two_unitary"


def test_exit_codes(tmp_path, capsys):
    assert main(["measure", "toffoli"]) == 2
    assert main(["measure", "fswap:t=abc"]) == 2
    assert main(["measure", "haar:n=2"]) == 2  # random without a seed
    assert main(["scatter", "--out", str(tmp_path / "s.csv")]) == 2  # no --seed
    bad = tmp_path / "bad.json"
    save_matrix(BipartiteOperator(Dims(2, 2), np.eye(4)), bad)
    data = json.loads(bad.read_text())
    data["re"][0][0] = 2.0
    bad.write_text(json.dumps(data))
    assert main(["measure", f"file:{bad}"]) == 3
    assert "bad.json" in capsys.readouterr().err
    assert main(["nonsense"]) == 2


def test_load_matrix_errors_name_the_file(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(MatrixFileError, match="broken.json"):
        load_matrix(p)
    with pytest.raises(MatrixFileError, match="missing.json"):
        load_matrix(tmp_path / "missing.json")


def test_scatter_empty_and_boundary(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["scatter", "--samples", "0", "--seed", "1", "--out", str(out)]) == 0
    assert out.read_text() == "ep,gt\n"
    curves = _read_csv(tmp_path / "s_boundary.csv")
    assert {r["curve"] for r in curves} == {"parabola", "bottom line", "right line", "top line"}
    assert (tmp_path / "s.manifest.json").exists()


def test_scatter_means_two_qubits(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["scatter", "--samples", "10000", "--seed", "2", "--out", str(out)]) == 0
    rows = np.array([[float(r["ep"]), float(r["gt"])] for r in _read_csv(out)])
    assert len(rows) == 10000
    assert rows[:, 0].mean() == pytest.approx(3 / 5, abs=0.01)
    assert rows[:, 1].mean() == pytest.approx(1 / 2, abs=0.01)


def test_scatter_three_qutrits_mean():
    pts = scatter_points(Dims(3, 3), 10000, seed=3)
    assert pts[:, 0].mean() == pytest.approx(4 / 5, abs=0.01)


def test_scatter_thread_independent():
    a = scatter_points(Dims(2, 3), 2500, seed=4, threads=1)
    b = scatter_points(Dims(2, 3), 2500, seed=4, threads=3)
    np.testing.assert_array_equal(a, b)


def test_thermalize_no_locals_fswap(tmp_path):
    out = tmp_path / "t.csv"
    rc = main(["thermalize", "--gate", "fswap:t=0.3,n=2", "--mode", "no-locals", "--steps", "10",
               "--trials", "2", "--seed", "1", "--out", str(out)])
    assert rc == 0
    rows = _read_csv(out)
    assert list(rows[0]) == ["n", "mean_ep", "stderr_ep", "mean_gt", "stderr_gt", "X", "Y",
                             "theory_ep", "theory_gt"]
    for r in rows:
        n = int(r["n"])
        assert float(r["mean_ep"]) == pytest.approx(np.sin(0.6 * n) ** 2 / 2, abs=1e-12)


def test_thermalize_single_step_is_gate_value(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["thermalize", "--gate", "csalpha:alpha=0.3", "--steps", "1", "--trials", "5",
                 "--seed", "1", "--out", str(out)]) == 0
    assert main(["measure", "csalpha:alpha=0.3"]) == 0
    ep = json.loads(capsys.readouterr().out)["ep"]
    assert float(_read_csv(out)[0]["mean_ep"]) == ep


def test_floats_use_17_significant_digits(tmp_path):
    out = tmp_path / "t.csv"
    main(["thermalize", "--gate", "cnot", "--steps", "3", "--trials", "20", "--seed", "1",
          "--out", str(out)])
    row = _read_csv(out)[2]
    assert float(row["mean_ep"]) == float(format(float(row["mean_ep"]), ".17g"))
    assert len(row["theory_ep"].replace(".", "").lstrip("0")) >= 15


def test_manifest_replay_reproduces_bitwise(tmp_path, capsys):
    out = tmp_path / "t.csv"
    argv = ["thermalize", "--gate", "diag:eps=0.2,dims=2x3", "--steps", "6", "--trials", "300",
            "--seed", "9", "--threads", "2", "--out", str(out)]
    assert main(argv) == 0
    before = out.read_bytes()
    man = RunManifest.read(tmp_path / "t.manifest.json")
    assert man.seed == 9 and man.command == "thermalize" and man.version
    out.write_text("clobbered")
    assert main(["replay", str(tmp_path / "t.manifest.json")]) == 0
    assert out.read_bytes() == before


def test_json_table_format(tmp_path):
    out = tmp_path / "s.json"
    assert main(["scatter", "--samples", "5", "--seed", "1", "--format", "json",
                 "--out", str(out)]) == 0
    recs = json.loads(out.read_text())
    assert len(recs) == 5 and set(recs[0]) == {"ep", "gt"}


def test_spectra_swap_bare_gate(tmp_path):
    out = tmp_path / "spec"
    assert main(["spectra", "--gate", "swap:n=4", "--steps", "0", "--which", "reshuffled",
                 "--seed", "1", "--out", str(out)]) == 0
    rows = _read_csv(out / "eigenvalues.csv")
    mods = [abs(complex(float(r["re"]), float(r["im"]))) for r in rows]
    assert np.allclose(mods, 1.0)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["samples"][0]["which"] == "reshuffled"
    assert (out / "manifest.json").exists()


def test_spectra_small_diag_kinds(tmp_path):
    out = tmp_path / "spec"
    assert main(["spectra", "--gate", "diag:eps=1,dims=6x6", "--steps", "1-3", "--seed", "2",
                 "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert [(s["which"], s["step"]) for s in summary["samples"]][:2] == [
        ("reshuffled", 1), ("partial-transpose", 1)]
    assert len(summary["samples"]) == 6


def test_verify_quick_passes(capsys):
    assert main(["verify", "--quick"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and len(report["checks"]) >= 10


def test_verify_rejects_corrupted_gate_file(tmp_path, capsys):
    p = tmp_path / "corrupt.json"
    p.write_text('{"dims": [2, 2], "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}')
    assert main(["verify", "--quick", "--gate-file", str(p)]) == 3
    assert "corrupt.json" in capsys.readouterr().err
