import struct

import numpy as np
import pytest

from topofield import fieldio
from topofield.cli import main


def write_csv(path, rows):
    path.write_text("\n".join(",".join(str(x) for x in row) for row in rows) + "\n")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_diagram_constant_field(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, np.full((8, 8), 3.0).tolist())
    out = tmp_path / "d.csv"
    code, stdout, _ = run(capsys, "diagram", str(src), "--max-dim", "0", "--out", str(out))
    assert code == 0
    assert "dim0 1" in stdout
    rows = fieldio.read_diagram(out)
    assert len(rows) == 1
    assert rows[0]["essential"] == 1 and rows[0]["persistence"] == 0.0


def test_diagram_1x5(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[3, 1, 4, 1, 5]])
    out = tmp_path / "d.csv"
    code, stdout, _ = run(capsys, "diagram", str(src), "--out", str(out))
    assert code == 0
    rows = fieldio.read_diagram(out)
    assert sorted(r["persistence"] for r in rows) == [2.0, 3.0, 4.0]


def test_diagram_binary_mask_single_component(tmp_path, capsys):
    mask = np.zeros((10, 10))
    mask[3:7, 2:8] = 1.0
    src = tmp_path / "mask.csv"
    write_csv(src, mask.tolist())
    out = tmp_path / "d.csv"
    code, _, _ = run(capsys, "diagram", str(src), "--max-dim", "1", "--out", str(out))
    assert code == 0
    rows = fieldio.read_diagram(out)
    dim0 = [r for r in rows if r["dim"] == 0]
    assert len(dim0) == 1 and dim0[0]["essential"] == 1


def test_diagram_min_persistence_filter(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[3, 1, 4, 1, 5]])
    out = tmp_path / "d.csv"
    code, stdout, _ = run(capsys, "diagram", str(src), "--min-persistence", "2.5", "--out", str(out))
    assert code == 0
    assert len(fieldio.read_diagram(out)) == 2


def test_diagram_deterministic_bytes(tmp_path, capsys):
    rng = np.random.default_rng(71)
    src = tmp_path / "f.csv"
    write_csv(src, rng.uniform(size=(9, 9)).tolist())
    out1, out2 = tmp_path / "d1.csv", tmp_path / "d2.csv"
    assert run(capsys, "diagram", str(src), "--max-dim", "1", "--out", str(out1))[0] == 0
    assert run(capsys, "diagram", str(src), "--max-dim", "1", "--out", str(out2))[0] == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_diagram_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "diagram", str(tmp_path / "nope.csv"))
    assert code == 2
    assert "nope.csv" in err


def test_loss_constant(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, np.full((4, 4), 1.0).tolist())
    code, stdout, _ = run(capsys, "loss", str(src), "--k", "8")
    assert code == 0
    assert "topo 0\n" in stdout and "tv 0\n" in stdout


def test_loss_1x5_prints_13(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[3, 1, 4, 1, 5]])
    code, stdout, _ = run(
        capsys, "loss", str(src), "--k", "1", "--top-weight", "1", "--tv-weight", "0"
    )
    assert code == 0
    assert "topo 13\n" in stdout
    assert "total 13\n" in stdout


def test_loss_tv_example(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[0, 1], [0, 1]])
    code, stdout, _ = run(
        capsys, "loss", str(src), "--tv-weight", "1", "--top-weight", "0"
    )
    assert code == 0
    assert "tv 2\n" in stdout
    assert "total 2\n" in stdout


def test_loss_grad_out(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[3, 1, 4, 1, 5]])
    grad_path = tmp_path / "g.raw"
    code, _, _ = run(
        capsys, "loss", str(src), "--k", "2", "--top-weight", "1", "--tv-weight", "0",
        "--grad-out", str(grad_path),
    )
    assert code == 0
    grad = fieldio.read_field(grad_path)
    assert grad.shape == (1, 5)
    assert grad[0, 0] == 4.0 and grad[0, 1] == -4.0


def test_optimize_zero_gradient_is_identity(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[3, 1, 4, 1, 5]])
    out = tmp_path / "o.csv"
    code, _, _ = run(
        capsys, "optimize", str(src), "--k", "3", "--steps", "5", "--lr", "0.1",
        "--out", str(out),
    )
    assert code == 0
    assert np.array_equal(fieldio.read_field(out), np.array([[3.0, 1.0, 4.0, 1.0, 5.0]]))


def test_optimize_1x5_reaches_small_penalty(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[3, 1, 4, 1, 5]])
    trace_path = tmp_path / "t.csv"
    code, stdout, _ = run(
        capsys, "optimize", str(src), "--k", "1", "--steps", "200", "--lr", "0.1",
        "--tv-weight", "0", "--top-weight", "1", "--trace", str(trace_path),
    )
    assert code == 0
    final_topo = float(stdout.split("final_topo ")[1].split("\n")[0])
    assert final_topo < 1e-3
    lines = trace_path.read_text().strip().split("\n")
    assert lines[0] == "step,topo,tv"
    topos = [float(ln.split(",")[1]) for ln in lines[1:]]
    assert all(a >= b for a, b in zip(topos, topos[1:]))
    assert len(topos) == 201


def test_optimize_combined_objective_non_increasing(tmp_path, capsys):
    rng = np.random.default_rng(77)
    src = tmp_path / "f.raw"
    fieldio.write_field(src, rng.uniform(size=(10, 10)))
    trace_path = tmp_path / "t.csv"
    code, _, _ = run(
        capsys, "optimize", str(src), "--k", "1", "--steps", "60", "--lr", "0.05",
        "--tv-weight", "0.5", "--top-weight", "1", "--trace", str(trace_path),
    )
    assert code == 0
    rows = [ln.split(",") for ln in trace_path.read_text().strip().split("\n")[1:]]
    totals = [1.0 * float(t) + 0.5 * float(tv) for _, t, tv in rows]
    assert all(a >= b - 1e-12 for a, b in zip(totals, totals[1:]))


def test_optimize_divergence_aborts(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[0.0, 1e308]])
    code, _, err = run(capsys, "optimize", str(src), "--tv-weight", "1", "--steps", "3", "--lr", "0.1")
    assert code == 3
    assert "step" in err


def test_optimize_usage_errors(tmp_path, capsys):
    src = tmp_path / "f.csv"
    write_csv(src, [[1, 2]])
    assert run(capsys, "optimize", str(src), "--steps", "0")[0] == 1
    assert run(capsys, "optimize", str(src), "--lr", "-1")[0] == 1


def test_evaluate_identical_depth(tmp_path, capsys):
    src = tmp_path / "y.csv"
    write_csv(src, [[1.0, 2.0], [3.0, 4.0]])
    code, stdout, _ = run(capsys, "evaluate", str(src), str(src))
    assert code == 0
    assert "mae" in stdout and "delta1" in stdout
    values = dict(line.split() for line in stdout.strip().split("\n"))
    assert float(values["mae"]) == 0.0
    assert float(values["delta1"]) == 1.0


def test_evaluate_seg_example(tmp_path, capsys):
    gt, pred = tmp_path / "gt.csv", tmp_path / "p.csv"
    write_csv(gt, [[1, 1, 0, 0]])
    write_csv(pred, [[1, 0, 0, 0]])
    code, stdout, _ = run(capsys, "evaluate", str(gt), str(pred), "--task", "seg", "--threshold", "0.5")
    assert code == 0
    assert float(stdout.split()[-1]) == pytest.approx(7 / 12, rel=1e-15)


def test_evaluate_delta_boundary(tmp_path, capsys):
    y = np.arange(1, 10, dtype=float).reshape(3, 3)
    gt, pred = tmp_path / "gt.csv", tmp_path / "p.csv"
    write_csv(gt, y.tolist())
    write_csv(pred, (1.25 * y).tolist())
    code, stdout, _ = run(capsys, "evaluate", str(gt), str(pred), "--csv", str(tmp_path / "m.csv"))
    assert code == 0
    values = dict(line.split() for line in stdout.strip().split("\n"))
    assert float(values["delta1"]) == 0.0
    assert float(values["delta2"]) == 1.0
    assert (tmp_path / "m.csv").read_text().startswith("metric,value\n")


def test_evaluate_shape_mismatch(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(a, [[1, 2]])
    write_csv(b, [[1, 2, 3]])
    assert run(capsys, "evaluate", str(a), str(b))[0] == 2


def test_evaluate_domain_error(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(a, [[1, -2]])
    write_csv(b, [[1, 2]])
    assert run(capsys, "evaluate", str(a), str(b))[0] == 3


def test_raw_f32_round_trip(tmp_path):
    rng = np.random.default_rng(73)
    arr = rng.normal(size=(5, 7, 3)).astype(np.float32).astype(np.float64)
    path = tmp_path / "f.raw"
    fieldio.write_field(path, arr)
    back = fieldio.read_field(path)
    assert np.array_equal(back, arr)
    header = path.read_bytes()[:12]
    assert struct.unpack("<III", header) == (5, 7, 3)


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(74)
    arr = rng.normal(size=(4, 6))
    path = tmp_path / "f.csv"
    fieldio.write_field(path, arr)
    assert np.array_equal(fieldio.read_field(path), arr)


def test_pgm_round_trip(tmp_path):
    rng = np.random.default_rng(75)
    raw = rng.integers(0, 256, size=(6, 9), dtype=np.uint8)
    path = tmp_path / "f.pgm"
    path.write_bytes(b"P5\n9 6\n255\n" + raw.tobytes())
    arr = fieldio.read_field(path)
    assert arr.shape == (6, 9)
    assert np.array_equal(arr, raw / 255.0)
    out = tmp_path / "o.pgm"
    fieldio.write_field(out, arr)
    assert np.array_equal(fieldio.read_field(out), arr)


def test_multi_file_channels(tmp_path, capsys):
    a, b = tmp_path / "c0.csv", tmp_path / "c1.csv"
    write_csv(a, [[3.0]])
    write_csv(b, [[4.0]])
    code, stdout, _ = run(capsys, "diagram", str(a), str(b), "--out", str(tmp_path / "d.csv"))
    assert code == 0
    rows = fieldio.read_diagram(tmp_path / "d.csv")
    assert rows[0]["birth"] == 5.0  # norm of (3, 4)


def test_channel_shape_mismatch(tmp_path, capsys):
    a, b = tmp_path / "c0.csv", tmp_path / "c1.csv"
    write_csv(a, [[3.0]])
    write_csv(b, [[4.0, 1.0]])
    assert run(capsys, "diagram", str(a), str(b))[0] == 2


def test_bad_raw_header(tmp_path, capsys):
    path = tmp_path / "f.raw"
    path.write_bytes(struct.pack("<III", 2, 2, 1) + b"\x00" * 7)
    assert run(capsys, "diagram", str(path))[0] == 2


def test_nan_field_is_domain_error(tmp_path, capsys):
    path = tmp_path / "f.raw"
    payload = np.array([1.0, np.nan, 2.0, 3.0], dtype="<f4").tobytes()
    path.write_bytes(struct.pack("<III", 2, 2, 1) + payload)
    assert run(capsys, "diagram", str(path))[0] == 3


def test_cross_process_determinism(tmp_path):
    import subprocess
    import sys

    rng = np.random.default_rng(79)
    src = tmp_path / "f.raw"
    fieldio.write_field(src, rng.uniform(size=(10, 10)))
    blobs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        subprocess.run(
            [sys.executable, "-m", "topofield", "diagram", str(src), "--max-dim", "1",
             "--out", str(out)],
            check=True, capture_output=True,
        )
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]


def test_usage_error_unknown_flag(capsys):
    assert run(capsys, "diagram", "x.csv", "--bogus")[0] == 1


def test_usage_error_no_command(capsys):
    assert run(capsys)[0] == 1
