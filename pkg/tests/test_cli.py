import json
import math

import numpy as np
import pytest

from symop.cli import main

TWO_ATOM_ALGEBRA = {"blocks": [{"dim": 1, "weight": 1.0},
                               {"dim": 1, "weight": 2.0}]}
TWO_ATOM_NORM = {"kind": "custom_two_atom", "c": 3.0}


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _interleave(matrix):
    flat = np.asarray(matrix, dtype=complex).reshape(-1)
    return [float(v) for pair in zip(flat.real, flat.imag) for v in pair]


def _example_isometry_matrix():
    s2, s3 = math.sqrt(2.0), math.sqrt(3.0)
    return [[-1j / s2, s3 / s2], [1j / (s2 * s3), 1.0 / s2]]


def test_mu_and_norm_commands(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "element": {"blocks": [[3.0, 0.0], [4.0, 0.0]]},
    })
    assert main(["mu", "--config", cfg, "--format", "json-lines"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["values"] == [4.0, 3.0]
    assert row["lengths"] == [2.0, 1.0]

    assert main(["norm", "--config", cfg, "--format", "json-lines"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["norm"] == pytest.approx(math.sqrt(9 + 48))

    assert main(["dual-norm", "--config", cfg,
                 "--format", "json-lines"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["dual_norm"] == pytest.approx(
        math.sqrt(9 + (4.0 / 3.0) * 16))


def test_element_file_loading(tmp_path, capsys):
    data = tmp_path / "x.dat"
    # block count, then per block: dim and interleaved entries
    data.write_text("2\n1 3.0 0.0\n1 4.0 0.0\n")
    cfg = _write(tmp_path, "cfg.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "element": {"path": "x.dat"},
    })
    assert main(["norm", "--config", cfg, "--format", "json-lines"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["norm"] == pytest.approx(math.sqrt(57))


def test_hermitian_certify_exit_codes(tmp_path, capsys):
    s3 = math.sqrt(3.0)
    good = _write(tmp_path, "good.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "operator": {"kind": "dense",
                     "matrix": _interleave([[1.0, 1j * s3],
                                            [-1j / s3, 1.0]])},
    })
    assert main(["hermitian", "certify", "--config", good,
                 "--format", "json-lines"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["verdict"] == "hermitian"
    assert row["tolerances"]["oracle"] == 1e-08

    bad = _write(tmp_path, "bad.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "operator": {"kind": "dense",
                     "matrix": _interleave([[1j, 0.0], [0.0, 2.0]])},
    })
    # a reached negative verdict still exits 0
    assert main(["hermitian", "certify", "--config", bad,
                 "--format", "json-lines"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["verdict"] == "not_hermitian"


def test_hermitian_decompose_reports_residual(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {
        "algebra": {"blocks": [{"dim": 2, "weight": 1.0}]},
        "operator": {"kind": "transpose"},
    })
    # the transpose map is far from every multiplication: exit 1
    assert main(["hermitian", "decompose", "--config", cfg,
                 "--format", "json-lines"]) == 1
    row = json.loads(capsys.readouterr().out)
    assert row["residual"] == pytest.approx(math.sqrt(3.0))


def test_isometry_check_and_factor(tmp_path, capsys):
    iso = _write(tmp_path, "iso.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "operator": {"kind": "dense",
                     "matrix": _interleave(_example_isometry_matrix())},
    })
    assert main(["isometry", "check", "--config", iso,
                 "--format", "json-lines", "--samples", "50"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["holds"] is True

    # exact isometry, but it admits no multiplication factorization
    assert main(["isometry", "factor", "--config", iso]) == 1
    err = capsys.readouterr().err
    assert "rejected" in err

    doubled = _write(tmp_path, "double.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "operator": {"kind": "dense",
                     "matrix": _interleave([[2.0, 0.0], [0.0, 2.0]])},
    })
    assert main(["isometry", "check", "--config", doubled,
                 "--format", "json-lines", "--samples", "20"]) == 1
    row = json.loads(capsys.readouterr().out)
    assert row["defect"] == pytest.approx(1.0)


def test_isometry_factor_success(tmp_path, capsys):
    cfg = _write(tmp_path, "id.json", {
        "algebra": {"blocks": [{"dim": 2, "weight": 1.0}]},
        "norm": {"kind": "lp", "p": 1},
        "operator": {"kind": "identity"},
    })
    assert main(["isometry", "factor", "--config", cfg,
                 "--format", "json-lines"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["z_bits"] == [1]
    assert row["transposed"] == [False]
    assert row["trace_preserving"] is True


def test_central_decompose_command(tmp_path, capsys):
    # block 1: b scalar; block 2: a scalar (lam = 0 for simplicity)
    cfg = _write(tmp_path, "cfg.json", {
        "algebra": {"blocks": [{"dim": 2, "weight": 1.0},
                               {"dim": 1, "weight": 1.0}]},
        "a": {"blocks": [_interleave([[1.0, 2.0], [2.0, -1.0]]),
                         _interleave([[3.0]])]},
        "b": {"blocks": [_interleave([[2.0, 0.0], [0.0, 2.0]]),
                         _interleave([[4.0]])]},
        "e": {"blocks": [_interleave([[2.0, 4.0], [4.0, -2.0]]),
                         _interleave([[12.0]])]},
        "f": {"blocks": [_interleave([[0.0, 0.0], [0.0, 0.0]]),
                         _interleave([[0.0]])]},
    })
    assert main(["central", "decompose", "--config", cfg,
                 "--format", "json-lines"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["z_bits"] == [1, 1]
    assert max(row["centrality_defects"].values()) < 1e-12


def test_gallery_exam_command(capsys):
    assert main(["gallery", "exam", "--samples", "50",
                 "--format", "json-lines"]) == 0
    captured = capsys.readouterr()
    row = json.loads(captured.out)
    assert row["isometry"]["holds"] is True
    assert row["hermitian"]["verdict"] == "hermitian"
    assert "elapsed" not in captured.out  # timing goes to stderr only
    assert "finished" in captured.err


def test_selftest_subset(capsys):
    assert main(["selftest", "--criteria", "1,2",
                 "--format", "json-lines"]) == 0
    captured = capsys.readouterr()
    rows = [json.loads(line) for line in captured.out.splitlines()]
    assert [r["index"] for r in rows] == [1, 2]
    assert all(r["passed"] for r in rows)
    assert "criterion 1" in captured.err


def test_input_error_exit_codes(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["norm", "--config", missing]) == 2
    assert "error:" in capsys.readouterr().err

    bad_norm = _write(tmp_path, "bad.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": {"kind": "no_such"},
        "element": {"blocks": [[1.0, 0.0], [0.0, 0.0]]},
    })
    assert main(["norm", "--config", bad_norm]) == 2

    # two-atom gauge on the wrong algebra is a domain error
    wrong = _write(tmp_path, "wrong.json", {
        "algebra": {"blocks": [{"dim": 3, "weight": 1.0}]},
        "norm": TWO_ATOM_NORM,
        "element": {"blocks": [[1.0, 0.0] * 9]},
    })
    assert main(["norm", "--config", wrong]) == 2


def test_env_overrides_and_flag_priority(tmp_path, capsys, monkeypatch):
    cfg = _write(tmp_path, "cfg.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "operator": {"kind": "identity"},
    })
    monkeypatch.setenv("SYMOP_SEED", "77")
    monkeypatch.setenv("SYMOP_SAMPLES", "25")
    monkeypatch.setenv("SYMOP_FORMAT", "json-lines")
    assert main(["isometry", "check", "--config", cfg]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["seed"] == 77
    assert row["samples"] == 25

    # explicit flag beats the environment
    assert main(["isometry", "check", "--config", cfg, "--seed", "5"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["seed"] == 5


def test_reports_are_byte_identical(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "operator": {"kind": "dense",
                     "matrix": _interleave(_example_isometry_matrix())},
    })
    outputs = []
    for _ in range(2):
        assert main(["isometry", "check", "--config", cfg,
                     "--seed", "3", "--samples", "40",
                     "--format", "json-lines"]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]


def test_report_file_output(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {
        "algebra": TWO_ATOM_ALGEBRA,
        "norm": TWO_ATOM_NORM,
        "element": {"blocks": [[1.0, 0.0], [1.0, 0.0]]},
    })
    out = tmp_path / "report.txt"
    assert main(["norm", "--config", cfg, "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert "norm" in out.read_text()
