"""Command-line behavior, exercised in process through main()."""

import json

import pytest

from ppvforge.bundlejson import encode_matrix, encode_series, load_bundle, save_bundle
from ppvforge.cli import main
from ppvforge.rational import RatFunc, rat
from ppvforge.seeds import dt_oracle
from ppvforge.series import TMatrix, TSeries


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def bundle_path(tmp_path_factory, small_a1_bundle):
    path = tmp_path_factory.mktemp("cli") / "a1.json"
    save_bundle(small_a1_bundle, path)
    return path


def test_build_writes_passing_bundle(capsys, tmp_path):
    out = tmp_path / "built.json"
    code, stdout, _ = run(
        capsys, "build", "--group", "A1", "--prec", "8", "--out", str(out)
    )
    assert code == 0
    assert "overall: PASS" in stdout
    assert f"bundle written to {out}" in stdout
    assert load_bundle(out).prec == 8


def test_verify_recomputes_and_passes(capsys, bundle_path):
    code, stdout, _ = run(capsys, "verify", str(bundle_path))
    assert code == 0
    assert "overall: PASS" in stdout


def test_verify_flags_tampered_matrix(capsys, tmp_path, bundle_path):
    doc = json.loads(bundle_path.read_text())
    doc["matrix_A"]["entries"][0][0]["coeffs"][0]["num"] = ["5/1"]
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(doc))
    code, stdout, _ = run(capsys, "verify", str(bad))
    assert code == 1
    assert "overall: FAIL" in stdout
    assert any(
        "solution-identity" in line and "FAIL" in line
        for line in stdout.splitlines()
    )


def test_verify_truncated_file_is_usage_error(capsys, tmp_path, bundle_path):
    bad = tmp_path / "cut.json"
    bad.write_text(bundle_path.read_text()[:200])
    code, _, stderr = run(capsys, "verify", str(bad))
    assert code == 2
    assert "error:" in stderr


def test_build_input_validation(capsys, tmp_path):
    out = str(tmp_path / "x.json")
    code, _, err = run(
        capsys, "build", "--group", "A2", "--points", "0,1", "--prec", "8", "--out", out
    )
    assert code == 2 and "4 per root" in err

    code, _, err = run(capsys, "build", "--group", "B9", "--out", out)
    assert code == 2

    code, _, err = run(
        capsys, "build", "--group", "A1", "--points", "0,1,1,2", "--prec", "8", "--out", out
    )
    assert code == 2 and "distinct" in err

    code, _, err = run(
        capsys, "build", "--group", "A1", "--points", "0,zebra,2,3", "--prec", "8", "--out", out
    )
    assert code == 2 and "bad point list" in err

    code, _, err = run(capsys, "build", "--group", "A1", "--prec", "4", "--out", out)
    assert code == 2 and "below the minimum" in err


def test_factor_from_bundle(capsys, tmp_path, bundle_path):
    out = tmp_path / "patch.json"
    code, stdout, _ = run(
        capsys, "factor", "--from-bundle", str(bundle_path), "--out", str(out)
    )
    assert code == 0
    assert "achieved order 10" in stdout
    doc = json.loads(out.read_text())
    assert doc["achieved_order"] == 10
    assert doc["checks"]["ok"] is True
    assert doc["checks"]["residual_orders"] == [10, 10, 10, 10]


def test_factor_rejects_pole_outside_point_set(capsys, tmp_path):
    pole = TSeries(1, [RatFunc.linear_pole(rat(9))], 6)
    outside = TMatrix([[TSeries.constant(1, 6) + pole]])
    ident = TMatrix([[TSeries.constant(1, 6)]])
    doc = {
        "points": ["0", "1"],
        "precision": 6,
        "matrices": [encode_matrix(outside), encode_matrix(ident)],
    }
    src = tmp_path / "factor-in.json"
    src.write_text(json.dumps(doc))
    code, _, err = run(
        capsys, "factor", "--in", str(src), "--out", str(tmp_path / "out.json")
    )
    assert code == 1
    assert "PoleOutsidePointSetError" in err


def test_factor_usage_errors(capsys, tmp_path):
    out = str(tmp_path / "out.json")
    code, _, err = run(capsys, "factor", "--out", out)
    assert code == 2 and "factor needs" in err
    code, _, err = run(capsys, "factor", "--in", str(tmp_path / "missing.json"), "--out", out)
    assert code == 2 and "cannot read" in err


def test_rootcheck_passes_for_both_types(capsys):
    code, stdout, _ = run(capsys, "rootcheck", "--group", "A1")
    assert code == 0
    assert "reflection identity pass" in stdout
    assert "generation hypotheses: pass" in stdout

    code, stdout, _ = run(capsys, "rootcheck", "--group", "C2", "--samples", "1")
    assert code == 0
    assert stdout.count("reflection identity pass") == 8  # all C2 roots


def test_reconstruct_probe_is_inconclusive(capsys):
    code, stdout, _ = run(
        capsys, "reconstruct", "--probe-f", "0", "--dx", "3", "--prec", "16"
    )
    assert code == 1
    assert "inconclusive at bounds (x-degree 3, t-degree 3)" in stdout


def test_reconstruct_unaffordable_degree(capsys):
    code, _, err = run(
        capsys, "reconstruct", "--probe-f", "1", "--dx", "6", "--prec", "16"
    )
    assert code == 2
    assert "needs series order 18" in err


def test_reconstruct_certifies_planted_series(capsys, tmp_path):
    doc = {"series": encode_series(dt_oracle(rat(2), 12)), "points": ["2"]}
    src = tmp_path / "series.json"
    src.write_text(json.dumps(doc))
    code, stdout, _ = run(capsys, "reconstruct", "--in", str(src), "--dx", "1")
    assert code == 0
    assert "certificate found at x-degree 1" in stdout
    assert "vanishes mod t^12: True" in stdout


def test_reconstruct_input_validation(capsys, tmp_path):
    code, _, err = run(capsys, "reconstruct", "--dx", "1")
    assert code == 2 and "reconstruct needs" in err
    src = tmp_path / "noseries.json"
    src.write_text(json.dumps({"points": ["0"]}))
    code, _, err = run(capsys, "reconstruct", "--in", str(src), "--dx", "1")
    assert code == 2 and "'series'" in err


def test_argparse_level_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "build", "--group", "A1")  # --out is required
    assert code == 2
    code, _, _ = run(capsys, "no-such-command")
    assert code == 2
    code, _, _ = run(capsys)
    assert code == 2
    code, stdout, _ = run(capsys, "--help")
    assert code == 0
    assert "build" in stdout and "reconstruct" in stdout
