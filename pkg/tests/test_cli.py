import json
import subprocess
import sys

import numpy as np
import pytest

import steptwo as st
from steptwo.cli import run
from steptwo.fields import SampledField, symmetric_axis


def run_cli(argv, capsys):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_group_preset(capsys):
    code, out, _ = run_cli(["group", "--group", "preset:quaternionic-heisenberg"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["n"] == 2 and data["r"] == 3 and len(data["B"]) == 3


def test_group_file_and_malformed(tmp_path, capsys):
    path = tmp_path / "g.json"
    path.write_text(st.heisenberg(2).to_json())
    code, out, _ = run_cli(["group", "--group", str(path)], capsys)
    assert code == 0 and json.loads(out)["n"] == 2

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(["group", "--group", str(bad)], capsys)
    assert code == 1 and "malformed" in err


def test_spectral_normalize(capsys):
    code, out, _ = run_cli(
        ["spectral", "normalize", "--group", "preset:quaternionic-heisenberg",
         "--tau", "1,0,0"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    np.testing.assert_allclose(data["mu"], [1.0, 1.0], atol=1e-12)
    assert data["residual_normal_form"] < 1e-10
    assert data["residual_orthogonality"] < 1e-10


def test_spectral_normalize_degenerate_exit_code(capsys):
    code, _, err = run_cli(
        ["spectral", "normalize", "--group", "preset:heisenberg-1", "--tau", "0"],
        capsys,
    )
    assert code == 1 and "tau != 0" in err


def test_spectral_scan_csv(tmp_path, capsys):
    out_path = tmp_path / "scan.csv"
    code, _, _ = run_cli(
        ["spectral", "scan", "--group", "preset:quaternionic-heisenberg",
         "--samples", "7", "--seed", "3", "--out", str(out_path)],
        capsys,
    )
    assert code == 0
    rows = out_path.read_text().strip().splitlines()
    assert rows[0] == "tau0,tau1,tau2,mu0,mu1,min_gap,flagged"
    assert len(rows) == 8


def test_laguerre_eval(capsys):
    code, out, _ = run_cli(
        ["laguerre", "eval", "--k", "3", "--p", "2", "--sigma", "0.7"], capsys
    )
    assert code == 0
    data = json.loads(out)
    assert data["polynomial"] == pytest.approx(4.167833333333333)


def test_laguerre_field_csv(tmp_path, capsys):
    out_path = tmp_path / "field.csv"
    code, _, _ = run_cli(
        ["laguerre", "field", "--group", "preset:heisenberg-1", "--tau", "1",
         "--k", "1", "--p", "-1", "--grid", "5,16", "--out", str(out_path)],
        capsys,
    )
    assert code == 0
    rows = out_path.read_text().strip().splitlines()
    assert rows[0] == "x0,x1,re,im"
    assert len(rows) == 257


def test_fundamental_point(capsys):
    code, out, _ = run_cli(
        ["fundamental", "--group", "preset:heisenberg-1", "--point", "1,0,0"],
        capsys,
    )
    assert code == 0
    data = json.loads(out)
    assert data["value_re"] == pytest.approx(1.0, abs=1e-8)
    assert abs(data["value_im"]) < 1e-12
    assert data["est_error"] < 1e-9 and data["nodes_used"] > 0


def test_fundamental_bad_point(capsys):
    code, _, err = run_cli(
        ["fundamental", "--group", "preset:heisenberg-1", "--point", "1,0"],
        capsys,
    )
    assert code == 1 and "--point needs 3" in err
    code, _, err = run_cli(
        ["fundamental", "--group", "preset:heisenberg-1", "--point", "0,0,1"],
        capsys,
    )
    assert code == 1 and "y != 0" in err


def test_szego_point(capsys):
    code, out, _ = run_cli(
        ["szego", "--k", "1", "--y", "1,0,0,0", "--s", "0,0,0"], capsys
    )
    assert code == 0
    data = json.loads(out)
    expected = 24.0 / np.pi**4
    np.testing.assert_allclose(
        data["matrix_re"], expected * np.eye(2), atol=1e-10
    )


def test_convolve_twisted_paths(tmp_path, capsys):
    ax = symmetric_axis(6.0, 64)
    tau = np.array([1.0])
    h1 = st.heisenberg(1)
    fr = st.normalize(h1, tau)
    f = SampledField.from_function(
        (ax, ax), lambda p: np.exp(-1.3 * np.sum(p**2, -1)) + 0j
    )
    fa, fb = tmp_path / "a.field", tmp_path / "b.field"
    f.save(fa)
    f.save(fb)
    out1 = tmp_path / "direct.field"
    code, _, _ = run_cli(
        ["convolve", "--a", str(fa), "--b", str(fb), "--group",
         "preset:heisenberg-1", "--tau", "1", "--path", "direct",
         "--out", str(out1)],
        capsys,
    )
    assert code == 0
    out2 = tmp_path / "tensor.field"
    code, _, _ = run_cli(
        ["convolve", "--a", str(fa), "--b", str(fb), "--group",
         "preset:heisenberg-1", "--tau", "1", "--path", "tensor",
         "--K", "6", "--out", str(out2)],
        capsys,
    )
    assert code == 0
    direct = SampledField.load(out1)
    tens = SampledField.load(out2)
    assert np.abs(direct.values - tens.values).max() < 1e-3

    code, _, err = run_cli(
        ["convolve", "--a", str(fa), "--b", str(fb), "--group",
         "preset:heisenberg-1", "--tau", "1", "--path", "fourier",
         "--out", str(tmp_path / "x.field")],
        capsys,
    )
    assert code == 1 and "direct or tensor" in err


def test_convolve_group_fourier(tmp_path, capsys):
    axes = (symmetric_axis(4.0, 10),) * 2 + (symmetric_axis(6.0, 10),)
    f = SampledField.from_function(axes, lambda p: np.exp(-np.sum(p**2, -1)) + 0j)
    fa = tmp_path / "a.field"
    f.save(fa)
    outd = tmp_path / "d.field"
    outf = tmp_path / "f.field"
    for path, dest in (("direct", outd), ("fourier", outf)):
        code, _, _ = run_cli(
            ["convolve", "--a", str(fa), "--b", str(fa), "--group",
             "preset:heisenberg-1", "--path", path, "--out", str(dest)],
            capsys,
        )
        assert code == 0
    vd = SampledField.load(outd).values
    vf = SampledField.load(outf).values
    assert np.abs(vd - vf).max() < 5e-3 * np.abs(vd).max()


def test_tensor_subcommands(tmp_path, capsys):
    ax = symmetric_axis(6.0, 64)
    f = SampledField.from_function(
        (ax, ax), lambda p: np.exp(-1.1 * np.sum(p**2, -1)) + 0j
    )
    fpath = tmp_path / "f.field"
    f.save(fpath)
    tpath = tmp_path / "T.json"
    code, _, _ = run_cli(
        ["tensor", "of-field", "--field", str(fpath), "--group",
         "preset:heisenberg-1", "--tau", "1", "--K", "5", "--out", str(tpath)],
        capsys,
    )
    assert code == 0
    ppath = tmp_path / "P.json"
    code, _, _ = run_cli(
        ["tensor", "multiply", "--a", str(tpath), "--b", str(tpath),
         "--out", str(ppath)],
        capsys,
    )
    assert code == 0
    data = json.loads(ppath.read_text())
    assert data["K"] == 5
    entries = np.asarray(data["entries_re"]) + 1j * np.asarray(data["entries_im"])
    # product of a diagonal-ish radial tensor stays near-diagonal
    assert np.isfinite(entries).all()


def test_usage_error_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "steptwo.cli", "nonsense"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2


def test_selftest_smoke(capsys):
    code, out, _ = run_cli(["selftest", "spectral", "--seed", "7"], capsys)
    assert code == 0
    assert "result=PASS" in out
    assert all(line.startswith(("PASS", "suite=")) for line in out.strip().splitlines())
