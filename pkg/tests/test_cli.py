import json
from pathlib import Path

import numpy as np
import pytest

from oslx import cli
from oslx.grid import read_grid


def run_cli(*args):
    return cli.main(list(args))


def test_gen_half_space(tmp_path):
    assert run_cli("gen", "half-space", "--n", "64", "--dim", "1",
                   "--out", str(tmp_path)) == 0
    assert (tmp_path / "half_space.csv").exists()
    assert (tmp_path / "half_space_maximal.csv").exists()
    manifest = json.loads((tmp_path / "half_space_manifest.json").read_text())
    assert manifest["generator"] == "half-space" and manifest["n"] == 64


def test_gen_power_weight(tmp_path):
    assert run_cli("gen", "power-weight", "--a", "1", "--n", "64",
                   "--out", str(tmp_path)) == 0
    w = read_grid(tmp_path / "power_weight.csv")
    assert w.resolution == 64 and np.all(w.values > 0)


def test_gen_same_seed_identical_bytes(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    for d in (d1, d2):
        assert run_cli("gen", "dyadic-bmo", "--n", "32", "--seed", "9",
                       "--out", str(d)) == 0
    assert (d1 / "dyadic_bmo.csv").read_bytes() == (d2 / "dyadic_bmo.csv").read_bytes()


def test_gen_bad_params_usage_exit(tmp_path):
    assert run_cli("gen", "dyadic-bmo", "--n", "17", "--out", str(tmp_path)) == 1
    assert run_cli("gen", "power-weight", "--a", "-5", "--n", "16",
                   "--out", str(tmp_path)) == 1


def test_eval_constant_input(tmp_path, capsys):
    src = tmp_path / "const.csv"
    src.write_text("2\n2\n2\n2\n")
    assert run_cli("eval", "--input", str(src), "--out", str(tmp_path)) == 0
    sharp = read_grid(tmp_path / "sharp.csv")
    assert np.allclose(sharp.values, 0.0)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["bmo"]["value"] == 0.0 and report["blo"]["value"] == 0.0


def test_eval_half_space_indicator_bmo(tmp_path):
    src = tmp_path / "ind.csv"
    src.write_text("".join("1\n" for _ in range(32)) + "".join("0\n" for _ in range(32)))
    assert run_cli("eval", "--input", str(src), "--family", "all",
                   "--out", str(tmp_path)) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert abs(report["bmo"]["value"] - 0.5) < 1e-12


def test_eval_oracle_flag(tmp_path):
    assert run_cli("gen", "dyadic-bmo", "--n", "16", "--seed", "2",
                   "--out", str(tmp_path)) == 0
    assert run_cli("eval", "--input", str(tmp_path / "dyadic_bmo.csv"),
                   "--oracle", "--out", str(tmp_path)) == 0


def test_eval_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1\nx\n")
    assert run_cli("eval", "--input", str(bad), "--out", str(tmp_path)) == 1


def test_constants_unit_weight(tmp_path, capsys):
    src = tmp_path / "unit.csv"
    src.write_text("1\n" * 16)
    assert run_cli("constants", "--input", str(src), "--family", "all") == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["a1"] - 1.0) < 1e-12 and abs(out["a_infty"] - 1.0) < 1e-9


def test_constants_rejects_nonpositive_without_floor(tmp_path, capsys):
    src = tmp_path / "w.csv"
    src.write_text("1\n0\n1\n1\n")
    assert run_cli("constants", "--input", str(src)) == 1
    assert run_cli("constants", "--input", str(src), "--floor") == 0


def test_constants_family_domination(tmp_path, capsys):
    rng = np.random.default_rng(5)
    src = tmp_path / "w.csv"
    src.write_text("\n".join(f"{v}" for v in rng.uniform(0.5, 3.0, 16)) + "\n")
    assert run_cli("constants", "--input", str(src), "--family", "all") == 0
    allv = json.loads(capsys.readouterr().out)["a_infty"]
    assert run_cli("constants", "--input", str(src), "--family", "dyadic") == 0
    dyv = json.loads(capsys.readouterr().out)["a_infty"]
    assert allv >= dyv - 1e-12


@pytest.mark.parametrize("suite", ["pmean", "tails", "goodlambda", "localratio",
                                   "nonlocal", "weights", "xbound", "char"])
def test_verify_quick_suites_pass(suite, tmp_path):
    out = tmp_path / "report.json"
    assert run_cli("verify", suite, "--suite", "quick", "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["pass"] is True


def test_verify_is_byte_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli("verify", "all", "--suite", "quick", "--out", str(a)) == 0
    assert run_cli("verify", "all", "--suite", "quick", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_stale_calibration_exit(tmp_path):
    frozen = Path(cli._DATA_DIR / "calibration_quick.json").read_text()
    tampered = tmp_path / "cal.json"
    tampered.write_text(frozen.replace('"corpus_hash":"', '"corpus_hash":"00'))
    assert run_cli("verify", "pmean", "--suite", "quick",
                   "--calibration", str(tampered)) == 3


def test_verify_freeze_writes_calibration(tmp_path):
    cal = tmp_path / "cal.json"
    assert run_cli("verify", "all", "--suite", "quick", "--freeze",
                   "--calibration", str(cal)) == 0
    assert cal.read_text() == Path(cli._DATA_DIR / "calibration_quick.json").read_text()
    assert run_cli("verify", "pmean", "--suite", "quick",
                   "--calibration", str(cal)) == 0
    # freeze only makes sense for the full suite
    assert run_cli("verify", "pmean", "--suite", "quick", "--freeze",
                   "--calibration", str(cal)) == 1


def test_verify_char_with_weight_file(tmp_path):
    src = tmp_path / "w.csv"
    src.write_text("1\n" * 32 + "8\n" * 32)
    out = tmp_path / "report.json"
    assert run_cli("verify", "char", "--weight", str(src), "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["rows"][0]["value"] >= 0.5 - 1e-12


def test_sweep_p_axis_monotone(tmp_path):
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "--n", "64", "--p", "1,2,3,4,5,6,7,8", "--a", "0",
                   "--family", "dyadic", "--out", str(out)) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert len(rows) == 8
    lhs = [float(r[3]) for r in rows]
    assert all(b >= a - 1e-9 for a, b in zip(lhs, lhs[1:]))


def test_sweep_a_infty_column_monotone(tmp_path):
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "--n", "64", "--p", "1", "--a", "0,1,2,4",
                   "--family", "dyadic", "--out", str(out)) == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    fw = [float(r[2]) for r in rows]
    assert all(b >= a - 1e-9 for a, b in zip(fw, fw[1:]))


def test_sweep_empty_axis_usage_error():
    assert run_cli("sweep", "--n", "64", "--p", "") == 1


def test_sweep_is_byte_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run_cli("sweep", "--n", "32", "--seed", "3", "--p", "1,2",
                       "--a", "0,1", "--family", "dyadic", "--out", str(path)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_degenerate_input_exit_code(monkeypatch):
    from oslx.operators import DegenerateInputError

    def boom(*a, **k):
        raise DegenerateInputError("constant input")

    monkeypatch.setattr(cli.RatioFields, "compute", boom)
    assert run_cli("sweep", "--n", "16", "--p", "1", "--a", "0") == 2


def test_usage_error_on_unknown_command():
    assert run_cli("frobnicate") == 1


def test_thread_cap_env(monkeypatch, tmp_path):
    monkeypatch.setenv("OSLX_THREADS", "4")
    assert run_cli("gen", "spike", "--n", "16", "--out", str(tmp_path)) == 0
    monkeypatch.setenv("OSLX_THREADS", "zero")
    assert run_cli("gen", "spike", "--n", "16", "--out", str(tmp_path)) == 1
    monkeypatch.setenv("OSLX_THREADS", "0")
    assert run_cli("gen", "spike", "--n", "16", "--out", str(tmp_path)) == 1
