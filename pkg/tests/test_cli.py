"""End-to-end tests of the command-line interface."""
import json

import numpy as np
import pytest

from gofkit import cli


@pytest.fixture()
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("GOFKIT_CACHE_DIR", str(d))
    return d


@pytest.fixture()
def spectrum_file(tmp_path, cache_dir):
    out = tmp_path / "cosine.spec"
    status = cli.main(["decompose", "--kernel", "cosine-ref", "--null",
                       "uniform-cube-1", "--trunc", "32", "--nodes", "256",
                       "--out", str(out), "--quiet"])
    assert status == 0
    return out


@pytest.fixture()
def data_file(tmp_path):
    path = tmp_path / "x.csv"
    rng = np.random.default_rng(0)
    np.savetxt(path, rng.random((200, 1)), delimiter=",")
    return path


def test_help_all_subcommands(capsys):
    for args in (["--help"], ["decompose", "--help"], ["test", "--help"],
                 ["calibrate", "--help"], ["power", "--help"],
                 ["reproduce", "--help"]):
        with pytest.raises(SystemExit) as exc:
            cli.main(args)
        assert exc.value.code == 0
        assert "--" in capsys.readouterr().out


def test_unknown_subcommand_exits_1(capsys):
    assert cli.main(["frobnicate"]) == 1
    assert "error" in capsys.readouterr().err


def test_decompose_and_cache_reuse(tmp_path, cache_dir, capsys):
    out1 = tmp_path / "a.spec"
    out2 = tmp_path / "b.spec"
    args = ["decompose", "--kernel", "cosine-ref", "--null", "uniform-cube-1",
            "--trunc", "16", "--nodes", "128"]
    assert cli.main(args + ["--out", str(out1)]) == 0
    assert "cache stored" in capsys.readouterr().out
    assert cli.main(args + ["--out", str(out2)]) == 0
    assert "cache hit" in capsys.readouterr().out
    assert out1.read_bytes() == out2.read_bytes()
    out3 = tmp_path / "c.spec"
    assert cli.main(args + ["--out", str(out3), "--no-cache"]) == 0
    assert "cache" not in capsys.readouterr().out.split("wrote")[0] or True
    assert out3.read_bytes() == out1.read_bytes()


def test_decompose_sphere(tmp_path, cache_dir):
    out = tmp_path / "sph.spec"
    assert cli.main(["decompose", "--kernel", "gaussian-sphere:1.0", "--null",
                     "uniform-sphere-3", "--trunc", "8", "--nodes", "64",
                     "--out", str(out), "--quiet"]) == 0
    from gofkit.spectrum import load_spectrum
    basis = load_spectrum(out)
    assert basis.null_id == "uniform-sphere-3"


def test_decompose_unknown_kernel_exits_1(tmp_path, cache_dir, capsys):
    assert cli.main(["decompose", "--kernel", "mystery", "--null",
                     "uniform-cube-1", "--trunc", "4", "--nodes", "64",
                     "--out", str(tmp_path / "x.spec")]) == 1
    assert "kernel" in capsys.readouterr().err


def test_decompose_rank_deficient_exits_2(tmp_path, cache_dir, capsys):
    assert cli.main(["decompose", "--kernel", "constant", "--null",
                     "uniform-cube-1", "--trunc", "4", "--nodes", "64",
                     "--out", str(tmp_path / "x.spec")]) == 2
    assert "numeric floor" in capsys.readouterr().err


def test_test_happy_path_m3d(spectrum_file, data_file, capsys):
    status = cli.main(["test", "--kind", "m3d", "--spectrum",
                       str(spectrum_file), "--data", str(data_file),
                       "--alpha", "0.05", "--rho", "0.063", "--seed", "7"])
    assert status == 0
    out = capsys.readouterr().out
    record = json.loads(out.strip().splitlines()[-1])
    assert record["kind"] == "m3d"
    assert record["parameters"]["rho"] == pytest.approx(0.063)
    assert "statistic:" in out


def test_test_missing_seed_exits_1(spectrum_file, data_file, capsys):
    status = cli.main(["test", "--kind", "mmd", "--spectrum",
                       str(spectrum_file), "--data", str(data_file)])
    assert status == 1
    assert "--seed" in capsys.readouterr().err


def test_test_machine_output_deterministic(spectrum_file, data_file, capsys):
    args = ["test", "--kind", "mmd", "--spectrum", str(spectrum_file),
            "--data", str(data_file), "--seed", "5",
            "--calibrate", "mc:2000", "--quiet"]
    assert cli.main(args) == 0
    first = capsys.readouterr().out
    assert cli.main(args) == 0
    assert capsys.readouterr().out == first


def test_test_theory_threshold(spectrum_file, data_file, capsys):
    status = cli.main(["test", "--kind", "adaptive", "--spectrum",
                       str(spectrum_file), "--data", str(data_file),
                       "--calibrate", "theory", "--quiet"])
    assert status == 0
    record = json.loads(capsys.readouterr().out.strip())
    assert record["calibration"]["method"] == "theory-loglog"


def test_test_corrupt_spectrum_exits_1(tmp_path, data_file, capsys):
    bad = tmp_path / "bad.spec"
    bad.write_bytes(b"GOFKIT-SPEC v0\nnope")
    assert cli.main(["test", "--kind", "m3d", "--spectrum", str(bad),
                     "--data", str(data_file), "--rho", "0.1"]) == 1
    assert "GOFKIT-SPEC" in capsys.readouterr().err


def test_calibrate_file_roundtrip(spectrum_file, data_file, tmp_path, capsys):
    cal_file = tmp_path / "mmd.cal"
    assert cli.main(["calibrate", "--kind", "mmd", "--spectrum",
                     str(spectrum_file), "--n", "200", "--reps", "2000",
                     "--seed", "9", "--out", str(cal_file), "--quiet"]) == 0
    stored = json.loads(cal_file.read_text())
    assert stored["method"] == "chisq-mixture-mc"
    assert len(stored["replicates"]) == 2000
    assert cli.main(["test", "--kind", "mmd", "--spectrum", str(spectrum_file),
                     "--data", str(data_file), "--calibration", str(cal_file),
                     "--quiet"]) == 0
    record = json.loads(capsys.readouterr().out.strip())
    assert record["threshold"] == pytest.approx(stored["quantile"])


def test_calibrate_requires_seed(spectrum_file, tmp_path, capsys):
    assert cli.main(["calibrate", "--kind", "adaptive", "--spectrum",
                     str(spectrum_file), "--n", "200",
                     "--out", str(tmp_path / "a.cal")]) == 1
    assert "--seed" in capsys.readouterr().err


def test_power_plan_and_alt_flag(spectrum_file, tmp_path, capsys):
    plan = {
        "basis": {"type": "cosine", "K": 32},
        "alternatives": {
            "claw": {"family": "marron-wand:asymmetric-claw", "dim": 1}},
        "tests": ["m3d"],
        "n": [100],
        "reps": 5,
        "seed": 2,
    }
    plan_file = tmp_path / "plan.json"
    plan_file.write_text(json.dumps(plan))
    out_dir = tmp_path / "pow"
    assert cli.main(["power", "--plan", str(plan_file), "--out", str(out_dir),
                     "--alt", "skew=marron-wand:skewed-unimodal:dim=1",
                     "--quiet"]) == 0
    csv_lines = (out_dir / "power.csv").read_text().splitlines()
    alts = {line.split(",")[3] for line in csv_lines[1:]}
    assert alts == {"claw", "skew"}


def test_power_plan_missing_seed_exits_1(tmp_path, capsys):
    plan_file = tmp_path / "plan.json"
    plan_file.write_text(json.dumps({
        "basis": {"type": "cosine", "K": 16},
        "alternatives": {"u": {"family": "uniform-cube", "dim": 1}},
        "tests": ["m3d"], "n": [50], "reps": 5}))
    assert cli.main(["power", "--plan", str(plan_file),
                     "--out", str(tmp_path / "o")]) == 1
    assert "--seed" in capsys.readouterr().err


def test_config_file_supplies_defaults(spectrum_file, data_file, tmp_path,
                                       capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rho": 0.1, "alpha": 0.1}))
    assert cli.main(["test", "--kind", "m3d", "--spectrum", str(spectrum_file),
                     "--data", str(data_file), "--config", str(cfg),
                     "--quiet"]) == 0
    record = json.loads(capsys.readouterr().out.strip())
    assert record["alpha"] == pytest.approx(0.1)
    assert record["parameters"]["rho"] == pytest.approx(0.1)
