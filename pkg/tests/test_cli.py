import json
import subprocess
import sys

import pytest

from cdofdm import cli, harness
from cdofdm.errors import GuardError


def write_cfg(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def tiny_link(tmp_path, **extra):
    data = {"nc": 64, "ms": 64, "n_paths": 1, "sinr_db": [4.0],
            "ber_bits": 8192, "trials": 3, "aepp_symbols": 20000}
    data.update(extra)
    return write_cfg(tmp_path, data)


def test_ber_sweep_writes_csv(tmp_path, capsys):
    cfg = tiny_link(tmp_path)
    out = tmp_path / "out"
    rc = cli.main(["ber-sweep", "--config", cfg, "--out", str(out)])
    assert rc == 0
    lines = (out / "ber.csv").read_text().splitlines()
    assert lines[0].startswith("# cdofdm v")
    assert lines[1].split(",")[0] == "scheme"
    assert len(lines) == 3
    assert "wrote" in capsys.readouterr().out


def test_repeat_runs_identical_seed_changes(tmp_path):
    cfg = tiny_link(tmp_path)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert cli.main(["ber-sweep", "--config", cfg, "--out", str(a)]) == 0
    assert cli.main(["ber-sweep", "--config", cfg, "--out", str(b)]) == 0
    assert cli.main(["ber-sweep", "--config", cfg, "--out", str(c),
                     "--seed", "42"]) == 0
    assert (a / "ber.csv").read_bytes() == (b / "ber.csv").read_bytes()
    assert (a / "ber.csv").read_bytes() != (c / "ber.csv").read_bytes()


def test_rmse_sweep_writes_both(tmp_path):
    cfg = tiny_link(tmp_path, sinr_db=[20.0])
    out = tmp_path / "out"
    assert cli.main(["rmse-sweep", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "rmse_range.csv").exists()
    assert (out / "rmse_velocity.csv").exists()


def test_aepp_writes_rows(tmp_path):
    cfg = tiny_link(tmp_path, sinr_db=[-14.0])
    out = tmp_path / "out"
    assert cli.main(["aepp", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "aepp.csv").read_text().splitlines()
    assert lines[1].split(",")[:2] == ["scheme", "M"]
    assert len(lines) == 4  # header comment + columns + ofdm row + cd row


def test_radar_demo(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"nc": 256})
    out = tmp_path / "out"
    rc = cli.main(["radar-demo", "--config", cfg, "--out", str(out),
                   "--sinr", "20"])
    assert rc == 0
    assert (out / "radar_image.csv").exists()
    assert (out / "sic_diagnostics.csv").exists()
    text = capsys.readouterr().out
    assert "SINR: 20 dB" in text
    assert "estimate:" in text


def test_config_error_exit_code(tmp_path, capsys):
    bad = write_cfg(tmp_path, {"subcarriers": 64})
    rc = cli.main(["ber-sweep", "--config", bad, "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_guard_error_exit_code(tmp_path, capsys, monkeypatch):
    def boom(cfg):
        raise GuardError("synthetic failure")
    monkeypatch.setattr(harness, "run_ber_sweep", boom)
    rc = cli.main(["ber-sweep", "--out", str(tmp_path / "o")])
    assert rc == 3
    assert "numerical guard" in capsys.readouterr().err


def test_theorem_single_zero_free(tmp_path, capsys):
    out = tmp_path / "out"
    rc = cli.main(["theorem-check", "--out", str(out),
                   "--nc", "8", "--n-channels", "3"])
    assert rc == 0
    text = capsys.readouterr().out
    assert "zero_free=True" in text
    lines = (out / "theorem.csv").read_text().splitlines()
    assert len(lines) == 3
    row = dict(zip(lines[1].split(","), lines[2].split(",")))
    assert row["mode"] == "exhaustive"
    assert row["zero_free"] == "True"
    assert row["certified"] == "True"


def test_theorem_single_witness(tmp_path):
    out = tmp_path / "out"
    rc = cli.main(["theorem-check", "--out", str(out),
                   "--nc", "8", "--n-channels", "2"])
    assert rc == 0
    lines = (out / "theorem.csv").read_text().splitlines()
    row = dict(zip(lines[1].split(","), lines[2].split(",")))
    assert row["zero_free"] == "False"
    assert row["witness_row"] != "-1"
    assert "|" in row["witness_digits"]


def test_theorem_battery_rows(tmp_path):
    out = tmp_path / "out"
    rc = cli.main(["theorem-check", "--out", str(out), "--trials", "200"])
    assert rc == 0
    lines = (out / "theorem.csv").read_text().splitlines()
    assert len(lines) == 2 + 8 + 3
    modes = [ln.split(",")[3] for ln in lines[2:]]
    assert modes.count("exhaustive") == 8
    assert modes.count("randomized") == 3


def test_theorem_single_needs_both_flags(tmp_path, capsys):
    rc = cli.main(["theorem-check", "--out", str(tmp_path / "o"), "--nc", "8"])
    assert rc == 2
    assert "--n-channels" in capsys.readouterr().err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert "cdofdm" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cdofdm", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "cdofdm" in proc.stdout
