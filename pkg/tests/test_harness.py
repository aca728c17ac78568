import math

import numpy as np
import pytest

from cdofdm.config import SimConfig
from cdofdm.constellation import map_bits, qfunc
from cdofdm.errors import ConfigError
from cdofdm.harness import (build_runtime, measure_gap, noise_variance,
                            run_aepp, run_ber_sweep, run_radar_demo,
                            run_rmse_sweep, select_scheme, simulate_block,
                            sinr_at_ber, spreading_gain, write_rows_csv)

# beamformed LoS comm power at exactly 100 m with the default 16x16 arrays
LOS_GAIN_SQ = 2.5330295910584447e-08


def small_cfg(**kw):
    base = dict(nc=64, ms=64, n_paths=1, target_grid="none", sinr_db=(4.0,),
                ber_bits=40_000, aepp_symbols=200_000, seed=777)
    base.update(kw)
    return SimConfig(**base)


def test_noise_calibration_frozen():
    rt = build_runtime(SimConfig(target_grid="none"))
    assert rt.los_gain_sq == pytest.approx(LOS_GAIN_SQ, rel=1e-12)
    assert rt.row_power == pytest.approx(1 / 1024, rel=1e-15)
    assert noise_variance(rt, 0.0) == pytest.approx(2.4736617100180124e-11,
                                                    rel=1e-12)
    assert noise_variance(rt, 10.0) == pytest.approx(2.4736617100180124e-12,
                                                     rel=1e-12)


def test_spreading_gain():
    rt = build_runtime(SimConfig(nc=64, nc2=3))
    assert spreading_gain(rt.book2) == pytest.approx(64 / 3, rel=1e-15)
    rt = build_runtime(SimConfig(nc=64, scheme="ofdm"))
    assert spreading_gain(rt.book2) == 1.0


def test_simulate_block_reproducible():
    rt = build_runtime(small_cfg())
    nv = noise_variance(rt, 4.0)
    a = simulate_block(rt, nv, point=2, trial=5)
    b = simulate_block(rt, nv, point=2, trial=5)
    assert np.array_equal(a.y, b.y)
    assert np.array_equal(a.d1, b.d1)
    assert np.array_equal(a.bits2, b.bits2)
    c = simulate_block(rt, nv, point=2, trial=6)
    assert not np.array_equal(a.y, c.y)
    # bits and symbols describe the same payload
    k = rt.const.bits_per_symbol
    d2 = map_bits(rt.const, a.bits2.reshape(-1)).reshape(a.d2.shape)
    assert np.array_equal(d2, a.d2)
    assert a.bits2.shape == (rt.book2.n_channels, rt.cfg.ms, k)
    assert a.y.shape == (64, 64)


def test_stream_packing_limit():
    rt = build_runtime(small_cfg())
    with pytest.raises(ValueError, match="2\\^20"):
        simulate_block(rt, 1e-12, point=0, trial=1 << 20)


def test_ber_sweep_matches_qpsk_theory():
    cfg = small_cfg(scheme="ofdm")
    res = run_ber_sweep(cfg)
    row = res.rows[0]
    gamma = 10.0 ** (4.0 / 10.0)
    theory = qfunc(math.sqrt(gamma))
    assert row["flag"] == "ok"
    assert row["trials"] == 40_960
    assert abs(row["value"] - theory) < 5.0 * row["stderr"]
    assert row["stderr"] == pytest.approx(
        math.sqrt(row["value"] * (1 - row["value"]) / row["trials"]), rel=1e-12)


def test_ber_sweep_spread_shift():
    # NC=1 spreading moves the working point by 10 log10(nc) on the axis
    shift = 10.0 * math.log10(64.0)
    cfg = small_cfg(sinr_db=(4.0 - shift,))
    res = run_ber_sweep(cfg)
    row = res.rows[0]
    theory = qfunc(math.sqrt(10.0 ** 0.4))
    assert abs(row["value"] - theory) < 5.0 * row["stderr"]


def test_ber_sweep_under_sampled_flag():
    cfg = small_cfg(sinr_db=(25.0,), ber_bits=8_192)
    row = run_ber_sweep(cfg).rows[0]
    assert row["value"] == 0.0
    assert row["flag"] == "under_sampled"


def test_rmse_quantization_floor():
    # noise is irrelevant at 20 dB: every trial lands in the true bin and the
    # only error left is the floor-grid snap of the configured target
    cfg = SimConfig(sinr_db=(20.0,), trials=3, ber_bits=8)
    res_r, res_v = run_rmse_sweep(cfg)
    assert res_r.rows[0]["value"] == pytest.approx(1.123046875, abs=1e-12)
    assert res_v.rows[0]["value"] == pytest.approx(0.006716990788126153,
                                                   abs=1e-15)
    assert res_r.rows[0]["flag"] == "ok"
    assert res_r.rows[0]["trials"] == 3
    assert res_r.rows[0]["stderr"] == 0.0


def test_aepp_rows_and_pipeline_agreement():
    shift = 10.0 * math.log10(64.0)
    cfg = small_cfg(sinr_db=(2.0 - shift,))
    res = run_aepp(cfg)
    schemes = {(r["scheme"], r["NC"]) for r in res.rows}
    assert schemes == {("ofdm", 64), ("cd-ofdm", 1)}
    for row in res.rows:
        if row["scheme"] == "ofdm":
            assert math.isnan(row["aepp_montecarlo"])
        else:
            assert row["aepp_formula"] > 1e-4
            assert row["rel_err"] < 0.05


def test_aepp_pipeline_off():
    cfg = small_cfg(aepp_pipeline=False)
    for row in run_aepp(cfg).rows:
        assert math.isnan(row["aepp_montecarlo"])
        assert math.isnan(row["rel_err"])


def test_radar_demo_small(tmp_path, capsys):
    cfg = SimConfig(nc=256, ms=256, demo_sinr_db=20.0, seed=3)
    img = tmp_path / "img.csv"
    diag = tmp_path / "diag.csv"
    lines = []
    out = run_radar_demo(cfg, image_csv=str(img), diagnostics_csv=str(diag),
                         printer=lines.append)
    est = out["estimate"]
    assert (est.ind_delay, est.ind_doppler) == out["expected_bins"]
    assert img.exists() and diag.exists()
    assert any("estimate:" in ln for ln in lines)
    assert out["image"].image.shape == (256, 256)


def test_select_scheme():
    assert select_scheme(3.0, 10.0) == "cd-ofdm"
    assert select_scheme(10.0, 10.0) == "ofdm"
    assert select_scheme(12.0, 10.0) == "ofdm"
    with pytest.raises(ConfigError):
        select_scheme(3.0, None)


def test_sinr_at_ber_interpolation():
    s = [0.0, 2.0, 4.0]
    b = [1e-2, 1e-3, 1e-4]
    assert sinr_at_ber(s, b, 1e-3) == pytest.approx(2.0, abs=1e-12)
    assert sinr_at_ber(s, b, 10.0**-2.5) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        sinr_at_ber(s, b, 1e-6)
    with pytest.raises(ValueError):
        sinr_at_ber([0.0, 2.0], [1e-2, 0.0], 1e-3)


def test_measure_gap_synthetic():
    s = np.array([0.0, 2.0, 4.0, 6.0])
    b = np.array([3e-2, 4e-3, 5e-4, 2e-5])
    gap = measure_gap(s, b, s + 6.02, b)
    assert gap == pytest.approx(6.02, abs=1e-9)


def test_write_rows_csv_bytes(tmp_path):
    cols = ("a", "b", "c", "d")
    rows = [{"a": 1, "b": 0.1, "c": True, "d": "x"},
            {"a": 2, "b": float("nan"), "c": False, "d": "y"}]
    p1 = tmp_path / "one.csv"
    p2 = tmp_path / "two.csv"
    cfg = SimConfig()
    write_rows_csv(str(p1), cols, rows, cfg)
    write_rows_csv(str(p2), cols, rows, cfg)
    assert p1.read_bytes() == p2.read_bytes()
    text = p1.read_text().splitlines()
    assert text[0].startswith("# cdofdm v") and "seed=12345" in text[0]
    assert text[1] == "a,b,c,d"
    assert text[2] == "1,0.1,True,x"
    assert text[3] == "2,nan,False,y"
