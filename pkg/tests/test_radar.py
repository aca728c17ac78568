import numpy as np
import pytest

from cdofdm.errors import ZeroReferenceError
from cdofdm.ofdm import OfdmParams
from cdofdm.radar import (RadarImage, estimate, peak_search, periodogram,
                          reference_divide, to_physical, write_image_csv)
from cdofdm.rng import ORACLE, crandn, make_rng

NC, MS = 64, 32


def tone(nc, ms, k0, l0, amp=1.0):
    """Outer product of a delay ramp and a Doppler ramp, peaked at (k0, l0)."""
    m = np.arange(nc)[:, None]
    i = np.arange(ms)[None, :]
    return amp * np.exp(-2j * np.pi * m * k0 / nc) * np.exp(2j * np.pi * i * l0 / ms)


def small_params():
    return OfdmParams(nc=NC, delta_f=120e3, tg=0.0, ms=MS, ts=9.77e-6)


def test_reference_divide_exact():
    rng = make_rng(31, ORACLE, 0)
    ref = 1.0 + 0.4 * crandn(rng, (8, 4))
    res = crandn(rng, (8, 4))
    assert np.max(np.abs(reference_divide(res, ref) * ref - res)) < 1e-14


def test_reference_divide_zero_cell_raises():
    ref = np.ones((4, 3), dtype=complex)
    ref[1, 2] = 0.0
    with pytest.raises(ZeroReferenceError) as e:
        reference_divide(np.ones((4, 3), dtype=complex), ref)
    assert "(1, 2)" in str(e.value)
    with pytest.raises(ValueError):
        reference_divide(np.ones((4, 2)), np.ones((4, 3)))


def test_periodogram_parseval():
    div = crandn(make_rng(32, ORACLE, 1), (NC, MS))
    img = periodogram(div)
    assert np.sum(img.magnitude**2) == pytest.approx(
        np.sum(np.abs(div) ** 2), rel=1e-8)


def test_single_tone_concentrates_fully():
    # the matched pair of unitary transforms collects all energy in one cell
    img = periodogram(tone(NC, MS, 5, 7))
    ind_r, ind_d, peak, ratio = peak_search(img)
    assert (ind_r, ind_d) == (5, 7)
    assert peak == pytest.approx(np.sqrt(NC * MS), rel=1e-12)
    assert ratio > 250.0  # numerically zero floor


def test_peak_search_tie_breaks_lexicographic():
    mag = np.zeros((4, 4))
    mag[2, 3] = 1.0
    mag[1, 1] = 1.0
    img = RadarImage(image=mag.astype(complex), magnitude=mag)
    ind_r, ind_d, _, _ = peak_search(img)
    assert (ind_r, ind_d) == (1, 1)


def test_to_physical_forward_mapping():
    p = small_params()
    est = to_physical(5, 7, p, fc=24e9, c0=3e8)
    assert est.tau == pytest.approx(5 / p.bandwidth, rel=1e-15)
    assert est.fd == pytest.approx(7 / (p.ts * MS), rel=1e-15)
    assert est.range_m == pytest.approx(est.tau * 3e8 / 2, rel=1e-15)
    assert est.velocity_mps == pytest.approx(est.fd * 3e8 / (2 * 24e9), rel=1e-15)


def test_to_physical_doppler_wraps_negative():
    p = small_params()
    est = to_physical(0, MS - 3, p, fc=24e9, c0=3e8)
    assert est.fd == pytest.approx(-3 / (p.ts * MS), rel=1e-15)
    assert est.velocity_mps < 0


def test_to_physical_validates_bins():
    p = small_params()
    with pytest.raises(ValueError):
        to_physical(NC, 0, p, fc=24e9, c0=3e8)
    with pytest.raises(ValueError):
        to_physical(0, MS, p, fc=24e9, c0=3e8)


def test_estimate_end_to_end_on_grid_target():
    # residual = channel * reference; the division must recover the tone
    p = small_params()
    rng = make_rng(33, ORACLE, 2)
    tx_ref = 1.0 + 0.3 * crandn(rng, (NC, MS))
    channel = tone(NC, MS, 9, 30, amp=2.5e-7)
    est = estimate(channel * tx_ref, tx_ref, p, fc=24e9, c0=3e8)
    assert (est.ind_delay, est.ind_doppler) == (9, 30)
    assert est.fd < 0  # bin 30 of 32 wraps to -2
    assert est.peak_magnitude == pytest.approx(2.5e-7 * np.sqrt(NC * MS), rel=1e-10)


def test_estimate_with_noise_floor():
    p = small_params()
    rng = make_rng(34, ORACLE, 3)
    tx_ref = np.exp(2j * np.pi * rng.random((NC, MS)))  # unit-modulus reference
    channel = tone(NC, MS, 3, 4, amp=1.0)
    noise = crandn(rng, (NC, MS), var=0.01)
    est = estimate(channel * tx_ref + noise, tx_ref, p, fc=24e9, c0=3e8)
    assert (est.ind_delay, est.ind_doppler) == (3, 4)
    assert est.peak_to_floor_db > 20.0


def test_write_image_csv(tmp_path):
    img = periodogram(tone(8, 4, 1, 1))
    path = tmp_path / "image.csv"
    write_image_csv(path, img)
    lines = path.read_text().splitlines()
    assert lines[0] == "delay_bin,doppler_bin,magnitude"
    assert len(lines) == 1 + 8 * 4
    assert lines[1].split(",")[:2] == ["0", "0"]
