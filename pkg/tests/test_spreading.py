import numpy as np
import pytest

from cdofdm.constellation import make_constellation
from cdofdm.rng import ORACLE, make_rng
from cdofdm.spreading import (EXHAUSTIVE_BUDGET, ZERO_TOL, build_hadamard,
                              check_zero_free, despread, make_codebook,
                              random_symbols, spread)


def test_hadamard_orthogonality():
    h = build_hadamard(8)
    assert np.array_equal(np.abs(h), np.ones((8, 8)))
    assert np.allclose(h.T @ h, 8 * np.eye(8))


def test_hadamard_requires_power_of_two():
    for bad in (0, 3, 12):
        with pytest.raises(ValueError):
            build_hadamard(bad)


def test_codebook_columns_orthonormal():
    book = make_codebook(1024, 511)
    g = book.matrix.T @ book.matrix
    assert np.max(np.abs(g - np.eye(511))) < 1e-12


def test_codebook_norm_factor():
    assert make_codebook(64, 16).norm_factor == pytest.approx(0.25, rel=1e-15)
    assert make_codebook(64, 16, kind="identity").norm_factor == 1.0


def test_identity_book_is_selection():
    book = make_codebook(8, kind="identity", columns=(2, 5))
    assert book.matrix.shape == (8, 2)
    assert book.matrix[2, 0] == 1.0 and book.matrix[5, 1] == 1.0
    assert book.matrix.sum() == 2.0


def test_codebook_validates_columns():
    with pytest.raises(ValueError):
        make_codebook(8, columns=(1, 1))
    with pytest.raises(ValueError):
        make_codebook(8, columns=(8,))
    with pytest.raises(ValueError):
        make_codebook(8, columns=())
    with pytest.raises(ValueError):
        make_codebook(8, kind="fourier", n_channels=2)


def test_spread_despread_roundtrip():
    book = make_codebook(64, 17)
    rng = make_rng(3, ORACLE, 0)
    d = rng.standard_normal((17, 5)) + 1j * rng.standard_normal((17, 5))
    s = spread(book, d)
    assert s.shape == (64, 5)
    assert np.max(np.abs(despread(book, s) - d)) < 1e-12


def test_spread_shape_checked():
    book = make_codebook(16, 3)
    with pytest.raises(ValueError):
        spread(book, np.ones(4))
    with pytest.raises(ValueError):
        despread(book, np.ones(8))


@pytest.mark.parametrize("nch", [1, 3, 5, 7])
def test_odd_channel_counts_certified_zero_free(nch):
    book = make_codebook(8, nch)
    rep = check_zero_free(book, make_constellation(4), mode="exhaustive")
    assert rep.zero_free and rep.certified
    assert rep.theorem_predicts_zero_free
    assert rep.min_abs_entry > ZERO_TOL
    assert rep.trials == 4**nch


@pytest.mark.parametrize("nch", [2, 4, 6, 8])
def test_even_channel_counts_have_zero_witness(nch):
    book = make_codebook(8, nch)
    const = make_constellation(4)
    rep = check_zero_free(book, const, mode="exhaustive")
    assert not rep.zero_free and rep.certified
    assert not rep.theorem_predicts_zero_free
    digits, row = rep.witness
    d = const.points[list(digits)]
    assert abs((book.matrix @ d)[row]) < ZERO_TOL


def test_randomized_mode_finds_no_zero_for_odd():
    book = make_codebook(64, 33)
    rep = check_zero_free(book, make_constellation(16), mode="randomized",
                          trials=50_000, rng=make_rng(11, ORACLE, 1))
    assert rep.zero_free and not rep.certified
    assert rep.trials == 50_000


def test_exhaustive_budget_refused():
    book = make_codebook(64, 33)
    with pytest.raises(ValueError):
        check_zero_free(book, make_constellation(4), mode="exhaustive")
    assert 4**33 > EXHAUSTIVE_BUDGET


def test_randomized_needs_rng():
    book = make_codebook(8, 3)
    with pytest.raises(ValueError):
        check_zero_free(book, make_constellation(4), mode="randomized")


def test_random_symbols_land_on_constellation():
    const = make_constellation(16)
    sym = random_symbols(const, make_rng(5, ORACLE, 2), (100,))
    assert np.isin(sym, const.points).all()
