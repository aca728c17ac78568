"""Closed-form decision-error power and its Monte Carlo oracle.

The cancellation stage leaks h o C (d - dhat) into the radar block; its
per-channel average power ("average error propagation power") follows from the
per-axis PAM transition probabilities:

    AEPP(sigma) = sum_{r1,r2} p(r1) p(r2) sum_{r1',r2'}
                  p_{r1'|r1} p_{r2'|r2} (|s_r1 - s_r1'|^2 + |s_r2 - s_r2'|^2)

evaluated literally over all level quadruples. sigma is the per-axis noise
standard deviation; with unit-power constellations E[d_c^2] = 0.5, a
post-despread SINR gamma maps to sigma^2 = 0.5 / gamma, and code-division
multiplexing with NC of Nc channels moves gamma by the factor Nc/NC.
"""

import numpy as np

from .constellation import QamConstellation, hard_decide, prob_matrix


def sigma_from_sinr_db(sinr_db) -> np.ndarray:
    """Per-axis noise std for a post-despread SINR (unit symbol power)."""
    gamma = 10.0 ** (np.asarray(sinr_db, dtype=float) / 10.0)
    return np.sqrt(0.5 / gamma)


def sinr_map(sinr_of_db, nc: int, n_channels: int):
    """OFDM-reference SINR -> post-despread SINR under NC-of-Nc spreading (dB)."""
    if not 1 <= n_channels <= nc:
        raise ValueError("need 1 <= NC <= Nc")
    return np.asarray(sinr_of_db, dtype=float) + 10.0 * np.log10(nc / n_channels)


def aepp(const: QamConstellation, sigma: float) -> float:
    """Literal quadruple-sum average error-propagation power at per-axis std sigma."""
    p = prob_matrix(const, sigma)          # p[r', r]
    s = const.levels
    e2 = (s[:, None] - s[None, :]) ** 2    # e2[r', r]
    n = s.size
    pa = p[:, :, None, None] * p[None, None, :, :]
    dd = e2[:, :, None, None] + e2[None, None, :, :]
    return float((pa * dd).sum() / (n * n))


def mc_error_power(const: QamConstellation, sigma: float, n_draws: int,
                   rng: np.random.Generator, importance_sigma: float = None,
                   chunk: int = 2_000_000) -> float:
    """Monte Carlo decision-error power: draw symbols, add per-axis Gaussian
    noise, hard-decide, average |d - dhat|^2.

    With importance_sigma > sigma the noise is drawn from the wider Gaussian and
    reweighted by the exact likelihood ratio (bounded by importance_sigma/sigma
    per axis), which keeps the estimate accurate deep in the rare-error regime
    where plain draws would never see an error.
    """
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    sd = sigma if importance_sigma is None else float(importance_sigma)
    if sd < sigma:
        raise ValueError("importance_sigma must be >= sigma")
    n_side = const.levels.size
    acc = 0.0
    done = 0
    # constants of the per-axis likelihood ratio f_sigma / f_sd
    lr_scale = sd / sigma
    lr_coeff = 0.5 * (1.0 / sigma**2 - 1.0 / sd**2)
    while done < n_draws:
        n = min(chunk, n_draws - done)
        li = rng.integers(0, n_side, size=n)
        lq = rng.integers(0, n_side, size=n)
        tx = const.levels[li] + 1j * const.levels[lq]
        u = rng.standard_normal(size=(n, 2)) * sd
        rx = tx + u[:, 0] + 1j * u[:, 1]
        dec, _ = hard_decide(const, rx)
        err2 = np.abs(tx - dec) ** 2
        if importance_sigma is None:
            acc += err2.sum()
        else:
            w = (lr_scale**2) * np.exp(-lr_coeff * (u[:, 0] ** 2 + u[:, 1] ** 2))
            acc += (w * err2).sum()
        done += n
    return acc / n_draws


def default_tilt(const: QamConstellation, sigma: float) -> float:
    """Importance std that keeps decision errors common: half the level spacing."""
    return max(sigma, const.spacing / 2.0)


def aepp_curves(m_orders, sinr_of_db, nc: int, n_channels_list):
    """Closed-form AEPP rows over an OFDM-reference SINR sweep.

    Emits the plain-OFDM curve (gamma = gamma_OF) and one spread curve per NC
    (gamma = (Nc/NC) gamma_OF) for each constellation order. Returns a list of
    dicts with keys scheme, M, Nc, NC, sinr_db, aepp.
    """
    from .constellation import make_constellation
    rows = []
    for m in m_orders:
        const = make_constellation(m)
        for s_db in sinr_of_db:
            sig = float(sigma_from_sinr_db(s_db))
            rows.append({"scheme": "ofdm", "M": m, "Nc": nc, "NC": nc,
                         "sinr_db": float(s_db), "aepp": aepp(const, sig)})
        for nch in n_channels_list:
            for s_db in sinr_of_db:
                sig = float(sigma_from_sinr_db(sinr_map(s_db, nc, nch)))
                rows.append({"scheme": "cd-ofdm", "M": m, "Nc": nc, "NC": nch,
                             "sinr_db": float(s_db), "aepp": aepp(const, sig)})
    return rows
