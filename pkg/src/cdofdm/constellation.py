"""Square QAM constellations with per-axis Gray labeling.

An M-QAM symbol is two independent sqrt(M)-ary PAM symbols (in-phase and
quadrature). Levels are spaced by `a` and scaled for unit average symbol
power, so E[d_c^2] = E[d_q^2] = 0.5. Bit labels use the reflected Gray
construction per axis: the first log2(M)/2 bits select the I level, the rest
the Q level, which keeps golden vectors stable across versions.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

_SUPPORTED = (4, 16, 64)


def qfunc(x):
    """Gaussian tail probability Q(x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def _gray_to_binary(v: np.ndarray, nbits: int) -> np.ndarray:
    b = v.copy()
    shift = 1
    while shift < nbits:
        b ^= v >> shift
        shift += 1
    return b


@dataclass(frozen=True)
class QamConstellation:
    order: int
    levels: np.ndarray = field(repr=False)   # ascending PAM levels, len sqrt(M)
    spacing: float                            # adjacent-level distance a
    points: np.ndarray = field(repr=False)   # complex points indexed by bit pattern

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))

    @property
    def bits_per_axis(self) -> int:
        return self.bits_per_symbol // 2

    @property
    def boundaries(self) -> np.ndarray:
        return (self.levels[:-1] + self.levels[1:]) / 2.0


def make_constellation(order: int) -> QamConstellation:
    if order not in _SUPPORTED:
        raise ValueError(f"order must be one of {_SUPPORTED}, got {order}")
    n = int(np.sqrt(order))
    # unit average symbol power: a^2 (M-1)/12 = 1/2
    a = np.sqrt(6.0 / (order - 1))
    levels = (np.arange(n) - (n - 1) / 2.0) * a
    kh = int(np.log2(n))
    patterns = np.arange(order)
    vi = patterns >> kh
    vq = patterns & (n - 1)
    ii = _gray_to_binary(vi, kh)
    iq = _gray_to_binary(vq, kh)
    points = levels[ii] + 1j * levels[iq]
    return QamConstellation(order=order, levels=levels, spacing=a, points=points)


def map_bits(const: QamConstellation, bits: np.ndarray) -> np.ndarray:
    """Bits (0/1 array, length divisible by log2 M, MSB first) -> complex symbols."""
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size % const.bits_per_symbol != 0:
        raise ValueError("bit count must be a positive multiple of log2(M)")
    if bits.size == 0:
        raise ValueError("empty bit array")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    k = const.bits_per_symbol
    groups = bits.reshape(-1, k).astype(np.int64)
    weights = 1 << np.arange(k - 1, -1, -1)
    return const.points[groups @ weights]


def _axis_decide(const: QamConstellation, x: np.ndarray) -> np.ndarray:
    # ties at a boundary resolve to the lower level index
    return np.searchsorted(const.boundaries, x, side="left")


def hard_decide(const: QamConstellation, received: np.ndarray):
    """Per-axis nearest-level decision.

    Returns (symbols, bits): the decided constellation points and their bit
    labels (MSB first, I bits then Q bits).
    """
    received = np.asarray(received, dtype=complex)
    if received.size and not np.isfinite(received).all():
        raise ValueError("received symbols contain non-finite values")
    ii = _axis_decide(const, received.real.ravel())
    iq = _axis_decide(const, received.imag.ravel())
    symbols = (const.levels[ii] + 1j * const.levels[iq]).reshape(received.shape)
    kh = const.bits_per_axis
    gi = ii ^ (ii >> 1)
    gq = iq ^ (iq >> 1)
    pattern = (gi << kh) | gq
    k = const.bits_per_symbol
    bits = (pattern[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1
    return symbols, bits.astype(np.uint8).reshape(received.shape + (k,))


def prob_matrix(const: QamConstellation, sigma: float) -> np.ndarray:
    """P[r_to, r_from]: per-axis decision transition probabilities at noise std sigma.

    Gaussian noise of standard deviation sigma on one axis; entry (r', r) is the
    probability a transmitted level r is decided as level r'. Rows r' = first and
    last levels absorb the open decision intervals; each column sums to 1.
    """
    if not np.isfinite(sigma) or sigma <= 0:
        raise ValueError("sigma must be finite and > 0")
    s = const.levels
    n = s.size
    a = const.spacing
    d = s[:, None] - s[None, :]  # s_{r'} - s_r
    upper = qfunc((d - a / 2.0) / sigma)
    lower = qfunc((d + a / 2.0) / sigma)
    p = upper - lower
    p[0, :] = 1.0 - lower[0, :]
    p[n - 1, :] = upper[n - 1, :]
    return p


def decide_prob(const: QamConstellation, r_to: int, r_from: int, sigma: float) -> float:
    """Probability of deciding level r_to given transmitted level r_from (1-indexed)."""
    n = const.levels.size
    if not (1 <= r_to <= n and 1 <= r_from <= n):
        raise ValueError(f"level indices must be in 1..{n}")
    return float(prob_matrix(const, sigma)[r_to - 1, r_from - 1])
