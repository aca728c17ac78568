"""Successive interference cancellation receive chain.

The received frequency-domain block is

    y = h_comm o (sqrt(P2) nu2 C2 d2) + h_radar o (sqrt(P1) nu1 C1 d1) + n

(o is entrywise, nu the codebook transmit normalization). The communication
pass zero-forces the comm channel, despreads, hard-decides; the cancellation
pass rebuilds the decided comm contribution and subtracts it from y, leaving
the radar echo plus noise plus a decision-error leakage term for the radar
stage. Zero-forcing only; deep fades raise instead of clamping.
"""

from dataclasses import dataclass, field

import numpy as np

from .constellation import QamConstellation, hard_decide
from .errors import EqualizationSingularityError
from .spreading import CodeBook, despread, spread

DEEP_FADE_TOL = 1e-12


def tx_block(book: CodeBook, d: np.ndarray, power: float) -> np.ndarray:
    """Transmit-side subcarrier block sqrt(P) nu C d (NC x Ms in, Nc x Ms out)."""
    if power <= 0:
        raise ValueError("power must be > 0")
    return np.sqrt(power) * book.norm_factor * spread(book, d)


@dataclass(frozen=True)
class ReceivedBlock:
    """One received block with the receiver-side knowledge needed to process it."""
    y: np.ndarray                      # Nc x Ms
    h_comm: np.ndarray                 # Nc x Ms perfect comm CSI
    book1: CodeBook                    # own (radar reference) codebook
    book2: CodeBook                    # partner (communication) codebook
    p1: float
    p2: float

    def __post_init__(self):
        if self.y.shape != self.h_comm.shape:
            raise ValueError("y and h_comm shapes differ")
        if self.y.shape[0] != self.book2.nc:
            raise ValueError("block height must equal Nc")


def synthesize(h_comm: np.ndarray, h_radar: np.ndarray, book1: CodeBook,
               book2: CodeBook, d1: np.ndarray, d2: np.ndarray, p1: float,
               p2: float, noise: np.ndarray, include_echo: bool = True) -> np.ndarray:
    """Simulator-side construction of the received block."""
    y = h_comm * tx_block(book2, d2, p2) + noise
    if include_echo:
        y = y + h_radar * tx_block(book1, d1, p1)
    return y


def equalize(y: np.ndarray, h_comm: np.ndarray) -> np.ndarray:
    """Zero-forcing per-subcarrier equalization y / h_comm."""
    mags = np.abs(h_comm)
    if mags.min() < DEEP_FADE_TOL:
        cell = tuple(int(i) for i in
                     np.unravel_index(int(np.argmin(mags)), h_comm.shape))
        raise EqualizationSingularityError(
            f"deep fade |h|={mags[cell]:.3e} at (subcarrier, symbol)={cell}; "
            "trial must be erased")
    return y / h_comm


def demodulate_comm(block: ReceivedBlock, const: QamConstellation):
    """Equalize, despread, hard-decide. Returns (d_hat, bits, soft)."""
    ybar = equalize(block.y, block.h_comm)
    soft = despread(block.book2, ybar) / (np.sqrt(block.p2) * block.book2.norm_factor)
    d_hat, bits = hard_decide(const, soft)
    return d_hat, bits, soft


def cancel(block: ReceivedBlock, d_hat: np.ndarray) -> np.ndarray:
    """Subtract the rebuilt comm contribution: y - h_comm o sqrt(P2) nu2 C2 d_hat."""
    return block.y - block.h_comm * tx_block(block.book2, d_hat, block.p2)


@dataclass
class SicBlockResult:
    d_hat: np.ndarray                  # NC2 x Ms decided comm symbols
    bits: np.ndarray                   # NC2 x Ms x log2(M) decided bits
    soft: np.ndarray = field(repr=False)       # despread decision variables
    residual: np.ndarray = field(repr=False)   # Nc x Ms block handed to the radar stage


def run_block(block: ReceivedBlock, const: QamConstellation) -> SicBlockResult:
    d_hat, bits, soft = demodulate_comm(block, const)
    residual = cancel(block, d_hat)
    return SicBlockResult(d_hat=d_hat, bits=bits, soft=soft, residual=residual)


def block_diagnostics(block: ReceivedBlock, result: SicBlockResult,
                      d2_true: np.ndarray, bits_true: np.ndarray) -> dict:
    """Per-symbol diagnostics: bit errors, residual energy, decision-error leakage."""
    bit_errors = (result.bits != bits_true).sum(axis=(0, 2))
    residual_energy = (np.abs(result.residual) ** 2).sum(axis=0)
    err = d2_true - result.d_hat
    leak = block.h_comm * tx_block(block.book2, err, block.p2)
    error_prop_energy = (np.abs(leak) ** 2).sum(axis=0)
    return {"bit_errors": bit_errors.astype(int),
            "residual_energy": residual_energy,
            "error_prop_energy": error_prop_energy}


def write_sic_diagnostics(path, trial: int, diag: dict) -> None:
    ms = diag["bit_errors"].size
    with open(path, "w") as f:
        f.write("trial,symbol,bit_errors,residual_energy,error_prop_energy\n")
        for i in range(ms):
            f.write(f"{trial},{i},{diag['bit_errors'][i]},"
                    f"{diag['residual_energy'][i]!r},{diag['error_prop_energy'][i]!r}\n")
