"""Range-Doppler estimation from the cancelled block.

Dividing the residual entrywise by the known transmitted block strips the data
modulation and leaves the channel itself: for a single dominant reflection the
matrix is an outer product of a delay phase ramp across subcarriers and a
Doppler phase ramp across symbols. A unitary IFFT down the subcarrier axis
followed by a unitary FFT along the symbol axis concentrates it into one cell
(this is the matched filter for that phasor pair); the global magnitude peak
gives the delay/Doppler bins, converted to range and velocity via the two-way
relations tau = 2R/c0 and fd = 2 v fc / c0.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ZeroReferenceError
from .ofdm import OfdmParams

ZERO_REF_TOL = 1e-12


def reference_divide(residual: np.ndarray, tx_ref: np.ndarray) -> np.ndarray:
    """Entrywise residual / reference; raises if the reference has a dead cell."""
    if residual.shape != tx_ref.shape:
        raise ValueError("residual and reference shapes differ")
    mags = np.abs(tx_ref)
    if mags.min() < ZERO_REF_TOL:
        cell = tuple(int(i) for i in
                     np.unravel_index(int(np.argmin(mags)), tx_ref.shape))
        raise ZeroReferenceError(
            f"reference block is zero at (subcarrier, symbol)={cell}; "
            "an even code-channel count admits spread-vector zeros")
    return residual / tx_ref


@dataclass(frozen=True)
class RadarImage:
    image: np.ndarray          # complex Nc x Ms periodogram
    magnitude: np.ndarray      # |image|

    @property
    def shape(self):
        return self.image.shape


def periodogram(div: np.ndarray) -> RadarImage:
    """Unitary IFFT over subcarriers then unitary FFT over symbols."""
    img = np.fft.fft(np.fft.ifft(div, axis=0, norm="ortho"), axis=1, norm="ortho")
    return RadarImage(image=img, magnitude=np.abs(img))


def peak_search(image: RadarImage):
    """Global magnitude argmax; ties resolve to the smallest (delay, Doppler) pair.

    Returns (ind_delay, ind_doppler, peak_magnitude, peak_to_floor_db) where the
    floor is the mean squared magnitude over all other cells.
    """
    mag = image.magnitude
    flat = int(np.argmax(mag))  # first occurrence in C order = lexicographic min
    ind_r, ind_d = np.unravel_index(flat, mag.shape)
    peak = float(mag[ind_r, ind_d])
    total = float((mag**2).sum())
    rest = total - peak**2
    ncells = mag.size - 1
    floor = rest / ncells if ncells else np.inf
    ratio_db = 10.0 * np.log10(peak**2 / floor) if floor > 0 else np.inf
    return int(ind_r), int(ind_d), peak, ratio_db


@dataclass(frozen=True)
class RadarEstimate:
    ind_delay: int
    ind_doppler: int
    tau: float                 # two-way delay, s
    fd: float                  # two-way Doppler, Hz (negative = receding)
    range_m: float
    velocity_mps: float
    peak_magnitude: float
    peak_to_floor_db: float


def to_physical(ind_delay: int, ind_doppler: int, params: OfdmParams,
                fc: float, c0: float, peak_magnitude: float = np.nan,
                peak_to_floor_db: float = np.nan) -> RadarEstimate:
    """Bin indices -> physical quantities. Doppler bins above Ms/2 wrap negative."""
    if not 0 <= ind_delay < params.nc:
        raise ValueError("delay bin out of range")
    if not 0 <= ind_doppler < params.ms:
        raise ValueError("Doppler bin out of range")
    tau = ind_delay / params.bandwidth
    k = ind_doppler - params.ms if ind_doppler > params.ms // 2 else ind_doppler
    fd = k / (params.ts * params.ms)
    return RadarEstimate(ind_delay=ind_delay, ind_doppler=ind_doppler, tau=tau,
                         fd=fd, range_m=tau * c0 / 2.0,
                         velocity_mps=fd * c0 / (2.0 * fc),
                         peak_magnitude=peak_magnitude,
                         peak_to_floor_db=peak_to_floor_db)


def estimate(residual: np.ndarray, tx_ref: np.ndarray, params: OfdmParams,
             fc: float, c0: float) -> RadarEstimate:
    """Full single-target chain: divide, transform, peak, convert."""
    div = reference_divide(residual, tx_ref)
    img = periodogram(div)
    ind_r, ind_d, peak, ratio = peak_search(img)
    return to_physical(ind_r, ind_d, params, fc, c0, peak_magnitude=peak,
                       peak_to_floor_db=ratio)


def write_image_csv(path, image: RadarImage) -> None:
    """Dump the magnitude image as (delay_bin, doppler_bin, magnitude) rows."""
    nc, ms = image.magnitude.shape
    rbin, dbin = np.meshgrid(np.arange(nc), np.arange(ms), indexing="ij")
    cols = np.column_stack([rbin.ravel(), dbin.ravel(), image.magnitude.ravel()])
    with open(path, "w") as f:
        f.write("delay_bin,doppler_bin,magnitude\n")
        np.savetxt(f, cols, fmt=["%d", "%d", "%.17g"], delimiter=",")
