"""OFDM numerology and unitary (I)DFT transforms.

The simulation main path stays in the frequency domain (per-subcarrier channel
multiplication); modulate/demodulate provide the time-domain view with cyclic
prefix for consistency checks and waveform export. All transforms are unitary
(1/sqrt(Nc) both ways), so Parseval holds exactly.
"""

import struct
from dataclasses import dataclass

import numpy as np

WAVEFORM_MAGIC = b"CDOFDM01"


@dataclass(frozen=True)
class OfdmParams:
    nc: int = 1024              # subcarriers
    delta_f: float = 120e3      # subcarrier spacing, Hz (exact; T derived)
    tg: float = 1.43e-6         # guard (CP) time, s
    ms: int = 1024              # symbols per block
    ts: float = None            # frame time used for Doppler arithmetic; None -> T + Tg

    def __post_init__(self):
        if self.nc < 1 or self.nc & (self.nc - 1):
            raise ValueError("nc must be a power of two")
        if self.delta_f <= 0:
            raise ValueError("delta_f must be > 0")
        if self.tg < 0:
            raise ValueError("tg must be >= 0")
        if self.ms < 1:
            raise ValueError("ms must be >= 1")
        if self.ts is None:
            object.__setattr__(self, "ts", self.symbol_time + self.tg)
        elif self.ts <= 0:
            raise ValueError("ts must be > 0")

    @property
    def bandwidth(self) -> float:
        return self.nc * self.delta_f

    @property
    def symbol_time(self) -> float:
        return 1.0 / self.delta_f

    @property
    def cp_samples(self) -> int:
        # Tg*B is generally not integral; round and document the realized CP
        return int(round(self.tg * self.bandwidth))

    @property
    def cp_time_actual(self) -> float:
        return self.cp_samples / self.bandwidth


def dft_matrix(nc: int) -> np.ndarray:
    """Unitary DFT matrix, F[m, q] = exp(-j 2 pi m q / Nc) / sqrt(Nc)."""
    if nc < 1:
        raise ValueError("nc must be >= 1")
    m = np.arange(nc)
    return np.exp(-2j * np.pi * np.outer(m, m) / nc) / np.sqrt(nc)


def modulate(params: OfdmParams, freq: np.ndarray) -> np.ndarray:
    """Frequency-domain symbols -> time samples with cyclic prefix.

    freq is (Nc,) or (Nc, n_frames); output gains cp_samples rows on top.
    """
    freq = np.asarray(freq)
    if freq.shape[0] != params.nc:
        raise ValueError(f"expected {params.nc} subcarriers, got {freq.shape}")
    body = np.fft.ifft(freq, axis=0, norm="ortho")
    cp = params.cp_samples
    if cp == 0:
        return body
    return np.concatenate([body[-cp:, ...], body], axis=0)


def demodulate(params: OfdmParams, time: np.ndarray) -> np.ndarray:
    """Time samples with cyclic prefix -> frequency-domain symbols."""
    time = np.asarray(time)
    expect = params.nc + params.cp_samples
    if time.shape[0] != expect:
        raise ValueError(f"expected {expect} samples per frame, got {time.shape}")
    body = time[params.cp_samples:, ...]
    return np.fft.fft(body, axis=0, norm="ortho")


@dataclass(frozen=True)
class FrameBlock:
    """Nc x Ms frequency-domain block (subcarriers x symbols)."""
    data: np.ndarray
    params: OfdmParams

    def __post_init__(self):
        if self.data.shape != (self.params.nc, self.params.ms):
            raise ValueError(
                f"block must be {(self.params.nc, self.params.ms)}, got {self.data.shape}")


def write_waveform(path, params: OfdmParams, blocks: np.ndarray) -> None:
    """Binary export: header, then interleaved re/im float64, row-major frames.

    Header layout (little endian): 8-byte magic "CDOFDM01", uint32 Nc,
    uint32 cp_samples, uint32 n_frames, float64 sample_rate (= bandwidth, Hz).
    Each frame is Nc + cp_samples complex samples.
    """
    blocks = np.asarray(blocks, dtype=complex)
    frame_len = params.nc + params.cp_samples
    if blocks.ndim == 1:
        blocks = blocks[:, None]
    if blocks.shape[0] != frame_len:
        raise ValueError(f"frames must have {frame_len} samples, got {blocks.shape}")
    n_frames = blocks.shape[1]
    inter = np.empty((n_frames, frame_len, 2), dtype="<f8")
    inter[..., 0] = blocks.T.real
    inter[..., 1] = blocks.T.imag
    with open(path, "wb") as f:
        f.write(WAVEFORM_MAGIC)
        f.write(struct.pack("<IIId", params.nc, params.cp_samples, n_frames,
                            params.bandwidth))
        f.write(inter.tobytes())


def read_waveform(path):
    """Inverse of write_waveform; returns (nc, cp_samples, sample_rate, blocks)."""
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != WAVEFORM_MAGIC:
            raise ValueError("not a waveform file (bad magic)")
        nc, cp, n_frames, rate = struct.unpack("<IIId", f.read(20))
        raw = np.frombuffer(f.read(), dtype="<f8")
    frame_len = nc + cp
    if raw.size != n_frames * frame_len * 2:
        raise ValueError("truncated waveform file")
    inter = raw.reshape(n_frames, frame_len, 2)
    blocks = (inter[..., 0] + 1j * inter[..., 1]).T
    return nc, cp, rate, blocks
