"""Joint communication and sensing MIMO channel.

Both links are narrowband-per-subcarrier multipath channels between uniform
linear arrays (element spacing half a wavelength). The communication link
(device 2 -> device 1) carries each path once; the radar link is the echo of
device 1's own transmission, so every path picks up twice the delay and twice
the Doppler, and departure and arrival share the target angle.

Per path l the beamformed scalar response at subcarrier m, symbol i is

    h(m, i) = sum_l  g_l * exp(j 2 pi f_d,l (tau_l + i Ts)) * exp(-j 2 pi m df tau_l)

with g_l = b_l * (w_rx^H a_N(theta_rx,l)) * (a_M(theta_tx,l)^T w_tx^*).

Communication gains: b_0 = lambda/(4 pi R_0) deterministic line of sight;
b_l = lambda/(4 pi R_l) * CN(0, sigma_c,l^2) otherwise. Radar gains:
b_l = sqrt(lambda^2 / ((4 pi)^3 R_l^4)) * b_r,l for all paths; by default the
line-of-sight reflection has fixed amplitude sigma_r,0 with uniform random
phase (a steady reflector), and CN fading everywhere else. Fading is drawn
once per block (block fading).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .ofdm import OfdmParams
from .rng import crandn


def steering(theta: float, n_elements: int, d_over_lambda: float = 0.5) -> np.ndarray:
    """ULA steering vector, entry p = exp(j 2 pi (d/lambda) p sin(theta))."""
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    p = np.arange(n_elements)
    return np.exp(2j * np.pi * d_over_lambda * p * np.sin(theta))


@dataclass(frozen=True)
class PathParams:
    range_m: float            # R_l, one-way distance
    aoa: float                # arrival angle at the receiver, radians
    aod: float                # departure angle (= target angle for the echo), radians
    sigma_c_sq: float = 0.0   # comm fading variance (unused on the LoS path)
    sigma_r_sq: float = 1.0   # radar reflection variance
    is_los: bool = False

    def __post_init__(self):
        if self.range_m <= 0:
            raise ValueError("path range must be > 0")
        if self.sigma_c_sq < 0 or self.sigma_r_sq < 0:
            raise ValueError("fading variances must be >= 0")


@dataclass(frozen=True)
class GeometryConfig:
    paths: tuple              # PathParams, LoS first
    fc: float = 24e9
    c0: float = 3.0e8
    m_tx: int = 16
    n_rx: int = 16
    v_rel: float = 15.0       # relative radial velocity, m/s
    los_rcs_fading: bool = False

    def __post_init__(self):
        if len(self.paths) == 0:
            raise ValueError("at least one path required")
        if not self.paths[0].is_los:
            raise ValueError("first path must be the line of sight")
        if sum(p.is_los for p in self.paths) != 1:
            raise ValueError("exactly one LoS path")
        if self.fc <= 0 or self.c0 <= 0:
            raise ValueError("fc and c0 must be > 0")
        if self.m_tx < 1 or self.n_rx < 1:
            raise ValueError("array sizes must be >= 1")

    @property
    def wavelength(self) -> float:
        return self.c0 / self.fc

    # Doppler is path-independent: both ends share one relative velocity.
    @property
    def fd_comm(self) -> float:
        return self.v_rel * self.fc / self.c0

    @property
    def fd_radar(self) -> float:
        return 2.0 * self.v_rel * self.fc / self.c0

    def tau_comm(self, l: int = 0) -> float:
        return self.paths[l].range_m / self.c0

    def tau_radar(self, l: int = 0) -> float:
        return 2.0 * self.paths[l].range_m / self.c0


@dataclass(frozen=True)
class BeamformingSet:
    w_tx: np.ndarray          # M, unit norm
    w_rx_comm: np.ndarray     # N, unit norm
    w_rx_radar: np.ndarray    # N, unit norm

    def __post_init__(self):
        for name, w in (("w_tx", self.w_tx), ("w_rx_comm", self.w_rx_comm),
                        ("w_rx_radar", self.w_rx_radar)):
            if abs(np.linalg.norm(w) - 1.0) > 1e-12:
                raise ValueError(f"{name} must have unit norm")


def conjugate_beams(geom: GeometryConfig) -> BeamformingSet:
    """Matched single-beam set: transmit toward the LoS departure angle,
    receive from the LoS arrival angle (comm) and the target angle (radar)."""
    los = geom.paths[0]
    w_tx = steering(los.aod, geom.m_tx) / np.sqrt(geom.m_tx)
    w_rx_c = steering(los.aoa, geom.n_rx) / np.sqrt(geom.n_rx)
    w_rx_r = steering(los.aod, geom.n_rx) / np.sqrt(geom.n_rx)
    return BeamformingSet(w_tx=w_tx, w_rx_comm=w_rx_c, w_rx_radar=w_rx_r)


@dataclass(frozen=True)
class PathGains:
    """Small-scale draws for one block: complex b per path and link."""
    b_comm: np.ndarray        # len L, b_C,l including large-scale factor
    b_radar: np.ndarray       # len L, b_R,l including large-scale factor


def path_gains(geom: GeometryConfig, rng: np.random.Generator) -> PathGains:
    """Draw per-path complex gains (large-scale deterministic, small-scale random)."""
    lam = geom.wavelength
    b_c = np.empty(len(geom.paths), dtype=complex)
    b_r = np.empty(len(geom.paths), dtype=complex)
    for l, p in enumerate(geom.paths):
        large_c = lam / (4.0 * np.pi * p.range_m)
        large_r = np.sqrt(lam**2 / ((4.0 * np.pi) ** 3 * p.range_m**4))
        if p.is_los:
            b_c[l] = large_c
            if geom.los_rcs_fading:
                b_r[l] = large_r * crandn(rng, (), p.sigma_r_sq)
            else:
                # steady reflector: fixed amplitude, uniform phase
                phase = rng.uniform(0.0, 2.0 * np.pi)
                b_r[l] = large_r * np.sqrt(p.sigma_r_sq) * np.exp(1j * phase)
        else:
            b_c[l] = large_c * crandn(rng, (), p.sigma_c_sq)
            b_r[l] = large_r * crandn(rng, (), p.sigma_r_sq)
    return PathGains(b_comm=b_c, b_radar=b_r)


@dataclass(frozen=True)
class JcsChannelRealization:
    h_comm: np.ndarray        # Nc x Ms beamformed comm response
    h_radar: np.ndarray       # Nc x Ms beamformed echo response
    gains: PathGains
    geom: GeometryConfig
    params: OfdmParams = field(repr=False)

    @property
    def los_comm_power(self) -> float:
        """Deterministic per-subcarrier LoS comm power gain |b_C,0|^2 M N
        (beam-matched); the SINR calibration reference."""
        lam = self.geom.wavelength
        b0 = lam / (4.0 * np.pi * self.geom.paths[0].range_m)
        return b0**2 * self.geom.m_tx * self.geom.n_rx


def _beamformed(paths, beams, gains, fd, taus, params, radar: bool):
    nc, ms = params.nc, params.ms
    m = np.arange(nc)
    i = np.arange(ms)
    h = np.zeros((nc, ms), dtype=complex)
    for l, p in enumerate(paths):
        tau = taus[l]
        if radar:
            a_rx = steering(p.aod, beams.w_rx_radar.size)
            a_tx = steering(p.aod, beams.w_tx.size)
            w_rx = beams.w_rx_radar
            b = gains.b_radar[l]
        else:
            a_rx = steering(p.aoa, beams.w_rx_comm.size)
            a_tx = steering(p.aod, beams.w_tx.size)
            w_rx = beams.w_rx_comm
            b = gains.b_comm[l]
        factor = (w_rx.conj() @ a_rx) * (a_tx @ beams.w_tx.conj())
        coeff = b * factor * np.exp(2j * np.pi * fd * tau)
        col = np.exp(-2j * np.pi * m * params.delta_f * tau)
        row = np.exp(2j * np.pi * fd * params.ts * i)
        h += coeff * np.outer(col, row)
    return h


def realize(geom: GeometryConfig, beams: BeamformingSet, params: OfdmParams,
            rng: np.random.Generator = None, gains: PathGains = None) -> JcsChannelRealization:
    """Draw one block-fading realization of both links on the Nc x Ms grid."""
    if gains is None:
        if rng is None:
            raise ValueError("rng required when gains are not supplied")
        gains = path_gains(geom, rng)
    taus_c = [geom.tau_comm(l) for l in range(len(geom.paths))]
    taus_r = [geom.tau_radar(l) for l in range(len(geom.paths))]
    h_c = _beamformed(geom.paths, beams, gains, geom.fd_comm, taus_c, params, radar=False)
    h_r = _beamformed(geom.paths, beams, gains, geom.fd_radar, taus_r, params, radar=True)
    return JcsChannelRealization(h_comm=h_c, h_radar=h_r, gains=gains,
                                 geom=geom, params=params)


def matrix_response_comm(geom: GeometryConfig, params: OfdmParams, gains: PathGains,
                         m: int, i: int, reverse: bool = False) -> np.ndarray:
    """Unbeamformed N x M comm channel matrix at one (subcarrier, symbol) cell.

    reverse=True swaps each path's departure and arrival angles, i.e. the same
    physical medium traversed the other way; with M = N the result is the
    transpose of the forward response for identical fading draws.
    """
    fd = geom.fd_comm
    h = np.zeros((geom.n_rx, geom.m_tx), dtype=complex)
    for l, p in enumerate(geom.paths):
        tau = geom.tau_comm(l)
        rx_angle, tx_angle = (p.aod, p.aoa) if reverse else (p.aoa, p.aod)
        a_rx = steering(rx_angle, geom.n_rx)
        a_tx = steering(tx_angle, geom.m_tx)
        phase = np.exp(2j * np.pi * fd * (tau + i * params.ts)) * \
            np.exp(-2j * np.pi * m * params.delta_f * tau)
        h += gains.b_comm[l] * phase * np.outer(a_rx, a_tx)
    return h


def export_realization_csv(path, h: np.ndarray) -> None:
    """Debug dump of one Nc x Ms response: subcarrier, symbol, re, im."""
    nc, ms = h.shape
    sub, sym = np.meshgrid(np.arange(nc), np.arange(ms), indexing="ij")
    cols = np.column_stack([sub.ravel(), sym.ravel(), h.real.ravel(), h.imag.ravel()])
    with open(path, "w") as f:
        f.write("subcarrier,symbol,re,im\n")
        np.savetxt(f, cols, fmt=["%d", "%d", "%.17g", "%.17g"], delimiter=",")


def reverse_geometry(geom: GeometryConfig) -> GeometryConfig:
    """Same medium seen from the other end (AoA and AoD swapped per path)."""
    swapped = tuple(replace(p, aoa=p.aod, aod=p.aoa) for p in geom.paths)
    return replace(geom, paths=swapped)
