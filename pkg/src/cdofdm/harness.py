"""Experiment harness: calibrated Monte Carlo sweeps and the radar demo.

All randomness flows through counter-based streams keyed on (seed, purpose,
point<<20 | trial), so every sweep point is reproducible in isolation and
results do not depend on execution order. Noise is calibrated so the sweep
axis is the per-subcarrier post-equalization SINR of the running scheme's
line-of-sight communication path; the despreading gain Nc/NC then shows up
as a horizontal shift between schemes rather than being baked into the axis.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .channel import (BeamformingSet, GeometryConfig, JcsChannelRealization,
                      conjugate_beams, realize, steering)
from .config import SimConfig, build_books, config_hash, geometry, grid_project, \
    ofdm_params, tx_row_power
from .constellation import QamConstellation, make_constellation, map_bits
from .errors import ConfigError, ErasureBudgetError, GuardError
from .ofdm import OfdmParams
from .radar import RadarEstimate, estimate, periodogram, reference_divide, \
    write_image_csv
from .rng import CHANNEL, DATA_USER1, DATA_USER2, NOISE, crandn, make_rng
from .sic import ReceivedBlock, block_diagnostics, run_block, synthesize, \
    tx_block, write_sic_diagnostics
from .spreading import CodeBook, random_symbols
from .version import __version__

BER_COLUMNS = ("scheme", "metric", "sinr_db", "value", "stderr", "trials",
               "seed", "flag")
AEPP_COLUMNS = ("scheme", "M", "Nc", "NC", "sinr_db", "aepp_formula",
                "aepp_montecarlo", "rel_err")


@dataclass(frozen=True)
class Runtime:
    """Everything derived from a SimConfig that sweeps reuse per block."""
    cfg: SimConfig
    const: QamConstellation
    book1: CodeBook            # own codebook (radar reference)
    book2: CodeBook            # partner codebook (decoded data)
    params: OfdmParams
    geom: GeometryConfig
    beams: BeamformingSet
    los_gain_sq: float         # |beamformed LoS comm gain|^2
    row_power: float           # per-subcarrier tx power factor of book2


def build_runtime(cfg: SimConfig) -> Runtime:
    const = make_constellation(cfg.qam_order)
    book1, book2 = build_books(cfg)
    params = ofdm_params(cfg)
    geom = geometry(cfg)
    beams = conjugate_beams(geom)
    p0 = geom.paths[0]
    b0 = geom.wavelength / (4.0 * np.pi * p0.range_m)
    f = (np.vdot(beams.w_rx_comm, steering(p0.aoa, geom.n_rx))
         * (steering(p0.aod, geom.m_tx) @ np.conj(beams.w_tx)))
    return Runtime(cfg=cfg, const=const, book1=book1, book2=book2,
                   params=params, geom=geom, beams=beams,
                   los_gain_sq=float(b0**2 * np.abs(f) ** 2),
                   row_power=tx_row_power(book2))


def noise_variance(rt: Runtime, sinr_db: float) -> float:
    """Per-subcarrier complex noise variance hitting the target axis SINR."""
    gamma = 10.0 ** (sinr_db / 10.0)
    return rt.cfg.p2 * rt.row_power * rt.los_gain_sq / gamma


def spreading_gain(book: CodeBook) -> float:
    """Post-despread SINR gain over the per-subcarrier axis SINR."""
    return book.nc / book.n_channels if book.kind == "hadamard" else 1.0


def _stream_index(point: int, trial: int) -> int:
    if trial >= 1 << 20:
        raise ValueError("trial index exceeds the 2^20 stream packing")
    return (point << 20) | trial


@dataclass
class BlockSim:
    """One simulated frame: channel, payloads, and the received block."""
    h: JcsChannelRealization
    d1: np.ndarray             # own symbols (radar reference payload)
    d2: np.ndarray             # partner symbols
    bits2: np.ndarray          # partner bits, shape (NC2, Ms, k)
    tx1: np.ndarray            # own transmitted block (radar reference)
    y: np.ndarray


def simulate_block(rt: Runtime, noise_var: float, point: int, trial: int,
                   with_comm: bool = True, with_echo: bool = True) -> BlockSim:
    cfg = rt.cfg
    idx = _stream_index(point, trial)
    k = rt.const.bits_per_symbol
    d1 = random_symbols(rt.const, make_rng(cfg.seed, DATA_USER1, idx),
                        (rt.book1.n_channels, cfg.ms))
    bits2 = make_rng(cfg.seed, DATA_USER2, idx).integers(
        0, 2, size=(rt.book2.n_channels, cfg.ms, k), dtype=np.uint8)
    d2 = map_bits(rt.const, bits2.reshape(-1)).reshape(rt.book2.n_channels, cfg.ms)
    h = realize(rt.geom, rt.beams, rt.params, rng=make_rng(cfg.seed, CHANNEL, idx))
    noise = crandn(make_rng(cfg.seed, NOISE, idx), (cfg.nc, cfg.ms), var=noise_var)
    tx1 = tx_block(rt.book1, d1, cfg.p1)
    if with_comm:
        y = synthesize(h.h_comm, h.h_radar, rt.book1, rt.book2, d1, d2,
                       cfg.p1, cfg.p2, noise, include_echo=with_echo)
    else:
        y = h.h_radar * tx1 + noise
    return BlockSim(h=h, d1=d1, d2=d2, bits2=bits2, tx1=tx1, y=y)


@dataclass
class ExperimentResult:
    metric: str
    columns: tuple
    rows: list = field(default_factory=list)
    cfg: SimConfig = None

    def write_csv(self, path) -> None:
        write_rows_csv(path, self.columns, self.rows, self.cfg)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows_csv(path, columns, rows, cfg: SimConfig = None) -> None:
    """CSV with a provenance comment line; floats via repr for byte stability."""
    with open(path, "w") as f:
        if cfg is not None:
            f.write(f"# cdofdm v{__version__} config={config_hash(cfg)} "
                    f"seed={cfg.seed}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(row[c]) for c in columns) + "\n")


def run_ber_sweep(cfg: SimConfig) -> ExperimentResult:
    """Bit error rate of the partner data link across the SINR sweep."""
    rt = build_runtime(cfg)
    bits_per_block = rt.book2.n_channels * cfg.ms * rt.const.bits_per_symbol
    n_blocks = max(1, math.ceil(cfg.ber_bits / bits_per_block))
    with_echo = cfg.scheme != "tdd-ofdm"
    res = ExperimentResult(metric="ber", columns=BER_COLUMNS, cfg=cfg)
    for point, sinr_db in enumerate(cfg.sinr_db):
        nv = noise_variance(rt, sinr_db)
        errors = 0
        bits = 0
        erased = 0
        for trial in range(n_blocks):
            try:
                sim = simulate_block(rt, nv, point, trial, with_echo=with_echo)
                block = ReceivedBlock(y=sim.y, h_comm=sim.h.h_comm,
                                      book1=rt.book1, book2=rt.book2,
                                      p1=cfg.p1, p2=cfg.p2)
                out = run_block(block, rt.const)
            except GuardError:
                erased += 1
                continue
            errors += int((out.bits != sim.bits2).sum())
            bits += bits_per_block
        if erased > cfg.erasure_budget * n_blocks:
            raise ErasureBudgetError(
                f"{erased}/{n_blocks} blocks erased at {sinr_db} dB, over the "
                f"{cfg.erasure_budget:.1%} budget")
        ber = errors / bits if bits else float("nan")
        stderr = math.sqrt(ber * (1.0 - ber) / bits) if bits else float("nan")
        flag = "ok"
        if errors == 0 or stderr > cfg.ber_max_rel_stderr * ber:
            flag = "under_sampled"
        res.rows.append({"scheme": cfg.scheme, "metric": "ber",
                         "sinr_db": float(sinr_db), "value": ber,
                         "stderr": stderr, "trials": bits, "seed": cfg.seed,
                         "flag": flag})
    return res


def _radar_trial(rt: Runtime, noise_var: float, point: int, trial: int) -> RadarEstimate:
    """One full sensing trial: frame, receiver chain, periodogram peak."""
    cfg = rt.cfg
    if cfg.scheme == "tdd-ofdm":
        sim = simulate_block(rt, noise_var, point, trial, with_comm=False)
        residual = sim.y
    else:
        sim = simulate_block(rt, noise_var, point, trial)
        block = ReceivedBlock(y=sim.y, h_comm=sim.h.h_comm, book1=rt.book1,
                              book2=rt.book2, p1=cfg.p1, p2=cfg.p2)
        residual = run_block(block, rt.const).residual
    return estimate(residual, sim.tx1, rt.params, cfg.fc, cfg.c0)


def run_rmse_sweep(cfg: SimConfig):
    """Range and velocity RMSE versus the configured truth, per SINR point.

    Errors are measured against the configured (r0, v_rel), so grid
    quantization from target_grid snapping is included in the reported RMSE.
    Guard failures (deep fades, zero reference cells) erase the trial; more
    than erasure_budget of them aborts the sweep.
    """
    rt = build_runtime(cfg)
    res_r = ExperimentResult(metric="rmse_range_m", columns=BER_COLUMNS, cfg=cfg)
    res_v = ExperimentResult(metric="rmse_velocity_mps", columns=BER_COLUMNS, cfg=cfg)
    for point, sinr_db in enumerate(cfg.sinr_db):
        nv = noise_variance(rt, sinr_db)
        err_r = []
        err_v = []
        erased = 0
        for trial in range(cfg.trials):
            try:
                est = _radar_trial(rt, nv, point, trial)
            except GuardError:
                erased += 1
                continue
            err_r.append(est.range_m - cfg.r0)
            err_v.append(est.velocity_mps - cfg.v_rel)
        if erased > cfg.erasure_budget * cfg.trials:
            raise ErasureBudgetError(
                f"{erased}/{cfg.trials} trials erased at {sinr_db} dB, over "
                f"the {cfg.erasure_budget:.1%} budget")
        flag = "ok" if erased == 0 else f"erased={erased}"
        for res, err in ((res_r, err_r), (res_v, err_v)):
            sq = np.asarray(err) ** 2
            rmse = float(np.sqrt(sq.mean())) if sq.size else float("nan")
            if sq.size and rmse > 0:
                stderr = float(sq.std(ddof=1) / (2.0 * rmse * np.sqrt(sq.size))) \
                    if sq.size > 1 else float("nan")
            else:
                stderr = 0.0
            res.rows.append({"scheme": cfg.scheme, "metric": res.metric,
                             "sinr_db": float(sinr_db), "value": rmse,
                             "stderr": stderr, "trials": len(err),
                             "seed": cfg.seed, "flag": flag})
    return res_r, res_v


def run_aepp(cfg: SimConfig) -> ExperimentResult:
    """Closed-form error-propagation power, optionally checked in-pipeline.

    Formula rows come from analysis.aepp_curves: the plain-OFDM reference
    curve plus, when the configured codebook spreads, the spread curve at the
    configured channel count. The montecarlo column re-measures
    mean |d2 - d2_hat|^2 through the full receive chain for the curve the
    configured scheme actually runs (NaN elsewhere or with aepp_pipeline
    off). At high SINR the pipeline sees no decision errors and reports 0
    with rel_err 1; that is under-sampling, not a formula failure.
    """
    rt = build_runtime(cfg)
    target = "cd-ofdm" if rt.book2.kind == "hadamard" else "ofdm"
    nch_list = [rt.book2.n_channels] if target == "cd-ofdm" else []
    curves = analysis.aepp_curves([cfg.qam_order], cfg.sinr_db, cfg.nc, nch_list)
    measured = {}
    if cfg.aepp_pipeline:
        per_block = rt.book2.n_channels * cfg.ms
        n_blocks = max(1, math.ceil(cfg.aepp_symbols / per_block))
        with_echo = cfg.scheme != "tdd-ofdm"
        for point, sinr_db in enumerate(cfg.sinr_db):
            nv = noise_variance(rt, sinr_db)
            total = 0.0
            count = 0
            for trial in range(n_blocks):
                sim = simulate_block(rt, nv, point, trial, with_echo=with_echo)
                block = ReceivedBlock(y=sim.y, h_comm=sim.h.h_comm,
                                      book1=rt.book1, book2=rt.book2,
                                      p1=cfg.p1, p2=cfg.p2)
                out = run_block(block, rt.const)
                total += float((np.abs(sim.d2 - out.d_hat) ** 2).sum())
                count += per_block
            measured[float(sinr_db)] = total / count
    res = ExperimentResult(metric="aepp", columns=AEPP_COLUMNS, cfg=cfg)
    for c in curves:
        on_target = c["scheme"] == target and (
            target == "ofdm" or c["NC"] == rt.book2.n_channels)
        mc = measured.get(c["sinr_db"], float("nan")) if on_target else float("nan")
        formula = c["aepp"]
        if math.isnan(mc):
            rel = float("nan")
        elif formula > 0:
            rel = abs(mc - formula) / formula
        else:
            rel = 0.0 if mc == 0.0 else float("inf")
        res.rows.append({"scheme": c["scheme"], "M": c["M"], "Nc": c["Nc"],
                         "NC": c["NC"], "sinr_db": c["sinr_db"],
                         "aepp_formula": formula, "aepp_montecarlo": mc,
                         "rel_err": rel})
    return res


def run_radar_demo(cfg: SimConfig, image_csv=None, diagnostics_csv=None,
                   printer=print) -> dict:
    """Single sensing frame at demo_sinr_db with a human-readable report."""
    rt = build_runtime(cfg)
    nv = noise_variance(rt, cfg.demo_sinr_db)
    r_eff, v_eff = grid_project(cfg)
    b = rt.params.bandwidth
    exp_delay = int(round(2.0 * r_eff / cfg.c0 * b))
    exp_doppler = int(round(2.0 * v_eff * cfg.fc / cfg.c0 * rt.params.ts * cfg.ms))
    if cfg.scheme == "tdd-ofdm":
        sim = simulate_block(rt, nv, 0, 0, with_comm=False)
        residual = sim.y
        diag = None
    else:
        sim = simulate_block(rt, nv, 0, 0)
        block = ReceivedBlock(y=sim.y, h_comm=sim.h.h_comm, book1=rt.book1,
                              book2=rt.book2, p1=cfg.p1, p2=cfg.p2)
        out = run_block(block, rt.const)
        residual = out.residual
        diag = block_diagnostics(block, out, sim.d2, sim.bits2)
    div = reference_divide(residual, sim.tx1)
    image = periodogram(div)
    est = estimate(residual, sim.tx1, rt.params, cfg.fc, cfg.c0)
    printer(f"scheme: {cfg.scheme}   SINR: {cfg.demo_sinr_db:g} dB")
    printer(f"truth (configured): R = {cfg.r0:.3f} m, v = {cfg.v_rel:.3f} m/s")
    printer(f"truth (on analysis grid, target_grid={cfg.target_grid}): "
            f"R = {r_eff:.3f} m, v = {v_eff:.3f} m/s, "
            f"bins = ({exp_delay}, {exp_doppler})")
    printer(f"estimate: bins = ({est.ind_delay}, {est.ind_doppler}), "
            f"R = {est.range_m:.3f} m, v = {est.velocity_mps:.3f} m/s")
    printer(f"peak magnitude {est.peak_magnitude:.6g}, "
            f"peak-to-floor {est.peak_to_floor_db:.2f} dB")
    if image_csv is not None:
        write_image_csv(image_csv, image)
        printer(f"radar image written to {image_csv}")
    if diagnostics_csv is not None and diag is not None:
        write_sic_diagnostics(diagnostics_csv, 0, diag)
        printer(f"cancellation diagnostics written to {diagnostics_csv}")
    return {"estimate": est, "expected_bins": (exp_delay, exp_doppler),
            "r_eff": r_eff, "v_eff": v_eff, "image": image,
            "diagnostics": diag}


def select_scheme(estimated_sinr_db: float, threshold_db: float) -> str:
    """Spread below the switch threshold, plain OFDM at or above it."""
    if threshold_db is None:
        raise ConfigError("dsss_switch_threshold_db is not set")
    return "cd-ofdm" if estimated_sinr_db < threshold_db else "ofdm"


def sinr_at_ber(sinr_db, ber, target: float = 1e-3) -> float:
    """SINR where the curve crosses `target`, log-linear in BER.

    Expects BER nonincreasing along the sweep; uses the first bracketing
    segment with positive BER on both ends.
    """
    s = np.asarray(sinr_db, dtype=float)
    b = np.asarray(ber, dtype=float)
    if s.size != b.size or s.size < 2:
        raise ValueError("need matching sinr/ber arrays with >= 2 points")
    for i in range(s.size - 1):
        b0, b1 = b[i], b[i + 1]
        if b0 >= target >= b1 and b0 > 0 and b1 > 0:
            if b0 == b1:
                return float(s[i])
            t = (math.log10(target) - math.log10(b0)) / \
                (math.log10(b1) - math.log10(b0))
            return float(s[i] + t * (s[i + 1] - s[i]))
    raise ValueError(f"BER curve does not bracket {target}")


def measure_gap(sinr_ref, ber_ref, sinr_alt, ber_alt, target: float = 1e-3) -> float:
    """Horizontal SINR gap (alt minus ref) at the target BER."""
    return sinr_at_ber(sinr_alt, ber_alt, target) - sinr_at_ber(sinr_ref, ber_ref, target)
