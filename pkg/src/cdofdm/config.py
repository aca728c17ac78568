"""Run configuration: defaults, JSON loading, validation, derived objects.

The config file is flat JSON whose keys mirror SimConfig field names exactly;
unknown keys are rejected. Defaults follow the reference scenario of the
simulator (24 GHz carrier, 1024 subcarriers at 120 kHz, two devices at 100 m
closing at 15 m/s, 16-element arrays).
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .channel import GeometryConfig, PathParams
from .errors import ConfigError
from .ofdm import OfdmParams
from .spreading import CodeBook, make_codebook

SCHEMES = ("cd-ofdm", "ofdm", "tdd-ofdm")
CODEBOOKS = ("hadamard", "identity")
TARGET_GRIDS = ("floor", "round", "none")
USER_CODES = ("shared", "disjoint")

# desk-scale values applied by the CLI unless the key was set explicitly
DESK_SCALE = {"ms": 256, "trials": 100, "ber_bits": 500_000}
FULL_SCALE = {"ms": 1024, "trials": 200, "ber_bits": 2_000_000}


@dataclass(frozen=True)
class SimConfig:
    # numerology
    nc: int = 1024
    ms: int = 1024
    delta_f: float = 120e3
    tg: float = 1.43e-6
    ts: float = 9.77e-6           # frame time; None derives 1/delta_f + tg
    fc: float = 24e9
    c0: float = 3.0e8
    # arrays and beams
    m_tx: int = 16
    n_rx: int = 16
    theta_tx_deg: float = 0.0
    theta_rx_deg: float = 0.0
    # modulation and spreading
    qam_order: int = 4
    scheme: str = "cd-ofdm"
    codebook: str = "hadamard"
    nc1: int = 1
    nc2: int = 1
    code_channels: tuple = None   # explicit user-2 column list; overrides nc2
    user_codes: str = "shared"
    p1: float = 1.0
    p2: float = 1.0
    # geometry
    r0: float = 100.0
    v_rel: float = 15.0
    n_paths: int = 2
    nlos_range_factor: float = 1.3
    nlos_angle_offset_deg: float = 20.0
    nlos_sigma_c_sq: float = 0.1
    nlos_sigma_r_sq: float = 0.1
    los_rcs_sq: float = 1.0
    los_rcs_fading: bool = False
    target_grid: str = "floor"
    # sweeps and run control
    sinr_db: tuple = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0)
    demo_sinr_db: float = 20.0
    trials: int = 200
    ber_bits: int = 2_000_000
    ber_max_rel_stderr: float = 0.25
    seed: int = 12345
    erasure_budget: float = 0.01
    dsss_switch_threshold_db: float = None
    aepp_pipeline: bool = True
    aepp_symbols: int = 2_000_000


_INT_FIELDS = {"nc", "ms", "m_tx", "n_rx", "qam_order", "nc1", "nc2", "n_paths",
               "trials", "ber_bits", "seed", "aepp_symbols"}
_FLOAT_FIELDS = {"delta_f", "tg", "ts", "fc", "c0", "theta_tx_deg", "theta_rx_deg",
                 "p1", "p2", "r0", "v_rel", "nlos_range_factor",
                 "nlos_angle_offset_deg", "nlos_sigma_c_sq", "nlos_sigma_r_sq",
                 "los_rcs_sq", "demo_sinr_db", "ber_max_rel_stderr",
                 "erasure_budget", "dsss_switch_threshold_db"}
_BOOL_FIELDS = {"los_rcs_fading", "aepp_pipeline"}
_STR_FIELDS = {"scheme", "codebook", "user_codes", "target_grid"}
_LIST_FIELDS = {"sinr_db", "code_channels"}


def _coerce(name, value):
    if value is None:
        if name in ("ts", "dsss_switch_threshold_db", "code_channels"):
            return None
        raise ConfigError(f"config key {name!r} must not be null")
    try:
        if name in _INT_FIELDS:
            if isinstance(value, bool) or int(value) != value:
                raise ValueError
            return int(value)
        if name in _FLOAT_FIELDS:
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        if name in _BOOL_FIELDS:
            if not isinstance(value, bool):
                raise ValueError
            return value
        if name in _STR_FIELDS:
            if not isinstance(value, str):
                raise ValueError
            return value
        if name in _LIST_FIELDS:
            if not isinstance(value, (list, tuple)):
                raise ValueError
            if name == "code_channels":
                return tuple(int(v) for v in value)
            return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"config key {name!r} has invalid value {value!r}") from None
    raise ConfigError(f"unhandled config key {name!r}")


def load_config(path=None, overrides: dict = None):
    """Build a validated SimConfig from an optional JSON file plus overrides.

    Returns (config, explicit_keys) where explicit_keys lists every field the
    user pinned (file or override), so scale presets know what to leave alone.
    """
    data = {}
    if path is not None:
        try:
            with open(path) as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    if overrides:
        data = {**data, **overrides}
    known = {f.name for f in fields(SimConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    clean = {k: _coerce(k, v) for k, v in data.items()}
    cfg = replace(SimConfig(), **clean)
    validate(cfg)
    return cfg, frozenset(clean)


def apply_scale(cfg: SimConfig, explicit, full_scale: bool) -> SimConfig:
    """Desk-scale shrink (or full-scale restore) of keys the user left free."""
    preset = FULL_SCALE if full_scale else DESK_SCALE
    updates = {k: v for k, v in preset.items() if k not in explicit}
    out = replace(cfg, **updates)
    validate(out)
    return out


def validate(cfg: SimConfig) -> None:
    if cfg.nc < 2 or cfg.nc & (cfg.nc - 1):
        raise ConfigError("nc must be a power of two >= 2")
    if cfg.ms < 1:
        raise ConfigError("ms must be >= 1")
    if cfg.delta_f <= 0 or cfg.fc <= 0 or cfg.c0 <= 0:
        raise ConfigError("delta_f, fc, c0 must be > 0")
    if cfg.tg < 0:
        raise ConfigError("tg must be >= 0")
    if cfg.ts is not None and cfg.ts <= 0:
        raise ConfigError("ts must be > 0 (or null to derive)")
    if cfg.m_tx < 1 or cfg.n_rx < 1:
        raise ConfigError("array sizes must be >= 1")
    if cfg.qam_order not in (4, 16, 64):
        raise ConfigError("qam_order must be 4, 16 or 64")
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}")
    if cfg.codebook not in CODEBOOKS:
        raise ConfigError(f"codebook must be one of {CODEBOOKS}")
    if cfg.user_codes not in USER_CODES:
        raise ConfigError(f"user_codes must be one of {USER_CODES}")
    if cfg.target_grid not in TARGET_GRIDS:
        raise ConfigError(f"target_grid must be one of {TARGET_GRIDS}")
    n2 = len(cfg.code_channels) if cfg.code_channels is not None else cfg.nc2
    if not 1 <= cfg.nc1 <= cfg.nc or not 1 <= n2 <= cfg.nc:
        raise ConfigError("code channel counts must be in 1..nc")
    if cfg.scheme == "cd-ofdm" and cfg.codebook == "hadamard":
        # even channel counts admit zero spread entries, which kills the
        # radar reference division; refuse at startup
        if cfg.nc1 % 2 == 0 or n2 % 2 == 0:
            raise ConfigError(
                "cd-ofdm with a Hadamard codebook requires odd nc1 and nc2 "
                "(even counts can cancel to exact zeros on a subcarrier)")
    if cfg.user_codes == "disjoint" and cfg.nc1 + n2 > cfg.nc:
        raise ConfigError("disjoint user codes need nc1 + nc2 <= nc")
    if cfg.p1 <= 0 or cfg.p2 <= 0:
        raise ConfigError("p1 and p2 must be > 0")
    if cfg.r0 <= 0:
        raise ConfigError("r0 must be > 0")
    if cfg.n_paths not in (1, 2):
        raise ConfigError("n_paths must be 1 or 2")
    if cfg.nlos_range_factor <= 0:
        raise ConfigError("nlos_range_factor must be > 0")
    if min(cfg.nlos_sigma_c_sq, cfg.nlos_sigma_r_sq, cfg.los_rcs_sq) < 0:
        raise ConfigError("fading variances must be >= 0")
    if len(cfg.sinr_db) == 0:
        raise ConfigError("sinr_db sweep must not be empty")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    if cfg.ber_bits < int(np.log2(cfg.qam_order)):
        raise ConfigError("ber_bits too small")
    if not 0 <= cfg.erasure_budget <= 1:
        raise ConfigError("erasure_budget must be in [0, 1]")
    if cfg.ber_max_rel_stderr <= 0:
        raise ConfigError("ber_max_rel_stderr must be > 0")
    if cfg.aepp_symbols < 1:
        raise ConfigError("aepp_symbols must be >= 1")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed must fit in uint64")


def config_hash(cfg: SimConfig) -> str:
    blob = json.dumps(asdict(cfg), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def ofdm_params(cfg: SimConfig) -> OfdmParams:
    return OfdmParams(nc=cfg.nc, delta_f=cfg.delta_f, tg=cfg.tg, ms=cfg.ms, ts=cfg.ts)


def grid_project(cfg: SimConfig):
    """Project the point target onto the radar analysis grid.

    Returns (r_eff, v_eff) per cfg.target_grid: "floor"/"round" snap the
    two-way delay to a bin of width 1/B and the two-way Doppler to a bin of
    width 1/(Ts Ms), so the periodogram identities ind = quant(tau B),
    quant(fd Ts Ms) hold exactly; "none" keeps the continuous placement.
    """
    if cfg.target_grid == "none":
        return cfg.r0, cfg.v_rel
    quant = math.floor if cfg.target_grid == "floor" else round
    params = ofdm_params(cfg)
    b = params.bandwidth
    tau_r = 2.0 * cfg.r0 / cfg.c0
    fd_r = 2.0 * cfg.v_rel * cfg.fc / cfg.c0
    r_eff = quant(tau_r * b) / b * cfg.c0 / 2.0
    v_eff = quant(fd_r * params.ts * cfg.ms) / (params.ts * cfg.ms) * cfg.c0 / (2.0 * cfg.fc)
    return r_eff, v_eff


def geometry(cfg: SimConfig) -> GeometryConfig:
    r_eff, v_eff = grid_project(cfg)
    th_tx = math.radians(cfg.theta_tx_deg)
    th_rx = math.radians(cfg.theta_rx_deg)
    paths = [PathParams(range_m=r_eff, aoa=th_rx, aod=th_tx,
                        sigma_r_sq=cfg.los_rcs_sq, is_los=True)]
    if cfg.n_paths == 2:
        off = math.radians(cfg.nlos_angle_offset_deg)
        paths.append(PathParams(range_m=r_eff * cfg.nlos_range_factor,
                                aoa=th_rx + off, aod=th_tx + off,
                                sigma_c_sq=cfg.nlos_sigma_c_sq,
                                sigma_r_sq=cfg.nlos_sigma_r_sq))
    return GeometryConfig(paths=tuple(paths), fc=cfg.fc, c0=cfg.c0,
                          m_tx=cfg.m_tx, n_rx=cfg.n_rx, v_rel=v_eff,
                          los_rcs_fading=cfg.los_rcs_fading)


def build_books(cfg: SimConfig):
    """Codebooks (own reference, partner comm) for the configured scheme."""
    if cfg.scheme in ("ofdm", "tdd-ofdm"):
        book = make_codebook(cfg.nc, cfg.nc, kind="identity")
        return book, book
    if cfg.codebook == "identity":
        cols2 = cfg.code_channels if cfg.code_channels is not None else range(cfg.nc2)
        book2 = make_codebook(cfg.nc, kind="identity", columns=cols2)
        book1 = make_codebook(cfg.nc, kind="identity", columns=range(cfg.nc1))
        return book1, book2
    cols2 = cfg.code_channels if cfg.code_channels is not None else tuple(range(cfg.nc2))
    book2 = make_codebook(cfg.nc, kind="hadamard", columns=cols2)
    if cfg.user_codes == "shared":
        cols1 = tuple(range(cfg.nc1))
    else:
        start = max(cols2) + 1
        cols1 = tuple(range(start, start + cfg.nc1))
    book1 = make_codebook(cfg.nc, kind="hadamard", columns=cols1)
    return book1, book2


def tx_row_power(book: CodeBook) -> float:
    """Per-subcarrier transmit power factor of a unit-power symbol block."""
    row = (np.abs(book.matrix) ** 2).sum(axis=1).max()
    return float(book.norm_factor**2 * row)
