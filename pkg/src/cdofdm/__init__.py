"""Code-division OFDM joint communication and sensing link simulator.

One transceiver pair exchanges Walsh-Hadamard-spread OFDM data while each
side images its own echo for range and velocity. The package covers the
transmit chain, a beamformed two-path channel, the cancellation receiver,
periodogram sensing, closed-form error-propagation analysis, and a
reproducible sweep harness with a CLI.
"""

from .analysis import aepp, aepp_curves, mc_error_power, sigma_from_sinr_db, sinr_map
from .channel import (BeamformingSet, GeometryConfig, JcsChannelRealization,
                      PathGains, PathParams, conjugate_beams, matrix_response_comm,
                      path_gains, realize, reverse_geometry, steering)
from .config import (SimConfig, apply_scale, build_books, config_hash, geometry,
                     grid_project, load_config, ofdm_params)
from .constellation import (QamConstellation, hard_decide, make_constellation,
                            map_bits, prob_matrix, qfunc)
from .errors import (ConfigError, EqualizationSingularityError, ErasureBudgetError,
                     GuardError, ZeroReferenceError)
from .harness import (ExperimentResult, build_runtime, measure_gap, noise_variance,
                      run_aepp, run_ber_sweep, run_radar_demo, run_rmse_sweep,
                      select_scheme, simulate_block, sinr_at_ber, spreading_gain)
from .ofdm import (FrameBlock, OfdmParams, demodulate, dft_matrix, modulate,
                   read_waveform, write_waveform)
from .radar import (RadarEstimate, RadarImage, estimate, peak_search, periodogram,
                    reference_divide, to_physical)
from .rng import crandn, make_rng
from .sic import (ReceivedBlock, SicBlockResult, cancel, demodulate_comm,
                  equalize, run_block, synthesize, tx_block)
from .spreading import (CodeBook, ZeroFreeReport, check_zero_free, despread,
                        make_codebook, random_symbols, spread)
from .version import __version__

__all__ = [
    "__version__",
    "aepp", "aepp_curves", "mc_error_power", "sigma_from_sinr_db", "sinr_map",
    "BeamformingSet", "GeometryConfig", "JcsChannelRealization", "PathGains",
    "PathParams", "conjugate_beams", "matrix_response_comm", "path_gains",
    "realize", "reverse_geometry", "steering",
    "SimConfig", "apply_scale", "build_books", "config_hash", "geometry",
    "grid_project", "load_config", "ofdm_params",
    "QamConstellation", "hard_decide", "make_constellation", "map_bits",
    "prob_matrix", "qfunc",
    "ConfigError", "EqualizationSingularityError", "ErasureBudgetError",
    "GuardError", "ZeroReferenceError",
    "ExperimentResult", "build_runtime", "measure_gap", "noise_variance",
    "run_aepp", "run_ber_sweep", "run_radar_demo", "run_rmse_sweep",
    "select_scheme", "simulate_block", "sinr_at_ber", "spreading_gain",
    "FrameBlock", "OfdmParams", "demodulate", "dft_matrix", "modulate",
    "read_waveform", "write_waveform",
    "RadarEstimate", "RadarImage", "estimate", "peak_search", "periodogram",
    "reference_divide", "to_physical",
    "crandn", "make_rng",
    "ReceivedBlock", "SicBlockResult", "cancel", "demodulate_comm", "equalize",
    "run_block", "synthesize", "tx_block",
    "CodeBook", "ZeroFreeReport", "check_zero_free", "despread", "make_codebook",
    "random_symbols", "spread",
]
