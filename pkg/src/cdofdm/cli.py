"""Command line front end.

Subcommands: ber-sweep, rmse-sweep, aepp, radar-demo, theorem-check.
Exit codes: 0 success, 2 configuration error, 3 numerical-guard error
(zero reference, deep fade beyond the erasure budget, or a failed
zero-free certification).

Without --full-scale, runs shrink ms/trials/ber_bits/aepp_symbols to desk
scale unless the config file (or a flag) pins them explicitly.
"""

import argparse
import os
import sys

from . import harness
from .config import SimConfig, apply_scale, load_config
from .constellation import make_constellation
from .errors import ConfigError, GuardError
from .rng import ORACLE, make_rng
from .spreading import EXHAUSTIVE_BUDGET, check_zero_free, make_codebook
from .version import __version__

THEOREM_COLUMNS = ("nc", "n_channels", "qam_order", "mode", "trials",
                   "zero_free", "certified", "min_abs_entry",
                   "predicted_zero_free", "witness_row", "witness_digits")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON config file (keys mirror SimConfig fields)")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="override the run seed")
    common.add_argument("--out", default="out", metavar="DIR",
                        help="output directory (default: out)")
    common.add_argument("--trials", type=int, metavar="N",
                        help="override trial count")
    common.add_argument("--full-scale", action="store_true",
                        help="reference sweep sizes instead of desk scale")
    common.add_argument("--plot", action="store_true",
                        help="also render PNG plots")

    p = argparse.ArgumentParser(
        prog="cdofdm",
        description="Code-division OFDM joint communication and sensing "
                    "link simulator")
    p.add_argument("--version", action="version",
                   version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("ber-sweep", parents=[common],
                   help="bit error rate vs SINR for the configured scheme")
    sub.add_parser("rmse-sweep", parents=[common],
                   help="range/velocity RMSE vs SINR through the full chain")
    sub.add_parser("aepp", parents=[common],
                   help="closed-form error-propagation power vs pipeline")
    demo = sub.add_parser("radar-demo", parents=[common],
                          help="single sensing frame with a printed report")
    demo.add_argument("--sinr", type=float, metavar="DB",
                      help="demo SINR in dB (default: config demo_sinr_db)")
    thm = sub.add_parser("theorem-check", parents=[common],
                         help="zero-free spreading certification battery")
    thm.add_argument("--nc", type=int, metavar="N",
                     help="run a single check at this block size instead")
    thm.add_argument("--n-channels", type=int, metavar="NC",
                     help="channel count for the single check")
    thm.add_argument("--qam-order", type=int, choices=(4, 16, 64),
                     help="constellation for the single check")
    thm.add_argument("--mode", choices=("exhaustive", "randomized"),
                     help="search mode for the single check")
    return p


def _load(args) -> SimConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if getattr(args, "sinr", None) is not None:
        overrides["demo_sinr_db"] = args.sinr
    cfg, explicit = load_config(args.config, overrides)
    return apply_scale(cfg, explicit, args.full_scale)


def _out(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _cmd_ber(args) -> int:
    cfg = _load(args)
    res = harness.run_ber_sweep(cfg)
    path = _out(args, "ber.csv")
    res.write_csv(path)
    print(f"wrote {path} ({len(res.rows)} points)")
    if args.plot:
        from .plots import plot_ber
        plot_ber(res.rows, _out(args, "ber.png"))
        print(f"wrote {_out(args, 'ber.png')}")
    return 0


def _cmd_rmse(args) -> int:
    cfg = _load(args)
    res_r, res_v = harness.run_rmse_sweep(cfg)
    pr, pv = _out(args, "rmse_range.csv"), _out(args, "rmse_velocity.csv")
    res_r.write_csv(pr)
    res_v.write_csv(pv)
    print(f"wrote {pr} and {pv} ({len(res_r.rows)} points each)")
    if args.plot:
        from .plots import plot_rmse
        plot_rmse(res_r.rows, res_v.rows, _out(args, "rmse.png"))
        print(f"wrote {_out(args, 'rmse.png')}")
    return 0


def _cmd_aepp(args) -> int:
    cfg = _load(args)
    res = harness.run_aepp(cfg)
    path = _out(args, "aepp.csv")
    res.write_csv(path)
    print(f"wrote {path} ({len(res.rows)} rows)")
    if args.plot:
        from .plots import plot_aepp
        plot_aepp(res.rows, _out(args, "aepp.png"))
        print(f"wrote {_out(args, 'aepp.png')}")
    return 0


def _cmd_radar_demo(args) -> int:
    cfg = _load(args)
    out = harness.run_radar_demo(cfg, image_csv=_out(args, "radar_image.csv"),
                                 diagnostics_csv=_out(args, "sic_diagnostics.csv"))
    if args.plot:
        from .plots import plot_radar_image
        plot_radar_image(out["image"].magnitude, _out(args, "radar_image.png"))
        print(f"wrote {_out(args, 'radar_image.png')}")
    return 0


# default certification battery: exhaustive at a size where enumeration is
# cheap, randomized at the reference size
BATTERY_EXHAUSTIVE = [(8, nch, 4) for nch in range(1, 9)]
BATTERY_RANDOMIZED = [(1024, 511, m) for m in (4, 16, 64)]


def _theorem_rows(cfg, args):
    single = any(v is not None for v in (args.nc, args.n_channels,
                                         args.qam_order, args.mode))
    if single:
        if args.nc is None or args.n_channels is None:
            raise ConfigError("single theorem check needs --nc and --n-channels")
        m = args.qam_order or 4
        mode = args.mode or ("exhaustive" if m ** args.n_channels
                             <= EXHAUSTIVE_BUDGET else "randomized")
        cases = [(args.nc, args.n_channels, m, mode)]
    else:
        cases = [(*c, "exhaustive") for c in BATTERY_EXHAUSTIVE] + \
                [(*c, "randomized") for c in BATTERY_RANDOMIZED]
    draws = args.trials if args.trials is not None else 1_000_000
    reports = []
    for i, (nc, nch, m, mode) in enumerate(cases):
        book = make_codebook(nc, kind="hadamard", columns=range(nch))
        const = make_constellation(m)
        rng = make_rng(cfg.seed, ORACLE, i) if mode == "randomized" else None
        reports.append(check_zero_free(book, const, mode=mode,
                                       trials=draws, rng=rng))
    return reports


def _cmd_theorem(args) -> int:
    cfg = _load(args)
    reports = _theorem_rows(cfg, args)
    rows = []
    consistent = True
    for rep in reports:
        print(rep.summary())
        if rep.theorem_predicts_zero_free and not rep.zero_free:
            consistent = False
        if not rep.theorem_predicts_zero_free and rep.mode == "exhaustive" \
                and rep.zero_free:
            consistent = False
        rows.append({"nc": rep.nc, "n_channels": rep.n_channels,
                     "qam_order": rep.qam_order, "mode": rep.mode,
                     "trials": rep.trials, "zero_free": rep.zero_free,
                     "certified": rep.certified,
                     "min_abs_entry": rep.min_abs_entry,
                     "predicted_zero_free": rep.theorem_predicts_zero_free,
                     "witness_row": -1 if rep.witness is None else rep.witness[1],
                     "witness_digits": "" if rep.witness is None else
                     "|".join(str(v) for v in rep.witness[0])})
    path = _out(args, "theorem.csv")
    harness.write_rows_csv(path, THEOREM_COLUMNS, rows, cfg)
    print(f"wrote {path}")
    if not consistent:
        raise GuardError("zero-free certification contradicts the odd-count rule")
    return 0


_COMMANDS = {"ber-sweep": _cmd_ber, "rmse-sweep": _cmd_rmse, "aepp": _cmd_aepp,
             "radar-demo": _cmd_radar_demo, "theorem-check": _cmd_theorem}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except GuardError as e:
        print(f"numerical guard tripped: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
