"""
Command-line entry point of the GFDM toolkit.
"""

import argparse
import logging
import os
import sys
from datetime import datetime
from typing import Optional

import numpy as np
import pandas as pd

from gfdm_toolkit.analysis.complexity import complexity_table
from gfdm_toolkit.analysis.papr import papr_ccdf
from gfdm_toolkit.analysis.spectrum import OOB_REFERENCE_KINDS, InterpolationFilter, oob_reference_setup, psd
from gfdm_toolkit.channel.generator import ChannelGenerator, ChannelKind
from gfdm_toolkit.channel.models import block_rng, get_profile
from gfdm_toolkit.core.characteristic import time_from_char
from gfdm_toolkit.core.errors import (
    ConfigError,
    InvalidInputError,
    LowComplexityUnavailableError,
    RejectionLimitError,
    SingularMatrixError,
)
from gfdm_toolkit.core.types import GfdmParams
from gfdm_toolkit.filters import create_filter, get_available_filters
from gfdm_toolkit.modem.frame import GfdmFrame, add_cp
from gfdm_toolkit.modem.transmitter import tx_form1
from gfdm_toolkit.sim.config import apply_overrides, build_filter_spec, load_config, parse_overrides, parse_snr_grid
from gfdm_toolkit.sim.harness import run_scenario, uniformity_report
from gfdm_toolkit.sim.qam import get_available_constellations, get_constellation
from gfdm_toolkit.ui.console_report import ConsoleReport
from gfdm_toolkit.utils.csv_io import write_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

logger = logging.getLogger("gfdm_toolkit")


def setup_logging(verbose: bool = False) -> str:
    """
    Send logs to a timestamped file in logs/ next to the package.

    Args:
        verbose: Also log to stderr

    Returns:
        Log file path
    """
    logs_dir = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'logs')
    os.makedirs(logs_dir, exist_ok=True)
    log_filename = os.path.join(logs_dir, f'gfdm_toolkit_{datetime.now().strftime("%Y%m%d_%H%M%S")}.log')

    handlers = [logging.FileHandler(log_filename)]
    if verbose:
        handlers.append(logging.StreamHandler(sys.stderr))
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
    logger.info(f"Starting new GFDM toolkit session. Logs will be written to {log_filename}")
    return log_filename


def _add_filter_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--K", type=int, default=8, help="Number of subcarriers")
    parser.add_argument("--M", type=int, default=5, help="Number of subsymbols")
    parser.add_argument("--filter", type=str, default="cmcm", choices=get_available_filters(),
                        help="Prototype filter")
    parser.add_argument("--rolloff", type=float, default=None, help="Roll-off of the raised-cosine filters")
    parser.add_argument("--phases", type=str, default=None,
                        help="Stored phase set for CMCM filters, or 'random'")
    parser.add_argument("--phase-seed", type=int, default=0, help="Seed of random CMCM phases")


def parse_args(argv=None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(prog="gfdm_toolkit", description="GFDM waveform toolkit")
    parser.add_argument("--verbose", action="store_true", help="Also write logs to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    # Monte-Carlo run
    simulate = sub.add_parser("simulate", help="Run a Monte-Carlo MSE/SER scenario")
    simulate.add_argument("config", type=str, help="Scenario config (YAML)")
    simulate.add_argument("--set", type=str, default="",
                          help="Comma-separated overrides in key=value format (SNR points separated by ';')")
    simulate.add_argument("--output", type=str, default=None, help="Result CSV")
    simulate.add_argument("--per-symbol-output", type=str, default=None, help="Per-(k, m) MSE CSV")
    simulate.add_argument("--workers", type=int, default=None, help="Worker threads")

    # Power spectral density
    spectrum = sub.add_parser("psd", help="Power spectral density of a GFDM signal")
    _add_filter_args(spectrum)
    spectrum.add_argument("--cp-len", type=int, default=0, help="Cyclic prefix length")
    spectrum.add_argument("--sample-rate", type=float, default=1.0, help="Sample rate 1/T_s in Hz")
    spectrum.add_argument("--interp-rolloff", type=float, default=0.1, help="Interpolation filter roll-off")
    spectrum.add_argument("--oversample", type=int, default=16, help="FFT grid points per DFT bin")
    spectrum.add_argument("--output", type=str, required=True, help="PSD CSV")

    # Out-of-band leakage
    oob = sub.add_parser("oob", help="Out-of-band leakage of GFDM and OFDM")
    oob.add_argument("--n-gc", type=int, default=1, help="Guard subcarriers before the out-of-band region")
    oob.add_argument("--kinds", type=str, default=",".join(OOB_REFERENCE_KINDS),
                     help="Comma-separated waveforms to evaluate")
    oob.add_argument("--oversample", type=int, default=16, help="FFT grid points per DFT bin")
    oob.add_argument("--output", type=str, default=None, help="Leakage CSV")

    # Peak-to-average power ratio
    peak = sub.add_parser("papr", help="PAPR CCDF of random GFDM blocks")
    _add_filter_args(peak)
    peak.add_argument("--cp-len", type=int, default=0, help="Cyclic prefix length")
    peak.add_argument("--blocks", type=int, default=10000, help="Number of blocks")
    peak.add_argument("--constellation", type=str, default="16qam", choices=get_available_constellations())
    peak.add_argument("--thresholds", type=str, default="0:0.5:12", help="PAPR thresholds in dB")
    peak.add_argument("--seed", type=int, default=0, help="Random seed")
    peak.add_argument("--output", type=str, default=None, help="CCDF CSV")

    # Complex multiplication counts
    cost = sub.add_parser("complexity", help="Complex multiplications per implementation")
    cost.add_argument("--K", type=int, default=64, help="Number of subcarriers")
    cost.add_argument("--M-values", type=str, default="3,5,7,9,15,16,32",
                      help="Comma-separated subsymbol counts")
    cost.add_argument("--lt", type=int, default=2, help="Nonzero-bin factor of the frequency-domain transmitter")
    cost.add_argument("--lr", type=int, default=16, help="Nonzero-bin factor of the frequency-domain receiver")
    cost.add_argument("--output", type=str, default=None, help="Complexity CSV")

    # Filter and channel export
    export = sub.add_parser("filter-export", help="Write a prototype filter to CSV")
    _add_filter_args(export)
    export.add_argument("--output", type=str, required=True, help="Filter CSV")

    channel = sub.add_parser("channel-export", help="Write a channel realization to CSV")
    channel.add_argument("--kind", type=str, default="rayleigh", choices=[k.value for k in ChannelKind])
    channel.add_argument("--K", type=int, default=8, help="Number of subcarriers")
    channel.add_argument("--M", type=int, default=5, help="Number of subsymbols")
    channel.add_argument("--pdp", type=str, default="exp", help="Power delay profile")
    channel.add_argument("--threshold-db", type=float, default=-30.0, help="Deep-fade threshold")
    channel.add_argument("--seed", type=int, default=0, help="Random seed")
    channel.add_argument("--output", type=str, required=True, help="Channel CSV")

    return parser.parse_args(argv)


def _banner(title: str) -> None:
    print("\n" + "=" * 80)
    print(title.center(80))
    print("=" * 80 + "\n")


def _filter_from_args(args: argparse.Namespace):
    params = GfdmParams(args.K, args.M)
    spec = build_filter_spec(args.filter, params, args.rolloff, args.phases, args.phase_seed)
    return params, spec, create_filter(spec, params)


def cmd_simulate(args: argparse.Namespace, report: ConsoleReport) -> int:
    """Run a scenario and write its result table."""
    cfg = load_config(args.config)
    overrides = parse_overrides(args.set)
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.output is not None:
        overrides["output"] = args.output
    cfg = apply_overrides(cfg, overrides)

    _banner(f"GFDM SIMULATION: {cfg.scenario.value.upper()}")
    report.show(report.summary_panel({
        "Scenario": cfg.scenario.value,
        "K x M": f"{cfg.K} x {cfg.M}",
        "Filter": cfg.filter,
        "Constellation": cfg.constellation,
        "Blocks": cfg.blocks,
        "CP length": cfg.cp_len,
        "Seed": cfg.seed,
        "Workers": cfg.workers,
    }, title="Scenario"))

    result = run_scenario(cfg)
    report.show(report.results_panel(result.to_frame()))
    spread = uniformity_report(result)
    print(f"Max relative spread of per-symbol MSE: {spread:.2%}")
    if result.pseudo_inverse:
        print("Note: singular GFDM matrix, ZF used the pseudo-inverse")

    if cfg.output:
        write_csv(result.to_frame(), cfg.output, result.metadata())
        print(f"Results written to {cfg.output}")
    if args.per_symbol_output:
        write_csv(result.per_symbol_frame(), args.per_symbol_output, result.metadata())
    return EXIT_OK


def cmd_psd(args: argparse.Namespace, report: ConsoleReport) -> int:
    """Write the PSD of a fully allocated GFDM signal."""
    params, spec, G = _filter_from_args(args)
    spectrum = psd(G, cp_len=args.cp_len, sample_rate=args.sample_rate,
                   interp=InterpolationFilter(args.interp_rolloff), oversample=args.oversample)
    metadata = {"K": params.K, "M": params.M, "filter": spec.kind.value, "rolloff": spec.rolloff,
                "cp_len": args.cp_len, "sample_rate": args.sample_rate, "oversample": args.oversample}
    write_csv(spectrum.to_frame(), args.output, metadata)
    print(f"PSD with {spectrum.frequencies.size} points written to {args.output}")
    return EXIT_OK


def cmd_oob(args: argparse.Namespace, report: ConsoleReport) -> int:
    """Compare the out-of-band leakage of the reference waveforms."""
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    leakage = {}
    for kind in kinds:
        setup = oob_reference_setup(kind, n_gc=args.n_gc)
        leakage[setup.name] = setup.leakage(args.oversample)
        logger.info(f"OOB leakage of {setup.name} with N_gc={args.n_gc}: {leakage[setup.name]:.2f} dB")

    report.show(report.oob_panel(leakage, args.n_gc))
    if args.output:
        frame = pd.DataFrame({"waveform": list(leakage), "oob_db": [round(v, 1) for v in leakage.values()]})
        write_csv(frame, args.output, {"n_gc": args.n_gc, "oversample": args.oversample})
    return EXIT_OK


def cmd_papr(args: argparse.Namespace, report: ConsoleReport) -> int:
    """Estimate the PAPR CCDF from random blocks."""
    if args.blocks < 1:
        raise ConfigError(f"blocks must be at least 1, got {args.blocks}")
    params, spec, G = _filter_from_args(args)
    constellation = get_constellation(args.constellation)
    blocks = np.empty((args.blocks, params.D + args.cp_len), dtype=complex)
    for b in range(args.blocks):
        rng = block_rng(args.seed, b)
        frame = GfdmFrame(params, constellation.map_indices(constellation.random_indices(rng, params.D)))
        blocks[b] = add_cp(tx_form1(frame, G), args.cp_len)

    thresholds = np.asarray(parse_snr_grid(args.thresholds))
    ccdf = papr_ccdf(blocks, thresholds)
    report.show(report.papr_panel(thresholds, ccdf))
    if args.output:
        frame = pd.DataFrame({"papr_db": thresholds, "ccdf": ccdf})
        write_csv(frame, args.output, {"K": params.K, "M": params.M, "filter": spec.kind.value,
                                       "blocks": args.blocks, "seed": args.seed})
    return EXIT_OK


def cmd_complexity(args: argparse.Namespace, report: ConsoleReport) -> int:
    """Tabulate complex multiplications."""
    try:
        M_values = [int(v) for v in args.M_values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"Cannot parse M values '{args.M_values}'") from exc
    table = complexity_table(args.K, M_values, L_T=args.lt, L_R=args.lr)
    report.show(report.complexity_panel(table))
    if args.output:
        write_csv(table, args.output, {"K": args.K, "L_T": args.lt, "L_R": args.lr})
    return EXIT_OK


def cmd_filter_export(args: argparse.Namespace, report: ConsoleReport) -> int:
    """Write the time-domain taps of a prototype filter."""
    params, spec, G = _filter_from_args(args)
    taps = time_from_char(G).taps
    frame = pd.DataFrame({"index": np.arange(taps.size), "re": taps.real, "im": taps.imag})
    write_csv(frame, args.output, {"K": params.K, "M": params.M, "filter": spec.kind.value,
                                   "rolloff": spec.rolloff, "phases": args.phases})
    print(f"{spec.kind.value} filter written to {args.output}")
    return EXIT_OK


def cmd_channel_export(args: argparse.Namespace, report: ConsoleReport) -> int:
    """Write one channel realization."""
    params = GfdmParams(args.K, args.M)
    kind = ChannelKind(args.kind)
    pdp = None
    if kind in (ChannelKind.RAYLEIGH, ChannelKind.DEEP_FADE_EXCLUDED):
        pdp = get_profile(args.pdp, params.D)
    generator = ChannelGenerator(kind, params.D, pdp=pdp, threshold_db=args.threshold_db)
    channel = generator.realization(block_rng(args.seed))
    write_csv(channel.to_frame(), args.output, {"kind": kind.value, "D": params.D, "seed": args.seed})
    print(f"Channel with {channel.taps.size} taps written to {args.output}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "psd": cmd_psd,
    "oob": cmd_oob,
    "papr": cmd_papr,
    "complexity": cmd_complexity,
    "filter-export": cmd_filter_export,
    "channel-export": cmd_channel_export,
}


def main(argv=None, report: Optional[ConsoleReport] = None) -> int:
    """
    Main entry point.

    Returns:
        0 on success, 2 on a configuration error, 3 on a numerical failure
    """
    args = parse_args(argv)
    log_filename = setup_logging(args.verbose)
    report = report or ConsoleReport()

    try:
        return COMMANDS[args.command](args, report)
    except (ConfigError, InvalidInputError) as exc:
        logger.error(f"Configuration error: {exc}")
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularMatrixError, RejectionLimitError, LowComplexityUnavailableError,
            np.linalg.LinAlgError) as exc:
        logger.error(f"Numerical failure: {exc}")
        print(f"Numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        logger.info(f"Session finished, log file: {log_filename}")


if __name__ == "__main__":
    sys.exit(main())
