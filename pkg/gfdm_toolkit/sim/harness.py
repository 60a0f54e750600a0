"""
Monte-Carlo harness: MSE and SER versus SNR for one scenario.

Every block b draws its data, channel and unit-variance noise from
block_rng(seed, b) once and reuses them at every SNR point, with the noise
scaled by sqrt(N0). Blocks are processed in fixed-size chunks whose partial
sums are merged in chunk order, so results do not depend on the worker
count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from gfdm_toolkit.channel.generator import ChannelGenerator, ChannelKind
from gfdm_toolkit.channel.models import (
    ChannelRealization,
    block_rng,
    complex_gaussian,
    convolve_with_prefix,
    get_profile,
    static_four_tap_channel,
)
from gfdm_toolkit.core.characteristic import as_shifted, energy, is_invertible, receiver_energy
from gfdm_toolkit.core.errors import ConfigError
from gfdm_toolkit.core.types import CharacteristicMatrix
from gfdm_toolkit.filters import FilterKind, create_filter
from gfdm_toolkit.modem.frame import GfdmFrame, RxReport, add_cp, remove_cp
from gfdm_toolkit.modem.receiver import (
    mmse_lowcomp_exists,
    rx_ammse,
    rx_mmse_dense,
    rx_mmse_lowcomp,
    rx_zf_form2,
)
from gfdm_toolkit.modem.transmitter import tx_form1
from gfdm_toolkit.analysis.mse import MseScenario, theoretical_mse
from gfdm_toolkit.utils.metrics import ErrorAccumulator
from .config import UNIFORM_SCENARIOS, Scenario, ScenarioConfig
from .qam import Constellation, get_constellation

# Set up logging
logger = logging.getLogger(__name__)


@dataclass
class ResultTable:
    """
    Per-SNR results of one run.

    rows hold snr_db, empirical_mse, empirical_ser, theoretical_mse and
    relative_spread; per_symbol_mse holds the K x M empirical sigma^2 of
    every SNR point in the same order.
    """
    config: ScenarioConfig
    rows: List[Dict[str, float]] = field(default_factory=list)
    per_symbol_mse: List[np.ndarray] = field(default_factory=list)
    pseudo_inverse: bool = False
    mmse_paths: Dict[str, int] = field(default_factory=dict)

    def add_point(self, snr_db: float, stats: ErrorAccumulator, theoretical: float) -> None:
        """
        Record one SNR point.

        Args:
            snr_db: SNR in dB
            stats: Merged statistics of every block
            theoretical: Predicted MSE (NaN when undefined)
        """
        metrics = stats.calculate_metrics()
        self.rows.append({
            "snr_db": float(snr_db),
            "empirical_mse": metrics["mse"],
            "empirical_ser": metrics["ser"],
            "theoretical_mse": float(theoretical),
            "relative_spread": metrics["relative_spread"],
        })
        self.per_symbol_mse.append(stats.per_symbol_mse)

    def to_frame(self) -> pd.DataFrame:
        """
        Results as a DataFrame, one row per SNR point.
        """
        columns = ["snr_db", "empirical_mse", "empirical_ser", "theoretical_mse", "relative_spread"]
        return pd.DataFrame(self.rows, columns=columns)

    def per_symbol_frame(self) -> pd.DataFrame:
        """Long-format per-(k, m) MSE table."""
        records = []
        for row, matrix in zip(self.rows, self.per_symbol_mse):
            for (k, m), value in np.ndenumerate(matrix):
                records.append({"snr_db": row["snr_db"], "k": k, "m": m, "mse": value})
        return pd.DataFrame(records, columns=["snr_db", "k", "m", "mse"])

    def metadata(self) -> Dict[str, Any]:
        """Header entries for the CSV export."""
        meta = {key: value for key, value in self.config.to_dict().items() if value is not None}
        meta["pseudo_inverse"] = self.pseudo_inverse
        if self.mmse_paths:
            meta["mmse_paths"] = ", ".join(f"{k}={v}" for k, v in sorted(self.mmse_paths.items()))
        return meta


def uniformity_report(result: ResultTable) -> float:
    """
    Largest relative spread max|sigma^2_km - mean| / mean over the SNR points.

    Args:
        result: Completed run

    Returns:
        Maximum relative spread (NaN for an empty table)
    """
    spreads = [row["relative_spread"] for row in result.rows]
    if not spreads:
        return float("nan")
    worst = float(np.max(spreads))
    if result.config.scenario not in UNIFORM_SCENARIOS:
        logger.info(f"{result.config.scenario.value}: per-symbol MSE is not expected to be uniform")
    logger.info(f"Uniformity of {result.config.scenario.value}: max relative spread {worst:.2%}")
    return worst


@dataclass(frozen=True, eq=False)
class _Run:
    """Everything fixed for the duration of a run."""
    cfg: ScenarioConfig
    G: CharacteristicMatrix
    constellation: Constellation
    generator: ChannelGenerator
    gammas: np.ndarray
    pseudo_inverse: bool


def build_filter(cfg: ScenarioConfig) -> CharacteristicMatrix:
    """
    Characteristic matrix of the configured filter.

    The static-optimal filter is designed for the fixed four-tap channel.
    """
    spec = cfg.filter_spec()
    channel = None
    if spec.kind == FilterKind.STATIC_OPTIMAL:
        channel = static_four_tap_channel(cfg.params.D)
    return create_filter(spec, cfg.params, channel)


def _build_run(cfg: ScenarioConfig) -> _Run:
    kind = cfg.scenario.channel_kind
    pdp = None
    if kind in (ChannelKind.RAYLEIGH, ChannelKind.DEEP_FADE_EXCLUDED):
        pdp = get_profile(cfg.pdp, cfg.params.D)
    generator = ChannelGenerator(kind, cfg.params.D, pdp=pdp, threshold_db=cfg.threshold_db)
    if generator.max_order > cfg.cp_len:
        raise ConfigError(f"Channel order {generator.max_order} exceeds the CP length {cfg.cp_len}")

    G = build_filter(cfg)
    pseudo_inverse = cfg.scenario.receiver == "zf" and not is_invertible(G)
    if pseudo_inverse:
        logger.warning(f"{cfg.filter} filter gives a singular GFDM matrix, ZF runs use the pseudo-inverse")

    gammas = 10.0 ** (np.asarray(cfg.snr_db) / 10.0)
    return _Run(cfg, G, get_constellation(cfg.constellation), generator, gammas, pseudo_inverse)


def _receive(run: _Run, y: np.ndarray, channel: ChannelRealization, gamma: float,
             paths: Dict[str, int]) -> RxReport:
    G = run.G
    scenario = run.cfg.scenario
    n0 = run.cfg.e_s / gamma
    if scenario.receiver == "zf":
        return rx_zf_form2(y, G, channel, pseudo_inverse=run.pseudo_inverse)
    if scenario.receiver == "ammse":
        return rx_ammse(y, G, channel, gamma)
    if is_invertible(G) and mmse_lowcomp_exists(as_shifted(G), channel).exists:
        paths["lowcomp"] = paths.get("lowcomp", 0) + 1
        return rx_mmse_lowcomp(y, G, channel, gamma, e_s=run.cfg.e_s)
    paths["dense"] = paths.get("dense", 0) + 1
    logger.debug(f"No low-complexity MMSE at N0={n0:.3e}, using the dense receiver")
    return rx_mmse_dense(y, G, channel, gamma, e_s=run.cfg.e_s)


def _block_reference(run: _Run, channel: ChannelRealization, gamma: float) -> Optional[float]:
    """Per-block quantity whose ensemble mean is the predicted MSE of fading scenarios."""
    scenario = run.cfg.scenario
    power = np.abs(channel.freq_response) ** 2
    if scenario == Scenario.ZF_DFERF:
        # mean of 1/|C_l|^2, turned into beta * xi_H * N0 after the run
        return float(np.mean(1.0 / power))
    if scenario in (Scenario.MMSE_RF, Scenario.AMMSE_RF):
        xi = energy(run.G)
        return float(np.mean(run.cfg.e_s / (gamma * xi * power + 1.0)))
    return None


def _run_chunk(run: _Run, blocks: range) -> Tuple[List[ErrorAccumulator], Dict[str, int]]:
    cfg = run.cfg
    params = cfg.params
    L = cfg.cp_len
    stats = [ErrorAccumulator(params.K, params.M) for _ in run.gammas]
    paths: Dict[str, int] = {}

    for b in blocks:
        rng = block_rng(cfg.seed, b)
        labels = run.constellation.random_indices(rng, params.D)
        frame = GfdmFrame(params, np.sqrt(cfg.e_s) * run.constellation.map_indices(labels), cp_len=L)
        channel = run.generator.realization(rng)
        noise_shape = complex_gaussian(rng, params.D + L)
        x_cp = add_cp(tx_form1(frame, run.G), L)

        for i, gamma in enumerate(run.gammas):
            n0 = cfg.e_s / gamma
            y = remove_cp(convolve_with_prefix(x_cp, channel, np.sqrt(n0) * noise_shape), L)
            report = _receive(run, y, channel, gamma, paths)

            errors = np.abs(report.estimates - frame.data) ** 2
            decided = run.constellation.slice_indices(report.unbiased() / np.sqrt(cfg.e_s))
            symbol_errors = int(np.count_nonzero(decided != labels))
            stats[i].add_block(errors.reshape((params.K, params.M), order="F"), symbol_errors,
                               _block_reference(run, channel, gamma))
    return stats, paths


def _theoretical(run: _Run, gamma: float, stats: ErrorAccumulator) -> float:
    cfg = run.cfg
    G = run.G
    n0 = cfg.e_s / gamma
    scenario = cfg.scenario
    if scenario.receiver == "zf" and not is_invertible(G):
        return float("nan")

    if scenario == Scenario.ZF_AWGN:
        return theoretical_mse(MseScenario.ZF_AWGN, G, n0=n0, e_s=cfg.e_s)
    if scenario == Scenario.MMSE_AWGN:
        return theoretical_mse(MseScenario.MMSE_AWGN, G, gamma=gamma, e_s=cfg.e_s)
    if scenario == Scenario.ZF_MP:
        return theoretical_mse(MseScenario.ZF_STATIC, G, channel=run.generator.realization(None), n0=n0)
    if scenario == Scenario.ZF_DFERF:
        return stats.reference_mean * receiver_energy(G) * n0
    return stats.reference_mean


def run_scenario(cfg: ScenarioConfig, progress: Optional[Callable[[int, int], None]] = None) -> ResultTable:
    """
    Run one Monte-Carlo scenario.

    Args:
        cfg: Validated scenario config
        progress: Optional callback(chunks_done, chunks_total)

    Returns:
        Result table with one row per SNR point
    """
    run = _build_run(cfg)
    starts = range(0, cfg.blocks, cfg.chunk_size)
    chunks = [range(s, min(s + cfg.chunk_size, cfg.blocks)) for s in starts]
    logger.info(f"Running {cfg.scenario.value}: {cfg.blocks} blocks in {len(chunks)} chunks, "
                f"{len(run.gammas)} SNR points, {cfg.workers} workers")

    if cfg.workers == 1:
        partials = []
        for done, chunk in enumerate(chunks, start=1):
            partials.append(_run_chunk(run, chunk))
            if progress:
                progress(done, len(chunks))
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as executor:
            futures = [executor.submit(_run_chunk, run, chunk) for chunk in chunks]
            partials = []
            # collected in submission order so the reduction order is fixed
            for done, future in enumerate(futures, start=1):
                partials.append(future.result())
                if progress:
                    progress(done, len(chunks))

    totals = [ErrorAccumulator(cfg.K, cfg.M) for _ in run.gammas]
    paths: Dict[str, int] = {}
    for chunk_stats, chunk_paths in partials:
        for total, part in zip(totals, chunk_stats):
            total.merge(part)
        for name, count in chunk_paths.items():
            paths[name] = paths.get(name, 0) + count

    result = ResultTable(cfg, pseudo_inverse=run.pseudo_inverse, mmse_paths=paths)
    for snr_db, gamma, stats in zip(cfg.snr_db, run.gammas, totals):
        result.add_point(snr_db, stats, _theoretical(run, gamma, stats))
        logger.info(f"SNR {snr_db:.1f} dB: MSE {result.rows[-1]['empirical_mse']:.4e}, "
                    f"SER {result.rows[-1]['empirical_ser']:.4e}")
    return result
