"""
Complex-multiplication counts of GFDM and OFDM transceivers.

A p-point DFT counts (p/2) log2 p multiplications and a p x p inversion
p^3 / 3. Counts are per block of D = K*M symbols.
"""

import logging
import time
from typing import Callable, Dict, Iterable, Tuple

import numpy as np
import pandas as pd

from gfdm_toolkit.core.errors import InvalidInputError

# Set up logging
logger = logging.getLogger(__name__)

STAGES = ("tx", "zf", "mmse")


def _lg(x: float) -> float:
    return float(np.log2(x))


def _equalize(K: int, M: int) -> float:
    """One-tap equalization W_D^H D_C^-1 W_D."""
    D = K * M
    return D * (_lg(D) + 1)


def _block_circular_pow2_tx(K: int, M: int, L_T: int, L_R: int) -> float:
    if M & (M - 1):
        raise InvalidInputError(f"The power-of-two block-circular count needs M a power of two, got {M}")
    return K * M * (0.5 * _lg(K * M ** 2) + 1)


_TX: Dict[str, Callable[[int, int, int, int], float]] = {
    "ofdm": lambda K, M, LT, LR: 0.5 * K * M * _lg(K * M),
    "direct": lambda K, M, LT, LR: float(K * M) ** 2,
    "freq_domain": lambda K, M, LT, LR: K * M * (0.5 * _lg(K * M ** 2) + LT),
    "freq_convolution": lambda K, M, LT, LR: K * M * (0.5 * _lg(K) + M),
    "block_circular": lambda K, M, LT, LR: K * M * (0.5 * _lg(K) + M),
    "block_circular_pow2": _block_circular_pow2_tx,
    "form1": lambda K, M, LT, LR: K * M * (0.5 * _lg(K * M ** 2) + 1),
    "form2": lambda K, M, LT, LR: K * M * (0.5 * _lg(K ** 3 * M ** 2) + 1),
}

_ZF: Dict[str, Callable[[int, int, int, int], float]] = {
    "ofdm": lambda K, M, LT, LR: 0.5 * K * M * _lg(K * M) + K * M,
    "direct": lambda K, M, LT, LR: float(K * M) ** 2 + _equalize(K, M),
    "freq_domain": lambda K, M, LT, LR: K * M * (0.5 * _lg(K * M ** 2) + LR) + K * M,
    "freq_convolution": lambda K, M, LT, LR: _TX["freq_convolution"](K, M, LT, LR) + _equalize(K, M),
    "block_circular": lambda K, M, LT, LR: _TX["block_circular"](K, M, LT, LR) + _equalize(K, M),
    "block_circular_pow2": lambda K, M, LT, LR: _block_circular_pow2_tx(K, M, LT, LR) + _equalize(K, M),
    "form1": lambda K, M, LT, LR: _TX["form1"](K, M, LT, LR) + _equalize(K, M),
    # one DFT pair cancels, leaving a single D-point equalizer
    "form2": lambda K, M, LT, LR: _TX["form2"](K, M, LT, LR) + K * M,
}

_MMSE: Dict[str, Callable[[int, int, int, int], float]] = {
    "ofdm": lambda K, M, LT, LR: K * M * (0.5 * _lg(K * M) + 1),
    "direct": lambda K, M, LT, LR: 7.0 / 3.0 * float(K * M) ** 3 + 2.0 * float(K * M) ** 2,
    "zak": lambda K, M, LT, LR: K * M * (_lg(M) + 6 * K + 12 * M + 4),
    "lu": lambda K, M, LT, LR: K * M * (0.5 * _lg(K * M) + 20 * M ** 2 + 22 * M),
    "form1": lambda K, M, LT, LR: K * M * (0.5 * _lg(K ** 3 * M ** 4) + 4),
    "form2": lambda K, M, LT, LR: K * M * (0.5 * _lg(K ** 3 * M ** 2) + 4),
}

_FORMULAS = {"tx": _TX, "zf": _ZF, "mmse": _MMSE}


def _parse_impl(impl: str) -> Tuple[str, str]:
    name = str(impl).strip().lower().replace("-", "_")
    for stage in STAGES:
        suffix = "_" + stage
        if name.endswith(suffix):
            base = name[: -len(suffix)]
            if base in _FORMULAS[stage]:
                return base, stage
    raise InvalidInputError(f"Unknown implementation: {impl}")


def get_available_implementations() -> list:
    """
    Get list of implementation identifiers.

    Returns:
        Identifiers of the form '<implementation>_<stage>'
    """
    return [f"{name}_{stage}" for stage in STAGES for name in _FORMULAS[stage]]


def complexity_cm(impl: str, K: int, M: int, L_T: int = 2, L_R: int = 16) -> int:
    """
    Complex multiplications of one implementation, rounded to an integer.

    Args:
        impl: Identifier such as 'form1_tx', 'form2_zf' or 'zak_mmse'
        K: Subcarriers
        M: Subsymbols
        L_T: Nonzero-bin factor of the frequency-domain transmitter
        L_R: Nonzero-bin factor of the frequency-domain receiver

    Returns:
        Number of complex multiplications
    """
    if min(K, M, L_T, L_R) < 1:
        raise InvalidInputError(f"K, M, L_T and L_R must be positive, got {K}, {M}, {L_T}, {L_R}")
    base, stage = _parse_impl(impl)
    return int(round(_FORMULAS[stage][base](K, M, L_T, L_R)))


def complexity_table(K: int, M_values: Iterable[int], L_T: int = 2, L_R: int = 16) -> pd.DataFrame:
    """
    Evaluate every applicable formula over a range of M.

    Rows that do not apply (e.g. the power-of-two variant for odd M) are left out.

    Returns:
        Long-format table with columns implementation, stage, K, M, cms
    """
    rows = []
    for M in M_values:
        for stage in STAGES:
            for base in _FORMULAS[stage]:
                try:
                    cms = complexity_cm(f"{base}_{stage}", K, int(M), L_T, L_R)
                except InvalidInputError:
                    continue
                rows.append({"implementation": base, "stage": stage, "K": K, "M": int(M), "cms": cms})
    return pd.DataFrame(rows, columns=["implementation", "stage", "K", "M", "cms"])


def measure_runtime(fn: Callable[[], object], repeats: int = 5) -> float:
    """
    Median wall-clock time of fn() in seconds, after one warm-up call.
    """
    if repeats < 1:
        raise InvalidInputError(f"repeats must be at least 1, got {repeats}")
    fn()
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        timings.append(time.perf_counter() - start)
    result = float(np.median(timings))
    logger.debug(f"Median runtime over {repeats} calls: {result:.6f}s")
    return result
