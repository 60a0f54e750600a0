"""
Peak-to-average power ratio of transmit blocks.
"""

from typing import Iterable, Union

import numpy as np

from gfdm_toolkit.core.errors import InvalidInputError


def _as_blocks(x_blocks: Union[np.ndarray, Iterable[np.ndarray]]) -> np.ndarray:
    blocks = np.atleast_2d(np.asarray(x_blocks, dtype=complex))
    if blocks.ndim != 2 or blocks.shape[0] < 1 or blocks.shape[1] < 1:
        raise InvalidInputError("Expected one or more non-empty blocks")
    return blocks


def papr(x_blocks: Union[np.ndarray, Iterable[np.ndarray]]) -> np.ndarray:
    """
    max |x[n]|^2 / mean |x[n]|^2 of every block.

    Args:
        x_blocks: One block, or a stack of equal-length blocks (one per row)

    Returns:
        One PAPR value per block (linear scale)
    """
    power = np.abs(_as_blocks(x_blocks)) ** 2
    mean = power.mean(axis=1)
    if np.any(mean <= 0):
        raise InvalidInputError("PAPR is undefined for an all-zero block")
    return power.max(axis=1) / mean


def papr_db(x_blocks: Union[np.ndarray, Iterable[np.ndarray]]) -> np.ndarray:
    """PAPR of every block in dB."""
    return 10.0 * np.log10(papr(x_blocks))


def papr_ccdf(x_blocks: Union[np.ndarray, Iterable[np.ndarray]], thresholds_db: np.ndarray) -> np.ndarray:
    """
    Empirical Pr{PAPR > threshold} for each threshold.

    Args:
        x_blocks: Stack of blocks
        thresholds_db: PAPR thresholds (dB)

    Returns:
        Exceedance fraction per threshold
    """
    values = papr_db(x_blocks)
    thresholds = np.asarray(thresholds_db, dtype=float)
    return (values[None, :] > thresholds.reshape(-1, 1)).mean(axis=1).reshape(thresholds.shape)
