"""
Constant-magnitude characteristic-matrix (CMCM) filters and the
static-channel MSE-optimal filter.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np

from gfdm_toolkit.core.errors import ChannelNullError, InvalidInputError
from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams
from .base_filter import BaseFilter, FilterSpec

# Set up logging
logger = logging.getLogger(__name__)

# Arbitrarily chosen phase matrices used in the reproduction runs
_PHASE_SETS: Dict[str, list] = {
    "cmcm1_k8m4": [
        [0.75, 2.50, -1.09, -1.98],
        [-2.95, 0.16, 1.29, 1.59],
        [-2.10, 0.59, 3.12, -0.31],
        [0.53, 3.04, 0.28, -1.11],
        [1.58, 1.37, -3.02, -1.80],
        [-3.11, 1.05, 0.47, -0.73],
        [0.78, -1.88, 0.85, -2.24],
        [1.57, -2.83, -0.56, 2.81],
    ],
    "cmcm2_k8m4": [
        [-0.31, -3.11, 0.82, -1.04],
        [-1.70, 2.53, -0.29, 0.71],
        [-2.49, 2.19, -2.69, -1.55],
        [-1.44, -0.77, -2.06, 0.19],
        [0.23, -1.00, 0.31, 0.48],
        [0.95, -1.50, 2.26, 0.09],
        [0.21, -1.03, 0.76, 0.57],
        [2.17, 1.79, -2.15, 1.88],
    ],
    "cmcm1_k8m5": [
        [0.62, -0.40, -1.36, -2.16, -1.94],
        [-1.30, -2.65, 2.78, -2.95, 2.17],
        [1.01, 0.07, 2.86, 2.92, -0.60],
        [1.75, 2.09, 1.59, 0.48, -1.89],
        [1.55, -1.83, -0.11, -3.01, -0.57],
        [0.27, -1.21, -2.81, 0.37, -2.27],
        [-1.48, 0.46, 2.58, 2.72, 0.44],
        [1.23, -0.31, 1.19, 0.06, -0.35],
    ],
    "cmcm2_k8m5": [
        [-2.89, -1.87, -2.40, -3.02, -1.22],
        [0.73, 2.22, -2.79, 3.08, 3.04],
        [0.90, -2.14, -1.51, -2.13, -1.69],
        [-2.42, -2.99, -1.16, -0.08, -0.63],
        [-1.94, -2.57, 2.22, 1.17, 2.89],
        [1.33, 1.10, -2.51, -1.44, 1.36],
        [-3.06, -3.05, -2.54, -3.09, 0.36],
        [0.53, 0.22, 2.88, -2.08, 0.54],
    ],
}


def phase_set(name: str) -> np.ndarray:
    """
    Look up one of the stored phase matrices.

    Args:
        name: One of cmcm1_k8m4, cmcm2_k8m4, cmcm1_k8m5, cmcm2_k8m5

    Returns:
        K x M array of phases in radians
    """
    key = name.strip().lower()
    if key not in _PHASE_SETS:
        raise InvalidInputError(f"Unknown phase set '{name}', available: {sorted(_PHASE_SETS)}")
    return np.array(_PHASE_SETS[key], dtype=float)


def get_available_phase_sets() -> list:
    """Return the names of the stored phase matrices."""
    return sorted(_PHASE_SETS)


def random_phases(params: GfdmParams, rng: np.random.Generator) -> np.ndarray:
    """Uniform phases in (-pi, pi] for a random CMCM filter."""
    return np.pi - 2.0 * np.pi * rng.random((params.K, params.M))


def channel_alpha(freq_response: np.ndarray, params: GfdmParams) -> np.ndarray:
    """
    alpha_l = sum_r 1 / |C_{l + rM}|^2 for l = 0..M-1.

    Args:
        freq_response: Length-D channel frequency response
        params: Block dimensions

    Returns:
        Length-M vector
    """
    C = np.asarray(freq_response, dtype=complex).ravel()
    if C.size != params.D:
        raise InvalidInputError(f"Channel response must have {params.D} bins, got {C.size}")
    nulls = np.flatnonzero(np.abs(C) == 0.0)
    if nulls.size:
        raise ChannelNullError(f"Channel has null bins {nulls.tolist()}", nulls)
    return np.sum(1.0 / np.abs(C.reshape(params.K, params.M)) ** 2, axis=0)


class CmcmFilter(BaseFilter):
    """
    Filter whose characteristic matrix has constant-magnitude entries.
    """

    def __init__(self, spec: FilterSpec):
        super().__init__(name=spec.kind.value, spec=spec)

    def build(self, params: GfdmParams, channel: Optional[Any] = None) -> CharacteristicMatrix:
        phases = self._check_phases(params)
        entries = np.sqrt(self.spec.target_energy) * np.exp(1j * phases)
        return CharacteristicMatrix(params, entries)


class StaticOptimalFilter(BaseFilter):
    """
    ZF-MSE-optimal filter for a known static channel.

    Magnitudes follow |G_kl|^2 proportional to sqrt(alpha_l), so the
    ratio is identical for every (k, l).
    """

    def __init__(self, spec: FilterSpec):
        super().__init__(name=spec.kind.value, spec=spec)

    def build(self, params: GfdmParams, channel: Optional[Any] = None) -> CharacteristicMatrix:
        if channel is None:
            raise InvalidInputError("static_optimal filter requires a channel realization")
        freq_response = getattr(channel, "freq_response", channel)
        phases = self._check_phases(params)

        root_alpha = np.sqrt(channel_alpha(freq_response, params))
        # energy sum_{k,l} c*sqrt(alpha_l) / D must equal the target
        scale = self.spec.target_energy * params.D / (params.K * np.sum(root_alpha))
        magnitudes = np.sqrt(scale * root_alpha)[None, :]
        logger.debug(f"Static-optimal magnitudes per subsymbol: {np.round(magnitudes.ravel(), 4).tolist()}")
        return CharacteristicMatrix(params, magnitudes * np.exp(1j * phases))
