"""
Dirichlet and modified Dirichlet pulses.

Both have a flat magnitude response of width M bins around DC; the modified
variant adds a linear phase across the support.
"""

from typing import Any, Optional, Tuple

import numpy as np

from gfdm_toolkit.core.characteristic import char_from_freq
from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams
from .base_filter import BaseFilter, FilterSpec


def dirichlet_support(params: GfdmParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nonzero frequency bins of the Dirichlet pulse.

    Returns:
        (low, high): bins 0..floor((M-1)/2) and D-ceil((M-1)/2)..D-1
    """
    M, D = params.M, params.D
    low = np.arange((M - 1) // 2 + 1)
    high = np.arange(D - (M - 1 + 1) // 2, D)
    return low, high


def dirichlet_freq(params: GfdmParams, modified: bool = False) -> np.ndarray:
    """
    Frequency-domain Dirichlet pulse g_f with sqrt(K) on its support.

    Args:
        params: Block dimensions
        modified: Apply the linear phase of the modified pulse

    Returns:
        Length-D complex vector
    """
    D = params.D
    low, high = dirichlet_support(params)
    g_f = np.zeros(D, dtype=complex)
    g_f[low] = np.sqrt(params.K)
    g_f[high] = np.sqrt(params.K)
    if modified:
        g_f[low] *= np.exp(1j * np.pi * low / D)
        g_f[high] *= np.exp(1j * np.pi * (high - D) / D)
    return g_f


class DirichletFilter(BaseFilter):
    """
    Dirichlet pulse (rectangular frequency response).
    """

    def __init__(self, spec: FilterSpec, modified: bool = False):
        super().__init__(name=spec.kind.value, spec=spec)
        self.modified = modified

    def build(self, params: GfdmParams, channel: Optional[Any] = None) -> CharacteristicMatrix:
        G = char_from_freq(dirichlet_freq(params, self.modified), params)
        return self._to_target_energy(G)
