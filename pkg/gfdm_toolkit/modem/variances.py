"""
Per-symbol error variances of the linear receivers.

All variances are constant across subsymbols m for a given subcarrier k.
"""

import logging
from typing import Any

import numpy as np
from scipy import fft as sp_fft

from gfdm_toolkit.core.characteristic import as_shifted, energy, inverse_char, phase_shift, require_invertible
from gfdm_toolkit.core.types import DEFAULT_TOLERANCE, CharacteristicMatrix, Tolerance
from .structure import channel_response, mmse_blocks, permuted_channel, structured_gains

# Set up logging
logger = logging.getLogger(__name__)


def _weighted_correlation(G: CharacteristicMatrix, weights: np.ndarray, tol: Tolerance) -> np.ndarray:
    """
    (1/D) sum_l sum_k' |h_f[k'M + l]|^2 weights[(k + k') mod K, l] for each k.

    h_f is the frequency-domain prototype of A^{-H}. The inner sum is a
    circular cross-correlation along k, done with K-point FFTs.
    """
    params = G.params
    H_bar = phase_shift(inverse_char(G, tol))
    receive_power = np.abs(sp_fft.fft(H_bar.entries, axis=0, norm="ortho")) ** 2
    correlation = np.fft.ifft(np.conj(np.fft.fft(receive_power, axis=0)) * np.fft.fft(weights, axis=0), axis=0)
    return np.sum(correlation.real, axis=1) / params.D


def error_variances_zf(G_bar: CharacteristicMatrix, channel: Any, n0: float,
                       tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Diagonal of N0 (W_D A^-H)^H D_C^-1 D_C^-H (W_D A^-H).

    Args:
        G_bar: Characteristic matrix (either form)
        channel: ChannelRealization or frequency response
        n0: Noise variance per sample
        tol: Zero threshold

    Returns:
        K x M matrix of variances
    """
    params = G_bar.params
    C = channel_response(channel, params, tol)
    weights = 1.0 / np.abs(permuted_channel(C, params)) ** 2
    sigma = n0 * _weighted_correlation(G_bar, weights, tol)
    return np.repeat(sigma[:, None], params.M, axis=1)


def error_variances_mmse(G_bar: CharacteristicMatrix, channel: Any, gamma: float, e_s: float = 1.0,
                         tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Diagonal of E_S (I - B C A) for the exact MMSE receiver.

    Constant-magnitude filters use the per-bin weights
    |C|^2 / (|C|^2 + 1/(gamma xi_G)) in place of 1/|C|^2; any other
    nonsingular filter goes through the per-subsymbol block systems.

    Args:
        G_bar: Characteristic matrix (either form)
        channel: ChannelRealization or frequency response
        gamma: E_S / N0
        e_s: Symbol energy
        tol: Zero threshold

    Returns:
        K x M matrix of variances
    """
    G_bar = as_shifted(G_bar)
    params = G_bar.params
    C = channel_response(channel, params, tol)
    require_invertible(G_bar, tol)

    if tol.is_constant(G_bar.magnitudes):
        xi = energy(G_bar)
        power = np.abs(permuted_channel(C, params)) ** 2
        weights = power / (power + 1.0 / (gamma * xi))
        gain = xi * _weighted_correlation(G_bar, weights, tol)
        gains = np.repeat(gain[:, None], params.M, axis=1)
    else:
        logger.debug("Non-constant filter magnitudes, computing MMSE variances from block systems")
        gains = structured_gains(G_bar, C, mmse_blocks(G_bar, C, gamma)).real
    return np.clip(e_s * (1.0 - gains), 0.0, None)
