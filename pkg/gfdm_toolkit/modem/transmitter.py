"""
GFDM transmitters.

All paths compute x = A d. tx_direct multiplies by the dense matrix and is
the reference; the others run in O(D log D).
"""

import logging
from typing import Optional

import numpy as np
from scipy import fft as sp_fft

from gfdm_toolkit.core.characteristic import as_shifted, as_unshifted, vect
from gfdm_toolkit.core.dense import build_dense
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import CharacteristicMatrix
from .frame import GfdmFrame

# Set up logging
logger = logging.getLogger(__name__)


def _check_params(frame: GfdmFrame, G: CharacteristicMatrix) -> None:
    if frame.params != G.params:
        raise InvalidInputError(f"Frame is {frame.params.K}x{frame.params.M} but filter is {G.params.K}x{G.params.M}")


def _spread(data_matrix: np.ndarray) -> np.ndarray:
    """(W_M kron W_K^H) vect(X), returned as a K x M matrix."""
    return sp_fft.fft(sp_fft.ifft(data_matrix, axis=0, norm="ortho"), axis=1, norm="ortho")


def tx_direct(frame: GfdmFrame, G: CharacteristicMatrix) -> np.ndarray:
    """
    Modulate with the dense GFDM matrix.

    Args:
        frame: Data block
        G: Characteristic matrix (either form)

    Returns:
        Length-D transmit block
    """
    _check_params(frame, G)
    A = build_dense(as_unshifted(G))
    return A.entries @ frame.data


def tx_form1(frame: GfdmFrame, G: CharacteristicMatrix) -> np.ndarray:
    """
    x = (W_M^H kron I_K) diag(vect G) (W_M kron W_K^H) d.

    Args:
        frame: Data block
        G: Characteristic matrix (either form)

    Returns:
        Length-D transmit block
    """
    _check_params(frame, G)
    G = as_unshifted(G)
    weighted = G.entries * _spread(frame.data_matrix)
    return vect(sp_fft.ifft(weighted, axis=1, norm="ortho"))


def tx_form2(frame: GfdmFrame, G_bar: CharacteristicMatrix) -> np.ndarray:
    """
    x = W_D^H Pi (I_M kron W_K) diag(vect G_bar) (W_M kron W_K^H) d.

    Args:
        frame: Data block
        G_bar: Characteristic matrix (either form; shifted internally)

    Returns:
        Length-D transmit block
    """
    _check_params(frame, G_bar)
    G_bar = as_shifted(G_bar)
    weighted = G_bar.entries * _spread(frame.data_matrix)
    # Pi vect(X) = vect(X^T), which is the row-major flattening of X
    spectrum = sp_fft.fft(weighted, axis=0, norm="ortho").reshape(-1)
    return sp_fft.ifft(spectrum, norm="ortho")


def tx_freq_domain(frame: GfdmFrame, g_f: np.ndarray, sparsity: Optional[int] = None) -> np.ndarray:
    """
    Frequency-domain transmitter.

    Each active subcarrier's subsymbols are M-point transformed, repeated K
    times, weighted by g_f and moved up by k*M bins; one D-point inverse
    DFT produces the block.

    Args:
        frame: Data block
        g_f: Length-D frequency-domain prototype filter
        sparsity: If given, g_f may have at most sparsity * M nonzero bins

    Returns:
        Length-D transmit block
    """
    params = frame.params
    K, M, D = params.K, params.M, params.D
    g_f = np.asarray(g_f, dtype=complex).ravel()
    if g_f.size != D:
        raise InvalidInputError(f"Frequency-domain filter must have {D} bins, got {g_f.size}")
    if sparsity is not None:
        nonzero = int(np.count_nonzero(np.abs(g_f) > 1e-12 * np.max(np.abs(g_f))))
        if nonzero > sparsity * M:
            raise InvalidInputError(f"Filter has {nonzero} nonzero bins, more than L_T*M = {sparsity * M}")

    data = frame.data_matrix
    spectrum = np.zeros(D, dtype=complex)
    for k in frame.active_subcarriers:
        repeated = np.tile(sp_fft.fft(data[k, :], norm="ortho"), K)
        spectrum += np.roll(g_f * repeated, k * M)
    return sp_fft.ifft(spectrum, norm="ortho") / np.sqrt(K)
