"""
Dense reference matrices.

These build the O(D^2) objects the fast paths are checked against. They are
only meant for small blocks.
"""

import logging

import numpy as np
from scipy import linalg

from gfdm_toolkit.core.characteristic import (
    as_shifted,
    as_unshifted,
    coerce_characteristic,
    pi_permutation,
    time_from_char,
    vect,
)
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import (
    DENSE_SIZE_LIMIT,
    CharacteristicMatrix,
    DenseGfdmMatrix,
    GfdmParams,
    PrototypeFilter,
)

# Set up logging
logger = logging.getLogger(__name__)


def _check_size(D: int, allow_large: bool) -> None:
    if D > DENSE_SIZE_LIMIT and not allow_large:
        raise InvalidInputError(
            f"Refusing to build a dense {D}x{D} matrix (limit {DENSE_SIZE_LIMIT}); pass allow_large=True to override"
        )


def dft_matrix(p: int) -> np.ndarray:
    """Unitary p-point DFT matrix W_p."""
    n = np.arange(p)
    return np.exp(-2j * np.pi * np.outer(n, n) / p) / np.sqrt(p)


def build_dense(g: PrototypeFilter, allow_large: bool = False) -> DenseGfdmMatrix:
    """
    Build the GFDM matrix column by column.

    Column k + m*K holds g circularly shifted by m*K samples and modulated
    by exp(j2*pi*k*n/K).

    Args:
        g: Prototype filter (a characteristic matrix is converted first)
        allow_large: Build even when D exceeds the dense size limit

    Returns:
        Dense GFDM matrix
    """
    if isinstance(g, CharacteristicMatrix):
        g = time_from_char(g)
    params = g.params
    K, M, D = params.K, params.M, params.D
    _check_size(D, allow_large)

    n = np.arange(D)
    # modulators[:, k] = exp(j2*pi*k*n/K)
    modulators = np.exp(2j * np.pi * np.outer(n, np.arange(K)) / K)
    A = np.empty((D, D), dtype=complex)
    for m in range(M):
        shifted = np.roll(g.taps, m * K)
        A[:, m * K:(m + 1) * K] = shifted[:, None] * modulators
    logger.debug(f"Built dense GFDM matrix for K={K}, M={M}")
    return DenseGfdmMatrix(params, A)


def pi_matrix(params: GfdmParams) -> np.ndarray:
    """Dense permutation matrix Pi with Pi vect(X) = vect(X^T)."""
    D = params.D
    P = np.zeros((D, D))
    P[np.arange(D), pi_permutation(params)] = 1.0
    return P


def form1_product(G: CharacteristicMatrix) -> np.ndarray:
    """(W_M^H kron I_K) diag(vect G) (W_M kron W_K^H), evaluated densely."""
    G = as_unshifted(coerce_characteristic(G))
    K, M = G.params.K, G.params.M
    W_K, W_M = dft_matrix(K), dft_matrix(M)
    left = np.kron(W_M.conj().T, np.eye(K))
    right = np.kron(W_M, W_K.conj().T)
    return left @ np.diag(vect(G.entries)) @ right


def form2_product(G: CharacteristicMatrix) -> np.ndarray:
    """W_D^H Pi (I_M kron W_K) diag(vect G_bar) (W_M kron W_K^H), evaluated densely."""
    G_bar = as_shifted(coerce_characteristic(G))
    params = G_bar.params
    K, M, D = params.K, params.M, params.D
    W_K, W_M, W_D = dft_matrix(K), dft_matrix(M), dft_matrix(D)
    middle = np.kron(np.eye(M), W_K) @ np.diag(vect(G_bar.entries)) @ np.kron(W_M, W_K.conj().T)
    return W_D.conj().T @ pi_matrix(params) @ middle


def circulant_channel(freq_response: np.ndarray) -> np.ndarray:
    """
    Dense circulant channel matrix for a D-point frequency response.

    The response uses the unnormalized DFT, so the first column is its
    plain inverse FFT.
    """
    taps = np.fft.ifft(np.asarray(freq_response, dtype=complex))
    return linalg.circulant(taps)
