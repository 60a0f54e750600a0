"""
Building blocks shared by the fast receivers.

After a D-point unitary DFT the received spectrum is reordered into a K x M
matrix X with X[k, m] = Y[k*M + m] (the Pi^T permutation). Every fast
receiver divides X by channel-side taps w, applies a K-point inverse DFT to
each column, divides by filter-side taps z and maps the result back to
symbols with (W_M^H kron W_K). ZF uses w = C and z = G_bar.

In that ordering the MMSE system splits into M independent K x K blocks
E_m = F_m o W_K with F_m = u_m v_m^T + gamma^-1 u~_m v~_m^T, where
u_m[k] = C[k*M + m], v_m = G_bar[:, m], u~ = 1/u^*, v~ = 1/v^*.
"""

from typing import Any

import numpy as np
from scipy import fft as sp_fft

from gfdm_toolkit.core.characteristic import vect
from gfdm_toolkit.core.dense import dft_matrix
from gfdm_toolkit.core.errors import ChannelNullError, InvalidInputError
from gfdm_toolkit.core.types import DEFAULT_TOLERANCE, CharacteristicMatrix, GfdmParams, Tolerance
from .frame import EqualizerTaps


def channel_response(channel: Any, params: GfdmParams, tol: Tolerance = DEFAULT_TOLERANCE,
                     allow_nulls: bool = False) -> np.ndarray:
    """
    Extract and check a D-point channel frequency response.

    Args:
        channel: ChannelRealization or array of D bins
        params: Block dimensions
        tol: Zero threshold
        allow_nulls: Skip the null-bin check

    Returns:
        Length-D complex array
    """
    C = np.asarray(getattr(channel, "freq_response", channel), dtype=complex).ravel()
    if C.size != params.D:
        raise InvalidInputError(f"Channel response must have {params.D} bins, got {C.size}")
    if not allow_nulls:
        mags = np.abs(C)
        nulls = np.flatnonzero(mags <= tol.zero_threshold(mags))
        if nulls.size:
            raise ChannelNullError(f"Channel has null frequency bins {nulls.tolist()}", nulls)
    return C


def permuted_channel(C: np.ndarray, params: GfdmParams) -> np.ndarray:
    """Channel bins as a K x M matrix, entry (k, m) = C[k*M + m]."""
    return np.asarray(C).reshape(params.K, params.M)


def received_spectrum(y: np.ndarray, params: GfdmParams) -> np.ndarray:
    """Unitary D-point DFT of a received block."""
    y = np.asarray(y, dtype=complex).ravel()
    if y.size != params.D:
        raise InvalidInputError(f"Received block must have {params.D} samples, got {y.size}")
    return sp_fft.fft(y, norm="ortho")


def demap(filtered: np.ndarray) -> np.ndarray:
    """(W_M^H kron W_K) vect(Z) for a K x M matrix Z."""
    return vect(sp_fft.ifft(sp_fft.fft(filtered, axis=0, norm="ortho"), axis=1, norm="ortho"))


def structured_receive(y: np.ndarray, params: GfdmParams, w: np.ndarray, z_inverse: np.ndarray) -> np.ndarray:
    """
    Run the shared fast receiver.

    Args:
        y: Received length-D block
        params: Block dimensions
        w: K x M channel-side taps (in the permuted ordering)
        z_inverse: K x M reciprocal filter-side taps

    Returns:
        Length-D symbol estimates
    """
    equalizer = EqualizerTaps((1.0 / w).reshape(-1))
    X = equalizer.apply(received_spectrum(y, params)).reshape(params.K, params.M)
    return demap(sp_fft.ifft(X, axis=0, norm="ortho") * z_inverse)


def mmse_factors(G_bar: CharacteristicMatrix, C: np.ndarray):
    """
    Columns u_m, u~_m, v_m, v~_m of the per-subsymbol MMSE blocks.

    Returns:
        Tuple (u, u_tilde, v, v_tilde) of K x M arrays
    """
    u = permuted_channel(C, G_bar.params)
    v = G_bar.entries
    return u, 1.0 / np.conj(u), v, 1.0 / np.conj(v)


def mmse_blocks(G_bar: CharacteristicMatrix, C: np.ndarray, gamma: float) -> np.ndarray:
    """
    Dense rank-2 matrices F_m, shape (M, K, K).
    """
    u, u_t, v, v_t = mmse_factors(G_bar, C)
    return (np.einsum("km,lm->mkl", u, v) + np.einsum("km,lm->mkl", u_t, v_t) / gamma)


def structured_gains(G_bar: CharacteristicMatrix, C: np.ndarray, system_blocks: np.ndarray) -> np.ndarray:
    """
    Diagonal of B C A for a receiver B = S^H E^-1 Pi^T W_D, S = W_M kron W_K^H.

    E is block diagonal with blocks system_blocks[m] o W_K. Then
    B C A = S^H blkdiag(X_m) S with X_m = E_m^-1 (u_m v_m^T o W_K), and its
    (k + m*K)-th diagonal entry is (1/M) sum_m' [W_K X_m' W_K^H]_{k,k},
    the same for every m.

    Args:
        G_bar: Phase-shifted characteristic matrix
        C: Channel frequency response
        system_blocks: (M, K, K) rank-deficient-or-not matrices F_m of the receiver

    Returns:
        K x M complex gains
    """
    params = G_bar.params
    K, M = params.K, params.M
    W_K = dft_matrix(K)
    u, _, v, _ = mmse_factors(G_bar, C)

    diagonal = np.zeros(K, dtype=complex)
    for m in range(M):
        signal_block = np.outer(u[:, m], v[:, m]) * W_K
        X = np.linalg.solve(system_blocks[m] * W_K, signal_block)
        diagonal += np.diagonal(W_K @ X @ W_K.conj().T)
    return np.repeat((diagonal / M)[:, None], M, axis=1)
