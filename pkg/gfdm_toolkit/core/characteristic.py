"""
Characteristic-matrix algebra.

All DFT matrices are unitary: W_p x is ``scipy.fft.fft(x, norm="ortho")``.
Vectorization is column-major, so index k + m*K of a length-D vector maps to
entry (k, m) of a K x M matrix.
"""

import logging
from typing import Union

import numpy as np
from scipy import fft as sp_fft

from gfdm_toolkit.core.errors import InvalidInputError, SingularMatrixError
from gfdm_toolkit.core.types import (
    DEFAULT_TOLERANCE,
    CharacteristicMatrix,
    GfdmParams,
    PrototypeFilter,
    Tolerance,
)

# Set up logging
logger = logging.getLogger(__name__)


def vect(matrix: np.ndarray) -> np.ndarray:
    """Stack the columns of a matrix into one vector."""
    return np.asarray(matrix).reshape(-1, order="F")


def unvect(vector: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of vect for a rows x cols matrix."""
    vector = np.asarray(vector)
    if vector.size != rows * cols:
        raise InvalidInputError(f"Expected {rows * cols} entries, got {vector.size}")
    return vector.reshape((rows, cols), order="F")


def _twiddles(params: GfdmParams) -> np.ndarray:
    """exp(-j2*pi*k*m/D) for every (k, m)."""
    k = np.arange(params.K)
    m = np.arange(params.M)
    return np.exp(-2j * np.pi * np.outer(k, m) / params.D)


def phase_shift(G: CharacteristicMatrix) -> CharacteristicMatrix:
    """
    Apply the twiddle factors exp(-j2*pi*k*m/D) entrywise.

    Args:
        G: Unshifted characteristic matrix

    Returns:
        Phase-shifted characteristic matrix
    """
    if G.shifted:
        raise InvalidInputError("Characteristic matrix is already phase-shifted")
    return CharacteristicMatrix(G.params, G.entries * _twiddles(G.params), shifted=True)


def unshift(G_bar: CharacteristicMatrix) -> CharacteristicMatrix:
    """
    Undo phase_shift.

    Args:
        G_bar: Phase-shifted characteristic matrix

    Returns:
        Unshifted characteristic matrix
    """
    if not G_bar.shifted:
        raise InvalidInputError("Characteristic matrix is not phase-shifted")
    return CharacteristicMatrix(G_bar.params, G_bar.entries * np.conj(_twiddles(G_bar.params)), shifted=False)


def as_shifted(G: CharacteristicMatrix) -> CharacteristicMatrix:
    """Return the phase-shifted form whichever form is given."""
    return G if G.shifted else phase_shift(G)


def as_unshifted(G: CharacteristicMatrix) -> CharacteristicMatrix:
    """Return the unshifted form whichever form is given."""
    return unshift(G) if G.shifted else G


def char_from_time(g: PrototypeFilter) -> CharacteristicMatrix:
    """
    Characteristic matrix of a time-domain prototype filter.

    G = sqrt(D) * reshape(g, K, M) * W_M

    Args:
        g: Prototype filter

    Returns:
        Unshifted characteristic matrix
    """
    params = g.params
    blocks = unvect(g.taps, params.K, params.M)
    entries = np.sqrt(params.D) * sp_fft.fft(blocks, axis=1, norm="ortho")
    return CharacteristicMatrix(params, entries)


def time_from_char(G: CharacteristicMatrix) -> PrototypeFilter:
    """
    Time-domain prototype filter of a characteristic matrix.

    Args:
        G: Characteristic matrix (either form)

    Returns:
        Prototype filter g = vect(G W_M^H) / sqrt(D)
    """
    G = as_unshifted(G)
    params = G.params
    blocks = sp_fft.ifft(G.entries, axis=1, norm="ortho") / np.sqrt(params.D)
    return PrototypeFilter(params, vect(blocks))


def freq_from_char(G: CharacteristicMatrix) -> np.ndarray:
    """
    Frequency-domain prototype filter g_f = sqrt(D) W_D g.

    Computed as vect(G_bar^T W_K): entry k*M + m is the K-point unitary DFT of
    column m of the phase-shifted matrix, evaluated at k.

    Args:
        G: Characteristic matrix (either form)

    Returns:
        Length-D complex vector
    """
    G_bar = as_shifted(G)
    spectra = sp_fft.fft(G_bar.entries, axis=0, norm="ortho")
    return spectra.reshape(-1)


def char_from_freq(g_f: np.ndarray, params: GfdmParams) -> CharacteristicMatrix:
    """
    Characteristic matrix of a frequency-domain prototype filter.

    Args:
        g_f: Length-D frequency-domain filter
        params: Block dimensions

    Returns:
        Unshifted characteristic matrix
    """
    g_f = np.asarray(g_f, dtype=complex).ravel()
    if g_f.size != params.D:
        raise InvalidInputError(f"Frequency-domain filter must have {params.D} bins, got {g_f.size}")
    spectra = g_f.reshape(params.K, params.M)
    G_bar = CharacteristicMatrix(params, sp_fft.ifft(spectra, axis=0, norm="ortho"), shifted=True)
    return unshift(G_bar)


def energy(G: CharacteristicMatrix) -> float:
    """
    Energy xi_G = ||G||_F^2 / D of the GFDM matrix.

    Args:
        G: Characteristic matrix (either form)

    Returns:
        Nonnegative energy
    """
    return float(np.sum(G.magnitudes ** 2) / G.params.D)


def is_unitary(G: CharacteristicMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Return True if every entry of G has unit magnitude."""
    return bool(np.all(np.abs(G.magnitudes - 1.0) <= tol.rel_eps))


def is_cmcm(G: CharacteristicMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Return True if all entries share one nonzero magnitude (unitary up to scale)."""
    return tol.is_constant(G.magnitudes) and float(np.max(G.magnitudes)) > 0.0


def zero_entries(G: CharacteristicMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Locate entries whose magnitude is at or below the zero threshold.

    Returns:
        Array of (k, m) index pairs, shape (n, 2)
    """
    mags = G.magnitudes
    return np.argwhere(mags <= tol.zero_threshold(mags))


def is_invertible(G: CharacteristicMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Return True if G has no zero entries."""
    return zero_entries(G, tol).size == 0


def require_invertible(G: CharacteristicMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> None:
    """
    Raise SingularMatrixError naming the zero entries of G, if any.
    """
    zeros = zero_entries(G, tol)
    if zeros.size:
        positions = [tuple(int(i) for i in z) for z in zeros]
        raise SingularMatrixError(f"GFDM matrix is singular: zero characteristic entries at {positions}", positions)


def inverse_char(G: CharacteristicMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> CharacteristicMatrix:
    """
    Characteristic matrix H = (G*)^(o-1) of A^{-H}.

    Args:
        G: Characteristic matrix (either form)
        tol: Zero threshold

    Returns:
        Unshifted characteristic matrix of the inverse-Hermitian GFDM matrix
    """
    G = as_unshifted(G)
    require_invertible(G, tol)
    return CharacteristicMatrix(G.params, 1.0 / np.conj(G.entries))


def hadamard_reciprocal(entries: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Entrywise reciprocal with zero entries mapped to zero.

    Used for the pseudo-inverse of a singular GFDM matrix: the flanking
    factors of the characteristic-matrix factorization are unitary, so
    inverting only the nonzero diagonal entries gives the Moore-Penrose
    pseudo-inverse.
    """
    mags = np.abs(entries)
    keep = mags > tol.zero_threshold(mags)
    out = np.zeros_like(entries, dtype=complex)
    out[keep] = 1.0 / entries[keep]
    return out


def receiver_energy(G: CharacteristicMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """
    Energy xi_H of A^{-H}, which is also the squared norm of every row of A^{-1}.

    Args:
        G: Characteristic matrix (either form)
        tol: Zero threshold

    Returns:
        sum over (k, m) of 1 / (D |G_km|^2)
    """
    require_invertible(G, tol)
    return float(np.sum(1.0 / G.magnitudes ** 2) / G.params.D)


def pi_permutation(params: GfdmParams) -> np.ndarray:
    """
    Index map of the vect-transpose permutation.

    ``v[perm]`` equals Pi v, so for any K x M matrix X,
    ``vect(X)[perm] == vect(X.T)``.

    Args:
        params: Block dimensions

    Returns:
        Integer array of length D
    """
    k = np.arange(params.K)[:, None]
    m = np.arange(params.M)[None, :]
    # output position k*M + m reads input position k + m*K
    return (k + m * params.K).reshape(-1)


def coerce_characteristic(value: Union[CharacteristicMatrix, PrototypeFilter]) -> CharacteristicMatrix:
    """Accept either a characteristic matrix or a prototype filter."""
    if isinstance(value, CharacteristicMatrix):
        return value
    if isinstance(value, PrototypeFilter):
        return char_from_time(value)
    raise InvalidInputError(f"Expected CharacteristicMatrix or PrototypeFilter, got {type(value).__name__}")
