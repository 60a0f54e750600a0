"""
GFDM receivers: zero-forcing, exact MMSE (dense and low-complexity) and
approximated MMSE.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np
from scipy import fft as sp_fft
from scipy import linalg

from gfdm_toolkit.core.characteristic import (
    as_shifted,
    as_unshifted,
    energy,
    hadamard_reciprocal,
    is_invertible,
    require_invertible,
    unvect,
    vect,
)
from gfdm_toolkit.core.dense import build_dense, circulant_channel
from gfdm_toolkit.core.errors import ChannelNullError, InvalidInputError, LowComplexityUnavailableError
from gfdm_toolkit.core.types import DEFAULT_TOLERANCE, CharacteristicMatrix, GfdmParams, Tolerance
from .frame import EqualizerTaps, GfdmFrame, RxReport
from .structure import (
    channel_response,
    demap,
    mmse_factors,
    received_spectrum,
    structured_gains,
    structured_receive,
)
from .variances import error_variances_zf

# Set up logging
logger = logging.getLogger(__name__)


def _filter_inverse(G: CharacteristicMatrix, tol: Tolerance, pseudo_inverse: bool) -> Tuple[np.ndarray, bool]:
    """Entrywise reciprocal of G, or its pseudo-inverse counterpart when allowed."""
    if is_invertible(G, tol):
        return 1.0 / G.entries, False
    if not pseudo_inverse:
        require_invertible(G, tol)
    logger.warning("Singular GFDM matrix, using the pseudo-inverse")
    return hadamard_reciprocal(G.entries, tol), True


def _check_allocation(frame: Optional[GfdmFrame]) -> None:
    if frame is not None:
        frame.require_full()


def _check_gamma(gamma: float) -> None:
    if not gamma > 0:
        raise InvalidInputError(f"SNR gamma must be positive, got {gamma}")


def _factor_inverse(z: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Entrywise 1 / z of a K x M receiver factor; zeros land on bins k*M + m."""
    mags = np.abs(z)
    zeros = np.argwhere(mags <= tol.zero_threshold(mags))
    if zeros.size:
        bins = [int(k) * z.shape[1] + int(m) for k, m in zeros]
        raise ChannelNullError(f"Receiver factor vanishes on bins {bins}", bins)
    return 1.0 / z


def zf_equalizer_taps(channel: Any, params: GfdmParams, tol: Tolerance = DEFAULT_TOLERANCE) -> EqualizerTaps:
    """Per-bin ZF equalizer 1 / C_l."""
    return EqualizerTaps(1.0 / channel_response(channel, params, tol))


def mmse_equalizer_taps(G: CharacteristicMatrix, channel: Any, gamma: float,
                        tol: Tolerance = DEFAULT_TOLERANCE) -> EqualizerTaps:
    """
    Per-bin MMSE equalizer F_l = 1 / (C_l + (gamma xi_G C_l^*)^-1).

    Only meaningful for constant-magnitude characteristic matrices, where
    it is the whole channel-side part of the exact MMSE receiver.
    """
    if not tol.is_constant(G.magnitudes):
        raise InvalidInputError("Per-bin MMSE equalization requires constant-magnitude characteristic entries")
    _check_gamma(gamma)
    C = channel_response(channel, G.params, tol)
    return EqualizerTaps(1.0 / (C + 1.0 / (gamma * energy(G) * np.conj(C))))


def rx_zf_form2(y: np.ndarray,
                G_bar: CharacteristicMatrix,
                channel: Any,
                tol: Tolerance = DEFAULT_TOLERANCE,
                pseudo_inverse: bool = False,
                n0: Optional[float] = None) -> RxReport:
    """
    ZF receiver B = (W_M^H kron W_K) D_Gbar^-1 (I_M kron W_K^H) Pi^T D_C^-1 W_D.

    Args:
        y: Received length-D block (prefix removed)
        G_bar: Characteristic matrix (either form)
        channel: ChannelRealization or frequency response
        tol: Zero threshold
        pseudo_inverse: Use the pseudo-inverse when G is singular instead of raising
        n0: Noise variance; when given, error variances are attached

    Returns:
        Receiver report
    """
    G_bar = as_shifted(G_bar)
    params = G_bar.params
    C = channel_response(channel, params, tol)
    inverse, used_pinv = _filter_inverse(G_bar, tol, pseudo_inverse)

    estimates = structured_receive(y, params, C.reshape(params.K, params.M), inverse)
    variances = None
    if n0 is not None and not used_pinv:
        variances = error_variances_zf(G_bar, C, n0, tol)
    return RxReport(params, estimates, error_variances=variances, pseudo_inverse=used_pinv)


def rx_zf_form1(y: np.ndarray,
                G: CharacteristicMatrix,
                channel: Any,
                tol: Tolerance = DEFAULT_TOLERANCE,
                pseudo_inverse: bool = False,
                n0: Optional[float] = None) -> RxReport:
    """
    ZF receiver B = (W_M^H kron W_K) D_G^-1 (W_M kron I_K) W_D^H D_C^-1 W_D.

    The same map as rx_zf_form2, with the channel removed in the time domain
    first; takes two D-point transforms instead of one.
    """
    G = as_unshifted(G)
    params = G.params
    inverse, used_pinv = _filter_inverse(G, tol, pseudo_inverse)

    equalizer = zf_equalizer_taps(channel, params, tol)
    equalized = sp_fft.ifft(equalizer.apply(received_spectrum(y, params)), norm="ortho")
    spread = sp_fft.fft(unvect(equalized, params.K, params.M), axis=1, norm="ortho") * inverse
    estimates = demap(spread)

    variances = None
    if n0 is not None and not used_pinv:
        variances = error_variances_zf(G, 1.0 / equalizer.gains, n0, tol)
    return RxReport(params, estimates, error_variances=variances, pseudo_inverse=used_pinv)


def rx_zf_freq(y: np.ndarray,
               h_f: np.ndarray,
               channel: Any,
               params: GfdmParams,
               active_subcarriers: Optional[Iterable[int]] = None,
               tol: Tolerance = DEFAULT_TOLERANCE) -> Dict[int, np.ndarray]:
    """
    Frequency-domain ZF receiver, one subcarrier at a time.

    For subcarrier k the equalized spectrum is moved down by k*M bins,
    correlated with the receive prototype, folded onto M bins and
    transformed back with an M-point inverse DFT.

    Args:
        y: Received length-D block
        h_f: Frequency-domain prototype of A^-H, i.e. freq_from_char(inverse_char(G))
        channel: ChannelRealization or frequency response
        params: Block dimensions
        active_subcarriers: Subcarriers to demodulate (all if None)
        tol: Zero threshold

    Returns:
        Mapping from subcarrier index to its M symbol estimates
    """
    K, M, D = params.K, params.M, params.D
    h_f = np.asarray(h_f, dtype=complex).ravel()
    if h_f.size != D:
        raise InvalidInputError(f"Receive filter must have {D} bins, got {h_f.size}")
    subcarriers = range(K) if active_subcarriers is None else sorted(set(int(k) for k in active_subcarriers))

    equalized = zf_equalizer_taps(channel, params, tol).apply(received_spectrum(y, params))
    matched = np.conj(h_f)
    estimates = {}
    for k in subcarriers:
        if not 0 <= k < K:
            raise InvalidInputError(f"Subcarrier index {k} outside 0..{K - 1}")
        folded = (matched * np.roll(equalized, -k * M)).reshape(K, M).sum(axis=0)
        estimates[k] = sp_fft.ifft(folded, norm="ortho") / np.sqrt(K)
    return estimates


def stack_subcarriers(estimates: Dict[int, np.ndarray], params: GfdmParams) -> np.ndarray:
    """Arrange per-subcarrier estimates into a length-D vector (zeros elsewhere)."""
    matrix = np.zeros((params.K, params.M), dtype=complex)
    for k, values in estimates.items():
        matrix[k, :] = values
    return vect(matrix)


def dense_mmse_matrix(G: CharacteristicMatrix,
                      channel: Any,
                      gamma: float,
                      form: str = "auto",
                      tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """
    Dense MMSE receiver matrix.

    'covariance' evaluates A^H C^H (C A A^H C^H + I/gamma)^-1, which is
    always well-posed; 'inverse' evaluates [CA + (CA)^-H / gamma]^-1 and
    needs A and C invertible; 'auto' picks 'inverse' when it is valid.

    Args:
        G: Characteristic matrix (either form)
        channel: ChannelRealization or frequency response
        gamma: E_S / N0
        form: 'auto', 'covariance' or 'inverse'
        tol: Zero threshold

    Returns:
        Tuple (B, CA) of dense D x D matrices
    """
    _check_gamma(gamma)
    G = as_unshifted(G)
    params = G.params
    C = channel_response(channel, params, tol, allow_nulls=True)
    mags = np.abs(C)
    invertible = is_invertible(G, tol) and bool(np.all(mags > tol.zero_threshold(mags)))

    if form == "auto":
        form = "inverse" if invertible else "covariance"
    if form == "inverse" and not invertible:
        raise InvalidInputError("The inverse form needs an invertible GFDM matrix and a channel without nulls")

    CA = circulant_channel(C) @ build_dense(G).entries
    if form == "inverse":
        regularizer = np.linalg.inv(CA).conj().T / gamma
        B = np.linalg.inv(CA + regularizer)
    elif form == "covariance":
        covariance = CA @ CA.conj().T + np.eye(params.D) / gamma
        B = linalg.solve(covariance, CA, assume_a="her").conj().T
    else:
        raise InvalidInputError(f"Unknown MMSE form: {form}")
    return B, CA


def rx_mmse_dense(y: np.ndarray,
                  G: CharacteristicMatrix,
                  channel: Any,
                  gamma: float,
                  frame: Optional[GfdmFrame] = None,
                  form: str = "auto",
                  e_s: float = 1.0,
                  tol: Tolerance = DEFAULT_TOLERANCE) -> RxReport:
    """
    MMSE receiver by dense linear algebra; O(D^3).

    Args:
        y: Received length-D block
        G: Characteristic matrix (either form)
        channel: ChannelRealization or frequency response
        gamma: E_S / N0
        frame: Transmitted frame, checked for full allocation when given
        form: 'auto', 'covariance' or 'inverse' (see dense_mmse_matrix)
        e_s: Symbol energy
        tol: Zero threshold

    Returns:
        Receiver report with gains and error variances
    """
    _check_allocation(frame)
    B, CA = dense_mmse_matrix(G, channel, gamma, form, tol)
    params = G.params
    gains = unvect(np.einsum("ij,ji->i", B, CA), params.K, params.M)
    variances = np.clip(e_s * (1.0 - gains.real), 0.0, None)
    estimates = B @ np.asarray(y, dtype=complex).ravel()
    return RxReport(params, estimates, error_variances=variances, gains=gains)


@dataclass(frozen=True)
class LowComplexityCheck:
    """
    Which per-subsymbol condition allows the exact low-complexity MMSE.

    conditions[m] is 'a' (filter column of constant magnitude),
    'b' (channel bins k*M + m of constant magnitude) or None.
    """
    exists: bool
    conditions: Tuple[Optional[str], ...]

    @property
    def failing_subsymbols(self) -> Tuple[int, ...]:
        """Subsymbols where neither condition holds."""
        return tuple(m for m, cond in enumerate(self.conditions) if cond is None)


def mmse_lowcomp_exists(G_bar: CharacteristicMatrix, channel: Any,
                        tol: Tolerance = DEFAULT_TOLERANCE) -> LowComplexityCheck:
    """
    Check whether the exact MMSE receiver has the fast structure.

    Column m qualifies when |G_bar[:, m]| is constant (condition a, preferred)
    or when |C[k*M + m]| is constant over k (condition b).

    Args:
        G_bar: Characteristic matrix (either form)
        channel: ChannelRealization or frequency response
        tol: Constancy tolerance

    Returns:
        Per-subsymbol witness
    """
    G_bar = as_shifted(G_bar)
    u, _, v, _ = mmse_factors(G_bar, channel_response(channel, G_bar.params, tol))
    conditions = []
    for m in range(G_bar.params.M):
        if tol.is_constant(np.abs(v[:, m])):
            conditions.append("a")
        elif tol.is_constant(np.abs(u[:, m])):
            conditions.append("b")
        else:
            conditions.append(None)
    conditions = tuple(conditions)
    return LowComplexityCheck(all(c is not None for c in conditions), conditions)


def lowcomp_factors(G_bar: CharacteristicMatrix, channel: Any, gamma: float,
                    tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact rank-1 factors F_m = w_m z_m^T of the MMSE blocks.

    Returns:
        Tuple (w, z) of K x M arrays
    """
    _check_gamma(gamma)
    G_bar = as_shifted(G_bar)
    C = channel_response(channel, G_bar.params, tol)
    require_invertible(G_bar, tol)
    check = mmse_lowcomp_exists(G_bar, C, tol)
    if not check.exists:
        raise LowComplexityUnavailableError(
            f"No exact low-complexity MMSE for subsymbols {list(check.failing_subsymbols)}; use rx_ammse",
            check.failing_subsymbols,
        )

    u, u_t, v, v_t = mmse_factors(G_bar, C)
    w = np.empty_like(u)
    z = np.empty_like(v)
    for m, condition in enumerate(check.conditions):
        if condition == "a":
            w[:, m] = u[:, m] + u_t[:, m] / (gamma * np.abs(v[0, m]) ** 2)
            z[:, m] = v[:, m]
        else:
            w[:, m] = u[:, m]
            z[:, m] = v[:, m] + v_t[:, m] / (gamma * np.abs(u[0, m]) ** 2)
    return w, z


def rx_mmse_lowcomp(y: np.ndarray,
                    G_bar: CharacteristicMatrix,
                    channel: Any,
                    gamma: float,
                    frame: Optional[GfdmFrame] = None,
                    e_s: float = 1.0,
                    tol: Tolerance = DEFAULT_TOLERANCE) -> RxReport:
    """
    Exact MMSE receiver in O(D log D).

    Requires mmse_lowcomp_exists; raises LowComplexityUnavailableError
    otherwise.

    Args:
        y: Received length-D block
        G_bar: Characteristic matrix (either form)
        channel: ChannelRealization or frequency response
        gamma: E_S / N0
        frame: Transmitted frame, checked for full allocation when given
        e_s: Symbol energy
        tol: Zero and constancy thresholds

    Returns:
        Receiver report with gains and error variances
    """
    _check_allocation(frame)
    G_bar = as_shifted(G_bar)
    params = G_bar.params
    C = channel_response(channel, params, tol)
    w, z = lowcomp_factors(G_bar, C, gamma, tol)

    estimates = structured_receive(y, params, w, _factor_inverse(z, tol))
    gains = structured_gains(G_bar, C, np.einsum("km,lm->mkl", w, z))
    variances = np.clip(e_s * (1.0 - gains.real), 0.0, None)
    return RxReport(params, estimates, error_variances=variances, gains=gains)


@dataclass(frozen=True, eq=False)
class RankOneApproximation:
    """
    Best rank-1 approximations w_m z_m^T of the MMSE blocks F_m.

    singular_values[m] holds the two singular values of F_m, so the
    approximation residual in Frobenius norm is singular_values[m, 1].
    """
    w: np.ndarray
    z: np.ndarray
    singular_values: np.ndarray

    @property
    def residuals(self) -> np.ndarray:
        """||F_m - w_m z_m^T||_F for every m."""
        return self.singular_values[:, 1]


def rank_one_factors(G_bar: CharacteristicMatrix, channel: Any, gamma: float,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> RankOneApproximation:
    """
    Truncated SVD of every F_m = P_m Q_m^T with P_m = [u_m, u~_m/gamma] and
    Q_m = [v_m, v~_m].

    Thin QR factorizations P = Q1 R1, Q = Q2 R2 reduce the K x K SVD to the
    2 x 2 core R1 R2^T, so each block costs O(K).

    Returns:
        Rank-one approximation with factors as K x M arrays
    """
    _check_gamma(gamma)
    G_bar = as_shifted(G_bar)
    params = G_bar.params
    C = channel_response(channel, params, tol)
    require_invertible(G_bar, tol)
    u, u_t, v, v_t = mmse_factors(G_bar, C)

    if params.K == 1:
        F = (u * v + u_t * v_t / gamma)[0]
        sv = np.stack([np.abs(F), np.zeros_like(np.abs(F))], axis=1)
        return RankOneApproximation(F[None, :], np.ones((1, params.M), dtype=complex), sv)

    # (M, K, 2) stacks of the two column pairs
    P = np.stack([u.T, u_t.T / gamma], axis=-1)
    Q = np.stack([v.T, v_t.T], axis=-1)
    Q1, R1 = np.linalg.qr(P)
    Q2, R2 = np.linalg.qr(Q)
    U, s, Vh = np.linalg.svd(R1 @ np.swapaxes(R2, -1, -2))

    # F = (Q1 U) diag(s) (Vh Q2^T); Q2^T has orthonormal rows
    w = s[:, 0, None] * np.einsum("mkj,mj->mk", Q1, U[:, :, 0])
    z = np.einsum("mkj,mj->mk", Q2, Vh[:, 0, :])
    return RankOneApproximation(w.T, z.T, s)


def rx_ammse(y: np.ndarray,
             G_bar: CharacteristicMatrix,
             channel: Any,
             gamma: float,
             frame: Optional[GfdmFrame] = None,
             tol: Tolerance = DEFAULT_TOLERANCE) -> RxReport:
    """
    Approximated MMSE receiver.

    Runs the fast receiver structure with the best rank-1 approximation of
    every MMSE block; exact when the low-complexity conditions hold.

    Args:
        y: Received length-D block
        G_bar: Characteristic matrix (either form)
        channel: ChannelRealization or frequency response
        gamma: E_S / N0
        frame: Transmitted frame, checked for full allocation when given
        tol: Zero threshold

    Returns:
        Receiver report with gains
    """
    _check_allocation(frame)
    G_bar = as_shifted(G_bar)
    params = G_bar.params
    C = channel_response(channel, params, tol)
    approx = rank_one_factors(G_bar, C, gamma, tol)
    logger.debug(f"AMMSE max rank-1 residual: {float(np.max(approx.residuals)):.3e}")

    estimates = structured_receive(y, params, approx.w, _factor_inverse(approx.z, tol))
    gains = structured_gains(G_bar, C, np.einsum("km,lm->mkl", approx.w, approx.z))
    return RxReport(params, estimates, gains=gains, approximate=True)
