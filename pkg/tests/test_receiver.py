"""
Tests for the ZF, MMSE and approximated MMSE receivers.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gfdm_toolkit.channel.models import apply_channel, awgn_channel, exp_profile, sample_rayleigh
from gfdm_toolkit.core.characteristic import freq_from_char, inverse_char, phase_shift
from gfdm_toolkit.core.dense import build_dense, circulant_channel
from gfdm_toolkit.core.errors import (
    ChannelNullError,
    InvalidInputError,
    LowComplexityUnavailableError,
    SingularMatrixError,
)
from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams
from gfdm_toolkit.filters import FilterKind, FilterSpec, create_filter
from gfdm_toolkit.modem.frame import GfdmFrame
from gfdm_toolkit.modem.receiver import (
    RankOneApproximation,
    dense_mmse_matrix,
    lowcomp_factors,
    mmse_equalizer_taps,
    mmse_lowcomp_exists,
    rank_one_factors,
    rx_ammse,
    rx_mmse_dense,
    rx_mmse_lowcomp,
    rx_zf_form1,
    rx_zf_form2,
    rx_zf_freq,
    stack_subcarriers,
)
from gfdm_toolkit.modem.structure import mmse_blocks, structured_receive
from gfdm_toolkit.modem.transmitter import tx_form2
from tests.conftest import random_characteristic, random_symbols


def _transmit(G, rng, channel):
    frame = GfdmFrame(G.params, random_symbols(rng, G.params.D))
    return frame, apply_channel(tx_form2(frame, G), channel, 0.0)


def _noisy(G, rng, channel, n0=0.05):
    frame = GfdmFrame(G.params, random_symbols(rng, G.params.D))
    return frame, apply_channel(tx_form2(frame, G), channel, n0, rng)


class TestZeroForcing:
    """ZF receivers undo channel and filter exactly without noise."""

    @pytest.mark.parametrize("K, M", [(4, 3), (8, 5), (3, 4)])
    def test_form2_recovers_symbols(self, rng, K, M):
        G = random_characteristic(rng, K, M)
        channel = sample_rayleigh(exp_profile(G.params.D), G.params.D, rng)
        frame, y = _transmit(G, rng, channel)
        report = rx_zf_form2(y, phase_shift(G), channel)
        assert_allclose(report.estimates, frame.data, atol=1e-9)
        assert not report.pseudo_inverse
        assert report.gains is None

    def test_form1_matches_form2(self, make_char, rng):
        G = make_char(4, 5)
        channel = sample_rayleigh(exp_profile(20), 20, rng)
        _, y = _noisy(G, rng, channel)
        assert_allclose(rx_zf_form1(y, G, channel).estimates, rx_zf_form2(y, G, channel).estimates, atol=1e-10)

    def test_frequency_domain_receiver(self, make_char, rng):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        frame, y = _transmit(G, rng, channel)
        estimates = rx_zf_freq(y, freq_from_char(inverse_char(G)), channel, G.params)
        assert_allclose(stack_subcarriers(estimates, G.params), frame.data, atol=1e-9)

    def test_frequency_domain_subset(self, make_char, rng):
        G = make_char(4, 3)
        frame, y = _transmit(G, rng, awgn_channel(12))
        estimates = rx_zf_freq(y, freq_from_char(inverse_char(G)), awgn_channel(12), G.params, [3, 1])
        assert sorted(estimates) == [1, 3]
        assert_allclose(estimates[3], frame.subcarrier(3), atol=1e-9)
        with pytest.raises(InvalidInputError):
            rx_zf_freq(y, freq_from_char(inverse_char(G)), awgn_channel(12), G.params, [4])

    def test_zf_is_dense_inverse(self, make_char, rng):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        _, y = _noisy(G, rng, channel)
        B = np.linalg.inv(circulant_channel(channel.freq_response) @ build_dense(G).entries)
        assert_allclose(rx_zf_form2(y, G, channel).estimates, B @ y, atol=1e-9)

    def test_variances_attached(self, make_char, rng):
        G = make_char(4, 3)
        _, y = _noisy(G, rng, awgn_channel(12))
        report = rx_zf_form2(y, G, awgn_channel(12), n0=0.1)
        assert report.error_variances.shape == (4, 3)
        assert np.all(report.error_variances > 0)


class TestPseudoInverse:
    """Singular characteristic matrices."""

    def test_singular_filter_raises(self, rng):
        params = GfdmParams(8, 4)
        G = create_filter(FilterSpec(FilterKind.RC, rolloff=0.5), params)
        y = random_symbols(rng, params.D)
        with pytest.raises(SingularMatrixError):
            rx_zf_form2(y, G, awgn_channel(params.D))

    def test_pseudo_inverse_matches_pinv(self, make_char, rng):
        G = make_char(4, 3)
        entries = np.array(G.entries)
        entries[1, 2] = 0.0
        singular = CharacteristicMatrix(G.params, entries)
        y = random_symbols(rng, 12)
        report = rx_zf_form2(y, singular, awgn_channel(12), pseudo_inverse=True, n0=0.1)
        pinv = np.linalg.pinv(build_dense(singular).entries, rcond=1e-10)
        assert report.pseudo_inverse
        assert report.error_variances is None
        assert_allclose(report.estimates, pinv @ y, atol=1e-9)


class TestDenseMmse:
    """Dense reference receiver."""

    def test_forms_agree(self, make_char, rng):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        B_inv, _ = dense_mmse_matrix(G, channel, 5.0, form="inverse")
        B_cov, _ = dense_mmse_matrix(G, channel, 5.0, form="covariance")
        assert_allclose(B_inv, B_cov, atol=1e-9)

    def test_inverse_form_needs_invertible_matrix(self, make_char):
        G = make_char(4, 3)
        entries = np.array(G.entries)
        entries[0, 0] = 0.0
        with pytest.raises(InvalidInputError):
            dense_mmse_matrix(CharacteristicMatrix(G.params, entries), awgn_channel(12), 5.0, form="inverse")

    def test_unknown_form(self, make_char):
        with pytest.raises(InvalidInputError):
            dense_mmse_matrix(make_char(), awgn_channel(12), 5.0, form="cholesky")

    def test_high_snr_approaches_zf(self, make_char, rng):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        _, y = _noisy(G, rng, channel)
        mmse = rx_mmse_dense(y, G, channel, 1e12).estimates
        assert_allclose(mmse, rx_zf_form2(y, G, channel).estimates, atol=1e-6)

    def test_partial_frame_rejected(self, make_char, rng):
        G = make_char(4, 3)
        frame = GfdmFrame.from_symbols(G.params, np.ones(6), active_subcarriers=[0, 1])
        with pytest.raises(InvalidInputError):
            rx_mmse_dense(np.zeros(12), G, awgn_channel(12), 5.0, frame=frame)

    def test_non_positive_gamma(self, make_char):
        with pytest.raises(InvalidInputError):
            dense_mmse_matrix(make_char(), awgn_channel(12), 0.0)


class TestLowComplexityMmse:
    """The O(D log D) exact MMSE receiver."""

    @pytest.mark.parametrize("gamma", [1.0, 10.0, 100.0])
    def test_constant_magnitude_filter_matches_dense(self, make_cmcm, rng, gamma):
        G = make_cmcm(8, 5)
        channel = sample_rayleigh(exp_profile(40), 40, rng)
        _, y = _noisy(G, rng, channel)
        fast = rx_mmse_lowcomp(y, phase_shift(G), channel, gamma)
        dense = rx_mmse_dense(y, G, channel, gamma)
        assert_allclose(fast.estimates, dense.estimates, atol=1e-8)
        assert_allclose(fast.gains, dense.gains, atol=1e-8)
        assert_allclose(fast.error_variances, dense.error_variances, atol=1e-8)

    def test_flat_channel_with_any_filter(self, make_char, rng):
        G = make_char(4, 5)
        channel = awgn_channel(20)
        check = mmse_lowcomp_exists(G, channel)
        assert check.exists
        assert set(check.conditions) == {"b"}
        _, y = _noisy(G, rng, channel)
        fast = rx_mmse_lowcomp(y, G, channel, 10.0)
        dense = rx_mmse_dense(y, G, channel, 10.0)
        assert_allclose(fast.estimates, dense.estimates, atol=1e-8)
        assert_allclose(fast.gains, dense.gains, atol=1e-8)

    def test_constant_columns_prefer_condition_a(self, make_cmcm, rng):
        G = make_cmcm(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        assert mmse_lowcomp_exists(G, channel).conditions == ("a", "a", "a")

    def test_unavailable_structure(self, make_char, rng):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        check = mmse_lowcomp_exists(G, channel)
        assert not check.exists
        assert check.failing_subsymbols == (0, 1, 2)
        blocks = mmse_blocks(phase_shift(G), channel.freq_response, 10.0)
        assert np.all(np.linalg.svd(blocks, compute_uv=False)[:, 1] > 1e-12)
        with pytest.raises(LowComplexityUnavailableError) as excinfo:
            rx_mmse_lowcomp(np.zeros(12), G, channel, 10.0)
        assert excinfo.value.failing_subsymbols == [0, 1, 2]

    def test_non_positive_gamma(self, make_cmcm):
        with pytest.raises(InvalidInputError):
            rx_mmse_lowcomp(np.zeros(12), make_cmcm(), awgn_channel(12), -1.0)

    def test_per_bin_equalizer(self, make_cmcm, rng):
        G = make_cmcm(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        C = channel.freq_response
        taps = mmse_equalizer_taps(G, channel, 10.0).gains
        assert_allclose(taps, np.conj(C) / (np.abs(C) ** 2 + 0.1))


class TestApproximateMmse:
    """Rank-one approximation of the MMSE blocks."""

    def test_residuals_are_second_singular_values(self, make_char, rng):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        approx = rank_one_factors(G, channel, 10.0)
        blocks = mmse_blocks(phase_shift(G), channel.freq_response, 10.0)
        singular_values = np.linalg.svd(blocks, compute_uv=False)
        assert_allclose(approx.singular_values, singular_values[:, :2], rtol=1e-9)
        assert_allclose(approx.residuals, singular_values[:, 1], rtol=1e-9)

    def test_factors_are_best_rank_one(self, make_char, rng):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        approx = rank_one_factors(G, channel, 10.0)
        blocks = mmse_blocks(phase_shift(G), channel.freq_response, 10.0)
        for m in range(3):
            error = np.linalg.norm(blocks[m] - np.outer(approx.w[:, m], approx.z[:, m]))
            assert error == pytest.approx(approx.residuals[m], rel=1e-9)

    def test_exact_when_blocks_are_rank_one(self, make_cmcm, rng):
        G = make_cmcm(8, 5)
        channel = sample_rayleigh(exp_profile(40), 40, rng)
        _, y = _noisy(G, rng, channel)
        approx = rx_ammse(y, G, channel, 10.0)
        exact = rx_mmse_lowcomp(y, G, channel, 10.0)
        assert approx.approximate
        assert approx.error_variances is None
        assert_allclose(approx.estimates, exact.estimates, atol=1e-8)
        assert_allclose(approx.gains, exact.gains, atol=1e-8)

    def test_singular_filter_raises(self, rng):
        params = GfdmParams(8, 4)
        G = create_filter(FilterSpec(FilterKind.RC, rolloff=0.5), params)
        with pytest.raises(SingularMatrixError):
            rx_ammse(np.zeros(params.D), G, awgn_channel(params.D), 10.0)

    def test_vanishing_factor_raises(self, make_char, rng, monkeypatch):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        approx = rank_one_factors(G, channel, 10.0)
        z = approx.z.copy()
        z[2, 1] = 0.0
        monkeypatch.setattr("gfdm_toolkit.modem.receiver.rank_one_factors",
                            lambda *args, **kwargs: RankOneApproximation(approx.w, z, approx.singular_values))
        with pytest.raises(ChannelNullError) as excinfo:
            rx_ammse(np.ones(12, dtype=complex), G, channel, 10.0)
        assert excinfo.value.bins == [2 * 3 + 1]


def _linear_mse(B, CA, gamma):
    """Per-block MSE of estimate B y for unit-energy symbols and N0 = 1 / gamma."""
    identity = np.eye(CA.shape[0])
    return np.linalg.norm(B @ CA - identity) ** 2 + np.linalg.norm(B) ** 2 / gamma


def _receiver_matrix(params, w, z):
    """Dense matrix of the fast receiver structure, one unit vector at a time."""
    columns = [structured_receive(e, params, w, 1.0 / z) for e in np.eye(params.D, dtype=complex)]
    return np.stack(columns, axis=1)


def _direction(rng, shape):
    delta = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return delta / np.linalg.norm(delta)


class TestMmseOptimality:
    """No perturbation of the MMSE receiver lowers its MSE."""

    @pytest.mark.parametrize("eps", [1e-1, 1e-3])
    def test_dense_matrix_is_a_minimum(self, make_char, rng, eps):
        G = make_char(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        B, CA = dense_mmse_matrix(G, channel, 10.0)
        best = _linear_mse(B, CA, 10.0)
        for _ in range(10):
            assert _linear_mse(B + eps * _direction(rng, B.shape), CA, 10.0) >= best

    @pytest.mark.parametrize("eps", [1e-1, 1e-3])
    def test_low_complexity_factors_are_a_minimum(self, make_cmcm, rng, eps):
        G = make_cmcm(4, 3)
        channel = sample_rayleigh(exp_profile(12), 12, rng)
        w, z = lowcomp_factors(phase_shift(G), channel, 10.0)
        _, CA = dense_mmse_matrix(G, channel, 10.0)
        best = _linear_mse(_receiver_matrix(G.params, w, z), CA, 10.0)
        for _ in range(10):
            perturbed_w = _linear_mse(_receiver_matrix(G.params, w + eps * _direction(rng, w.shape), z), CA, 10.0)
            perturbed_z = _linear_mse(_receiver_matrix(G.params, w, z + eps * _direction(rng, z.shape)), CA, 10.0)
            assert perturbed_w >= best
            assert perturbed_z >= best
