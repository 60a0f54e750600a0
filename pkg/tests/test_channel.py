"""
Tests for channel models and the per-block channel generator.
"""

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from gfdm_toolkit.channel.generator import ChannelGenerator, ChannelKind
from gfdm_toolkit.channel.models import (
    STATIC_FOUR_TAPS,
    ChannelRealization,
    PowerDelayProfile,
    apply_channel,
    awgn_channel,
    block_rng,
    complex_gaussian,
    convolve_with_prefix,
    epa_profile,
    exp_profile,
    get_profile,
    sample_dfe_rayleigh,
    sample_rayleigh,
    static_four_tap_channel,
)
from gfdm_toolkit.core.dense import circulant_channel
from gfdm_toolkit.core.errors import InvalidInputError, RejectionLimitError
from gfdm_toolkit.modem.frame import add_cp, remove_cp


class TestRandomStreams:
    """Counter-based generators."""

    def test_same_coordinate_same_stream(self):
        assert_allclose(block_rng(7, 3).random(5), block_rng(7, 3).random(5))

    def test_different_blocks_differ(self):
        assert not np.allclose(block_rng(7, 3).random(5), block_rng(7, 4).random(5))

    def test_complex_gaussian_variance(self, rng):
        samples = complex_gaussian(rng, 200000, 2.0)
        assert np.mean(np.abs(samples) ** 2) == pytest.approx(2.0, rel=0.02)


class TestProfiles:
    """Power delay profiles."""

    def test_exp_profile(self):
        pdp = exp_profile(40)
        assert pdp.length == 10
        assert pdp.variances.sum() == pytest.approx(1.0)
        assert_allclose(pdp.variances[1:] / pdp.variances[:-1], 0.64)

    def test_epa_profile(self):
        pdp = epa_profile()
        assert pdp.length == 42
        assert np.count_nonzero(pdp.variances) == 7

    def test_lookup(self):
        assert get_profile("EXP", 32).name == "exp"
        with pytest.raises(InvalidInputError):
            get_profile("eva", 32)

    def test_negative_variance_rejected(self):
        with pytest.raises(InvalidInputError):
            PowerDelayProfile(np.array([1.0, -0.1]))


class TestRealizations:
    """Fixed and random channel realizations."""

    def test_awgn_is_flat(self):
        channel = awgn_channel(12)
        assert channel.order == 0
        assert_allclose(channel.freq_response, 1.0)

    def test_static_channel(self):
        channel = static_four_tap_channel(32)
        assert channel.order == 3
        assert_allclose(channel.taps, STATIC_FOUR_TAPS)
        assert_allclose(channel.freq_response, np.fft.fft(channel.taps, 32))

    def test_too_many_taps(self):
        with pytest.raises(InvalidInputError):
            ChannelRealization(np.ones(5), 4)

    def test_frame_round_trip(self, rng):
        channel = sample_rayleigh(exp_profile(32), 32, rng)
        restored = ChannelRealization.from_frame(channel.to_frame(), 32)
        assert_allclose(restored.taps, channel.taps)
        assert list(channel.to_frame().columns) == ["index", "re", "im"]

    def test_rayleigh_tap_count(self, rng):
        pdp = exp_profile(32)
        assert sample_rayleigh(pdp, 32, rng).taps.size == pdp.length

    def test_deep_fade_threshold_respected(self, rng):
        pdp = exp_profile(32)
        for _ in range(20):
            channel = sample_dfe_rayleigh(pdp, 32, rng, threshold_db=-10.0)
            assert np.min(np.abs(channel.freq_response)) >= 10.0 ** (-10.0 / 20.0)

    def test_rejection_limit(self, rng):
        with pytest.raises(RejectionLimitError):
            sample_dfe_rayleigh(exp_profile(32), 32, rng, threshold_db=40.0, max_rejections=5)


class TestEnsembles:
    """Monte-Carlo moments of the fading ensembles."""

    def test_rayleigh_unit_bin_power(self, rng):
        pdp = exp_profile(16)
        gains = np.array([np.abs(sample_rayleigh(pdp, 16, rng).freq_response) ** 2 for _ in range(4000)])
        # |C_l|^2 is unit-mean exponential, so each bin mean has standard error 1/sqrt(4000)
        assert_allclose(gains.mean(axis=0), 1.0, atol=0.08)

    def test_deep_fade_inverse_power_uniform(self, rng):
        pdp = exp_profile(16)
        inverse = np.array([
            1.0 / np.abs(sample_dfe_rayleigh(pdp, 16, rng, threshold_db=-10.0).freq_response) ** 2
            for _ in range(2000)
        ])
        per_bin = inverse.mean(axis=0)
        assert np.all(per_bin <= 10.0)
        assert_allclose(per_bin, per_bin.mean(), rtol=0.15)


class TestPropagation:
    """Linear convolution with a prefix equals circular convolution."""

    def test_prefix_makes_convolution_circular(self, rng):
        D, L = 16, 4
        channel = sample_rayleigh(exp_profile(D), D, rng)
        x = complex_gaussian(rng, D)
        received = remove_cp(convolve_with_prefix(add_cp(x, L), channel), L)
        assert_allclose(received, apply_channel(x, channel, 0.0), atol=1e-12)
        assert_allclose(received, circulant_channel(channel.freq_response) @ x, atol=1e-12)

    def test_noise_requires_generator(self, rng):
        x = complex_gaussian(rng, 8)
        with pytest.raises(InvalidInputError):
            apply_channel(x, awgn_channel(8), 0.1)

    def test_cp_helpers(self):
        x = np.arange(6)
        assert add_cp(x, 2).tolist() == [4, 5, 0, 1, 2, 3, 4, 5]
        assert remove_cp(add_cp(x, 2), 2).tolist() == x.tolist()
        with pytest.raises(InvalidInputError):
            add_cp(x, 7)


class TestGenerator:
    """ChannelGenerator."""

    def test_fixed_channels(self):
        generator = ChannelGenerator(ChannelKind.STATIC, 32)
        assert generator.is_fixed
        assert generator.max_order == 3
        assert generator.realization(None) is generator.realization(None)

    def test_fading_needs_profile(self):
        with pytest.raises(InvalidInputError):
            ChannelGenerator(ChannelKind.RAYLEIGH, 32)

    def test_fading_draws_depend_on_block(self):
        generator = ChannelGenerator(ChannelKind.RAYLEIGH, 32, pdp=exp_profile(32))
        assert not generator.is_fixed
        assert generator.max_order == 7
        first = generator.realization(block_rng(0, 0)).taps
        assert_allclose(generator.realization(block_rng(0, 0)).taps, first)
        assert not np.allclose(generator.realization(block_rng(0, 1)).taps, first)

    def test_deep_fade_generator(self):
        generator = ChannelGenerator(ChannelKind.DEEP_FADE_EXCLUDED, 32, pdp=exp_profile(32), threshold_db=-20.0)
        channel = generator.realization(block_rng(1))
        assert np.min(np.abs(channel.freq_response)) >= 0.1
