"""
Tests for PSD evaluation and OOB leakage.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gfdm_toolkit.analysis.spectrum import (
    BandSpec,
    InterpolationFilter,
    OOB_REFERENCE_KINDS,
    SpectrumGrid,
    oob_leakage,
    oob_reference_setup,
    psd,
    sinc_d,
    subsymbol_pulse,
    subsymbol_response_closed,
    subsymbol_response_dtft,
)
from gfdm_toolkit.core.characteristic import freq_from_char, time_from_char
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import GfdmParams
from gfdm_toolkit.filters import FilterKind, FilterSpec, create_filter


def _rc(K=4, M=3):
    return create_filter(FilterSpec(FilterKind.RC, rolloff=0.5), GfdmParams(K, M))


class TestPeriodicSinc:

    def test_values(self):
        assert sinc_d(np.array([0.0]), 7)[0] == pytest.approx(1.0)
        assert sinc_d(np.array([2 * np.pi]), 4)[0] == pytest.approx(-1.0)
        assert sinc_d(np.array([2 * np.pi]), 5)[0] == pytest.approx(1.0)
        assert sinc_d(np.array([2 * np.pi / 6]), 6)[0] == pytest.approx(0.0, abs=1e-15)

    def test_continuous_near_poles(self):
        x = np.array([2 * np.pi - 1e-7, 2 * np.pi])
        values = sinc_d(x, 4)
        assert values[0] == pytest.approx(values[1], abs=1e-6)


class TestSubsymbolResponses:

    def test_pulse_is_shifted_prototype(self):
        G = _rc()
        g = time_from_char(G)
        pulse = subsymbol_pulse(g, 1, cp_len=2)
        assert pulse.size == 14
        assert_allclose(pulse[2:], np.roll(g.taps, 4))
        assert_allclose(pulse[:2], pulse[-2:])

    @pytest.mark.parametrize("m", [0, 1, 2])
    def test_closed_form_matches_summation(self, rng, m):
        G = _rc()
        omega = rng.uniform(-np.pi, np.pi, 25)
        closed = subsymbol_response_closed(freq_from_char(G), G.params, m, omega)
        direct = subsymbol_response_dtft(time_from_char(G), m, omega)
        assert_allclose(closed, direct, atol=1e-10)


class TestPsd:
    """psd() methods agree with each other."""

    def test_closed_form_matches_dtft(self, rng):
        G = _rc()
        f = np.sort(rng.uniform(-0.5, 0.5, 40))
        closed = psd(G, frequencies=f, method="closed_form")
        direct = psd(G, frequencies=f, method="dtft")
        assert_allclose(closed.psd_values, direct.psd_values, rtol=1e-8, atol=1e-14)

    def test_fft_grid_matches_dtft(self):
        G = _rc()
        grid = psd(G, active_subcarriers=[0, 1, 3], active_subsymbols=[1, 2], cp_len=2, oversample=4)
        direct = psd(G, active_subcarriers=[0, 1, 3], active_subsymbols=[1, 2], cp_len=2,
                     frequencies=grid.frequencies, method="dtft")
        scale = np.max(direct.psd_values)
        assert_allclose(grid.psd_values, direct.psd_values, atol=1e-10 * scale)

    def test_grid_covers_interpolation_band(self):
        grid = psd(_rc(), sample_rate=2.0)
        edge = InterpolationFilter().bandwidth(2.0)
        assert grid.frequencies[0] <= -edge
        assert grid.frequencies[-1] >= edge
        assert grid.psd_values[0] == pytest.approx(0.0)

    def test_frequency_domain_filter_input(self):
        G = _rc()
        from_char = psd(G, oversample=2)
        from_freq = psd(freq_from_char(G), params=G.params, oversample=2)
        assert_allclose(from_freq.psd_values, from_char.psd_values, atol=1e-12)

    def test_frequency_domain_filter_needs_params(self):
        with pytest.raises(InvalidInputError):
            psd(freq_from_char(_rc()))

    def test_closed_form_rejects_prefix(self):
        with pytest.raises(InvalidInputError):
            psd(_rc(), cp_len=2, frequencies=np.linspace(-0.5, 0.5, 5), method="closed_form")

    def test_unknown_method(self):
        with pytest.raises(InvalidInputError):
            psd(_rc(), method="welch")

    def test_table_export(self):
        frame = psd(_rc(), oversample=2).to_frame()
        assert list(frame.columns) == ["frequency_hz", "psd"]


class TestInterpolationFilter:

    def test_response(self):
        interp = InterpolationFilter(0.2)
        f = np.array([0.0, 0.4, 0.5, 0.6, 0.7])
        assert_allclose(interp.response(f, 1.0), [1.0, 1.0, 0.5, 0.0, 0.0], atol=1e-12)

    def test_rolloff_range(self):
        with pytest.raises(InvalidInputError):
            InterpolationFilter(1.2)


class TestLeakage:
    """OOB leakage from a spectrum grid."""

    def test_flat_spectrum_is_zero_db(self):
        f = np.linspace(-4.0, 4.0, 81)
        spectrum = SpectrumGrid(f, np.full(81, 3.0), 1.0)
        bands = BandSpec(in_band=((-1.0, 1.0),), out_band=((-3.0, -2.0), (2.0, 3.0)))
        assert oob_leakage(spectrum, bands) == pytest.approx(0.0, abs=1e-12)

    def test_step_spectrum(self):
        f = np.linspace(-4.0, 4.0, 801)
        values = np.where(np.abs(f) <= 1.5, 1.0, 0.01)
        spectrum = SpectrumGrid(f, values, 1.0)
        bands = BandSpec(in_band=((-1.0, 1.0),), out_band=((2.0, 3.0),))
        assert oob_leakage(spectrum, bands) == pytest.approx(-20.0, abs=1e-9)

    def test_overlapping_bands(self):
        with pytest.raises(InvalidInputError):
            BandSpec(in_band=((-1.0, 1.0),), out_band=((0.5, 2.0),))

    def test_grid_must_cover_bands(self):
        spectrum = SpectrumGrid(np.linspace(-1.0, 1.0, 11), np.ones(11), 1.0)
        with pytest.raises(InvalidInputError):
            oob_leakage(spectrum, BandSpec(in_band=((-0.5, 0.5),), out_band=((0.8, 1.5),)))

    def test_normalized_in_band_level(self):
        f = np.linspace(-4.0, 4.0, 81)
        spectrum = SpectrumGrid(f, np.full(81, 3.0), 1.0)
        bands = BandSpec(in_band=((-1.0, 1.0),), out_band=((2.0, 3.0),))
        assert_allclose(spectrum.normalized(bands).psd_values, 1.0)

    def test_invalid_grid(self):
        with pytest.raises(InvalidInputError):
            SpectrumGrid(np.array([0.0, 0.0, 1.0]), np.ones(3), 1.0)
        with pytest.raises(InvalidInputError):
            SpectrumGrid(np.array([0.0, 1.0]), np.array([1.0, -1.0]), 1.0)


class TestReferenceSetups:

    def test_kinds(self):
        assert OOB_REFERENCE_KINDS == ("ofdm", "dirichlet", "modified_dirichlet", "rc")
        with pytest.raises(InvalidInputError):
            oob_reference_setup("rrc")

    def test_same_number_of_resource_elements(self):
        ofdm = oob_reference_setup("ofdm")
        gfdm = oob_reference_setup("dirichlet")
        assert len(ofdm.active_subcarriers) == len(gfdm.active_subcarriers) * len(gfdm.active_subsymbols)
        assert gfdm.active_subsymbols[0] == 1
        assert ofdm.G.params.D == gfdm.G.params.D

    def test_guard_carriers_shrink_out_band(self):
        narrow = oob_reference_setup("rc", n_gc=6).bands
        wide = oob_reference_setup("rc", n_gc=1).bands
        assert narrow.out_band_width == pytest.approx(wide.out_band_width - 2 * 5 * 1.92e6 / 128)

    @pytest.mark.slow
    @pytest.mark.parametrize("n_gc, expected", [
        (1, {"ofdm": -35.1, "dirichlet": -47.7, "modified_dirichlet": -48.0, "rc": -51.0}),
        (6, {"ofdm": -37.1, "dirichlet": -51.5, "modified_dirichlet": -51.8, "rc": -54.8}),
    ])
    def test_leakage_values(self, n_gc, expected):
        leakage = {kind: oob_reference_setup(kind, n_gc=n_gc).leakage() for kind in OOB_REFERENCE_KINDS}
        for kind, value in expected.items():
            assert leakage[kind] == pytest.approx(value, abs=1.5)
        assert leakage["rc"] < leakage["modified_dirichlet"] < leakage["dirichlet"] < leakage["ofdm"]
