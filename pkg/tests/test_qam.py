"""
Tests for QAM mapping.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.sim.qam import get_available_constellations, get_constellation, qam_demap, qam_map


class TestConstellations:

    @pytest.mark.parametrize("name, d2", [("4qam", 2.0), ("16qam", 0.4)])
    def test_unit_energy_and_spacing(self, name, d2):
        constellation = get_constellation(name)
        assert np.mean(np.abs(constellation.points) ** 2) == pytest.approx(1.0)
        assert constellation.min_distance_squared == pytest.approx(d2)

    def test_lookup(self):
        assert get_available_constellations() == ["4qam", "16qam"]
        assert get_constellation("QPSK").order == 4
        assert get_constellation("16-QAM").order == 16
        with pytest.raises(InvalidInputError):
            get_constellation("64qam")

    def test_gray_neighbours_differ_in_one_bit(self):
        constellation = get_constellation("16qam")
        points = constellation.points
        for i in range(16):
            for j in range(16):
                if abs(abs(points[i] - points[j]) ** 2 - 0.4) < 1e-9:
                    assert bin(i ^ j).count("1") == 1


class TestMapping:

    def test_bits_round_trip(self, rng):
        bits = rng.integers(0, 2, 400)
        assert qam_demap(qam_map(bits)).tolist() == bits.tolist()

    def test_slicing_tolerates_small_noise(self, rng):
        constellation = get_constellation("16qam")
        labels = constellation.random_indices(rng, 200)
        noisy = constellation.map_indices(labels) + 0.05 * (rng.standard_normal(200) + 1j * rng.standard_normal(200))
        assert constellation.slice_indices(noisy).tolist() == labels.tolist()

    def test_msb_selects_in_phase_level(self):
        symbols = get_constellation("4qam").map(np.array([0, 0, 1, 0]))
        assert_allclose(symbols, np.array([-1 - 1j, 1 - 1j]) / np.sqrt(2))

    def test_bit_count_checked(self):
        with pytest.raises(InvalidInputError):
            qam_map(np.array([0, 1, 1]))

    def test_bit_values_checked(self):
        with pytest.raises(InvalidInputError):
            qam_map(np.array([0, 1, 2, 0]))

    def test_label_range_checked(self):
        with pytest.raises(InvalidInputError):
            get_constellation("4qam").map_indices(np.array([4]))
