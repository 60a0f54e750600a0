"""
Gray-mapped square QAM constellations with unit average energy.
"""

from typing import Dict, List, Tuple

import numpy as np

from gfdm_toolkit.core.errors import InvalidInputError

# Gray order of the per-axis amplitude levels, indexed by the axis bits
_AXIS_LEVELS: Dict[int, Tuple[float, ...]] = {
    1: (-1.0, 1.0),
    # 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    2: (-3.0, -1.0, 3.0, 1.0),
}


class Constellation:
    """
    Square QAM constellation; point i carries the bits of i, MSB first.

    The first half of the bits select the in-phase level and the second
    half the quadrature level, each Gray coded.
    """

    def __init__(self, name: str, bits_per_symbol: int):
        """
        Initialize the constellation.

        Args:
            name: Display name
            bits_per_symbol: 2 (4QAM) or 4 (16QAM)
        """
        axis_bits = bits_per_symbol // 2
        if bits_per_symbol % 2 or axis_bits not in _AXIS_LEVELS:
            raise InvalidInputError(f"Unsupported bits per symbol: {bits_per_symbol}")
        self.name = name
        self.bits_per_symbol = bits_per_symbol
        self.order = 2 ** bits_per_symbol

        levels = np.array(_AXIS_LEVELS[axis_bits])
        labels = np.arange(self.order)
        in_phase = levels[labels >> axis_bits]
        quadrature = levels[labels & ((1 << axis_bits) - 1)]
        points = in_phase + 1j * quadrature
        self.points = points / np.sqrt(np.mean(np.abs(points) ** 2))
        self.points.setflags(write=False)

    @property
    def min_distance_squared(self) -> float:
        """Smallest squared distance between two points."""
        diff = np.abs(self.points[:, None] - self.points[None, :]) ** 2
        return float(np.min(diff[~np.eye(self.order, dtype=bool)]))

    def map_indices(self, indices: np.ndarray) -> np.ndarray:
        """Symbols for integer labels 0..order-1."""
        indices = np.asarray(indices)
        if np.any((indices < 0) | (indices >= self.order)):
            raise InvalidInputError(f"Labels must lie in 0..{self.order - 1}")
        return self.points[indices]

    def slice_indices(self, symbols: np.ndarray) -> np.ndarray:
        """Minimum-distance decision, returned as labels."""
        symbols = np.asarray(symbols, dtype=complex)
        distances = np.abs(symbols.reshape(-1, 1) - self.points[None, :])
        return np.argmin(distances, axis=1).reshape(symbols.shape)

    def map(self, bits: np.ndarray) -> np.ndarray:
        """
        Map a bit stream to symbols.

        Args:
            bits: 0/1 values, length a multiple of bits_per_symbol

        Returns:
            One symbol per group of bits
        """
        bits = np.asarray(bits, dtype=int).ravel()
        if bits.size % self.bits_per_symbol:
            raise InvalidInputError(
                f"Bit count {bits.size} is not a multiple of {self.bits_per_symbol}"
            )
        if np.any((bits != 0) & (bits != 1)):
            raise InvalidInputError("Bits must be 0 or 1")
        weights = 1 << np.arange(self.bits_per_symbol - 1, -1, -1)
        labels = bits.reshape(-1, self.bits_per_symbol) @ weights
        return self.points[labels]

    def demap(self, symbols: np.ndarray) -> np.ndarray:
        """
        Hard-decision bits of the nearest points.

        Args:
            symbols: Received symbols

        Returns:
            Bit stream, bits_per_symbol per symbol
        """
        labels = self.slice_indices(np.ravel(symbols))
        shifts = np.arange(self.bits_per_symbol - 1, -1, -1)
        return ((labels[:, None] >> shifts) & 1).reshape(-1)

    def random_indices(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Uniform labels."""
        return rng.integers(0, self.order, size=size)


_CONSTELLATIONS = {
    "4qam": 2,
    "16qam": 4,
}


def get_constellation(name: str) -> Constellation:
    """
    Look up a constellation by name.

    Args:
        name: '4qam' or '16qam' (case and dashes ignored)

    Returns:
        Constellation
    """
    key = str(name).strip().lower().replace("-", "")
    if key == "qpsk":
        key = "4qam"
    if key not in _CONSTELLATIONS:
        raise InvalidInputError(f"Unknown constellation: {name}")
    return Constellation(key.upper(), _CONSTELLATIONS[key])


def get_available_constellations() -> List[str]:
    """Return the supported constellation names."""
    return list(_CONSTELLATIONS)


def qam_map(bits: np.ndarray, constellation: str = "16qam") -> np.ndarray:
    """Map bits with a named constellation."""
    return get_constellation(constellation).map(bits)


def qam_demap(symbols: np.ndarray, constellation: str = "16qam") -> np.ndarray:
    """Demap symbols with a named constellation."""
    return get_constellation(constellation).demap(symbols)
