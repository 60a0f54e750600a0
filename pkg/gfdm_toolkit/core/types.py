"""
Value types shared by the transmitter, receiver and analysis code.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from gfdm_toolkit.core.errors import InvalidInputError

# Dense matrices above this block size are refused unless explicitly allowed
DENSE_SIZE_LIMIT = 4096


def _frozen_array(values: Any, dtype=complex) -> np.ndarray:
    """Copy values into a read-only array."""
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GfdmParams:
    """
    Block dimensions: K subcarriers carrying M subsymbols each.
    """
    K: int
    M: int

    def __post_init__(self):
        """Validate dimensions."""
        if int(self.K) != self.K or int(self.M) != self.M:
            raise InvalidInputError(f"K and M must be integers, got K={self.K}, M={self.M}")
        if self.K < 1 or self.M < 1:
            raise InvalidInputError(f"K and M must be positive, got K={self.K}, M={self.M}")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "M", int(self.M))

    @property
    def D(self) -> int:
        """Block size K*M."""
        return self.K * self.M


@dataclass(frozen=True)
class Tolerance:
    """
    Numerical thresholds.

    rel_eps bounds relative deviations (unit magnitude checks, round trips).
    zero_eps is the absolute threshold below which an entry magnitude counts
    as zero; None means 1e-12 times the largest magnitude under test.
    spread_eps bounds the max/min magnitude ratio used for constancy tests.
    """
    rel_eps: float = 1e-10
    zero_eps: Optional[float] = None
    spread_eps: float = 1e-9

    def __post_init__(self):
        """Validate thresholds."""
        if self.rel_eps < 0:
            raise InvalidInputError("rel_eps must be nonnegative")
        if self.zero_eps is not None and self.zero_eps < 0:
            raise InvalidInputError("zero_eps must be nonnegative")
        if self.spread_eps < 0:
            raise InvalidInputError("spread_eps must be nonnegative")

    def zero_threshold(self, magnitudes: np.ndarray) -> float:
        """
        Resolve the zero threshold for a set of magnitudes.

        Args:
            magnitudes: Entry magnitudes under test

        Returns:
            Absolute threshold
        """
        if self.zero_eps is not None:
            return float(self.zero_eps)
        peak = float(np.max(magnitudes)) if np.size(magnitudes) else 0.0
        return 1e-12 * peak

    def is_constant(self, magnitudes: np.ndarray) -> bool:
        """Return True if max/min of the magnitudes is within 1 + spread_eps."""
        lo = float(np.min(magnitudes))
        hi = float(np.max(magnitudes))
        if lo <= 0.0:
            return hi <= 0.0
        return hi / lo <= 1.0 + self.spread_eps


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True, eq=False)
class CharacteristicMatrix:
    """
    K x M matrix that fully determines a GFDM modulation matrix.

    Row k is the subcarrier-phase index, column m the subsymbol-frequency
    index. When ``shifted`` is set the entries hold the phase-shifted
    variant with twiddles exp(-j2*pi*k*m/D) applied.
    """
    params: GfdmParams
    entries: np.ndarray
    shifted: bool = False

    def __post_init__(self):
        """Validate shape and finiteness."""
        entries = _frozen_array(self.entries)
        if entries.shape != (self.params.K, self.params.M):
            raise InvalidInputError(
                f"Characteristic matrix must be {self.params.K}x{self.params.M}, got {entries.shape}"
            )
        if not np.all(np.isfinite(entries)):
            raise InvalidInputError("Characteristic matrix has non-finite entries")
        object.__setattr__(self, "entries", entries)

    @property
    def magnitudes(self) -> np.ndarray:
        """Entrywise magnitudes (identical for shifted and unshifted forms)."""
        return np.abs(self.entries)

    def scaled(self, factor: complex) -> "CharacteristicMatrix":
        """Return a copy with every entry multiplied by factor."""
        return CharacteristicMatrix(self.params, self.entries * factor, self.shifted)


@dataclass(frozen=True, eq=False)
class PrototypeFilter:
    """
    Time-domain prototype transmit filter g of length D.
    """
    params: GfdmParams
    taps: np.ndarray

    def __post_init__(self):
        """Validate length."""
        taps = _frozen_array(np.ravel(self.taps))
        if taps.shape != (self.params.D,):
            raise InvalidInputError(f"Filter must have {self.params.D} taps, got {taps.size}")
        object.__setattr__(self, "taps", taps)

    @property
    def energy(self) -> float:
        """Squared L2 norm of the taps."""
        return float(np.vdot(self.taps, self.taps).real)


@dataclass(frozen=True, eq=False)
class DenseGfdmMatrix:
    """
    Explicit D x D GFDM matrix, used as a reference for the fast paths.
    """
    params: GfdmParams
    entries: np.ndarray

    def __post_init__(self):
        """Validate shape."""
        entries = _frozen_array(self.entries)
        D = self.params.D
        if entries.shape != (D, D):
            raise InvalidInputError(f"Dense GFDM matrix must be {D}x{D}, got {entries.shape}")
        object.__setattr__(self, "entries", entries)

    def column(self, k: int, m: int) -> np.ndarray:
        """Return the pulse for subcarrier k, subsymbol m."""
        return self.entries[:, k + m * self.params.K]
