"""
Frame, equalizer and receiver-output types plus cyclic prefix handling.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Tuple

import numpy as np

from gfdm_toolkit.core.characteristic import unvect, vect
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import GfdmParams


def _index_set(values: Optional[Iterable[int]], upper: int, label: str) -> Tuple[int, ...]:
    if values is None:
        return tuple(range(upper))
    indices = tuple(sorted({int(v) for v in values}))
    if not indices:
        raise InvalidInputError(f"Active {label} set is empty")
    if indices[0] < 0 or indices[-1] >= upper:
        raise InvalidInputError(f"Active {label} indices must lie in 0..{upper - 1}, got {indices}")
    return indices


@dataclass(frozen=True, eq=False)
class GfdmFrame:
    """
    One block of data symbols d, indexed k + m*K, with its allocation.
    """
    params: GfdmParams
    data: np.ndarray
    active_subcarriers: Optional[Tuple[int, ...]] = None
    active_subsymbols: Optional[Tuple[int, ...]] = None
    cp_len: int = 0

    def __post_init__(self):
        """Validate data length, allocation and prefix length."""
        params = self.params
        data = np.array(np.ravel(self.data), dtype=complex)
        if data.shape != (params.D,):
            raise InvalidInputError(f"Frame needs {params.D} symbols, got {data.size}")
        if not 0 <= int(self.cp_len) <= params.D:
            raise InvalidInputError(f"CP length must lie in 0..{params.D}, got {self.cp_len}")

        subcarriers = _index_set(self.active_subcarriers, params.K, "subcarrier")
        subsymbols = _index_set(self.active_subsymbols, params.M, "subsymbol")
        object.__setattr__(self, "active_subcarriers", subcarriers)
        object.__setattr__(self, "active_subsymbols", subsymbols)
        object.__setattr__(self, "cp_len", int(self.cp_len))

        if np.any(data[~self.active_mask] != 0):
            raise InvalidInputError("Frame carries nonzero symbols outside the active set")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_symbols(cls,
                     params: GfdmParams,
                     symbols: np.ndarray,
                     active_subcarriers: Optional[Iterable[int]] = None,
                     active_subsymbols: Optional[Iterable[int]] = None,
                     cp_len: int = 0) -> "GfdmFrame":
        """
        Place a symbol stream onto the active positions in index order.

        Args:
            params: Block dimensions
            symbols: One symbol per active (k, m) pair
            active_subcarriers: Active subcarrier indices (all if None)
            active_subsymbols: Active subsymbol indices (all if None)
            cp_len: Cyclic prefix length

        Returns:
            Frame with zeros on inactive positions
        """
        subcarriers = _index_set(active_subcarriers, params.K, "subcarrier")
        subsymbols = _index_set(active_subsymbols, params.M, "subsymbol")
        mask = _allocation_mask(params, subcarriers, subsymbols)
        symbols = np.ravel(symbols)
        if symbols.size != int(mask.sum()):
            raise InvalidInputError(f"Allocation holds {int(mask.sum())} symbols, got {symbols.size}")
        data = np.zeros(params.D, dtype=complex)
        data[mask] = symbols
        return cls(params, data, subcarriers, subsymbols, cp_len)

    @property
    def active_mask(self) -> np.ndarray:
        """Boolean mask over the D symbol positions."""
        return _allocation_mask(self.params, self.active_subcarriers, self.active_subsymbols)

    @property
    def is_full(self) -> bool:
        """True when every subcarrier and subsymbol is active."""
        return (len(self.active_subcarriers) == self.params.K
                and len(self.active_subsymbols) == self.params.M)

    @property
    def data_matrix(self) -> np.ndarray:
        """Symbols as a K x M matrix."""
        return unvect(self.data, self.params.K, self.params.M)

    def subcarrier(self, k: int) -> np.ndarray:
        """The M symbols d_k carried on subcarrier k."""
        return self.data_matrix[k, :]

    def require_full(self) -> None:
        """Raise if the allocation does not cover the whole block."""
        if not self.is_full:
            raise InvalidInputError("MMSE receivers require every subcarrier and subsymbol to be active")


def _allocation_mask(params: GfdmParams, subcarriers: Tuple[int, ...], subsymbols: Tuple[int, ...]) -> np.ndarray:
    mask = np.zeros((params.K, params.M), dtype=bool)
    mask[np.ix_(list(subcarriers), list(subsymbols))] = True
    return vect(mask)


@dataclass(frozen=True, eq=False)
class EqualizerTaps:
    """
    Per-bin complex equalizer gains F_l, l = 0..D-1.
    """
    gains: np.ndarray

    def __post_init__(self):
        """Validate gains."""
        gains = np.array(np.ravel(self.gains), dtype=complex)
        if np.any(np.isnan(gains)):
            raise InvalidInputError("Equalizer taps contain NaN")
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)

    def apply(self, spectrum: np.ndarray) -> np.ndarray:
        """Multiply a length-D spectrum bin by bin."""
        spectrum = np.asarray(spectrum)
        if spectrum.shape != self.gains.shape:
            raise InvalidInputError(f"Spectrum must have {self.gains.size} bins, got {spectrum.size}")
        return self.gains * spectrum


@dataclass(frozen=True, eq=False)
class RxReport:
    """
    Receiver output.

    gains holds the diagonal of B*C*A as a K x M matrix when the receiver
    is biased (MMSE family); error_variances holds sigma^2_{k,m} when they
    can be computed.
    """
    params: GfdmParams
    estimates: np.ndarray
    error_variances: Optional[np.ndarray] = None
    gains: Optional[np.ndarray] = None
    pseudo_inverse: bool = False
    approximate: bool = False

    def __post_init__(self):
        """Validate dimensions."""
        estimates = np.array(np.ravel(self.estimates), dtype=complex)
        if estimates.shape != (self.params.D,):
            raise InvalidInputError(f"Estimates must have {self.params.D} entries, got {estimates.size}")
        object.__setattr__(self, "estimates", estimates)
        shape = (self.params.K, self.params.M)
        for name in ("error_variances", "gains"):
            value = getattr(self, name)
            if value is None:
                continue
            value = np.array(value, dtype=float if name == "error_variances" else complex)
            if value.shape != shape:
                raise InvalidInputError(f"{name} must be {shape[0]}x{shape[1]}, got {value.shape}")
            object.__setattr__(self, name, value)

    def unbiased(self) -> np.ndarray:
        """Estimates divided by their gains (unchanged if the receiver is unbiased)."""
        if self.gains is None:
            return self.estimates
        return self.estimates / vect(self.gains)


def add_cp(x: np.ndarray, cp_len: int) -> np.ndarray:
    """
    Prepend the last cp_len samples of a block.

    Args:
        x: Length-D block
        cp_len: Prefix length, at most D

    Returns:
        Length D + cp_len block
    """
    x = np.asarray(x)
    if not 0 <= cp_len <= x.size:
        raise InvalidInputError(f"CP length must lie in 0..{x.size}, got {cp_len}")
    if cp_len == 0:
        return x.copy()
    return np.concatenate((x[-cp_len:], x))


def remove_cp(y: np.ndarray, cp_len: int) -> np.ndarray:
    """
    Drop the first cp_len samples of a received block.

    Args:
        y: Length D + cp_len block
        cp_len: Prefix length

    Returns:
        Length-D block
    """
    y = np.asarray(y)
    if not 0 <= cp_len <= y.size - cp_len:
        raise InvalidInputError(f"CP length {cp_len} does not fit a block of {y.size} samples")
    return y[cp_len:].copy()
