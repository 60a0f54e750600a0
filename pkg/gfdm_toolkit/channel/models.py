"""
Channel models: AWGN, static multipath and Rayleigh fading.

Frequency responses use the unnormalized DFT, C_l = sum_n c[n] exp(-j2*pi*n*l/D),
unlike the unitary transforms used inside the modem.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from gfdm_toolkit.core.errors import InvalidInputError, RejectionLimitError

# Set up logging
logger = logging.getLogger(__name__)

# Consecutive rejections tolerated by the deep-fade sampler
MAX_REJECTIONS = 10 ** 6

STATIC_FOUR_TAPS = (
    -0.1518 + 0.6475j,
    0.2701 + 0.3063j,
    0.5703 + 0.0767j,
    -0.0900 + 0.2274j,
)

EPA_DELAYS = (0, 3, 7, 9, 11, 19, 41)
EPA_GAINS_DB = (0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8)


def block_rng(seed: int, *counters: int) -> np.random.Generator:
    """
    Independent generator for one (seed, counters...) coordinate.

    Streams depend only on the coordinate, never on the order in which
    blocks are processed.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2 ** 64 - 1), *[int(c) for c in counters]]))


def complex_gaussian(rng: np.random.Generator, size: Any, variance: Any = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples with the given variance."""
    scale = np.sqrt(np.asarray(variance, dtype=float) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """
    Multipath taps c[0..L] and their D-point frequency response.
    """
    taps: np.ndarray
    D: int
    rejections: int = 0
    freq_response: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        """Validate taps and cache the frequency response."""
        taps = np.array(np.ravel(self.taps), dtype=complex)
        if taps.size < 1:
            raise InvalidInputError("Channel needs at least one tap")
        if taps.size > self.D:
            raise InvalidInputError(f"Channel has {taps.size} taps, more than the block size {self.D}")
        taps.setflags(write=False)
        freq_response = np.fft.fft(taps, self.D)
        freq_response.setflags(write=False)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "freq_response", freq_response)

    @property
    def order(self) -> int:
        """Index of the last tap."""
        return self.taps.size - 1

    def to_frame(self) -> pd.DataFrame:
        """Taps as a DataFrame with index, re, im columns."""
        return pd.DataFrame({
            "index": np.arange(self.taps.size),
            "re": self.taps.real,
            "im": self.taps.imag,
        })

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, D: int) -> "ChannelRealization":
        """Rebuild a realization from a DataFrame written by to_frame."""
        ordered = frame.sort_values("index")
        return cls(ordered["re"].to_numpy() + 1j * ordered["im"].to_numpy(), D)


@dataclass(frozen=True, eq=False)
class PowerDelayProfile:
    """
    Tap variances N_n for n = 0..L.
    """
    variances: np.ndarray
    normalized: bool = True
    name: str = "custom"

    def __post_init__(self):
        """Validate and optionally normalize."""
        variances = np.array(np.ravel(self.variances), dtype=float)
        if variances.size < 1 or np.any(variances < 0) or not np.all(np.isfinite(variances)):
            raise InvalidInputError("Power delay profile needs finite nonnegative variances")
        total = variances.sum()
        if total <= 0:
            raise InvalidInputError("Power delay profile has zero total power")
        if self.normalized:
            variances = variances / total
        variances.setflags(write=False)
        object.__setattr__(self, "variances", variances)

    @property
    def length(self) -> int:
        """Number of taps."""
        return self.variances.size


def exp_profile(D: int, decay: float = 0.64) -> PowerDelayProfile:
    """
    Exponential profile N_n = decay^n for 0 <= n < D/4, normalized.
    """
    n = np.arange(max(1, int(np.ceil(D / 4))))
    return PowerDelayProfile(decay ** n, normalized=True, name="exp")


def epa_profile() -> PowerDelayProfile:
    """
    Sample-spaced profile with taps at delays 0, 3, 7, 9, 11, 19, 41.
    """
    variances = np.zeros(EPA_DELAYS[-1] + 1)
    variances[list(EPA_DELAYS)] = 10.0 ** (np.array(EPA_GAINS_DB) / 10.0)
    return PowerDelayProfile(variances, normalized=True, name="epa")


def get_profile(name: str, D: int) -> PowerDelayProfile:
    """
    Look up a named power delay profile.

    Args:
        name: 'exp' or 'epa'
        D: Block size

    Returns:
        Normalized profile
    """
    name = name.strip().lower()
    if name == "exp":
        return exp_profile(D)
    elif name == "epa":
        return epa_profile()
    raise InvalidInputError(f"Unknown power delay profile: {name}")


def awgn_channel(D: int) -> ChannelRealization:
    """Single unit tap."""
    return ChannelRealization(np.ones(1), D)


def static_four_tap_channel(D: int) -> ChannelRealization:
    """The fixed four-tap multipath channel of the static-channel runs."""
    return ChannelRealization(np.array(STATIC_FOUR_TAPS), D)


def sample_rayleigh(pdp: PowerDelayProfile, D: int, rng: np.random.Generator) -> ChannelRealization:
    """
    Draw independent complex Gaussian taps with the profile's variances.

    Args:
        pdp: Power delay profile
        D: Block size
        rng: Random generator

    Returns:
        Channel realization
    """
    if pdp.length > D:
        raise InvalidInputError(f"Profile has {pdp.length} taps, more than the block size {D}")
    taps = complex_gaussian(rng, pdp.length, pdp.variances)
    return ChannelRealization(taps, D)


def sample_dfe_rayleigh(pdp: PowerDelayProfile,
                        D: int,
                        rng: np.random.Generator,
                        threshold_db: float = -30.0,
                        max_rejections: int = MAX_REJECTIONS) -> ChannelRealization:
    """
    Rayleigh draw conditioned on every |C_l| reaching the threshold.

    Args:
        pdp: Power delay profile
        D: Block size
        rng: Random generator
        threshold_db: Minimum bin gain in dB (-inf disables rejection)
        max_rejections: Consecutive rejections before giving up

    Returns:
        Accepted realization with its rejection count
    """
    threshold = 10.0 ** (threshold_db / 20.0)
    rejections = 0
    while True:
        channel = sample_rayleigh(pdp, D, rng)
        if np.min(np.abs(channel.freq_response)) >= threshold:
            if rejections:
                logger.debug(f"Deep-fade sampler accepted after {rejections} rejections")
            return ChannelRealization(channel.taps, D, rejections=rejections)
        rejections += 1
        if rejections > max_rejections:
            raise RejectionLimitError(
                f"Deep-fade sampler rejected {rejections} draws in a row at threshold {threshold_db} dB"
            )


def apply_channel(x: np.ndarray,
                  channel: ChannelRealization,
                  n0: float,
                  rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Circular convolution with the channel plus complex white noise.

    Args:
        x: Length-D block
        channel: Channel realization
        n0: Noise variance per sample
        rng: Random generator (required when n0 > 0)

    Returns:
        Received length-D block
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (channel.D,):
        raise InvalidInputError(f"Block must have {channel.D} samples, got {x.shape}")
    if n0 < 0:
        raise InvalidInputError(f"Noise variance must be nonnegative, got {n0}")
    y = np.fft.ifft(channel.freq_response * np.fft.fft(x))
    if n0 > 0:
        if rng is None:
            raise InvalidInputError("A random generator is required when n0 > 0")
        y = y + complex_gaussian(rng, y.size, n0)
    return y


def convolve_with_prefix(x_cp: np.ndarray, channel: ChannelRealization, noise: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Linear convolution of a CP-extended block with the channel taps.

    The tail beyond the block length is dropped (it leaks into the next
    block's prefix, which the receiver discards).

    Args:
        x_cp: Block with cyclic prefix, length D + L
        channel: Channel realization
        noise: Optional additive noise of the same length

    Returns:
        Received samples, length D + L
    """
    x_cp = np.asarray(x_cp, dtype=complex)
    y = np.convolve(x_cp, channel.taps)[:x_cp.size]
    if noise is not None:
        y = y + noise
    return y

