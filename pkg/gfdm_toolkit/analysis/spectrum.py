"""
Power spectral density and out-of-band leakage of GFDM signals.

A block with cyclic prefix is D' = D + L samples long. Subsymbol m on
subcarrier 0 sends g_m[n] = g[(n - m*K - L) mod D] for n < D', and the
analog PSD after a D/A converter with sample period T_s and interpolation
response P(f) is

    S(f) = E_S |P(f)|^2 / (D' T_s) * sum_{k in K} sum_{m in M} |G_m(2*pi*(f T_s - k/K))|^2

where G_m is the DTFT of g_m[n].
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import fft as sp_fft
from scipy.integrate import trapezoid

from gfdm_toolkit.core.characteristic import char_from_freq, coerce_characteristic, freq_from_char, time_from_char
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams, PrototypeFilter
from gfdm_toolkit.filters import FilterKind, FilterSpec, create_filter

# Set up logging
logger = logging.getLogger(__name__)

FilterLike = Union[CharacteristicMatrix, PrototypeFilter]

PSD_METHODS = ("fft", "dtft", "closed_form")


@dataclass(frozen=True)
class InterpolationFilter:
    """
    Sample-level raised-cosine interpolation filter of the D/A converter.
    """
    rolloff: float = 0.1

    def __post_init__(self):
        """Validate roll-off."""
        if not 0.0 <= self.rolloff <= 1.0:
            raise InvalidInputError(f"Interpolation roll-off must lie in [0, 1], got {self.rolloff}")

    def bandwidth(self, sample_rate: float) -> float:
        """One-sided edge (1 + alpha) / (2 T_s) beyond which P(f) vanishes."""
        return (1.0 + self.rolloff) * sample_rate / 2.0

    def response(self, f: np.ndarray, sample_rate: float) -> np.ndarray:
        """
        Analytic frequency response P(f), equal to T_s in the passband.

        Args:
            f: Frequencies (Hz)
            sample_rate: 1 / T_s (Hz)

        Returns:
            Real response at each frequency
        """
        Ts = 1.0 / sample_rate
        af = np.abs(np.asarray(f, dtype=float))
        alpha = self.rolloff
        edge_low = (1.0 - alpha) / (2.0 * Ts)
        edge_high = (1.0 + alpha) / (2.0 * Ts)
        out = np.where(af <= edge_low, Ts, 0.0)
        if alpha > 0.0:
            transition = (af > edge_low) & (af <= edge_high)
            roll = Ts / 2.0 * (1.0 + np.cos(np.pi * Ts / alpha * (af - edge_low)))
            out = np.where(transition, roll, out)
        return out


@dataclass(frozen=True, eq=False)
class SpectrumGrid:
    """
    PSD samples on a strictly increasing frequency grid (Hz).
    """
    frequencies: np.ndarray
    psd_values: np.ndarray
    sample_rate: float

    def __post_init__(self):
        """Validate grid."""
        f = np.array(self.frequencies, dtype=float).ravel()
        s = np.array(self.psd_values, dtype=float).ravel()
        if f.size != s.size:
            raise InvalidInputError(f"Grid has {f.size} frequencies but {s.size} PSD values")
        if f.size < 2:
            raise InvalidInputError("Spectrum grid needs at least two points")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(s))):
            raise InvalidInputError("Spectrum grid contains non-finite values")
        if np.any(np.diff(f) <= 0):
            raise InvalidInputError("Frequencies must be strictly increasing")
        if np.any(s < 0):
            raise InvalidInputError("PSD values must be nonnegative")
        if not self.sample_rate > 0:
            raise InvalidInputError(f"Sample rate must be positive, got {self.sample_rate}")
        f.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "psd_values", s)

    def to_frame(self) -> pd.DataFrame:
        """Export as a two-column table."""
        return pd.DataFrame({"frequency_hz": self.frequencies, "psd": self.psd_values})

    def normalized(self, bands: "BandSpec") -> "SpectrumGrid":
        """Scale so the average in-band PSD equals 1."""
        level = _band_integral(self, bands.in_band) / bands.in_band_width
        if level <= 0:
            raise InvalidInputError("Spectrum has no in-band energy")
        return SpectrumGrid(self.frequencies, self.psd_values / level, self.sample_rate)


def _intervals(values: Iterable[Sequence[float]], label: str) -> Tuple[Tuple[float, float], ...]:
    out = []
    for pair in values:
        lo, hi = (float(v) for v in pair)
        if not hi > lo:
            raise InvalidInputError(f"{label} interval ({lo}, {hi}) has no length")
        out.append((lo, hi))
    if not out:
        raise InvalidInputError(f"{label} band is empty")
    return tuple(sorted(out))


@dataclass(frozen=True)
class BandSpec:
    """
    In-band and out-of-band frequency sets as unions of intervals (Hz).
    """
    in_band: Tuple[Tuple[float, float], ...]
    out_band: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        """Validate intervals and disjointness."""
        in_band = _intervals(self.in_band, "In")
        out_band = _intervals(self.out_band, "Out")
        for lo_i, hi_i in in_band:
            for lo_o, hi_o in out_band:
                if lo_i < hi_o and lo_o < hi_i:
                    raise InvalidInputError(f"Bands overlap: ({lo_i}, {hi_i}) and ({lo_o}, {hi_o})")
        object.__setattr__(self, "in_band", in_band)
        object.__setattr__(self, "out_band", out_band)

    @property
    def in_band_width(self) -> float:
        """|B_I|"""
        return sum(hi - lo for lo, hi in self.in_band)

    @property
    def out_band_width(self) -> float:
        """|B_O|"""
        return sum(hi - lo for lo, hi in self.out_band)


def sinc_d(x: np.ndarray, D: int) -> np.ndarray:
    """
    Periodic sinc sin(D x / 2) / (D sin(x / 2)), with value (-1)^(k(D-1)) at x = 2*pi*k.

    Args:
        x: Angles (radians)
        D: Period length

    Returns:
        Real array shaped like x
    """
    x = np.asarray(x, dtype=float)
    k = np.round(x / (2.0 * np.pi))
    at_pole = np.abs(x - 2.0 * np.pi * k) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        regular = np.sin(D * x / 2.0) / (D * np.sin(x / 2.0))
    limit = np.where(np.mod(k * (D - 1), 2) == 0, 1.0, -1.0)
    return np.where(at_pole, limit, regular)


def subsymbol_pulse(g: PrototypeFilter, m: int, cp_len: int = 0) -> np.ndarray:
    """
    g_m[n] = g[(n - m*K - L) mod D] for n = 0..D+L-1.
    """
    params = g.params
    n = np.arange(params.D + cp_len)
    return g.taps[(n - m * params.K - cp_len) % params.D]


def subsymbol_response_closed(g_f: np.ndarray, params: GfdmParams, m: int, omega: np.ndarray) -> np.ndarray:
    """
    G_m(e^{j omega}) from the frequency-domain filter; valid without a prefix.

    Args:
        g_f: Length-D frequency-domain filter (unnormalized DFT of g)
        params: Block dimensions
        m: Subsymbol index
        omega: Angular frequencies (radians per sample)

    Returns:
        Complex response at each omega
    """
    D, M = params.D, params.M
    g_f = np.asarray(g_f, dtype=complex).ravel()
    if g_f.size != D:
        raise InvalidInputError(f"Frequency-domain filter must have {D} bins, got {g_f.size}")
    l = np.arange(D)
    omega_l = np.asarray(omega, dtype=float).reshape(-1, 1) - 2.0 * np.pi * l / D
    kernel = sinc_d(omega_l, D) * np.exp(-1j * omega_l * (D - 1) / 2.0)
    weights = g_f * np.exp(-2j * np.pi * l * m / M)
    return (kernel @ weights).reshape(np.shape(omega))


def subsymbol_response_dtft(g: PrototypeFilter, m: int, omega: np.ndarray, cp_len: int = 0) -> np.ndarray:
    """
    G_m(e^{j omega}) by direct summation over the D + L samples of g_m[n].
    """
    pulse = subsymbol_pulse(g, m, cp_len)
    n = np.arange(pulse.size)
    omega = np.asarray(omega, dtype=float)
    return (np.exp(-1j * omega.reshape(-1, 1) * n) @ pulse).reshape(omega.shape)


def _active(values: Optional[Iterable[int]], upper: int, label: str) -> np.ndarray:
    if values is None:
        return np.arange(upper)
    out = np.array(sorted({int(v) for v in values}), dtype=int)
    if out.size == 0:
        raise InvalidInputError(f"Active {label} set is empty")
    if out[0] < 0 or out[-1] >= upper:
        raise InvalidInputError(f"Active {label} indices must lie in 0..{upper - 1}")
    return out


def _fft_grid_power(g: PrototypeFilter, subsymbols: np.ndarray, subcarriers: np.ndarray,
                    cp_len: int, oversample: int) -> np.ndarray:
    """
    sum_k sum_m |G_m(2*pi*(i/N - k/K))|^2 on the N = D * oversample point grid.
    """
    params = g.params
    N = params.D * oversample
    if N < params.D + cp_len:
        raise InvalidInputError(f"FFT grid of {N} points is shorter than the {params.D + cp_len}-sample block")
    base = np.zeros(N)
    for m in subsymbols:
        base += np.abs(sp_fft.fft(subsymbol_pulse(g, int(m), cp_len), N)) ** 2

    # shifting by k/K moves the grid by k*M*oversample points
    comb = np.zeros(N)
    comb[(subcarriers * params.M * oversample) % N] = 1.0
    total = np.real(sp_fft.ifft(sp_fft.fft(base) * sp_fft.fft(comb)))
    return np.clip(total, 0.0, None)


def psd(filter_: Union[FilterLike, np.ndarray],
        active_subcarriers: Optional[Iterable[int]] = None,
        active_subsymbols: Optional[Iterable[int]] = None,
        cp_len: int = 0,
        sample_rate: float = 1.0,
        interp: Optional[InterpolationFilter] = None,
        frequencies: Optional[np.ndarray] = None,
        method: str = "fft",
        oversample: int = 16,
        e_s: float = 1.0,
        params: Optional[GfdmParams] = None) -> SpectrumGrid:
    """
    PSD of the analog GFDM transmit signal.

    The 'fft' method samples the DTFTs on a zero-padded grid of D*oversample
    points per 1/T_s and returns the grid points inside the interpolation
    filter's support; 'dtft' and 'closed_form' evaluate on the given
    frequencies. 'closed_form' needs cp_len == 0.

    Args:
        filter_: Characteristic matrix, prototype filter, or g_f (with params)
        active_subcarriers: Used subcarriers (all if None)
        active_subsymbols: Used subsymbols (all if None)
        cp_len: Cyclic prefix length L
        sample_rate: 1 / T_s (Hz)
        interp: Interpolation filter (roll-off 0.1 if None)
        frequencies: Evaluation grid (Hz) for the 'dtft' and 'closed_form' methods
        method: 'fft', 'dtft' or 'closed_form'
        oversample: Grid points per DFT bin for the 'fft' method
        e_s: Symbol energy
        params: Block dimensions, needed only when filter_ is a g_f array

    Returns:
        Spectrum grid
    """
    if method not in PSD_METHODS:
        raise InvalidInputError(f"Unknown PSD method: {method}")
    if isinstance(filter_, np.ndarray):
        if params is None:
            raise InvalidInputError("A frequency-domain filter needs explicit params")
        G = char_from_freq(filter_, params)
    else:
        G = coerce_characteristic(filter_)
    params = G.params
    g = time_from_char(G)
    interp = interp or InterpolationFilter()
    subcarriers = _active(active_subcarriers, params.K, "subcarrier")
    subsymbols = _active(active_subsymbols, params.M, "subsymbol")
    if cp_len < 0:
        raise InvalidInputError(f"CP length must be nonnegative, got {cp_len}")
    Ts = 1.0 / sample_rate
    D_prime = params.D + cp_len

    if method == "fft":
        N = params.D * int(oversample)
        power = _fft_grid_power(g, subsymbols, subcarriers, cp_len, int(oversample))
        edge = int(np.ceil(interp.bandwidth(sample_rate) * Ts * N))
        index = np.arange(-edge, edge + 1)
        f = index / (N * Ts)
        total = power[index % N]
    else:
        if frequencies is None:
            raise InvalidInputError(f"The {method} method needs a frequency grid")
        if method == "closed_form" and cp_len != 0:
            raise InvalidInputError("The closed-form subsymbol response requires cp_len == 0")
        f = np.asarray(frequencies, dtype=float).ravel()
        g_f = freq_from_char(G)
        total = np.zeros(f.size)
        for k in subcarriers:
            omega = 2.0 * np.pi * (f * Ts - k / params.K)
            for m in subsymbols:
                if method == "closed_form":
                    response = subsymbol_response_closed(g_f, params, int(m), omega)
                else:
                    response = subsymbol_response_dtft(g, int(m), omega, cp_len)
                total += np.abs(response) ** 2

    values = e_s * interp.response(f, sample_rate) ** 2 / (D_prime * Ts) * total
    logger.debug(f"PSD ({method}) on {f.size} points, {subcarriers.size}x{subsymbols.size} active")
    return SpectrumGrid(f, values, sample_rate)


def _band_integral(spectrum: SpectrumGrid, intervals: Tuple[Tuple[float, float], ...]) -> float:
    f, s = spectrum.frequencies, spectrum.psd_values
    total = 0.0
    for lo, hi in intervals:
        if lo < f[0] or hi > f[-1]:
            raise InvalidInputError(f"Spectrum grid [{f[0]}, {f[-1]}] does not cover ({lo}, {hi})")
        inside = (f > lo) & (f < hi)
        x = np.concatenate(([lo], f[inside], [hi]))
        y = np.concatenate(([np.interp(lo, f, s)], s[inside], [np.interp(hi, f, s)]))
        total += float(trapezoid(y, x))
    return total


def oob_leakage(spectrum: SpectrumGrid, bands: BandSpec) -> float:
    """
    OOB leakage in dB: ratio of average out-of-band to average in-band PSD.

    Args:
        spectrum: PSD on a grid covering both bands
        bands: In-band and out-of-band sets

    Returns:
        10 log10 of the leakage ratio
    """
    in_energy = _band_integral(spectrum, bands.in_band)
    if in_energy <= 0:
        raise InvalidInputError("Spectrum has no in-band energy")
    out_energy = _band_integral(spectrum, bands.out_band)
    ratio = (bands.in_band_width / bands.out_band_width) * (out_energy / in_energy)
    return float(10.0 * np.log10(ratio))


@dataclass(frozen=True, eq=False)
class OobSetup:
    """
    Everything needed to evaluate one OOB leakage configuration.
    """
    name: str
    G: CharacteristicMatrix
    active_subcarriers: Tuple[int, ...]
    active_subsymbols: Tuple[int, ...]
    cp_len: int
    sample_rate: float
    interp: InterpolationFilter
    bands: BandSpec

    def spectrum(self, oversample: int = 16) -> SpectrumGrid:
        """PSD of this configuration on the FFT grid."""
        return psd(self.G, self.active_subcarriers, self.active_subsymbols, self.cp_len,
                   self.sample_rate, self.interp, method="fft", oversample=oversample)

    def leakage(self, oversample: int = 16) -> float:
        """OOB leakage (dB) of this configuration."""
        return oob_leakage(self.spectrum(oversample), self.bands)


OOB_REFERENCE_KINDS = ("ofdm", "dirichlet", "modified_dirichlet", "rc")

# Reference system: 128 x 15 GFDM (or 1920-point OFDM), L = 16, 1.92 MHz
_REF_K, _REF_M, _REF_CP = 128, 15, 16
_REF_SAMPLE_RATE = 1.92e6
_REF_INTERP_ROLLOFF = 0.1
_REF_RC_ROLLOFF = 0.5
_REF_EDGE = 49.5


def oob_reference_setup(kind: str, n_gc: int = 1) -> OobSetup:
    """
    The GFDM-versus-OFDM leakage comparison.

    GFDM uses K=128, M=15 with subsymbol 0 as a guard and subcarriers 50..78
    off; OFDM uses K=1920, M=1 with the same number of used resource
    elements, contiguous and centred on DC. Both use L=16 and a roll-off 0.1
    interpolation filter at 1.92 MHz.

    Args:
        kind: 'ofdm', 'dirichlet', 'modified_dirichlet' or 'rc'
        n_gc: Guard subcarriers between the in-band and out-of-band sets

    Returns:
        Leakage setup
    """
    kind = str(kind).lower().replace("-", "_")
    if kind not in OOB_REFERENCE_KINDS:
        raise InvalidInputError(f"Unknown OOB reference kind: {kind}")
    if n_gc < 0:
        raise InvalidInputError(f"Guard subcarrier count must be nonnegative, got {n_gc}")

    interp = InterpolationFilter(_REF_INTERP_ROLLOFF)
    spacing = _REF_SAMPLE_RATE / _REF_K
    outer = _REF_K / 2.0 * (1.0 + _REF_INTERP_ROLLOFF)
    inner = _REF_EDGE + n_gc
    if not inner < outer:
        raise InvalidInputError(f"{n_gc} guard subcarriers leave no out-of-band region")
    bands = BandSpec(
        in_band=((-_REF_EDGE * spacing, _REF_EDGE * spacing),),
        out_band=((-outer * spacing, -inner * spacing), (inner * spacing, outer * spacing)),
    )

    gfdm_subcarriers = tuple(range(0, 50)) + tuple(range(79, _REF_K))
    gfdm_subsymbols = tuple(range(1, _REF_M))
    if kind == "ofdm":
        D = _REF_K * _REF_M
        used = len(gfdm_subcarriers) * len(gfdm_subsymbols)
        subcarriers = tuple(sorted(k % D for k in range(-(used // 2), used - used // 2)))
        params = GfdmParams(D, 1)
        G = create_filter(FilterSpec(FilterKind.RECTANGULAR), params)
        return OobSetup(kind, G, subcarriers, (0,), _REF_CP, _REF_SAMPLE_RATE, interp, bands)

    params = GfdmParams(_REF_K, _REF_M)
    if kind == "rc":
        spec = FilterSpec(FilterKind.RC, rolloff=_REF_RC_ROLLOFF)
    else:
        spec = FilterSpec(FilterKind.parse(kind))
    G = create_filter(spec, params)
    return OobSetup(kind, G, gfdm_subcarriers, gfdm_subsymbols, _REF_CP, _REF_SAMPLE_RATE, interp, bands)
