"""
Closed-form receiver MSE predictions and their minima.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from gfdm_toolkit.channel.models import PowerDelayProfile, complex_gaussian
from gfdm_toolkit.core.characteristic import energy, receiver_energy, require_invertible
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import DEFAULT_TOLERANCE, CharacteristicMatrix, Tolerance
from gfdm_toolkit.filters.constant_magnitude import channel_alpha

# Set up logging
logger = logging.getLogger(__name__)


class MseScenario(Enum):
    """Receiver/channel combinations with a closed-form MSE."""
    ZF_AWGN = "zf_awgn"
    ZF_STATIC = "zf_static"
    ZF_STATISTICAL = "zf_statistical"
    MMSE_AWGN = "mmse_awgn"

    @classmethod
    def parse(cls, value: Any) -> "MseScenario":
        """Accept an enum member, its value, or its name in any case."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        for scenario in cls:
            if key in (scenario.value, scenario.name.lower()):
                return scenario
        raise InvalidInputError(f"Unknown MSE scenario: {value}")


def _noise(n0: Optional[float], gamma: Optional[float], e_s: float) -> float:
    """N0 from either N0 itself or gamma = E_S / N0."""
    if n0 is None:
        if gamma is None or not gamma > 0:
            raise InvalidInputError("Either n0 or a positive gamma is required")
        return e_s / gamma
    if n0 < 0:
        raise InvalidInputError(f"Noise variance must be nonnegative, got {n0}")
    return float(n0)


def theoretical_mse(scenario: Any,
                    G: CharacteristicMatrix,
                    channel: Optional[Any] = None,
                    n0: Optional[float] = None,
                    gamma: Optional[float] = None,
                    beta: Optional[float] = None,
                    e_s: float = 1.0,
                    tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """
    Receiver MSE predicted for a given filter.

    ZF over AWGN gives xi_H N0; ZF over a known static channel gives
    (N0 / (K D)) sum_{k,l} alpha_l / |G_kl|^2; ZF over a statistical channel
    with E{1/|C_l|^2} = beta gives beta xi_H N0; MMSE over AWGN gives
    sum_{k,l} (N0 / D) / (|G_kl|^2 + 1/gamma).

    Args:
        scenario: MseScenario or its name
        G: Characteristic matrix (either form)
        channel: Channel realization or response (static scenario)
        n0: Noise variance (derived from gamma when omitted)
        gamma: E_S / N0 (required for MMSE)
        beta: E{1/|C_l|^2} (statistical scenario)
        e_s: Symbol energy
        tol: Zero threshold

    Returns:
        Nonnegative MSE
    """
    scenario = MseScenario.parse(scenario)
    params = G.params
    mags2 = G.magnitudes ** 2

    if scenario == MseScenario.MMSE_AWGN:
        if gamma is None or not gamma > 0:
            raise InvalidInputError("MMSE prediction needs a positive gamma")
        noise = e_s / gamma if n0 is None else float(n0)
        return float(np.sum((noise / params.D) / (mags2 + 1.0 / gamma)))

    require_invertible(G, tol)
    noise = _noise(n0, gamma, e_s)
    if scenario == MseScenario.ZF_AWGN:
        return receiver_energy(G, tol) * noise
    if scenario == MseScenario.ZF_STATISTICAL:
        if beta is None or not beta > 0:
            raise InvalidInputError("Statistical ZF prediction needs a positive beta")
        return float(beta) * receiver_energy(G, tol) * noise

    if channel is None:
        raise InvalidInputError("Static ZF prediction needs the channel")
    alpha = channel_alpha(getattr(channel, "freq_response", channel), params)
    return float(noise / (params.K * params.D) * np.sum(alpha[None, :] / mags2))


def minimum_mse(scenario: Any,
                xi: float,
                channel: Optional[Any] = None,
                n0: Optional[float] = None,
                gamma: Optional[float] = None,
                beta: Optional[float] = None,
                e_s: float = 1.0,
                params: Optional[Any] = None) -> float:
    """
    Smallest MSE any filter of energy xi can reach in a scenario.

    Args:
        scenario: MseScenario or its name
        xi: Filter energy xi_G
        channel: Channel realization or response (static scenario)
        n0: Noise variance (derived from gamma when omitted)
        gamma: E_S / N0 (required for MMSE)
        beta: E{1/|C_l|^2} (statistical scenario)
        e_s: Symbol energy
        params: Block dimensions (static scenario)

    Returns:
        Lower bound on the MSE
    """
    scenario = MseScenario.parse(scenario)
    if not xi > 0:
        raise InvalidInputError(f"Filter energy must be positive, got {xi}")

    if scenario == MseScenario.MMSE_AWGN:
        if gamma is None or not gamma > 0:
            raise InvalidInputError("MMSE bound needs a positive gamma")
        return e_s / (gamma * xi + 1.0)

    noise = _noise(n0, gamma, e_s)
    if scenario == MseScenario.ZF_AWGN:
        return noise / xi
    if scenario == MseScenario.ZF_STATISTICAL:
        if beta is None or not beta > 0:
            raise InvalidInputError("Statistical ZF bound needs a positive beta")
        return float(beta) * noise / xi

    if channel is None or params is None:
        raise InvalidInputError("Static ZF bound needs the channel and block dimensions")
    alpha = channel_alpha(getattr(channel, "freq_response", channel), params)
    return float(np.sum(np.sqrt(alpha)) ** 2 * noise / (params.K * params.M ** 2 * xi))


@dataclass(frozen=True)
class MonteCarloEstimate:
    """
    Sample mean with its standard error.
    """
    value: float
    standard_error: float
    trials: int

    @property
    def relative_error(self) -> float:
        """Standard error as a fraction of the value."""
        return self.standard_error / abs(self.value) if self.value else float("inf")


def mmse_reference_from_gains(channel_gains: np.ndarray, gamma: float, xi: float, e_s: float = 1.0) -> MonteCarloEstimate:
    """
    Sample mean of E_S / (gamma xi |C|^2 + 1) over given channel bins.

    Args:
        channel_gains: Samples of one frequency bin C_l
        gamma: E_S / N0 (zero allowed)
        xi: Filter energy
        e_s: Symbol energy

    Returns:
        Estimate with standard error
    """
    if gamma < 0:
        raise InvalidInputError(f"gamma must be nonnegative, got {gamma}")
    power = np.abs(np.asarray(channel_gains, dtype=complex).ravel()) ** 2
    if power.size == 0:
        raise InvalidInputError("Need at least one channel sample")
    samples = e_s / (gamma * xi * power + 1.0)
    se = float(np.std(samples, ddof=1) / np.sqrt(samples.size)) if samples.size > 1 else 0.0
    return MonteCarloEstimate(float(np.mean(samples)), se, int(samples.size))


def rayleigh_mmse_reference(pdp: PowerDelayProfile,
                            gamma: float,
                            xi: float,
                            trials: int,
                            rng: np.random.Generator,
                            e_s: float = 1.0) -> MonteCarloEstimate:
    """
    Monte-Carlo value of E{E_S / (gamma xi |C_0|^2 + 1)} under Rayleigh fading.

    C_0 is the sum of the independent complex Gaussian taps, so every
    frequency bin has the same distribution.

    Args:
        pdp: Power delay profile
        gamma: E_S / N0
        xi: Filter energy
        trials: Number of channel draws
        rng: Random generator
        e_s: Symbol energy

    Returns:
        Estimate with standard error
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be at least 1, got {trials}")
    taps = complex_gaussian(rng, (int(trials), pdp.length), pdp.variances[None, :])
    estimate = mmse_reference_from_gains(taps.sum(axis=1), gamma, xi, e_s)
    logger.debug(f"Rayleigh MMSE reference: {estimate.value:.6f} +/- {estimate.standard_error:.2e}")
    return estimate
