"""
Raised-cosine and root-raised-cosine prototype filters.
"""

import logging
from typing import Any, Optional

import numpy as np

from gfdm_toolkit.core.characteristic import char_from_time
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams, PrototypeFilter
from .base_filter import BaseFilter, FilterKind, FilterSpec

# Set up logging
logger = logging.getLogger(__name__)

# Offsets closer than this to a removable singularity use the analytic limit
_SINGULAR_EPS = np.sqrt(np.finfo(float).eps)


def signed_positions(D: int) -> np.ndarray:
    """
    Map sample indices 0..D-1 onto signed offsets around n = 0.

    Index n and index D - n always map to opposite offsets, which makes any
    even pulse sampled on these positions satisfy g[n] = g[D - n].

    The split point is floor(D / 2). For even D the index D / 2 lands on
    -D / 2, which is its own mirror. Splitting at ceil(D / 2) instead sends
    both (D - 1) / 2 and its mirror (D + 1) / 2 to negative offsets for odd D,
    and the symmetry above no longer holds.
    """
    half = D // 2
    n = np.arange(D)
    return ((n + half) % D) - half


def raised_cosine_response(t: np.ndarray, alpha: float) -> np.ndarray:
    """
    Nyquist raised-cosine impulse response at times t (in symbol periods).
    """
    t = np.asarray(t, dtype=float)
    h = np.sinc(t)
    if alpha == 0.0:
        return h

    singular = np.abs(np.abs(2.0 * alpha * t) - 1.0) < _SINGULAR_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        regular = h * np.cos(np.pi * alpha * t) / (1.0 - (2.0 * alpha * t) ** 2)
    limit = np.pi / 4.0 * np.sinc(1.0 / (2.0 * alpha))
    return np.where(singular, limit, regular)


def root_raised_cosine_response(t: np.ndarray, alpha: float) -> np.ndarray:
    """
    Root-raised-cosine impulse response at times t (in symbol periods).
    """
    t = np.asarray(t, dtype=float)
    if alpha == 0.0:
        return np.sinc(t)

    at_zero = np.abs(t) < _SINGULAR_EPS
    singular = np.abs(np.abs(4.0 * alpha * t) - 1.0) < _SINGULAR_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        num = np.sin(np.pi * t * (1.0 - alpha)) + 4.0 * alpha * t * np.cos(np.pi * t * (1.0 + alpha))
        den = np.pi * t * (1.0 - (4.0 * alpha * t) ** 2)
        h = num / den

    zero_value = 1.0 - alpha + 4.0 * alpha / np.pi
    edge_value = alpha / np.sqrt(2.0) * (
        (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * alpha))
        + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * alpha))
    )
    h = np.where(singular, edge_value, h)
    return np.where(at_zero, zero_value, h)


def rc_time_taps(params: GfdmParams, alpha: float, kind: FilterKind = FilterKind.RC) -> PrototypeFilter:
    """
    Sample an RC or RRC pulse with symbol period K onto one GFDM block.

    Args:
        params: Block dimensions
        alpha: Roll-off factor in [0, 1]
        kind: FilterKind.RC or FilterKind.RRC

    Returns:
        Real, even-symmetric prototype filter with unit energy
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError(f"Roll-off must lie in [0, 1], got {alpha}")
    kind = FilterKind.parse(kind)

    t = signed_positions(params.D) / params.K
    if kind == FilterKind.RC:
        taps = raised_cosine_response(t, alpha)
    elif kind == FilterKind.RRC:
        taps = root_raised_cosine_response(t, alpha)
    else:
        raise InvalidInputError(f"rc_time_taps supports RC and RRC, got {kind.value}")

    taps = taps / np.sqrt(np.sum(taps ** 2))
    return PrototypeFilter(params, taps.astype(complex))


class RaisedCosineFilter(BaseFilter):
    """
    RC / RRC prototype filter.
    """

    def __init__(self, spec: FilterSpec):
        super().__init__(name=spec.kind.value, spec=spec)

    def build(self, params: GfdmParams, channel: Optional[Any] = None) -> CharacteristicMatrix:
        g = rc_time_taps(params, self.spec.rolloff, self.spec.kind)
        logger.debug(f"Built {self.name} filter with roll-off {self.spec.rolloff} for K={params.K}, M={params.M}")
        return self._to_target_energy(char_from_time(g))
