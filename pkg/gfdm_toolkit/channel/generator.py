"""
Per-block channel generator for Monte-Carlo runs.
"""

import logging
from enum import Enum
from typing import Optional

import numpy as np

from gfdm_toolkit.core.errors import InvalidInputError
from .models import (
    ChannelRealization,
    PowerDelayProfile,
    awgn_channel,
    sample_dfe_rayleigh,
    sample_rayleigh,
    static_four_tap_channel,
)

# Set up logging
logger = logging.getLogger(__name__)


class ChannelKind(Enum):
    """Channel ensembles used by the simulation scenarios."""
    AWGN = "awgn"
    STATIC = "static"
    RAYLEIGH = "rayleigh"
    DEEP_FADE_EXCLUDED = "dfe_rayleigh"


class ChannelGenerator:
    """
    Produces the channel seen by each block of a simulation run.
    """

    def __init__(self,
                 kind: ChannelKind,
                 D: int,
                 pdp: Optional[PowerDelayProfile] = None,
                 threshold_db: float = -30.0):
        """
        Initialize the channel generator.

        Args:
            kind: Channel ensemble
            D: Block size
            pdp: Power delay profile for the fading ensembles
            threshold_db: Minimum bin gain for the deep-fade-excluded ensemble
        """
        self.kind = kind
        self.D = D
        self.pdp = pdp
        self.threshold_db = threshold_db

        if kind in (ChannelKind.RAYLEIGH, ChannelKind.DEEP_FADE_EXCLUDED) and pdp is None:
            raise InvalidInputError(f"{kind.value} channel requires a power delay profile")

        # Fixed channels are built once
        self._fixed: Optional[ChannelRealization] = None
        if kind == ChannelKind.AWGN:
            self._fixed = awgn_channel(D)
        elif kind == ChannelKind.STATIC:
            self._fixed = static_four_tap_channel(D)

    @property
    def is_fixed(self) -> bool:
        """True when every block sees the same channel."""
        return self._fixed is not None

    @property
    def max_order(self) -> int:
        """Largest channel order this generator can produce."""
        if self._fixed is not None:
            return self._fixed.order
        return self.pdp.length - 1

    def realization(self, rng: np.random.Generator) -> ChannelRealization:
        """
        Draw the channel for one block.

        Args:
            rng: The block's random generator

        Returns:
            Channel realization
        """
        if self._fixed is not None:
            return self._fixed
        if self.kind == ChannelKind.RAYLEIGH:
            return sample_rayleigh(self.pdp, self.D, rng)
        return sample_dfe_rayleigh(self.pdp, self.D, rng, threshold_db=self.threshold_db)
