"""
Rectangular window, which turns the GFDM block into an OFDM symbol.
"""

from typing import Any, Optional

import numpy as np

from gfdm_toolkit.core.characteristic import char_from_time
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams, PrototypeFilter
from .base_filter import BaseFilter, FilterSpec


class RectangularFilter(BaseFilter):
    """OFDM rectangular window g = ones / sqrt(K); requires M = 1."""

    def __init__(self, spec: FilterSpec):
        super().__init__(name=spec.kind.value, spec=spec)

    def build(self, params: GfdmParams, channel: Optional[Any] = None) -> CharacteristicMatrix:
        if params.M != 1:
            raise InvalidInputError(f"Rectangular window requires M = 1, got M = {params.M}")
        g = PrototypeFilter(params, np.ones(params.K) / np.sqrt(params.K))
        return self._to_target_energy(char_from_time(g))
