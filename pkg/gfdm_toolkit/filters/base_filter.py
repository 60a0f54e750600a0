"""
Base filter interface and filter specification.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from gfdm_toolkit.core.characteristic import energy
from gfdm_toolkit.core.errors import InvalidInputError
from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams


class FilterKind(Enum):
    """Prototype filter families."""
    RC = "rc"
    RRC = "rrc"
    DIRICHLET = "dirichlet"
    MODIFIED_DIRICHLET = "modified_dirichlet"
    CMCM = "cmcm"
    RECTANGULAR = "rectangular"
    STATIC_OPTIMAL = "static_optimal"

    @classmethod
    def parse(cls, value: Any) -> "FilterKind":
        """Accept an enum member, its value, or its name in any case."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise InvalidInputError(f"Unknown filter kind: {value}")


ROLLOFF_KINDS = (FilterKind.RC, FilterKind.RRC)
PHASE_KINDS = (FilterKind.CMCM, FilterKind.STATIC_OPTIMAL)


@dataclass(frozen=True, eq=False)
class FilterSpec:
    """
    Description of a prototype filter to build.
    """
    kind: FilterKind
    rolloff: Optional[float] = None
    phases: Optional[np.ndarray] = None
    target_energy: float = 1.0

    def __post_init__(self):
        """Validate field combinations."""
        kind = FilterKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)

        if kind in ROLLOFF_KINDS:
            if self.rolloff is None:
                raise InvalidInputError(f"{kind.value} filter requires a roll-off factor")
            if not 0.0 <= float(self.rolloff) <= 1.0:
                raise InvalidInputError(f"Roll-off must lie in [0, 1], got {self.rolloff}")
            object.__setattr__(self, "rolloff", float(self.rolloff))
        elif self.rolloff is not None:
            raise InvalidInputError(f"{kind.value} filter takes no roll-off factor")

        if kind in PHASE_KINDS:
            if self.phases is None:
                raise InvalidInputError(f"{kind.value} filter requires a phase matrix")
            phases = np.array(self.phases, dtype=float)
            if phases.ndim != 2 or not np.all(np.isfinite(phases)):
                raise InvalidInputError("Phase matrix must be a finite 2-D array")
            phases.setflags(write=False)
            object.__setattr__(self, "phases", phases)
        elif self.phases is not None:
            raise InvalidInputError(f"{kind.value} filter takes no phase matrix")

        if not self.target_energy > 0:
            raise InvalidInputError(f"Target energy must be positive, got {self.target_energy}")


class BaseFilter(ABC):
    """
    Base class for all prototype filter constructors.
    """

    def __init__(self, name: str, spec: FilterSpec):
        """
        Initialize the filter constructor.

        Args:
            name: Filter name
            spec: Filter specification
        """
        self.name = name
        self.spec = spec

    @abstractmethod
    def build(self, params: GfdmParams, channel: Optional[Any] = None) -> CharacteristicMatrix:
        """
        Build the unshifted characteristic matrix.

        Args:
            params: Block dimensions
            channel: Channel realization (only used by channel-aware filters)

        Returns:
            Characteristic matrix with energy equal to the spec's target
        """
        pass

    def _check_phases(self, params: GfdmParams) -> np.ndarray:
        phases = self.spec.phases
        if phases.shape != (params.K, params.M):
            raise InvalidInputError(
                f"Phase matrix must be {params.K}x{params.M}, got {phases.shape[0]}x{phases.shape[1]}"
            )
        return phases

    def _to_target_energy(self, G: CharacteristicMatrix) -> CharacteristicMatrix:
        """Rescale G so its energy equals the spec's target."""
        current = energy(G)
        if current <= 0:
            raise InvalidInputError(f"{self.name} filter has zero energy")
        return G.scaled(np.sqrt(self.spec.target_energy / current))
