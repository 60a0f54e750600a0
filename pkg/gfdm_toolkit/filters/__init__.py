"""
Prototype filter factory.
"""

from typing import Any, List, Optional

from gfdm_toolkit.core.types import CharacteristicMatrix, GfdmParams
from .base_filter import BaseFilter, FilterKind, FilterSpec
from .constant_magnitude import CmcmFilter, StaticOptimalFilter, get_available_phase_sets, phase_set
from .dirichlet import DirichletFilter
from .raised_cosine import RaisedCosineFilter, rc_time_taps
from .rectangular import RectangularFilter


def get_filter(spec: FilterSpec) -> BaseFilter:
    """
    Create the constructor object for a filter spec.

    Args:
        spec: Filter specification

    Returns:
        Filter constructor
    """
    kind = spec.kind

    if kind in (FilterKind.RC, FilterKind.RRC):
        return RaisedCosineFilter(spec)
    elif kind == FilterKind.DIRICHLET:
        return DirichletFilter(spec)
    elif kind == FilterKind.MODIFIED_DIRICHLET:
        return DirichletFilter(spec, modified=True)
    elif kind == FilterKind.CMCM:
        return CmcmFilter(spec)
    elif kind == FilterKind.STATIC_OPTIMAL:
        return StaticOptimalFilter(spec)
    else:
        return RectangularFilter(spec)


def create_filter(spec: FilterSpec,
                  params: GfdmParams,
                  channel: Optional[Any] = None) -> CharacteristicMatrix:
    """
    Build the characteristic matrix of a prototype filter.

    Args:
        spec: Filter specification
        params: Block dimensions
        channel: Channel realization, required for static_optimal only

    Returns:
        Unshifted characteristic matrix with energy equal to spec.target_energy
    """
    return get_filter(spec).build(params, channel)


make_filter = create_filter


def get_available_filters() -> List[str]:
    """
    Get list of available filter kinds.

    Returns:
        List of filter names
    """
    return [kind.value for kind in FilterKind]


__all__ = [
    "FilterKind",
    "FilterSpec",
    "create_filter",
    "make_filter",
    "get_available_filters",
    "get_available_phase_sets",
    "phase_set",
    "rc_time_taps",
]
