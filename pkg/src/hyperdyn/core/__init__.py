"""State spaces, map families and composition traces"""

from hyperdyn.core.family import (
    CompositionTrace,
    MapFamily,
    block_family,
    composition_trace,
    fold_eval,
    omega_eval,
    product_family,
)
from hyperdyn.core.space import OpenSet, SpaceModel, product_space, validate_space

__all__ = [
    "CompositionTrace",
    "MapFamily",
    "OpenSet",
    "SpaceModel",
    "block_family",
    "composition_trace",
    "fold_eval",
    "omega_eval",
    "product_family",
    "product_space",
    "validate_space",
]
