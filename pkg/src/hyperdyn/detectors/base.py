"""
Verdicts and the shared detector machinery
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from hyperdyn.core.family import MapFamily
from hyperdyn.core.space import OpenSet
from hyperdyn.utils.validation import format_rational, validate_horizon

logger = logging.getLogger(__name__)

# Per-item witness lists longer than this are summarized
WITNESS_LIMIT = 4096


class Status(Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class Verdict:
    """
    Three-valued detector outcome.

    horizon is the last time examined. exact is True when that window covered
    every distinct state of the trace, so the verdict is a proof for the
    finite system rather than a bounded search.
    """

    property: str
    status: Status
    exact: bool
    horizon: int
    witness: Dict[str, Any] = field(default_factory=dict)
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "property": self.property,
            "params": jsonable(self.params),
            "status": self.status.value,
            "exact": self.exact,
            "witness": jsonable(self.witness),
            "horizon": self.horizon,
        }


def jsonable(value: Any) -> Any:
    """Convert Fractions, numpy scalars and tuples into JSON-friendly values."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Enum):
        return value.value
    return value


class Detector:
    """
    Base for property detectors.

    Subclasses set property_name and implement execute(). All searches walk
    trace.times(horizon), which holds every distinct omega_n when the
    horizon covers the trace span.
    """

    property_name = "property"

    def __init__(self, family: MapFamily, horizon: Optional[int] = None):
        """
        Args:
            family: The (base or lifted) system
            horizon: Last time to examine; None examines the full trace
        """
        self.family = family
        self.space = family.space
        self.horizon = validate_horizon(horizon)
        self.trace = family.trace

    @property
    def times(self) -> range:
        return self.trace.times(self.horizon)

    @property
    def exact_window(self) -> bool:
        return self.trace.covers(self.horizon)

    @property
    def last_time(self) -> int:
        return len(self.times)

    def _minimal_opens(self) -> Tuple[OpenSet, ...]:
        return self.space.minimal_opens

    def image(self, n: int, members: Iterable[int]) -> np.ndarray:
        """omega_n of a set of point indices, as sorted unique indices."""
        return np.unique(self.trace.table(n)[np.asarray(list(members), dtype=np.int64)])

    def ids(self, indices) -> List[str]:
        return self.space.ids(indices)

    def verdict(self, status: Status, exact: bool, witness: Dict[str, Any],
                params: Optional[Dict[str, Any]] = None) -> Verdict:
        v = Verdict(
            property=self.property_name,
            status=status,
            exact=exact,
            horizon=self.last_time,
            witness=witness,
            params=params or {},
        )
        logger.info(
            f"{self.property_name} on {self.family.name}: {v.status.value} "
            f"(exact={v.exact}, horizon={v.horizon})"
        )
        return v

    def execute(self) -> Verdict:
        raise NotImplementedError
