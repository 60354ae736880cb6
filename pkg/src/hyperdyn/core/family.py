"""
Non-autonomous map families and their composition traces

A family [f_1, ..., f_p] is cycled periodically: f_n = maps[(n - 1) mod p].
The state after n steps is omega_n = f_n o ... o f_1. Because both the phase
n mod p and the table omega_n range over finite sets, the sequence of pairs
is eventually periodic; CompositionTrace records it up to the first repeat.
"""
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from hyperdyn.config import Budget
from hyperdyn.core.space import SpaceModel, product_space
from hyperdyn.utils.validation import ResourceError, ValidationError, validate_positive_int

logger = logging.getLogger(__name__)

DEFAULT_TRACE_LIMIT = Budget().max_trace_length


def as_table(table, size: int, field_name: str = "map") -> np.ndarray:
    """Validate a point->point table and return a read-only int64 array."""
    arr = np.asarray(table)
    if arr.shape != (size,):
        raise ValidationError(f"{field_name} must have {size} entries, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValidationError(f"{field_name} entries must be point indices")
    if size and (arr.min() < 0 or arr.max() >= size):
        raise ValidationError(f"{field_name} maps outside the space")
    arr = arr.astype(np.int64, copy=True)
    arr.setflags(write=False)
    return arr


def identity_table(size: int) -> np.ndarray:
    table = np.arange(size, dtype=np.int64)
    table.setflags(write=False)
    return table


@dataclass(frozen=True, eq=False)
class CompositionTrace:
    """
    omega_1 .. omega_span with preperiod tau and cycle c.

    (phase, omega) at tau + c equals the pair at tau, so omega_{n + c} == omega_n
    for every n >= tau and every later table is recovered by index arithmetic.
    """

    period: int
    entries: Tuple[np.ndarray, ...]
    preperiod: int
    cycle: int

    @property
    def span(self) -> int:
        """Index of the last distinct state, tau + c - 1."""
        return self.preperiod + self.cycle - 1

    def residue(self, n: int) -> int:
        """The index m <= span with omega_m == omega_n."""
        if n < 1:
            raise ValidationError(f"time must be at least 1, got {n}")
        if n <= self.span:
            return n
        return self.preperiod + (n - self.preperiod) % self.cycle

    def table(self, n: int) -> np.ndarray:
        if n == 0:
            return identity_table(len(self.entries[0]))
        return self.entries[self.residue(n) - 1]

    @cached_property
    def stack(self) -> np.ndarray:
        """All recorded tables as a (span, |X|) array; row n - 1 is omega_n."""
        return np.stack(self.entries)

    def times(self, horizon: Optional[int] = None) -> range:
        """Times 1..min(horizon, span): every distinct state within the horizon."""
        last = self.span if horizon is None else min(horizon, self.span)
        return range(1, last + 1)

    def covers(self, horizon: Optional[int]) -> bool:
        """True when a search up to horizon has seen every distinct state."""
        return horizon is None or horizon >= self.span


@dataclass(frozen=True, eq=False)
class MapFamily:
    """A periodic non-autonomous rule acting on a SpaceModel."""

    space: SpaceModel
    maps: Tuple[np.ndarray, ...]
    commutative: bool = False
    name: str = "family"
    trace_limit: int = DEFAULT_TRACE_LIMIT

    def __post_init__(self):
        if not self.maps:
            raise ValidationError("maps must be a nonempty list")
        checked = tuple(
            as_table(m, self.space.size, field_name=f"maps[{i}]") for i, m in enumerate(self.maps)
        )
        object.__setattr__(self, "maps", checked)
        if self.commutative:
            for i, f in enumerate(checked):
                for j in range(i + 1, len(checked)):
                    g = checked[j]
                    if not np.array_equal(f[g], g[f]):
                        raise ValidationError(
                            f"family claimed commutative but maps[{i}] and maps[{j}] do not commute"
                        )

    @property
    def period(self) -> int:
        return len(self.maps)

    def map_at(self, n: int) -> np.ndarray:
        """f_n for n >= 1."""
        return self.maps[(n - 1) % self.period]

    def with_maps(self, maps: Sequence[np.ndarray], name: str, commutative: bool = False,
                  space: Optional[SpaceModel] = None) -> "MapFamily":
        return MapFamily(
            space=space or self.space,
            maps=tuple(maps),
            commutative=commutative,
            name=name,
            trace_limit=self.trace_limit,
        )

    @cached_property
    def trace(self) -> CompositionTrace:
        return composition_trace(self)


def composition_trace(family: MapFamily) -> CompositionTrace:
    """
    Compose until the (phase, table) pair repeats.

    Raises:
        ResourceError: If more than family.trace_limit distinct states appear
    """
    p = family.period
    seen = {}
    entries = []
    current = family.maps[0]
    n = 1
    while True:
        key = (n % p, current.tobytes())
        if key in seen:
            tau = seen[key]
            trace = CompositionTrace(
                period=p, entries=tuple(entries), preperiod=tau, cycle=n - tau
            )
            logger.debug(
                f"Trace of {family.name}: preperiod={trace.preperiod}, cycle={trace.cycle}"
            )
            return trace
        seen[key] = n
        entries.append(current)
        if len(entries) > family.trace_limit:
            raise ResourceError(
                f"composition trace of {family.name} exceeds {family.trace_limit} states",
                quantity=len(entries),
                limit=family.trace_limit,
            )
        current = family.maps[n % p][current]
        current.setflags(write=False)
        n += 1


def omega_eval(family: MapFamily, n: int, x: str) -> str:
    """
    State of x after n steps, f_n(f_{n-1}(...f_1(x)...)).

    Raises:
        ValidationError: If x is not a point of the space or n < 1
    """
    n = validate_positive_int(n, field_name="n")
    i = family.space.index(x)
    return family.space.points[int(family.trace.table(n)[i])]


def fold_eval(family: MapFamily, n: int, x: str) -> str:
    """Direct n-step fold without the trace."""
    i = family.space.index(x)
    for t in range(1, n + 1):
        i = int(family.map_at(t)[i])
    return family.space.points[i]


def block_family(family: MapFamily, n: int) -> MapFamily:
    """
    Family of n-step blocks, each composed in time order.

    Block j is f_{(j+1)n} o ... o f_{jn+1}; there are p / gcd(p, n) distinct
    blocks, and omega'_k of the result equals omega_{kn} of the input.
    """
    n = validate_positive_int(n, field_name="n")
    if n == 1:
        return family
    p = family.period
    count = p // math.gcd(p, n)
    blocks = []
    for j in range(count):
        table = identity_table(family.space.size)
        for t in range(j * n + 1, (j + 1) * n + 1):
            table = family.map_at(t)[table]
        blocks.append(table)
    return family.with_maps(blocks, name=f"{family.name}[block {n}]",
                            commutative=family.commutative)


def product_family(family: MapFamily, arity: int, budget: Optional[Budget] = None) -> MapFamily:
    """
    Coordinatewise action on the k-fold product space.

    Raises:
        ResourceError: If |X|^k exceeds budget.max_points
    """
    arity = validate_positive_int(arity, field_name="arity", minimum=2)
    space = product_space(family.space, arity, budget=budget)
    shape = (family.space.size,) * arity
    coords = np.unravel_index(np.arange(space.size), shape)
    maps = [np.ravel_multi_index([f[c] for c in coords], shape) for f in family.maps]
    logger.debug(f"Built product of {arity} copies of {family.name}: {space.size} points")
    return family.with_maps(maps, name=f"{family.name}^{arity}",
                            commutative=family.commutative, space=space)


def apply_budget(family: MapFamily, budget: Optional[Budget] = None) -> MapFamily:
    """The same family with its trace capped at budget.max_trace_length."""
    limit = (budget or Budget()).max_trace_length
    if family.trace_limit == limit:
        return family
    return replace(family, trace_limit=limit)
