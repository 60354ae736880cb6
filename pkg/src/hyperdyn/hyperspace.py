"""
Hyperspace of nonempty finite subsets under the Hausdorff metric

Hyperpoints of a base space with at most m elements are enumerated by
cardinality and then in combination order, so the singleton {x_i} has index i
and the singleton embedding x -> {x} is the identity on indices < |X|.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from hyperdyn.config import Budget
from hyperdyn.core.family import MapFamily
from hyperdyn.core.space import Metric, OpenSet, SpaceModel
from hyperdyn.utils.validation import ResourceError, ValidationError, validate_positive_int

logger = logging.getLogger(__name__)

_CHUNK = 256


@dataclass(frozen=True)
class HyperPoint:
    """A canonical nonempty finite subset; members ascend in the base point order."""

    space: SpaceModel
    members: Tuple[int, ...]

    def __post_init__(self):
        if not self.members:
            raise ValidationError("a hyperpoint must be nonempty")
        canonical = tuple(sorted(set(int(i) for i in self.members)))
        if canonical[0] < 0 or canonical[-1] >= self.space.size:
            raise ValidationError("hyperpoint member outside the space")
        object.__setattr__(self, "members", canonical)

    @classmethod
    def of(cls, space: SpaceModel, point_ids: Sequence[str]) -> "HyperPoint":
        return cls(space, space.indices(point_ids))

    @property
    def ids(self) -> List[str]:
        return self.space.ids(self.members)

    def __str__(self) -> str:
        return "{" + ",".join(self.ids) + "}"


@dataclass(frozen=True)
class VietorisBasic:
    """<U_1, ..., U_k>: sets inside the union of the U_i that meet every U_i."""

    hit_sets: Tuple[frozenset, ...]

    @classmethod
    def of(cls, space: SpaceModel, hit_sets: Sequence[Sequence[str]]) -> "VietorisBasic":
        return cls(tuple(frozenset(space.indices(u)) for u in hit_sets))


def _directed(space: SpaceModel, source: Sequence[int], target: Sequence[int]) -> Fraction:
    return max(min(space.distance(a, b) for b in target) for a in source)


def hausdorff_members(space: SpaceModel, a: Sequence[int], b: Sequence[int]) -> Fraction:
    return max(_directed(space, a, b), _directed(space, b, a))


def hausdorff_distance(a: HyperPoint, b: HyperPoint) -> Fraction:
    """
    d_H(A, B) = max(max_a min_b d(a, b), max_b min_a d(a, b)).

    Raises:
        ValidationError: If A and B live over different base spaces
    """
    if a.space is not b.space:
        raise ValidationError("hyperpoints belong to different base spaces")
    return hausdorff_members(a.space, a.members, b.members)


def vietoris_contains(basic: VietorisBasic, a: HyperPoint) -> bool:
    """
    True iff A lies inside the union of the hit sets and meets each of them.

    Raises:
        ValidationError: If the basic set has no hit sets
    """
    if not basic.hit_sets:
        raise ValidationError("a Vietoris basic set needs at least one hit set")
    members = set(a.members)
    union = frozenset().union(*basic.hit_sets)
    return members <= union and all(members & u for u in basic.hit_sets)


def upper_vietoris_contains(u: Sequence[int], a: HyperPoint) -> bool:
    """A in U+, i.e. A is a subset of U."""
    return set(a.members) <= set(int(i) for i in u)


class HausdorffMetric(Metric):
    """d_H on enumerated hyperpoints, evaluated lazily with a memo."""

    def __init__(self, base: SpaceModel, hyperpoints: Sequence[Tuple[int, ...]], width: int):
        self.base = base
        self.hyperpoints = hyperpoints
        self.width = width
        self.size = len(hyperpoints)
        self._memo: Dict[Tuple[int, int], Fraction] = {}

    def __call__(self, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        key = (i, j) if i < j else (j, i)
        value = self._memo.get(key)
        if value is None:
            value = hausdorff_members(self.base, self.hyperpoints[i], self.hyperpoints[j])
            self._memo[key] = value
        return value

    def padded(self) -> np.ndarray:
        return _padded(self.hyperpoints, self.width)

    def scaled(self) -> Tuple[np.ndarray, int]:
        weights, denominator = self.base.scaled_distances
        elements = self.padded()
        result = np.zeros((self.size, self.size), dtype=weights.dtype)
        for start in range(0, self.size, _CHUNK):
            rows = elements[start:start + _CHUNK]
            block = weights[rows[:, None, :, None], elements[None, :, None, :]]
            forward = block.min(axis=3).max(axis=2)
            backward = block.min(axis=2).max(axis=2)
            result[start:start + _CHUNK] = np.maximum(forward, backward)
        return result, denominator

    def positive_minimum(self) -> Optional[Fraction]:
        if self.size < 2:
            return None
        return self.base.min_positive_distance


def _padded(hyperpoints: Sequence[Tuple[int, ...]], width: int) -> np.ndarray:
    """Member matrix, short rows padded by repeating their first element."""
    matrix = np.empty((len(hyperpoints), width), dtype=np.int64)
    for row, members in enumerate(hyperpoints):
        matrix[row, :len(members)] = members
        matrix[row, len(members):] = members[0]
    return matrix


@dataclass(frozen=True, eq=False)
class HyperSpaceModel(SpaceModel):
    """Nonempty subsets of base with at most max_cardinality elements, under d_H."""

    base: Optional[SpaceModel] = None
    max_cardinality: int = 1
    hyperpoints: Tuple[Tuple[int, ...], ...] = ()

    @cached_property
    def member_index(self) -> Dict[Tuple[int, ...], int]:
        return {members: i for i, members in enumerate(self.hyperpoints)}

    @cached_property
    def elements(self) -> np.ndarray:
        return _padded(self.hyperpoints, self.max_cardinality)

    def locate(self, members: Sequence[int]) -> int:
        key = tuple(sorted(set(int(i) for i in members)))
        try:
            return self.member_index[key]
        except KeyError:
            raise ValidationError(
                f"set of {len(key)} points is outside the hyperspace (max {self.max_cardinality})"
            )

    def hyperpoint(self, index: int) -> HyperPoint:
        return HyperPoint(self.base, self.hyperpoints[index])

    def vietoris_members(self, hit_sets: Sequence[Sequence[int]]) -> np.ndarray:
        """Indices of hyperpoints inside <U_1, ..., U_k>."""
        selected = np.ones(self.size, dtype=bool)
        union = np.zeros(self.base.size, dtype=bool)
        for u in hit_sets:
            mask = np.zeros(self.base.size, dtype=bool)
            mask[list(u)] = True
            union |= mask
            selected &= mask[self.elements].any(axis=1)
        selected &= union[self.elements].all(axis=1)
        return np.flatnonzero(selected)


def hyperspace_size(base_size: int, m: int) -> int:
    return sum(math.comb(base_size, j) for j in range(1, min(m, base_size) + 1))


def build_hyperspace(base: SpaceModel, m: int, budget: Optional[Budget] = None) -> HyperSpaceModel:
    """
    Enumerate hyperpoints of size <= m with the Hausdorff metric.

    The open base is the Vietoris basics <U_1..U_j>, j <= m, over distinct
    local opens of the base (smallest neighbourhoods of its points), built
    on first use.

    Raises:
        ResourceError: If the hyperpoint count exceeds budget.max_hyperspace_points
    """
    budget = budget or Budget()
    m = validate_positive_int(m, field_name="max_cardinality")
    count = hyperspace_size(base.size, m)
    if count > budget.max_hyperspace_points:
        raise ResourceError(
            f"hyperspace of {base.name} with m={m} has {count} points, "
            f"budget is {budget.max_hyperspace_points}",
            quantity=count,
            limit=budget.max_hyperspace_points,
        )
    width = min(m, base.size)
    hyperpoints = tuple(
        combo
        for j in range(1, width + 1)
        for combo in itertools.combinations(range(base.size), j)
    )
    points = tuple("{" + ",".join(base.ids(h)) + "}" for h in hyperpoints)
    holder: List[HyperSpaceModel] = []

    def factory() -> List[OpenSet]:
        model = holder[0]
        opens = []
        local = base.local_opens
        for j in range(1, width + 1):
            for combo in itertools.combinations(local, j):
                members = model.vietoris_members([o.members for o in combo])
                if len(members):
                    name = "<" + ",".join(o.name for o in combo) + ">"
                    opens.append(OpenSet(name, tuple(int(i) for i in members)))
        logger.debug(f"Built {len(opens)} Vietoris basics over {base.name}")
        return opens

    model = HyperSpaceModel(
        points=points,
        metric=HausdorffMetric(base, hyperpoints, width),
        base_factory=factory,
        name=f"K{m}({base.name})",
        base=base,
        max_cardinality=width,
        hyperpoints=hyperpoints,
    )
    holder.append(model)
    logger.info(f"Built hyperspace {model.name} with {count} points")
    return model


def lift_table(hyperspace: HyperSpaceModel, table: np.ndarray) -> np.ndarray:
    """Action of a base table on hyperpoints (images are canonicalized, never larger)."""
    images = np.sort(np.asarray(table)[hyperspace.elements], axis=1)
    index = hyperspace.member_index
    lifted = np.empty(hyperspace.size, dtype=np.int64)
    for row, image in enumerate(images):
        lifted[row] = index[tuple(dict.fromkeys(int(v) for v in image))]
    return lifted


def lift_image(family: MapFamily, n: int, a: HyperPoint) -> HyperPoint:
    """omega_n(A) = {omega_n(a) : a in A}."""
    if a.space is not family.space:
        raise ValidationError("hyperpoint does not belong to the family's space")
    n = validate_positive_int(n, field_name="n")
    table = family.trace.table(n)
    return HyperPoint(family.space, tuple(int(v) for v in table[list(a.members)]))


def as_hyper_system(family: MapFamily, m: int, budget: Optional[Budget] = None) -> MapFamily:
    """
    The induced family on the hyperspace of sets with at most m points.

    Raises:
        ResourceError: If the hyperspace is over budget
    """
    hyperspace = build_hyperspace(family.space, m, budget=budget)
    maps = [lift_table(hyperspace, f) for f in family.maps]
    return family.with_maps(
        maps,
        name=f"lift{m}({family.name})",
        commutative=family.commutative,
        space=hyperspace,
    )
