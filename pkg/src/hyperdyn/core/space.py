"""
Finite metric spaces with exact rational metrics and a declared open base
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from hyperdyn.config import Budget
from hyperdyn.utils.validation import ResourceError, ValidationError, clean_label

logger = logging.getLogger(__name__)

# Largest number of entries materialized in a dense distance matrix
MAX_DENSE_ENTRIES = 25_000_000

_INT64_SAFE = 2 ** 62


class OpenSet(NamedTuple):
    """A named basic open set; members are point indices in ascending order."""

    name: str
    members: Tuple[int, ...]


class Metric:
    """Exact metric on point indices 0..size-1."""

    size: int = 0

    def __call__(self, i: int, j: int) -> Fraction:
        raise NotImplementedError

    def scaled(self) -> Tuple[np.ndarray, int]:
        """
        Integer distance matrix.

        Returns:
            (W, D) with d(i, j) == Fraction(W[i, j], D)
        """
        values = [[self(i, j) for j in range(self.size)] for i in range(self.size)]
        denominator = 1
        for row in values:
            for value in row:
                denominator = math.lcm(denominator, value.denominator)
        scaled = [[int(value * denominator) for value in row] for row in values]
        largest = max((max(row) for row in scaled), default=0)
        dtype = np.int64 if largest < _INT64_SAFE else object
        return np.array(scaled, dtype=dtype).reshape(self.size, self.size), denominator

    def positive_minimum(self) -> Optional[Fraction]:
        """Smallest positive distance, or None on a one-point space."""
        if self.size < 2:
            return None
        weights, denominator = self.scaled()
        positive = weights[weights > 0]
        return Fraction(int(positive.min()), denominator)


class DistanceMatrix(Metric):
    """Metric given explicitly as a matrix of Fractions."""

    def __init__(self, rows: Sequence[Sequence[Fraction]]):
        self.rows = tuple(tuple(Fraction(v) for v in row) for row in rows)
        self.size = len(self.rows)
        for i, row in enumerate(self.rows):
            if len(row) != self.size:
                raise ValidationError(f"metric row {i} has {len(row)} entries, expected {self.size}")

    def __call__(self, i: int, j: int) -> Fraction:
        return self.rows[i][j]


class CylinderMetric(Metric):
    """d(x, y) = 2^-p with p the first position where words x and y differ."""

    def __init__(self, alphabet: int, length: int):
        self.alphabet = alphabet
        self.length = length
        self.size = alphabet ** length

    def _agreement(self, i: int, j: int) -> int:
        a, length = self.alphabet, self.length
        for p in range(length):
            scale = a ** (length - 1 - p)
            if i // scale != j // scale:
                return p
        return length

    def __call__(self, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        return Fraction(1, 2 ** self._agreement(i, j))

    def scaled(self) -> Tuple[np.ndarray, int]:
        idx = np.arange(self.size, dtype=np.int64)
        agreement = np.zeros((self.size, self.size), dtype=np.int64)
        for k in range(1, self.length + 1):
            prefix = idx // (self.alphabet ** (self.length - k))
            agreement += prefix[:, None] == prefix[None, :]
        # agreement == length only on the diagonal
        weights = np.where(agreement >= self.length, 0, 2 ** (self.length - 1 - np.minimum(agreement, self.length - 1)))
        return weights.astype(np.int64), 2 ** max(self.length - 1, 0)

    def positive_minimum(self) -> Optional[Fraction]:
        if self.size < 2:
            return None
        return Fraction(1, 2 ** (self.length - 1))


class GridMetric(Metric):
    """Distance between midpoints of N equal cells of [0, 1]."""

    def __init__(self, cells: int):
        self.size = cells

    def __call__(self, i: int, j: int) -> Fraction:
        return Fraction(abs(i - j), self.size)

    def scaled(self) -> Tuple[np.ndarray, int]:
        idx = np.arange(self.size, dtype=np.int64)
        return np.abs(idx[:, None] - idx[None, :]), self.size

    def positive_minimum(self) -> Optional[Fraction]:
        return Fraction(1, self.size) if self.size >= 2 else None


class ProductMetric(Metric):
    """Max-metric on the k-fold product, indices in mixed radix."""

    def __init__(self, base: Metric, arity: int):
        self.base = base
        self.arity = arity
        self.shape = (base.size,) * arity
        self.size = base.size ** arity

    def __call__(self, i: int, j: int) -> Fraction:
        ci = np.unravel_index(i, self.shape)
        cj = np.unravel_index(j, self.shape)
        return max(self.base(int(a), int(b)) for a, b in zip(ci, cj))

    def scaled(self) -> Tuple[np.ndarray, int]:
        weights, denominator = self.base.scaled()
        coords = np.unravel_index(np.arange(self.size), self.shape)
        result = np.zeros((self.size, self.size), dtype=weights.dtype)
        for c in coords:
            result = np.maximum(result, weights[c[:, None], c[None, :]])
        return result, denominator

    def positive_minimum(self) -> Optional[Fraction]:
        return self.base.positive_minimum()


def singleton_base(points: Sequence[str]) -> Tuple[OpenSet, ...]:
    """The discrete topology: every point is open."""
    return tuple(OpenSet(f"{{{p}}}", (i,)) for i, p in enumerate(points))


@dataclass(frozen=True, eq=False)
class SpaceModel:
    """
    A finite metric space.

    Points are addressed by index internally and by id at the edges. The open
    base is produced lazily by base_factory (singletons when absent), so large
    derived spaces only pay for it when a detector needs it.
    """

    points: Tuple[str, ...]
    metric: Metric
    base_factory: Optional[Callable[[], Sequence[OpenSet]]] = None
    labels: Optional[Tuple[str, ...]] = None
    name: str = "space"

    def __post_init__(self):
        if not self.points:
            raise ValidationError("points must be nonempty")
        if self.metric.size != len(self.points):
            raise ValidationError(
                f"metric covers {self.metric.size} points, space has {len(self.points)}"
            )
        if self.labels is not None and len(self.labels) != len(self.points):
            raise ValidationError("labels must match points one to one")

    @property
    def size(self) -> int:
        return len(self.points)

    @cached_property
    def _index(self) -> Dict[str, int]:
        index = {}
        for i, point in enumerate(self.points):
            if point in index:
                raise ValidationError(f"duplicate point id '{point}'")
            index[point] = i
        return index

    def index(self, point_id: str) -> int:
        try:
            return self._index[point_id]
        except (KeyError, TypeError):
            raise ValidationError(f"unknown point id '{clean_label(point_id)}' in {self.name}")

    def indices(self, point_ids: Sequence[str]) -> Tuple[int, ...]:
        return tuple(self.index(p) for p in point_ids)

    def ids(self, indices) -> List[str]:
        return [self.points[int(i)] for i in indices]

    def distance(self, i: int, j: int) -> Fraction:
        return self.metric(int(i), int(j))

    @cached_property
    def open_base(self) -> Tuple[OpenSet, ...]:
        if self.base_factory is None:
            return singleton_base(self.points)
        base = tuple(self.base_factory())
        covered = np.zeros(self.size, dtype=bool)
        for open_set in base:
            if not open_set.members:
                raise ValidationError(f"open set {open_set.name} is empty")
            covered[list(open_set.members)] = True
        if not covered.all():
            missing = self.points[int(np.argmin(covered))]
            raise ValidationError(f"open base does not cover point '{missing}'")
        return base

    @cached_property
    def _base_masks(self) -> List[int]:
        return [sum(1 << i for i in o.members) for o in self.open_base]

    def _minimal_among(self, candidates: Sequence[int]) -> List[int]:
        """Base indices among candidates with no other candidate strictly inside, in base order."""
        masks = self._base_masks
        order = sorted(candidates, key=lambda k: (bin(masks[k]).count("1"), k))
        kept: List[int] = []
        seen = set()
        for k in order:
            mask = masks[k]
            if mask in seen:
                continue
            if any(masks[j] & mask == masks[j] for j in kept):
                continue
            kept.append(k)
            seen.add(mask)
        return sorted(kept)

    @cached_property
    def minimal_opens(self) -> Tuple[OpenSet, ...]:
        """Base members with no other member strictly inside them, in base order."""
        return tuple(self.open_base[k] for k in self._minimal_among(range(len(self.open_base))))

    @cached_property
    def _neighbourhood_indices(self) -> Tuple[Tuple[int, ...], ...]:
        masks = self._base_masks
        result = []
        for x in range(self.size):
            bit = 1 << x
            result.append(tuple(self._minimal_among([k for k, m in enumerate(masks) if m & bit])))
        return tuple(result)

    @cached_property
    def neighbourhoods(self) -> Tuple[Tuple[OpenSet, ...], ...]:
        """
        For each point x, the base members containing x with no smaller base
        member containing x. A point may lie in no minimal open at all, so
        statements about every neighbourhood of x range over these.
        """
        return tuple(tuple(self.open_base[k] for k in around) for around in self._neighbourhood_indices)

    @cached_property
    def local_opens(self) -> Tuple[OpenSet, ...]:
        """Every base member that is a smallest neighbourhood of some point; covers the space."""
        used = sorted({k for around in self._neighbourhood_indices for k in around})
        return tuple(self.open_base[k] for k in used)

    @cached_property
    def open_matrix(self) -> np.ndarray:
        """Incidence of minimal opens (rows) against points (columns)."""
        matrix = np.zeros((len(self.minimal_opens), self.size), dtype=bool)
        for row, open_set in enumerate(self.minimal_opens):
            matrix[row, list(open_set.members)] = True
        return matrix

    @cached_property
    def scaled_distances(self) -> Tuple[np.ndarray, int]:
        if self.size * self.size > MAX_DENSE_ENTRIES:
            raise ResourceError(
                f"dense distance matrix for {self.size} points exceeds {MAX_DENSE_ENTRIES} entries",
                quantity=self.size * self.size,
                limit=MAX_DENSE_ENTRIES,
            )
        logger.debug(f"Materializing {self.size}x{self.size} distance matrix for {self.name}")
        return self.metric.scaled()

    @cached_property
    def positive_distances(self) -> Tuple[Fraction, ...]:
        weights, denominator = self.scaled_distances
        values = np.unique(weights[weights > 0])
        return tuple(Fraction(int(v), denominator) for v in values)

    @cached_property
    def min_positive_distance(self) -> Optional[Fraction]:
        return self.metric.positive_minimum()

    def diameter(self, indices) -> Fraction:
        members = sorted(set(int(i) for i in indices))
        best = Fraction(0)
        for a, b in itertools.combinations(members, 2):
            best = max(best, self.metric(a, b))
        return best

    def find_pair_beyond(self, indices, threshold: Fraction) -> Optional[Tuple[int, int, Fraction]]:
        """First pair (in index order) of the given points farther apart than threshold."""
        members = sorted(set(int(i) for i in indices))
        for a, b in itertools.combinations(members, 2):
            d = self.metric(a, b)
            if d > threshold:
                return a, b, d
        return None


def validate_space(space: SpaceModel) -> SpaceModel:
    """
    Exhaustively check the metric axioms and the open base.

    Raises:
        ValidationError: naming the first violating points
    """
    n = space.size
    weights, _ = space.metric.scaled()
    for i in range(n):
        if weights[i, i] != 0:
            raise ValidationError(f"metric({space.points[i]}, {space.points[i]}) must be 0")
    for i in range(n):
        for j in range(i + 1, n):
            if weights[i, j] <= 0:
                raise ValidationError(
                    f"metric({space.points[i]}, {space.points[j]}) must be positive"
                )
            if weights[i, j] != weights[j, i]:
                raise ValidationError(
                    f"metric is not symmetric at ({space.points[i]}, {space.points[j]})"
                )
    if n <= 600:
        # d(i, k) <= d(i, j) + d(j, k) for every j, vectorized over (i, k)
        for j in range(n):
            bound = weights[:, j][:, None] + weights[j, :][None, :]
            bad = np.argwhere(weights > bound)
            if len(bad):
                i, k = bad[0]
                raise ValidationError(
                    f"triangle inequality fails for ({space.points[i]}, "
                    f"{space.points[j]}, {space.points[k]})"
                )
    else:
        logger.warning(f"Skipping triangle check on {n} points")
    space.open_base
    return space


def product_space(space: SpaceModel, arity: int, budget: Optional[Budget] = None) -> SpaceModel:
    """
    k-fold product with the max-metric and products of local opens as base.

    Raises:
        ResourceError: If |X|^k exceeds budget.max_points
    """
    budget = budget or Budget()
    count = space.size ** arity
    if count > budget.max_points:
        raise ResourceError(
            f"product of {arity} copies has {count} points, budget is {budget.max_points}",
            quantity=count,
            limit=budget.max_points,
        )
    shape = (space.size,) * arity
    coords = np.unravel_index(np.arange(count), shape)
    points = tuple(
        "(" + ",".join(space.points[int(c[i])] for c in coords) + ")" for i in range(count)
    )

    def factory() -> List[OpenSet]:
        opens = []
        for combo in itertools.product(space.local_opens, repeat=arity):
            grids = np.meshgrid(*[np.array(o.members) for o in combo], indexing="ij")
            members = np.ravel_multi_index([g.ravel() for g in grids], shape)
            name = "(" + " x ".join(o.name for o in combo) + ")"
            opens.append(OpenSet(name, tuple(int(m) for m in np.sort(members))))
        return opens

    return SpaceModel(
        points=points,
        metric=ProductMetric(space.metric, arity),
        base_factory=factory,
        name=f"{space.name}^{arity}",
    )
