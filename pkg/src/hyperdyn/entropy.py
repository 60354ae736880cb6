"""
Open-cover and separated-set topological entropy for periodic families

Covers are boolean incidence matrices (sets x points). Joins are pairwise
intersections, preimages under omega_k are column gathers through the k-th
table, and minimal subcovers are solved exactly with a MaxSAT encoding.
Logarithms are natural; log base 2 is a display option only.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import networkx as nx
import numpy as np
import pandas as pd
from pysat.examples.rc2 import RC2
from pysat.formula import WCNF

from hyperdyn.config import Budget
from hyperdyn.core.family import MapFamily
from hyperdyn.core.space import SpaceModel
from hyperdyn.detectors.sensitivity import exceeds
from hyperdyn.hyperspace import HyperSpaceModel, as_hyper_system
from hyperdyn.utils.validation import (
    ResourceError,
    ValidationError,
    validate_positive_int,
    validate_positive_rational,
)

logger = logging.getLogger(__name__)

LOG_BASES = ("e", "2")

# Dominated-set pruning is quadratic in the number of sets
_PRUNE_LIMIT = 4096
# Separated sets beyond an equivalence relation fall back to a clique search
_CLIQUE_LIMIT = 512


class OpenCover:
    """A canonical cover: empty sets dropped, duplicates merged, rows sorted."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=bool)
        if matrix.ndim != 2:
            raise ValidationError("cover matrix must be two-dimensional")
        self.dropped_empty = int((~matrix.any(axis=1)).sum())
        matrix = matrix[matrix.any(axis=1)]
        self.matrix = np.unique(matrix, axis=0) if len(matrix) else matrix

    @classmethod
    def from_members(cls, size: int, sets: Sequence[Sequence[int]]) -> "OpenCover":
        matrix = np.zeros((len(sets), size), dtype=bool)
        for row, members in enumerate(sets):
            matrix[row, list(members)] = True
        return cls(matrix)

    @classmethod
    def from_ids(cls, space: SpaceModel, sets: Sequence[Sequence[str]]) -> "OpenCover":
        """
        Build and check a cover given by point ids.

        Raises:
            ValidationError: If a set is empty or the sets do not cover the space
        """
        for i, members in enumerate(sets):
            if not members:
                raise ValidationError(f"cover set {i} is empty")
        cover = cls.from_members(space.size, [space.indices(s) for s in sets])
        cover.check()
        return cover

    @classmethod
    def from_opens(cls, space: SpaceModel) -> "OpenCover":
        """The minimal opens of a space as a cover."""
        return cls(space.open_matrix)

    @property
    def size(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.matrix.shape[0]

    @property
    def sets(self) -> List[tuple]:
        return [tuple(int(i) for i in np.flatnonzero(row)) for row in self.matrix]

    def is_cover(self) -> bool:
        return bool(len(self)) and bool(self.matrix.any(axis=0).all())

    def check(self) -> "OpenCover":
        if not self.is_cover():
            raise ValidationError("sets do not cover the space (not a cover)")
        return self

    def refines(self, other: "OpenCover") -> bool:
        """self refines other: every set of self lies inside some set of other."""
        inside = (self.matrix[:, None, :] & ~other.matrix[None, :, :]).any(axis=2)
        return bool((~inside).any(axis=1).all())


def min_subcover_size(cover: OpenCover, budget: Optional[Budget] = None) -> int:
    """
    Exact minimum number of cover sets whose union is the space.

    Raises:
        ValidationError: If the sets do not cover the space
        ResourceError: If the cover has more sets than budget.max_join_sets
    """
    budget = budget or Budget()
    cover.check()
    matrix = cover.matrix
    if len(matrix) > budget.max_join_sets:
        raise ResourceError(
            f"cover with {len(matrix)} sets exceeds {budget.max_join_sets}",
            quantity=len(matrix),
            limit=budget.max_join_sets,
        )
    if matrix.all(axis=1).any():
        return 1
    # Partitions (joins of partitions stay partitions) need every set
    if (matrix.sum(axis=0) == 1).all():
        return len(matrix)

    if len(matrix) <= _PRUNE_LIMIT:
        as_int = matrix.astype(np.int32)
        overlap = as_int @ as_int.T
        sizes = as_int.sum(axis=1)
        contained = overlap == sizes[:, None]
        np.fill_diagonal(contained, False)
        matrix = matrix[~contained.any(axis=1)]
        logger.debug(f"Pruned cover to {len(matrix)} undominated sets")

    wcnf = WCNF()
    clauses = {tuple(int(i) + 1 for i in np.flatnonzero(col)) for col in matrix.T}
    for clause in sorted(clauses):
        wcnf.append(list(clause))
    for var in range(1, len(matrix) + 1):
        wcnf.append([-var], weight=1)
    with RC2(wcnf) as rc2:
        model = rc2.compute()
    chosen = sum(1 for lit in model if lit > 0)
    logger.debug(f"Minimal subcover of {len(matrix)} sets has {chosen}")
    return chosen


def join_covers(alpha: OpenCover, beta: OpenCover, budget: Optional[Budget] = None) -> OpenCover:
    """
    Pairwise intersections, empties dropped, duplicates merged.

    Raises:
        ResourceError: If |alpha| * |beta| exceeds budget.max_join_sets
    """
    budget = budget or Budget()
    if alpha.size != beta.size:
        raise ValidationError("covers live on spaces of different size")
    count = len(alpha) * len(beta)
    if count > budget.max_join_sets:
        raise ResourceError(
            f"join of {len(alpha)} x {len(beta)} sets exceeds {budget.max_join_sets}",
            quantity=count,
            limit=budget.max_join_sets,
        )
    product = alpha.matrix[:, None, :] & beta.matrix[None, :, :]
    return OpenCover(product.reshape(count, alpha.size))


def preimage_cover(family: MapFamily, k: int, cover: OpenCover) -> OpenCover:
    """{omega_k^-1(U) : U in cover}; omega_0 is the identity."""
    table = family.trace.table(k)
    result = OpenCover(cover.matrix[:, table])
    if result.dropped_empty:
        logger.debug(f"Preimage under omega_{k} lost {result.dropped_empty} empty sets")
    return result


@dataclass
class EntropyTerm:
    k: int
    count: int
    h: float

    @property
    def rate(self) -> float:
        return self.h / self.k


@dataclass
class EntropySeries:
    """
    Terms (k, N_k, H_k, H_k/k) and the trailing-window limsup estimate.

    A finite series cannot certify a limsup; window is always reported with it.
    """

    terms: List[EntropyTerm] = field(default_factory=list)
    k_max: int = 0
    kind: str = "cover"

    @property
    def window(self) -> int:
        return max(1, math.ceil(self.k_max / 3))

    @property
    def limsup_estimate(self) -> float:
        if not self.terms:
            return 0.0
        return max(t.rate for t in self.terms[-self.window:])

    @property
    def counts(self) -> List[int]:
        return [t.count for t in self.terms]

    def to_frame(self, log_base: str = "e") -> pd.DataFrame:
        scale = _log_scale(log_base)
        return pd.DataFrame({
            "k": [t.k for t in self.terms],
            "N_k": [t.count for t in self.terms],
            "H_k": [t.h / scale for t in self.terms],
            "H_k/k": [t.rate / scale for t in self.terms],
        })

    def summary(self, log_base: str = "e") -> Dict[str, object]:
        return {
            "kind": self.kind,
            "limsup_estimate": self.limsup_estimate / _log_scale(log_base),
            "window": self.window,
            "exact_terms": len(self.terms),
            "log_base": log_base,
        }

    def to_dict(self, log_base: str = "e") -> Dict[str, object]:
        record = self.summary(log_base)
        record["terms"] = self.to_frame(log_base).to_dict(orient="records")
        return record


def _log_scale(log_base: str) -> float:
    if log_base not in LOG_BASES:
        raise ValidationError(f"log base must be one of {LOG_BASES}, got {log_base!r}")
    return 1.0 if log_base == "e" else math.log(2)


def entropy_series(family: MapFamily, cover: OpenCover, k_max: int,
                   budget: Optional[Budget] = None) -> EntropySeries:
    """
    H(U v omega_1^-1 U v ... v omega_{k-1}^-1 U) / k for k = 1..k_max.

    Raises:
        ResourceError: On join growth past the budget; .partial holds the series so far
    """
    k_max = validate_positive_int(k_max, field_name="k_max")
    cover.check()
    series = EntropySeries(k_max=k_max, kind="cover")
    join = cover
    try:
        for k in range(1, k_max + 1):
            if k > 1:
                join = join_covers(join, preimage_cover(family, k - 1, cover), budget=budget)
            count = min_subcover_size(join, budget=budget)
            series.terms.append(EntropyTerm(k=k, count=count, h=math.log(count)))
            logger.debug(f"{family.name}: N_{k} = {count}")
    except ResourceError as e:
        logger.warning(f"Entropy series of {family.name} stopped at k={len(series.terms)}: {e}")
        e.partial = series
        raise
    logger.info(f"Entropy series of {family.name}: limsup estimate {series.limsup_estimate:.6f}")
    return series


def _equivalence_classes(close: np.ndarray) -> Optional[int]:
    """Number of classes if close is an equivalence relation, else None."""
    _, inverse = np.unique(close, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    if np.array_equal(close, inverse[:, None] == inverse[None, :]):
        return int(inverse.max()) + 1
    return None


def separated_entropy(family: MapFamily, epsilon, n_max: int,
                      budget: Optional[Budget] = None) -> EntropySeries:
    """
    log S_n / n with S_n the largest set pairwise separated by more than epsilon
    under max_{0 <= j < n} d(omega_j x, omega_j y).

    Raises:
        ValidationError: If epsilon <= 0
    """
    epsilon = validate_positive_rational(epsilon, field_name="epsilon")
    n_max = validate_positive_int(n_max, field_name="n_max")
    weights, denominator = family.space.scaled_distances
    close = np.ones_like(weights, dtype=bool)
    series = EntropySeries(k_max=n_max, kind="separated")
    for n in range(1, n_max + 1):
        table = family.trace.table(n - 1)
        close &= ~exceeds(weights[table[:, None], table[None, :]], denominator, epsilon)
        count = _equivalence_classes(close)
        if count is None:
            if family.space.size > _CLIQUE_LIMIT:
                raise ResourceError(
                    f"separated-set clique search on {family.space.size} points",
                    quantity=family.space.size,
                    limit=_CLIQUE_LIMIT,
                    partial=series,
                )
            graph = nx.Graph()
            graph.add_nodes_from(range(family.space.size))
            graph.add_edges_from((int(x), int(y)) for x, y in np.argwhere(np.triu(~close, k=1)))
            _, count = nx.max_weight_clique(graph, weight=None)
        series.terms.append(EntropyTerm(k=n, count=int(count), h=math.log(count)))
    return series


@dataclass
class HyperEntropyComparison:
    base: EntropySeries
    lifted: EntropySeries

    @property
    def dominance(self) -> bool:
        return all(l >= b for b, l in zip(self.base.counts, self.lifted.counts))

    def to_dict(self, log_base: str = "e") -> Dict[str, object]:
        return {
            "base": self.base.to_dict(log_base),
            "lifted": self.lifted.to_dict(log_base),
            "dominance": self.dominance,
        }


def lifted_cover(hyperspace: HyperSpaceModel, cover: OpenCover) -> OpenCover:
    """Vietoris basics <U_1..U_j>, j <= m, over the sets of a base cover."""
    sets = cover.sets
    members = []
    for j in range(1, hyperspace.max_cardinality + 1):
        for combo in itertools.combinations(sets, j):
            members.append(hyperspace.vietoris_members(combo))
    return OpenCover.from_members(hyperspace.size, members).check()


def hyper_entropy_compare(family: MapFamily, m: int, cover: OpenCover, k_max: int,
                          budget: Optional[Budget] = None) -> HyperEntropyComparison:
    """Entropy series of the base and of the induced system on sets of size <= m."""
    base = entropy_series(family, cover, k_max, budget=budget)
    lifted_family = as_hyper_system(family, m, budget=budget)
    lifted = entropy_series(lifted_family, lifted_cover(lifted_family.space, cover), k_max, budget=budget)
    comparison = HyperEntropyComparison(base=base, lifted=lifted)
    logger.info(f"Lifted entropy dominance for {family.name} (m={m}): {comparison.dominance}")
    return comparison
