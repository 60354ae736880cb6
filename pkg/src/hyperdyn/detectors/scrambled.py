"""
Scrambled pairs, Li-Yorke sensitivity, chaotic dependence and scrambled sets

On a covering window liminf and limsup of n -> d(omega_n x, omega_n y) are
the min and max over the cyclic part [tau, span], which is exact. Orbits that
meet stay together, so no pair is exactly scrambled on a finite model. With a
horizon H below the span both limits are estimated on the trailing window of
[1, H]. Pair lists still report those estimates; verdicts built on them
are Inconclusive.
"""
import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from hyperdyn.core.family import MapFamily
from hyperdyn.detectors.base import WITNESS_LIMIT, Detector, Status, Verdict
from hyperdyn.detectors.sensitivity import exceeds
from hyperdyn.utils.validation import (
    validate_horizon,
    validate_positive_int,
    validate_positive_rational,
)

logger = logging.getLogger(__name__)

ScrambledPair = Tuple[str, str, Fraction, Fraction]


class ScrambledPairsDetector(Detector):
    """Li-Yorke sensitivity: every x has a delta-scrambled partner in each smallest neighbourhood."""

    property_name = "li_yorke_sensitive"

    def __init__(self, family: MapFamily, delta, horizon: Optional[int] = None,
                 window: Optional[int] = None):
        super().__init__(family, horizon=horizon)
        self.delta = self._threshold(delta)
        self.window = validate_horizon(window, field_name="window")

    def _threshold(self, delta) -> Fraction:
        return validate_positive_rational(delta, field_name="delta")

    @property
    def params(self):
        return {"delta": self.delta, "window": self.window}

    def limit_times(self) -> range:
        if self.exact_window:
            return range(self.trace.preperiod, self.trace.span + 1)
        last = self.last_time
        width = self.window or last
        return range(max(1, last - width + 1), last + 1)

    def limits(self) -> Tuple[np.ndarray, np.ndarray, int]:
        """(liminf, limsup, denominator) as scaled integer matrices."""
        weights, denominator = self.space.scaled_distances
        low = None
        high = np.zeros_like(weights)
        for n in self.limit_times():
            table = self.trace.table(n)
            current = weights[table[:, None], table[None, :]]
            low = current if low is None else np.minimum(low, current)
            high = np.maximum(high, current)
        return low, high, denominator

    def scrambled_matrix(self) -> np.ndarray:
        low, high, denominator = self.limits()
        scrambled = (low == 0) & exceeds(high, denominator, self.delta)
        np.fill_diagonal(scrambled, False)
        return scrambled

    def pairs(self) -> List[ScrambledPair]:
        low, high, denominator = self.limits()
        scrambled = (low == 0) & exceeds(high, denominator, self.delta)
        result = []
        for x, y in np.argwhere(np.triu(scrambled, k=1)):
            result.append((
                self.space.points[x],
                self.space.points[y],
                Fraction(int(high[x, y]), denominator),
                Fraction(int(low[x, y]), denominator),
            ))
        return result

    def execute(self) -> Verdict:
        scrambled = self.scrambled_matrix()
        partners = []
        for x, around in enumerate(self.space.neighbourhoods):
            for open_set in around:
                candidates = [y for y in open_set.members if scrambled[x, y]]
                if not candidates:
                    witness = {"x": self.space.points[x], "open": open_set.name}
                    if self.exact_window:
                        return self.verdict(Status.FAILS, True, witness, self.params)
                    return self.verdict(Status.INCONCLUSIVE, False, witness, self.params)
                partners.append([self.space.points[x], open_set.name, self.space.points[candidates[0]]])
        witness = {"partners": len(partners)}
        if len(partners) <= WITNESS_LIMIT:
            witness["partner_table"] = partners
        if not self.exact_window:
            # partners seen through the horizon only
            return self.verdict(Status.INCONCLUSIVE, False, witness, self.params)
        return self.verdict(Status.HOLDS, True, witness, self.params)


class ChaoticDependenceDetector(ScrambledPairsDetector):
    """The delta = 0 case: limsup > 0 and liminf = 0 inside every neighbourhood."""

    property_name = "chaotic_dependence"

    def __init__(self, family: MapFamily, horizon: Optional[int] = None, window: Optional[int] = None):
        super().__init__(family, delta=0, horizon=horizon, window=window)

    def _threshold(self, delta) -> Fraction:
        return Fraction(0)

    @property
    def params(self):
        return {"window": self.window}


def find_scrambled_pairs(family: MapFamily, delta, horizon: Optional[int] = None,
                         window: Optional[int] = None) -> Tuple[List[ScrambledPair], Verdict]:
    """
    All delta-scrambled pairs with their (limsup, liminf), plus the Li-Yorke sensitivity verdict.

    Raises:
        ValidationError: If delta <= 0
    """
    detector = ScrambledPairsDetector(family, delta, horizon=horizon, window=window)
    pairs = detector.pairs()
    logger.info(f"Found {len(pairs)} scrambled pairs in {family.name}")
    return pairs, detector.execute()


def find_scrambled_set(family: MapFamily, delta, horizon: Optional[int] = None,
                       window: Optional[int] = None, min_size: int = 2) -> Verdict:
    """
    A maximum delta-scrambled set (maximum clique of scrambled pairs).

    On a covering window Holds iff size >= min_size. A bounded window reports
    the estimated set as Inconclusive.
    """
    min_size = validate_positive_int(min_size, field_name="min_size")
    detector = ScrambledPairsDetector(family, delta, horizon=horizon, window=window)
    scrambled = detector.scrambled_matrix()
    graph = nx.Graph()
    graph.add_nodes_from(range(family.space.size))
    graph.add_edges_from((int(x), int(y)) for x, y in np.argwhere(np.triu(scrambled, k=1)))
    clique, size = nx.max_weight_clique(graph, weight=None)
    members = sorted(clique) if size > 1 else []
    size = len(members)
    witness = {"set": detector.ids(members), "size": size}
    params = {"delta": detector.delta, "window": detector.window, "min_size": min_size}
    if not detector.exact_window:
        status, exact = Status.INCONCLUSIVE, False
    elif size >= min_size:
        status, exact = Status.HOLDS, True
    else:
        status, exact = Status.FAILS, True
    verdict = Verdict(
        property="scrambled_set",
        status=status,
        exact=exact,
        horizon=detector.last_time,
        witness=witness,
        params=params,
    )
    logger.info(f"scrambled_set on {family.name}: size {size} ({status.value})")
    return verdict


def is_scrambled_set(family: MapFamily, members: Sequence[int], delta,
                     horizon: Optional[int] = None, window: Optional[int] = None) -> bool:
    """True iff every pair of the given points is delta-scrambled."""
    scrambled = ScrambledPairsDetector(family, delta, horizon=horizon, window=window).scrambled_matrix()
    members = [int(m) for m in members]
    return all(scrambled[x, y] for i, x in enumerate(members) for y in members[i + 1:])
