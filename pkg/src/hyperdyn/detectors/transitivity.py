"""
Transitivity, total transitivity, weak mixing and topological mixing

All four reduce to the same question for a pair of minimal opens (U, V):
at which times n does omega_n(U) meet V.
"""
import logging
from typing import Optional

import numpy as np

from hyperdyn.config import Budget
from hyperdyn.core.family import MapFamily, block_family, product_family
from hyperdyn.detectors.base import WITNESS_LIMIT, Detector, Status, Verdict
from hyperdyn.utils.validation import validate_positive_int

logger = logging.getLogger(__name__)

_TIME_CHUNK = 512


class TransitivityDetector(Detector):
    """For every (U, V) some n >= 1 has omega_n(U) meeting V."""

    property_name = "transitive"

    def _hit_rows(self, members, start: int, stop: int) -> np.ndarray:
        """hits[t, v]: omega_{start + t + 1}(U) meets the v-th minimal open."""
        rows = self.trace.stack[start:stop][:, list(members)]
        indicator = np.zeros((stop - start, self.space.size), dtype=np.int32)
        indicator[np.arange(stop - start)[:, None], rows] = 1
        return indicator @ self.space.open_matrix.T.astype(np.int32) > 0

    def first_hits(self, members) -> np.ndarray:
        """First hitting time per minimal open V (0 when none within the window)."""
        found = np.zeros(len(self._minimal_opens()), dtype=np.int64)
        last = self.last_time
        for start in range(0, last, _TIME_CHUNK):
            stop = min(last, start + _TIME_CHUNK)
            hits = self._hit_rows(members, start, stop)
            fresh = (found == 0) & hits.any(axis=0)
            found[fresh] = start + 1 + hits[:, fresh].argmax(axis=0)
            if found.all():
                break
        return found

    def reachable(self, members) -> list:
        rows = self.trace.stack[:self.last_time][:, list(members)]
        return self.ids(np.unique(rows))

    def execute(self) -> Verdict:
        opens = self._minimal_opens()
        pairs = []
        max_n = 0
        for u in opens:
            hits = self.first_hits(u.members)
            missing = np.flatnonzero(hits == 0)
            if len(missing):
                v = opens[int(missing[0])]
                witness = {
                    "pair": [u.name, v.name],
                    "reachable": self.reachable(u.members),
                }
                if self.exact_window:
                    return self.verdict(Status.FAILS, True, witness)
                return self.verdict(Status.INCONCLUSIVE, False, witness)
            max_n = max(max_n, int(hits.max()))
            pairs.extend([u.name, v.name, int(n)] for v, n in zip(opens, hits))
        witness = {"max_n": max_n, "pairs": len(pairs)}
        if len(pairs) <= WITNESS_LIMIT:
            witness["first_hits"] = pairs
        return self.verdict(Status.HOLDS, True, witness)


class TotalTransitivityDetector(Detector):
    """Transitivity of every block family F_n for n <= max_n."""

    property_name = "total_transitive"

    def __init__(self, family: MapFamily, max_n: int = 3, horizon: Optional[int] = None):
        super().__init__(family, horizon=horizon)
        self.max_n = validate_positive_int(max_n, field_name="max_n")

    def execute(self) -> Verdict:
        orders = []
        inconclusive = None
        for n in range(1, self.max_n + 1):
            sub = TransitivityDetector(block_family(self.family, n), horizon=self.horizon).execute()
            orders.append([n, sub.status.value])
            if sub.fails:
                return self.verdict(Status.FAILS, sub.exact, {
                    "failing_n": n,
                    "orders": orders,
                    "pair": sub.witness["pair"],
                    "reachable": sub.witness["reachable"],
                }, params={"max_n": self.max_n})
            if sub.status is Status.INCONCLUSIVE and inconclusive is None:
                inconclusive = n
        if inconclusive is not None:
            return self.verdict(Status.INCONCLUSIVE, False,
                                {"orders": orders, "first_inconclusive_n": inconclusive},
                                params={"max_n": self.max_n})
        return self.verdict(Status.HOLDS, True, {"orders": orders}, params={"max_n": self.max_n})


class WeakMixingDetector(Detector):
    """
    Weak mixing of order k: one n serves k pairs at once.

    Decided as transitivity of the k-fold product, whose minimal opens are
    the k-tuples of minimal opens.
    """

    property_name = "weak_mixing"

    def __init__(self, family: MapFamily, order: int = 2, horizon: Optional[int] = None,
                 budget: Optional[Budget] = None):
        super().__init__(family, horizon=horizon)
        self.order = validate_positive_int(order, field_name="order")
        self.budget = budget

    def execute(self) -> Verdict:
        if self.order == 1:
            target = self.family
        else:
            target = product_family(self.family, self.order, budget=self.budget)
        sub = TransitivityDetector(target, horizon=self.horizon).execute()
        v = Verdict(
            property=self.property_name,
            status=sub.status,
            exact=sub.exact,
            horizon=sub.horizon,
            witness=sub.witness,
            params={"order": self.order},
        )
        logger.info(f"weak_mixing order {self.order} on {self.family.name}: {v.status.value}")
        return v


class MixingDetector(TransitivityDetector):
    """
    Topological mixing: for every (U, V), omega_n(U) meets V for all n >= K.

    On a covering window the cyclic part [tau, span] repeats forever, so a
    miss there is a proof of failure. On a shorter window later times are
    unseen, so the verdict is Inconclusive with the K observed so far.
    """

    property_name = "topological_mixing"

    def execute(self) -> Verdict:
        opens = self._minimal_opens()
        last = self.last_time
        tau = self.trace.preperiod
        k_max = 1
        for u in opens:
            hits = self._hit_rows(u.members, 0, last)
            for col, v in enumerate(opens):
                misses = np.flatnonzero(~hits[:, col]) + 1
                if not len(misses):
                    continue
                if self.exact_window:
                    cyclic = misses[misses >= tau]
                    if len(cyclic):
                        return self.verdict(Status.FAILS, True, {
                            "pair": [u.name, v.name],
                            "n": int(cyclic[0]),
                            "recurs_every": self.trace.cycle,
                        })
                elif misses[-1] == last:
                    return self.verdict(Status.INCONCLUSIVE, False, {
                        "pair": [u.name, v.name],
                        "n": int(last),
                    })
                k_max = max(k_max, int(misses[-1]) + 1)
        witness = {"K": k_max, "pairs": len(opens) ** 2}
        if not self.exact_window:
            return self.verdict(Status.INCONCLUSIVE, False, witness)
        return self.verdict(Status.HOLDS, True, witness)
