"""
Periodic points and dense periodicity

A point (or finite set) S is periodic with n when omega_{nk}(S) = S for every
k >= 1. Past the preperiod tau the multiples nk run through every residue
class of gcd(n, c) modulo the cycle c, so the condition reduces to the
multiples below tau plus one check per divisor of c. Some valid n lies in
[1, span] whenever any does (the least multiple of c that is >= tau), so the
minimal period is found by scanning that range.
"""
import logging
import math
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from hyperdyn.core.family import CompositionTrace
from hyperdyn.detectors.base import Detector, Status, Verdict

logger = logging.getLogger(__name__)


def good_times(trace: CompositionTrace, members: Iterable[int]) -> np.ndarray:
    """Boolean array g with g[m - 1] true iff omega_m(S) == S, for m = 1..span."""
    target = np.array(sorted(set(int(i) for i in members)), dtype=np.int64)
    images = trace.stack[:, target]
    inside = np.isin(images, target).all(axis=1)
    ordered = np.sort(images, axis=1)
    distinct = 1 + (np.diff(ordered, axis=1) != 0).sum(axis=1)
    return inside & (distinct == len(target))


def _tail_ok(trace: CompositionTrace, good: np.ndarray) -> Dict[int, bool]:
    """For each divisor g of the cycle: are all times tau + ((j*g - tau) mod c) good?"""
    tau, c = trace.preperiod, trace.cycle
    result = {}
    for g in range(1, c + 1):
        if c % g:
            continue
        times = tau + (np.arange(c // g) * g - tau) % c
        result[g] = bool(good[times - 1].all())
    return result


def _periodic_with(trace: CompositionTrace, good: np.ndarray, tail: Dict[int, bool], n: int) -> bool:
    if not tail[math.gcd(n, trace.cycle)]:
        return False
    return all(good[m - 1] for m in range(n, trace.preperiod, n))


def is_periodic(trace: CompositionTrace, members: Iterable[int], n: int) -> bool:
    """True iff omega_{nk}(S) == S for all k >= 1."""
    good = good_times(trace, members)
    return _periodic_with(trace, good, _tail_ok(trace, good), n)


def minimal_period(trace: CompositionTrace, members: Iterable[int]) -> Optional[int]:
    """Least n making S periodic, or None when S is not periodic."""
    good = good_times(trace, members)
    if not good[trace.preperiod - 1:].any():
        return None
    tail = _tail_ok(trace, good)
    for n in range(1, trace.span + 1):
        if _periodic_with(trace, good, tail, n):
            return n
    return None


class DensePeriodicDetector(Detector):
    """Every minimal open contains a periodic point."""

    property_name = "dense_periodic"

    def __init__(self, family, horizon=None):
        # Periodicity is decided from the full trace; a horizon does not apply
        super().__init__(family, horizon=None)
        self._periods: Dict[int, Optional[int]] = {}

    def period_of(self, x: int) -> Optional[int]:
        if x not in self._periods:
            self._periods[x] = minimal_period(self.trace, [x])
        return self._periods[x]

    def execute(self) -> Verdict:
        witnesses = []
        for open_set in self._minimal_opens():
            best = None
            for x in open_set.members:
                n = self.period_of(x)
                if n is not None and (best is None or (n, x) < best):
                    best = (n, x)
            if best is None:
                logger.debug(f"No periodic point in {open_set.name}")
                return self.verdict(Status.FAILS, True, {
                    "open": open_set.name,
                    "members": self.ids(open_set.members),
                })
            witnesses.append([open_set.name, self.space.points[best[1]], best[0]])
        return self.verdict(Status.HOLDS, True, {"periodic_points": witnesses})


def periodic_witness_points(verdict: Verdict) -> Dict[str, Sequence]:
    """open name -> (point id, period) from a Holds dense-periodicity verdict."""
    return {name: (point, n) for name, point, n in verdict.witness.get("periodic_points", [])}
