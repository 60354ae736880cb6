"""
Sensitivity, cofinite (strong) sensitivity and expansivity
"""
import logging
from fractions import Fraction
from typing import List, Optional

import numpy as np

from hyperdyn.core.family import MapFamily
from hyperdyn.detectors.base import WITNESS_LIMIT, Detector, Status, Verdict
from hyperdyn.utils.validation import validate_positive_int, validate_positive_rational

logger = logging.getLogger(__name__)


def exceeds(weights: np.ndarray, denominator: int, threshold: Fraction) -> np.ndarray:
    """Elementwise weights / denominator > threshold, in integers."""
    return weights * threshold.denominator > threshold.numerator * denominator


class SensitivityDetector(Detector):
    """Every minimal open U has some n with diam(omega_n(U)) > delta."""

    property_name = "sensitive"

    def __init__(self, family: MapFamily, delta, horizon: Optional[int] = None):
        super().__init__(family, horizon=horizon)
        self.delta = validate_positive_rational(delta, field_name="delta")

    def _spread(self, n: int, members):
        image = self.image(n, members)
        if len(image) < 2:
            return None
        return self.space.find_pair_beyond(image, self.delta)

    def execute(self) -> Verdict:
        params = {"delta": self.delta}
        witnesses = []
        for u in self._minimal_opens():
            hit = None
            for n in self.times:
                pair = self._spread(n, u.members)
                if pair is not None:
                    hit = (n, pair)
                    break
            if hit is None:
                witness = {"open": u.name, "members": self.ids(u.members)}
                if self.exact_window:
                    return self.verdict(Status.FAILS, True, witness, params)
                return self.verdict(Status.INCONCLUSIVE, False, witness, params)
            n, (x, y, d) = hit
            witnesses.append([u.name, n, self.space.points[x], self.space.points[y], d])
        return self.verdict(Status.HOLDS, True, {"spread": witnesses}, params)


class CofiniteSensitivityDetector(SensitivityDetector):
    """
    Every minimal open U has K_U with diam(omega_n(U)) > delta for all n >= K_U.

    Also reported as strong sensitivity.
    """

    property_name = "cofinitely_sensitive"

    def execute(self) -> Verdict:
        params = {"delta": self.delta}
        tau = self.trace.preperiod
        last = self.last_time
        per_open = []
        for u in self._minimal_opens():
            bad: List[int] = [n for n in self.times if self._spread(n, u.members) is None]
            if bad:
                if self.exact_window:
                    cyclic = [n for n in bad if n >= tau]
                    if cyclic:
                        return self.verdict(Status.FAILS, True, {
                            "open": u.name,
                            "n": cyclic[0],
                            "diameter": self.space.diameter(self.image(cyclic[0], u.members)),
                            "recurs_every": self.trace.cycle,
                        }, params)
                elif bad[-1] == last:
                    return self.verdict(Status.INCONCLUSIVE, False, {
                        "open": u.name,
                        "n": last,
                    }, params)
            per_open.append([u.name, bad[-1] + 1 if bad else 1])
        witness = {"K": max(k for _, k in per_open), "per_open": per_open}
        if not self.exact_window:
            # K so far; times past the horizon are unseen
            return self.verdict(Status.INCONCLUSIVE, False, witness, params)
        return self.verdict(Status.HOLDS, True, witness, params)


class ExpansivityDetector(Detector):
    """
    Every distinct pair separates beyond delta at some time k >= start.

    start=1 counts times from the first step; start=0 also admits the
    initial positions.
    """

    property_name = "expansive"

    def __init__(self, family: MapFamily, delta, horizon: Optional[int] = None, start: int = 1):
        super().__init__(family, horizon=horizon)
        self.delta = validate_positive_rational(delta, field_name="delta")
        self.start = validate_positive_int(start, field_name="start", minimum=0, maximum=1)

    def execute(self) -> Verdict:
        params = {"delta": self.delta, "start": self.start}
        weights, denominator = self.space.scaled_distances
        n = self.space.size
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        separated = np.zeros((n, n), dtype=bool)
        first = np.zeros((n, n), dtype=np.int64)
        if self.start == 0:
            separated = exceeds(weights, denominator, self.delta) & upper
        for k in self.times:
            if separated[upper].all():
                break
            table = self.trace.table(k)
            fresh = exceeds(weights[table[:, None], table[None, :]], denominator, self.delta)
            fresh &= upper & ~separated
            first[fresh] = k
            separated |= fresh
        stuck = np.argwhere(upper & ~separated)
        if len(stuck):
            x, y = (int(v) for v in stuck[0])
            witness = {"pair": [self.space.points[x], self.space.points[y]]}
            if self.exact_window:
                return self.verdict(Status.FAILS, True, witness, params)
            return self.verdict(Status.INCONCLUSIVE, False, witness, params)
        pairs = np.argwhere(upper)
        witness = {"max_k": int(first.max()) if n > 1 else 0, "pairs": len(pairs)}
        if len(pairs) <= WITNESS_LIMIT:
            witness["separation_times"] = [
                [self.space.points[x], self.space.points[y], int(first[x, y])] for x, y in pairs
            ]
        return self.verdict(Status.HOLDS, True, witness, params)
