"""
Equicontinuity on a finite model

Epsilon and delta range over realized positive distances with non-strict
inequalities. The smallest realized distance r is the resolution floor: the
best delta for any epsilon is r itself, so the system is equicontinuous iff
every pair at distance r stays within r for all n >= 1. Uniform and pointwise
modes agree in verdict and differ only in the delta table they report.
"""
import logging
from fractions import Fraction
from typing import List

import numpy as np

from hyperdyn.core.family import MapFamily
from hyperdyn.detectors.base import Detector, Status, Verdict
from hyperdyn.utils.validation import ValidationError

logger = logging.getLogger(__name__)

MODES = ("uniform", "pointwise")

# Spaces up to this size get a full sup-distance table and delta witness
FULL_TABLE_LIMIT = 400


class EquicontinuityDetector(Detector):
    property_name = "equicontinuous"

    def __init__(self, family: MapFamily, mode: str = "uniform"):
        super().__init__(family, horizon=None)
        if mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
        self.mode = mode

    def _largest_below(self, values: np.ndarray, bound) -> int:
        """Largest realized value strictly below bound (bound None means no bound)."""
        if bound is None:
            return int(values[-1])
        return int(values[values < bound][-1])

    def execute(self) -> Verdict:
        params = {"mode": self.mode}
        n = self.space.size
        if n < 2:
            return self.verdict(Status.HOLDS, True, {"delta": []}, params)

        weights, denominator = self.space.scaled_distances
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        values = np.unique(weights[upper])
        floor = values[0]
        floor_pairs = np.argwhere(upper & (weights == floor))
        stack = self.trace.stack

        # sup_n d(omega_n x, omega_n y) over the floor pairs
        xs, ys = floor_pairs[:, 0], floor_pairs[:, 1]
        pair_sup = weights[stack[:, xs], stack[:, ys]].max(axis=0)
        broken = np.flatnonzero(pair_sup > floor)
        if len(broken):
            x, y = int(xs[broken[0]]), int(ys[broken[0]])
            along = weights[stack[:, x], stack[:, y]]
            step = int(np.argmax(along > floor)) + 1
            return self.verdict(Status.FAILS, True, {
                "epsilon": Fraction(int(floor), denominator),
                "x": self.space.points[x],
                "y": self.space.points[y],
                "n": step,
                "distance_at_n": Fraction(int(along[step - 1]), denominator),
            }, params)

        witness = {"epsilon_floor": Fraction(int(floor), denominator)}
        if n > FULL_TABLE_LIMIT:
            witness["delta"] = Fraction(int(floor), denominator)
            return self.verdict(Status.HOLDS, True, witness, params)

        # sup over n >= 1; the initial distance is not part of it
        sup = np.zeros_like(weights)
        for table in stack:
            sup = np.maximum(sup, weights[table[:, None], table[None, :]])

        if self.mode == "uniform":
            rows: List[list] = []
            for eps in values:
                bad = upper & (sup > eps)
                bound = weights[bad].min() if bad.any() else None
                delta = self._largest_below(values, bound)
                rows.append([Fraction(int(eps), denominator), Fraction(delta, denominator)])
            witness["delta_by_epsilon"] = rows
        else:
            off_diagonal = ~np.eye(n, dtype=bool)
            rows = []
            for x in range(n):
                bad = off_diagonal[x] & (sup[x] > floor)
                bound = weights[x][bad].min() if bad.any() else None
                delta = self._largest_below(values, bound)
                rows.append([self.space.points[x], Fraction(delta, denominator)])
            witness["delta_by_point"] = rows
        return self.verdict(Status.HOLDS, True, witness, params)
