"""Property detectors and their check_* entry points"""
from typing import Optional

from hyperdyn.config import Budget
from hyperdyn.core.family import MapFamily
from hyperdyn.detectors.base import Status, Verdict
from hyperdyn.detectors.equicontinuity import EquicontinuityDetector
from hyperdyn.detectors.periodicity import (
    DensePeriodicDetector,
    is_periodic,
    minimal_period,
)
from hyperdyn.detectors.scrambled import (
    ChaoticDependenceDetector,
    ScrambledPairsDetector,
    find_scrambled_pairs,
    find_scrambled_set,
    is_scrambled_set,
)
from hyperdyn.detectors.sensitivity import (
    CofiniteSensitivityDetector,
    ExpansivityDetector,
    SensitivityDetector,
)
from hyperdyn.detectors.transitivity import (
    MixingDetector,
    TotalTransitivityDetector,
    TransitivityDetector,
    WeakMixingDetector,
)


def check_dense_periodic(family: MapFamily, horizon: Optional[int] = None) -> Verdict:
    return DensePeriodicDetector(family, horizon=horizon).execute()


def check_transitive(family: MapFamily, horizon: Optional[int] = None) -> Verdict:
    return TransitivityDetector(family, horizon=horizon).execute()


def check_total_transitive(family: MapFamily, max_n: int = 3, horizon: Optional[int] = None) -> Verdict:
    return TotalTransitivityDetector(family, max_n=max_n, horizon=horizon).execute()


def check_weak_mixing_order(family: MapFamily, k: int = 2, horizon: Optional[int] = None,
                            budget: Optional[Budget] = None) -> Verdict:
    return WeakMixingDetector(family, order=k, horizon=horizon, budget=budget).execute()


def check_topological_mixing(family: MapFamily, horizon: Optional[int] = None) -> Verdict:
    return MixingDetector(family, horizon=horizon).execute()


def check_sensitive(family: MapFamily, delta, horizon: Optional[int] = None) -> Verdict:
    return SensitivityDetector(family, delta, horizon=horizon).execute()


def check_cofinitely_sensitive(family: MapFamily, delta, horizon: Optional[int] = None) -> Verdict:
    return CofiniteSensitivityDetector(family, delta, horizon=horizon).execute()


# Strong sensitivity and cofinite sensitivity are the same property
check_strongly_sensitive = check_cofinitely_sensitive


def check_equicontinuous(family: MapFamily, mode: str = "uniform") -> Verdict:
    return EquicontinuityDetector(family, mode=mode).execute()


def check_expansive(family: MapFamily, delta, horizon: Optional[int] = None, start: int = 1) -> Verdict:
    return ExpansivityDetector(family, delta, horizon=horizon, start=start).execute()


def check_li_yorke_sensitive(family: MapFamily, delta, horizon: Optional[int] = None,
                             window: Optional[int] = None) -> Verdict:
    return ScrambledPairsDetector(family, delta, horizon=horizon, window=window).execute()


def check_chaotic_dependence(family: MapFamily, horizon: Optional[int] = None,
                             window: Optional[int] = None) -> Verdict:
    return ChaoticDependenceDetector(family, horizon=horizon, window=window).execute()


__all__ = [
    "Status",
    "Verdict",
    "check_dense_periodic",
    "check_transitive",
    "check_total_transitive",
    "check_weak_mixing_order",
    "check_topological_mixing",
    "check_sensitive",
    "check_cofinitely_sensitive",
    "check_strongly_sensitive",
    "check_equicontinuous",
    "check_expansive",
    "check_li_yorke_sensitive",
    "check_chaotic_dependence",
    "find_scrambled_pairs",
    "find_scrambled_set",
    "is_scrambled_set",
    "is_periodic",
    "minimal_period",
]
