"""
Reproduction suites

Each suite runs base and lifted detectors on pinned systems and checks the
relation the theory predicts between the two verdicts. repro() returns one
row per instance as a DataFrame with the columns in SUITE_COLUMNS.
"""
import itertools
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from hyperdyn.config import Budget
from hyperdyn.core.family import MapFamily, identity_table
from hyperdyn.core.space import validate_space
from hyperdyn.detectors import (
    check_cofinitely_sensitive,
    check_dense_periodic,
    check_equicontinuous,
    check_expansive,
    check_sensitive,
    check_topological_mixing,
    check_total_transitive,
    check_transitive,
    check_weak_mixing_order,
    find_scrambled_set,
    is_periodic,
    is_scrambled_set,
    minimal_period,
)
from hyperdyn.detectors.base import Verdict
from hyperdyn.detectors.periodicity import periodic_witness_points
from hyperdyn.entropy import (
    OpenCover,
    entropy_series,
    hyper_entropy_compare,
    join_covers,
    min_subcover_size,
)
from hyperdyn.hyperspace import as_hyper_system, build_hyperspace
from hyperdyn.utils.validation import ValidationError, format_rational
from hyperdyn.zoo import (
    interleave_identity,
    make_full_shift,
    make_interval_grid,
    make_odometer,
    make_permutation,
    make_random_finite,
    make_rotation,
)

logger = logging.getLogger(__name__)

SUITE_COLUMNS = [
    "proposition",
    "instance",
    "base_verdict",
    "lifted_verdict",
    "relation_expected",
    "relation_observed",
    "pass",
]

Row = Dict[str, object]


def _status(verdict: Optional[Verdict]) -> str:
    if verdict is None:
        return ""
    return verdict.status.value if verdict.exact else f"{verdict.status.value} (bounded)"


def _row(proposition: str, instance: str, base: str, lifted: str,
         expected: str, observed: str, passed: bool) -> Row:
    return {
        "proposition": proposition,
        "instance": instance,
        "base_verdict": base,
        "lifted_verdict": lifted,
        "relation_expected": expected,
        "relation_observed": observed,
        "pass": bool(passed),
    }


def _random_corpus(seeds) -> List[MapFamily]:
    return [
        make_random_finite(3 + seed % 5, 1 + seed % 3, seed=seed, bijective=seed % 2 == 0)
        for seed in seeds
    ]


def _zoo_corpus(budget: Budget) -> List[MapFamily]:
    return [
        make_full_shift(length=3, depth=1, budget=budget),
        make_odometer(length=3, budget=budget),
        make_interval_grid("tent", cells=8, spans=(3,), budget=budget),
        make_rotation(4),
        make_permutation([1, 0, 2, 3], metric="discrete"),
    ]


def periodic_lift_suite(budget: Budget) -> List[Row]:
    """Dense periodic points pass to the hyperspace on sets of size <= 3."""
    rows = []
    m = 3
    for family in _random_corpus(range(50)):
        base = check_dense_periodic(family)
        if not base.holds:
            logger.debug(f"{family.name}: base not dense periodic, skipped")
            continue
        lifted = check_dense_periodic(as_hyper_system(family, m, budget=budget))

        # Every Vietoris basic <U_1..U_j> holds the set of base witnesses of
        # its U_i, which is periodic with the lcm of their periods.
        witness = {name: (family.space.index(x), n) for name, (x, n) in periodic_witness_points(base).items()}
        minimal = family.space.minimal_opens
        certified = True
        largest = 1
        for j in range(1, min(m, len(minimal)) + 1):
            for combo in itertools.combinations(minimal, j):
                members = sorted({witness[o.name][0] for o in combo})
                period = math.lcm(*(witness[o.name][1] for o in combo))
                largest = max(largest, period)
                if not is_periodic(family.trace, members, period):
                    certified = False
        observed = f"lifted {_status(lifted)}; witness sets periodic (lcm up to {largest})"
        rows.append(_row(
            "prop-periodic-lift", family.name, _status(base), _status(lifted),
            "base Holds => lifted Holds", observed if certified else "witness set not periodic",
            lifted.holds and certified,
        ))
    return rows


def odometer_periods_suite(budget: Budget) -> List[Row]:
    """Identity-first interleaved odometer: singletons need 2^(K+1), length-2 cylinders need 8."""
    rows = []
    for k in range(3, 7):
        family = interleave_identity(make_odometer(length=k, budget=budget), position="first")
        space = family.space
        singleton = min(minimal_period(family.trace, [x]) or 0 for x in range(space.size))
        expected = 2 ** (k + 1)
        rows.append(_row(
            "odometer-periods", f"K={k} singletons", f"period {singleton}", "",
            f"period {expected}", f"period {singleton}", singleton == expected,
        ))
        cylinder = [i for i, p in enumerate(space.points) if p.startswith("00")]
        period = minimal_period(family.trace, cylinder)
        rows.append(_row(
            "odometer-periods", f"K={k} cylinder [00]", "", f"period {period}",
            "period 8", f"period {period}", period == 8,
        ))
    return rows


def transitivity_pullback_suite(budget: Budget) -> List[Row]:
    """Lifted transitivity (and total transitivity) forces it on the base."""
    rows = []
    for family in _random_corpus(range(20)) + _zoo_corpus(budget):
        lifted_family = as_hyper_system(family, 2, budget=budget)
        for label, check in (
            ("transitive", check_transitive),
            ("total_transitive", lambda f: check_total_transitive(f, max_n=3)),
        ):
            base = check(family)
            lifted = check(lifted_family)
            violated = lifted.holds and lifted.exact and base.fails
            rows.append(_row(
                "transitivity-pullback", f"{family.name} {label}", _status(base), _status(lifted),
                "lifted Holds => base Holds",
                "violated" if violated else "consistent",
                not violated,
            ))
    return rows


def _folded_swap(budget: Budget) -> MapFamily:
    """Words of length 2 folded onto {00, 10}, which then swap; exactly mixing from n = 1."""
    shift = make_full_shift(length=2, depth=1, budget=budget)
    return shift.with_maps([np.array([2, 0, 0, 2], dtype=np.int64)], name="fold-swap(2,2)")


def mixing_agreement_suite(budget: Budget) -> List[Row]:
    """Base and lifted topological mixing agree."""
    families = [make_full_shift(length=n, depth=1, budget=budget) for n in (3, 4, 5)]
    families += [_folded_swap(budget)] + _random_corpus(range(100, 120))
    rows = []
    for family in families:
        base = check_topological_mixing(family)
        lifted = check_topological_mixing(as_hyper_system(family, 2, budget=budget))
        rows.append(_row(
            "mixing-agreement", family.name, _status(base), _status(lifted),
            "base <=> lifted", "agree" if base.status is lifted.status else "disagree",
            base.status is lifted.status,
        ))
    return rows


def strong_sensitivity_suite(budget: Budget) -> List[Row]:
    """Cofinite (strong) sensitivity agrees on base and lifted, delta half the minimum distance."""
    families = [make_interval_grid("tent", cells=n, spans=(3,), budget=budget) for n in (32, 64)]
    families += [make_full_shift(length=n, depth=1, budget=budget) for n in (3, 4)]
    rows = []
    for family in families:
        delta = family.space.min_positive_distance / 2
        base = check_cofinitely_sensitive(family, delta)
        lifted = check_cofinitely_sensitive(as_hyper_system(family, 2, budget=budget), delta)
        rows.append(_row(
            "strong-sensitivity", f"{family.name} delta={format_rational(delta)}",
            _status(base), _status(lifted), "base <=> lifted",
            "agree" if base.status is lifted.status else "disagree",
            base.status is lifted.status,
        ))
    return rows


def weak_mixing_suite(budget: Budget) -> List[Row]:
    """Weak mixing of all orders on the base matches weak mixing on the hyperspace."""
    rows = []
    shift = make_full_shift(length=3, depth=1, powers=(1, 2), budget=budget)
    orders = [check_weak_mixing_order(shift, k=k, budget=budget) for k in (1, 2, 3)]
    lifted = check_weak_mixing_order(as_hyper_system(shift, 2, budget=budget), k=2, budget=budget)
    base_summary = ", ".join(f"k={k}: {_status(v)}" for k, v in zip((1, 2, 3), orders))
    all_hold = all(v.holds for v in orders)
    rows.append(_row(
        "weak-mixing", shift.name, base_summary, _status(lifted),
        "all orders Hold and lifted Holds",
        "as expected" if all_hold and lifted.holds else "mismatch",
        all_hold and lifted.holds,
    ))

    rotation = make_rotation(4)
    base = check_weak_mixing_order(rotation, k=2, budget=budget)
    lifted = check_weak_mixing_order(as_hyper_system(rotation, 2, budget=budget), k=2, budget=budget)
    rows.append(_row(
        "weak-mixing", rotation.name, f"k=2: {_status(base)}", _status(lifted),
        "order 2 Fails and lifted Fails",
        "as expected" if base.fails and lifted.fails else "mismatch",
        base.fails and lifted.fails,
    ))
    return rows


def entropy_suite(budget: Budget) -> List[Row]:
    """Cylinder-cover entropy of the shift, the identity, and lifted dominance."""
    rows = []
    shift = make_full_shift(length=12, depth=1, budget=budget)
    cover = OpenCover.from_opens(shift.space)
    series = entropy_series(shift, cover, 10, budget=budget)
    exact = series.counts == [2 ** k for k in range(1, 11)]
    rows.append(_row(
        "entropy", f"{shift.name} k_max=10", f"limsup {series.limsup_estimate:.6f}", "",
        "H_k/k = log 2 for every k", "as expected" if exact else f"counts {series.counts}", exact,
    ))

    identity = shift.with_maps([identity_table(shift.space.size)], name="identity(2,12)")
    series = entropy_series(identity, cover, 10, budget=budget)
    first = series.terms[0].h
    decays = all(math.isclose(t.rate, first / t.k) for t in series.terms)
    rows.append(_row(
        "entropy", f"{identity.name} k_max=10", f"limsup {series.limsup_estimate:.6f}", "",
        "H_k/k = H_1/k", "as expected" if decays else f"counts {series.counts}", decays,
    ))

    small = make_full_shift(length=8, depth=1, budget=budget)
    comparison = hyper_entropy_compare(small, 2, OpenCover.from_opens(small.space), 6, budget=budget)
    rows.append(_row(
        "entropy", f"{small.name} m=2 k_max=6", str(comparison.base.counts), str(comparison.lifted.counts),
        "lifted N_k >= base N_k", "dominates" if comparison.dominance else "does not dominate",
        comparison.dominance,
    ))
    return rows


def _random_refinement(rng: np.random.Generator, size: int):
    """(fine, coarse) covers of range(size) with fine refining coarse."""
    k = int(rng.integers(2, 6))
    fine = rng.random((k, size)) < 0.4
    fine[rng.integers(0, k, size=size), np.arange(size)] = True
    partner = rng.integers(0, k, size=k)
    coarse = fine | fine[partner]
    return OpenCover(fine), OpenCover(coarse)


def metric_laws_suite(budget: Budget) -> List[Row]:
    """Hausdorff metric axioms, cover refinement monotonicity and the singleton isometry."""
    rows = []
    base = make_random_finite(6, seed=7).space
    hyper = build_hyperspace(base, 3, budget=budget)
    try:
        validate_space(hyper)
        ok, observed = True, f"{hyper.size} hyperpoints checked"
    except ValidationError as e:
        ok, observed = False, str(e)
    rows.append(_row("metric-laws", f"{hyper.name} axioms", "", "", "metric axioms", observed, ok))

    rng = np.random.default_rng(2024)
    failures = 0
    for _ in range(200):
        fine, coarse = _random_refinement(rng, 6)
        third, _ = _random_refinement(rng, 6)
        if not fine.refines(coarse):
            failures += 1
            continue
        if min_subcover_size(coarse, budget=budget) > min_subcover_size(fine, budget=budget):
            failures += 1
        elif (min_subcover_size(join_covers(coarse, third, budget=budget), budget=budget)
              > min_subcover_size(join_covers(fine, third, budget=budget), budget=budget)):
            failures += 1
    rows.append(_row(
        "metric-laws", "200 seeded cover pairs", "", "", "finer cover needs no fewer sets",
        f"{200 - failures}/200 consistent", failures == 0,
    ))

    spaces = [family.space for family in _zoo_corpus(budget)] + [base]
    for space in spaces:
        lifted = build_hyperspace(space, 2, budget=budget)
        n = space.size
        isometric = all(
            lifted.distance(i, j) == space.distance(i, j)
            for i in range(n) for j in range(i + 1, n)
        )
        rows.append(_row(
            "metric-laws", f"{space.name} singletons", "", "", "d_H({x},{y}) = d(x,y)",
            "isometric" if isometric else "not isometric", isometric,
        ))
    return rows


def equicontinuity_suite(budget: Budget) -> List[Row]:
    """Uniform equicontinuity agrees on base and lifted."""
    shift = make_full_shift(length=4, depth=1, budget=budget)
    cases = [
        (make_rotation(5), "Holds"),
        (make_permutation([2, 0, 1, 3], metric="discrete"), "Holds"),
        (shift.with_maps([identity_table(shift.space.size)], name="identity(2,4)"), "Holds"),
        (make_interval_grid("tent", cells=8, spans=(3,), budget=budget), "Fails"),
        (shift, "Fails"),
    ]
    rows = []
    for family, expected in cases:
        base = check_equicontinuous(family)
        lifted = check_equicontinuous(as_hyper_system(family, 2, budget=budget))
        passed = base.status.value == expected and lifted.status.value == expected
        rows.append(_row(
            "equicontinuity", family.name, _status(base), _status(lifted),
            f"{expected}/{expected}", "agree" if base.status is lifted.status else "disagree", passed,
        ))
    return rows


def expansive_pullback_suite(budget: Budget) -> List[Row]:
    """Lifted expansivity forces base expansivity."""
    rows = []
    families = [make_full_shift(length=n, depth=1, budget=budget) for n in (3, 4)]
    families += [make_rotation(4)] + _random_corpus(range(10))
    for family in families:
        delta = family.space.min_positive_distance / 2
        lifted_family = as_hyper_system(family, 2, budget=budget)
        for start in (0, 1):
            base = check_expansive(family, delta, start=start)
            lifted = check_expansive(lifted_family, delta, start=start)
            violated = lifted.holds and lifted.exact and base.fails
            rows.append(_row(
                "expansive-pullback", f"{family.name} start={start}", _status(base), _status(lifted),
                "lifted Holds => base Holds", "violated" if violated else "consistent", not violated,
            ))
    return rows


def li_yorke_suite(budget: Budget) -> List[Row]:
    """A base scrambled set stays scrambled as singletons in the hyperspace."""
    family = make_full_shift(length=5, depth=3, budget=budget)
    delta, horizon, window = Fraction(1, 4), 4, 4
    base = find_scrambled_set(family, delta, horizon=horizon, window=window)
    members = family.space.indices(base.witness["set"])
    lifted_family = as_hyper_system(family, 2, budget=budget)
    # singleton {x} has the index of x
    embedded = is_scrambled_set(lifted_family, members, delta, horizon=horizon, window=window)
    passed = len(members) >= 2 and embedded
    return [_row(
        "li-yorke", f"{family.name} delta=1/4 horizon={horizon}",
        f"{_status(base)} size {len(members)}", "singletons scrambled" if embedded else "not scrambled",
        "scrambled set embeds", "embeds" if passed else "does not embed", passed,
    )]


def sensitivity_pullback_suite(budget: Budget) -> List[Row]:
    """Lifted sensitivity forces base sensitivity."""
    cases = [
        (make_interval_grid("tent", cells=8, spans=(3,), budget=budget), Fraction(1, 4)),
        (make_full_shift(length=3, depth=1, budget=budget), Fraction(1, 2)),
        (make_rotation(5), Fraction(1, 10)),
    ]
    cases += [(family, family.space.min_positive_distance / 2) for family in _random_corpus(range(10))]
    rows = []
    for family, delta in cases:
        base = check_sensitive(family, delta)
        lifted = check_sensitive(as_hyper_system(family, 2, budget=budget), delta)
        violated = lifted.holds and base.fails
        rows.append(_row(
            "sensitivity-pullback", f"{family.name} delta={format_rational(delta)}",
            _status(base), _status(lifted), "lifted Holds => base Holds",
            "violated" if violated else "consistent", not violated,
        ))
    return rows


SUITES: Dict[str, Callable[[Budget], List[Row]]] = {
    "prop-periodic-lift": periodic_lift_suite,
    "odometer-periods": odometer_periods_suite,
    "transitivity-pullback": transitivity_pullback_suite,
    "mixing-agreement": mixing_agreement_suite,
    "strong-sensitivity": strong_sensitivity_suite,
    "weak-mixing": weak_mixing_suite,
    "entropy": entropy_suite,
    "metric-laws": metric_laws_suite,
    "equicontinuity": equicontinuity_suite,
    "expansive-pullback": expansive_pullback_suite,
    "li-yorke": li_yorke_suite,
    "sensitivity-pullback": sensitivity_pullback_suite,
}

SUITE_ALIASES = {"example-1": "odometer-periods"}


def repro(suite: str, budget: Optional[Budget] = None) -> pd.DataFrame:
    """
    Run one suite, or every suite with a final pass-count row for "all".

    Raises:
        ValidationError: If the suite id is unknown
    """
    budget = budget or Budget()
    suite = SUITE_ALIASES.get(suite, suite)
    if suite == "all":
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ValidationError(
            f"unknown suite '{suite}' (expected one of {', '.join(SUITES)}, all)"
        )

    rows: List[Row] = []
    for name in names:
        logger.info(f"Running suite {name}")
        suite_rows = SUITES[name](budget)
        passed = sum(r["pass"] for r in suite_rows)
        logger.info(f"Suite {name}: {passed}/{len(suite_rows)} passed")
        rows.extend(suite_rows)

    if suite == "all":
        passed = sum(r["pass"] for r in rows)
        rows.append(_row("all", f"{passed}/{len(rows)} passed", "", "", "", "", passed == len(rows)))
    return pd.DataFrame(rows, columns=SUITE_COLUMNS)
