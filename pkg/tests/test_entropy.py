"""Tests for covers, joins and entropy series"""
import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdyn.config import Budget
from hyperdyn.core.family import identity_table
from hyperdyn.entropy import (
    OpenCover,
    entropy_series,
    hyper_entropy_compare,
    join_covers,
    min_subcover_size,
    preimage_cover,
    separated_entropy,
)
from hyperdyn.utils.validation import ResourceError, ValidationError
from hyperdyn.zoo import interleave_identity, make_full_shift


def test_min_subcover_of_a_triangle():
    cover = OpenCover.from_members(3, [[0, 1], [1, 2], [0, 2]])
    assert min_subcover_size(cover) == 2


def test_min_subcover_shortcuts():
    assert min_subcover_size(OpenCover.from_members(3, [[0, 1, 2], [0]])) == 1
    assert min_subcover_size(OpenCover.from_members(4, [[0], [1, 2], [3]])) == 3


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=4),
                min_size=1, max_size=7))
def test_min_subcover_matches_brute_force(sets):
    sets = sets + [[i] for i in range(6)]
    cover = OpenCover.from_members(6, sets)
    members = [set(s) for s in cover.sets]
    best = next(
        size
        for size in range(1, len(members) + 1)
        if any(
            set().union(*(members[i] for i in combo)) == set(range(6))
            for combo in itertools.combinations(range(len(members)), size)
        )
    )
    assert min_subcover_size(cover) == best


def test_join_of_partitions():
    alpha = OpenCover.from_members(3, [[0, 1], [2]])
    beta = OpenCover.from_members(3, [[0], [1, 2]])
    joined = join_covers(alpha, beta)
    assert sorted(joined.sets) == [(0,), (1,), (2,)]
    assert joined.refines(alpha)
    assert joined.refines(beta)
    assert not alpha.refines(beta)


def test_cover_validation(shift3):
    with pytest.raises(ValidationError, match="not a cover"):
        OpenCover.from_ids(shift3.space, [["000", "001"]])
    with pytest.raises(ValidationError, match="empty"):
        OpenCover.from_ids(shift3.space, [[]])


def test_join_budget():
    cover = OpenCover.from_members(4, [[0], [1], [2], [3]])
    with pytest.raises(ResourceError):
        join_covers(cover, cover, budget=Budget(max_join_sets=15))


def test_preimage_cover(shift3):
    cover = OpenCover.from_opens(shift3.space)
    pulled = preimage_cover(shift3, 1, cover)
    # sigma^-1 [b] is the set of words whose second symbol is b
    second = {shift3.space.points[i][1] for i in pulled.sets[0]}
    assert len(second) == 1
    assert len(pulled) == 2


def test_shift_entropy_is_log_two():
    shift = make_full_shift(length=12, depth=1)
    series = entropy_series(shift, OpenCover.from_opens(shift.space), 6)
    assert series.counts == [2 ** k for k in range(1, 7)]
    assert all(math.isclose(t.rate, math.log(2)) for t in series.terms)
    assert math.isclose(series.limsup_estimate, math.log(2))
    assert series.window == 2


def test_interleaved_shift_entropy():
    shift = make_full_shift(length=12, depth=1)
    family = interleave_identity(shift, "second")
    series = entropy_series(family, OpenCover.from_opens(shift.space), 8)
    assert series.counts == [2 ** (k // 2 + 1) for k in range(1, 9)]


def test_identity_entropy_decays(shift3):
    identity = shift3.with_maps([identity_table(shift3.space.size)], name="identity")
    series = entropy_series(identity, OpenCover.from_opens(shift3.space), 5)
    assert series.counts == [2] * 5
    assert math.isclose(series.terms[-1].rate, math.log(2) / 5)


def test_series_frame_in_bits():
    shift = make_full_shift(length=6, depth=1)
    series = entropy_series(shift, OpenCover.from_opens(shift.space), 3)
    frame = series.to_frame("2")
    assert list(frame.columns) == ["k", "N_k", "H_k", "H_k/k"]
    assert frame["H_k/k"].tolist() == pytest.approx([1.0, 1.0, 1.0])
    assert series.summary("2")["limsup_estimate"] == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        series.to_frame("10")


def test_entropy_budget_keeps_partial_series():
    shift = make_full_shift(length=6, depth=1)
    with pytest.raises(ResourceError) as excinfo:
        entropy_series(shift, OpenCover.from_opens(shift.space), 6, budget=Budget(max_join_sets=8))
    assert excinfo.value.partial.counts == [2, 4, 8]


def test_separated_entropy_of_shift():
    shift = make_full_shift(length=10, depth=1)
    series = separated_entropy(shift, "3/4", 5)
    assert series.counts == [2 ** n for n in range(1, 6)]
    assert series.kind == "separated"


def test_separated_entropy_rejects_zero_epsilon(shift3):
    with pytest.raises(ValidationError):
        separated_entropy(shift3, "0", 3)


def test_lifted_entropy_dominates():
    shift = make_full_shift(length=4, depth=1)
    comparison = hyper_entropy_compare(shift, 2, OpenCover.from_opens(shift.space), 3)
    assert comparison.base.counts == [2, 4, 8]
    assert comparison.dominance
    assert comparison.to_dict()["dominance"] is True
