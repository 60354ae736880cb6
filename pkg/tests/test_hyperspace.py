"""Tests for the Hausdorff hyperspace and induced systems"""
import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdyn.config import Budget
from hyperdyn.core.space import DistanceMatrix, OpenSet, SpaceModel, validate_space
from hyperdyn.hyperspace import (
    HyperPoint,
    VietorisBasic,
    as_hyper_system,
    build_hyperspace,
    hausdorff_distance,
    hyperspace_size,
    lift_image,
    upper_vietoris_contains,
    vietoris_contains,
)
from hyperdyn.utils.validation import ResourceError, ValidationError
from hyperdyn.zoo import make_random_finite


def test_hyperpoints_are_canonical(shift3):
    space = shift3.space
    a = HyperPoint.of(space, ["011", "000", "011"])
    assert a.ids == ["000", "011"]
    assert str(a) == "{000,011}"
    with pytest.raises(ValidationError):
        HyperPoint(space, ())


def test_hausdorff_distance_on_cylinders(shift3):
    space = shift3.space
    a = HyperPoint.of(space, ["000", "010"])
    b = HyperPoint.of(space, ["000", "011"])
    c = HyperPoint.of(space, ["100"])
    assert hausdorff_distance(a, b) == Fraction(1, 4)
    assert hausdorff_distance(a, c) == 1
    assert hausdorff_distance(a, a) == 0


def test_hausdorff_needs_same_space(shift3, shift4):
    with pytest.raises(ValidationError, match="different base spaces"):
        hausdorff_distance(HyperPoint.of(shift3.space, ["000"]), HyperPoint.of(shift4.space, ["0000"]))


def test_vietoris_membership(shift3):
    space = shift3.space
    basic = VietorisBasic.of(space, [["000", "001"], ["100"]])
    assert vietoris_contains(basic, HyperPoint.of(space, ["001", "100"]))
    assert not vietoris_contains(basic, HyperPoint.of(space, ["001"]))
    assert not vietoris_contains(basic, HyperPoint.of(space, ["001", "100", "111"]))
    with pytest.raises(ValidationError):
        vietoris_contains(VietorisBasic(()), HyperPoint.of(space, ["001"]))
    assert upper_vietoris_contains([0, 1], HyperPoint(space, (0, 1)))
    assert not upper_vietoris_contains([0], HyperPoint(space, (0, 1)))


def test_hyperspace_enumeration(shift3):
    hyper = build_hyperspace(shift3.space, 2)
    assert hyper.size == hyperspace_size(8, 2) == 8 + 28
    # the singleton {x} has the index of x
    assert hyper.points[:8] == tuple("{" + p + "}" for p in shift3.space.points)
    assert hyper.locate([3, 1]) == hyper.member_index[(1, 3)]
    with pytest.raises(ValidationError, match="outside the hyperspace"):
        hyper.locate([0, 1, 2])


def test_hyperspace_budget(shift3):
    with pytest.raises(ResourceError) as excinfo:
        build_hyperspace(shift3.space, 3, budget=Budget(max_hyperspace_points=10))
    assert excinfo.value.quantity == 8 + 28 + 56
    assert excinfo.value.limit == 10


def test_singletons_embed_isometrically(tent8):
    hyper = build_hyperspace(tent8.space, 2)
    for i, j in itertools.combinations(range(8), 2):
        assert hyper.distance(i, j) == tent8.space.distance(i, j)


def test_vectorized_distances_match_direct(shift3):
    hyper = build_hyperspace(shift3.space, 3)
    weights, denominator = hyper.scaled_distances
    for i in range(0, hyper.size, 7):
        for j in range(0, hyper.size, 5):
            expected = hausdorff_distance(hyper.hyperpoint(i), hyper.hyperpoint(j))
            assert Fraction(int(weights[i, j]), denominator) == expected


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), n_points=st.integers(min_value=2, max_value=5))
def test_hausdorff_metric_axioms(seed, n_points):
    base = make_random_finite(n_points, seed=seed).space
    validate_space(build_hyperspace(base, 3))


def test_vietoris_base_over_minimal_opens(shift3):
    hyper = build_hyperspace(shift3.space, 2)
    names = [o.name for o in hyper.open_base]
    assert names == ["<[0]>", "<[1]>", "<[0],[1]>"]
    mixed = hyper.open_base[2]
    assert all(
        {p[0] for p in hyper.hyperpoint(i).ids} == {"0", "1"} for i in mixed.members
    )


def test_vietoris_base_covers_points_outside_minimal_opens():
    opens = [OpenSet("{0,1,2}", (0, 1, 2)), OpenSet("{1,2}", (1, 2))]
    base = SpaceModel(points=("0", "1", "2"), metric=DistanceMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]]),
                      base_factory=lambda: opens)
    hyper = build_hyperspace(base, 2)
    assert [o.name for o in hyper.open_base] == ["<{0,1,2}>", "<{1,2}>", "<{0,1,2},{1,2}>"]
    assert [o.name for o in hyper.neighbourhoods[hyper.index("{0}")]] == ["<{0,1,2}>"]
    validate_space(hyper)


def test_lift_image_matches_lifted_system(shift3):
    lifted = as_hyper_system(shift3, 2)
    space = shift3.space
    a = HyperPoint.of(space, ["101", "111"])
    image = lift_image(shift3, 1, a)
    assert image.ids == ["010", "110"]
    i = lifted.space.locate(a.members)
    assert lifted.space.points[int(lifted.trace.table(1)[i])] == "{010,110}"


def test_lifted_images_can_shrink(shift3):
    space = shift3.space
    a = HyperPoint.of(space, ["000", "100"])
    assert lift_image(shift3, 1, a).ids == ["000"]


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000), n=st.integers(min_value=1, max_value=20))
def test_lifted_trace_agrees_with_base(seed, n):
    family = make_random_finite(4, 2, seed=seed)
    lifted = as_hyper_system(family, 2)
    hyper = lifted.space
    table = lifted.trace.table(n)
    for index, members in enumerate(hyper.hyperpoints):
        expected = lift_image(family, n, HyperPoint(family.space, members))
        assert hyper.hyperpoints[int(table[index])] == expected.members
    assert np.array_equal(table[:4], family.trace.table(n))


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    n=st.integers(min_value=1, max_value=12),
    data=st.data(),
)
def test_lift_image_is_monotone(seed, n, data):
    family = make_random_finite(6, 2, seed=seed)
    outer = data.draw(st.lists(st.integers(0, 5), min_size=1, max_size=6, unique=True))
    inner = data.draw(st.lists(st.sampled_from(outer), min_size=1, max_size=len(outer), unique=True))
    small = lift_image(family, n, HyperPoint(family.space, tuple(inner)))
    large = lift_image(family, n, HyperPoint(family.space, tuple(outer)))
    assert set(small.members) <= set(large.members)
