"""Shared fixtures: small systems whose dynamics are worked out by hand"""
import pytest

from hyperdyn.core.serialization import family_from_dict
from hyperdyn.zoo import make_full_shift, make_interval_grid, make_odometer, make_permutation


@pytest.fixture
def two_point_description():
    """Points a, b at distance 1 with the family [swap, identity]."""
    return {
        "name": "swap-then-id",
        "points": ["a", "b"],
        "metric": [["0", "1"], ["1", "0"]],
        "maps": [["b", "a"], ["a", "b"]],
    }


@pytest.fixture
def swap_identity(two_point_description):
    return family_from_dict(two_point_description)


@pytest.fixture
def shift3():
    """Full shift on words of length 3, opens [0] and [1]."""
    return make_full_shift(length=3, depth=1)


@pytest.fixture
def shift4():
    return make_full_shift(length=4, depth=1)


@pytest.fixture
def tent8():
    """Tent map on 8 cells, opens are runs of 3 adjacent cells."""
    return make_interval_grid("tent", cells=8, spans=(3,))


@pytest.fixture
def odometer2():
    return make_odometer(length=2)


@pytest.fixture
def rotation4():
    return make_permutation([1, 2, 3, 0], metric="cyclic", name="rot(4,1)")
