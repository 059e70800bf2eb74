import math

import pytest

from kolam.geometry import DotSet, JunctionPolicy

ROOT3 = math.sqrt(3.0)


@pytest.fixture
def two_dots():
    return DotSet.from_coords([(0.0, 0.0), (2.0, 0.0)])


@pytest.fixture
def line3():
    return DotSet.from_coords([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])


@pytest.fixture
def triangle3():
    return DotSet.from_coords([(0.0, 0.0), (1.0, 0.0), (0.5, ROOT3 / 2)])


@pytest.fixture
def line4():
    return DotSet.from_coords([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)])


@pytest.fixture
def square4():
    return DotSet.from_coords([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


@pytest.fixture
def tri_center4():
    # equilateral triangle of side 1 plus its centroid
    return DotSet.from_coords([
        (0.0, 0.0), (1.0, 0.0), (0.5, ROOT3 / 2), (0.5, ROOT3 / 6)])


@pytest.fixture
def all_pairs():
    return JunctionPolicy()


@pytest.fixture
def nn_policy():
    return JunctionPolicy(mode="nearest-neighbor")
