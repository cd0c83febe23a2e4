"""
Unit tests for the dense grid helpers
"""

from fractions import Fraction

import pytest

from engine.utils.lattice import (
    clamp,
    covering_pairs,
    grid_points,
    grid_size,
    point_index,
    points_with_small_support,
    prefix_sums,
    strides,
    support_of,
    unit_differences,
)


@pytest.mark.parametrize("bounds", [(1,), (2, 1), (1, 2, 3)])
def test_point_index_follows_product_order(bounds):
    """Test point_index is the position in itertools.product order"""
    points = list(grid_points(bounds))

    assert len(points) == grid_size(bounds)
    assert [point_index(z, bounds) for z in points] == list(range(len(points)))


def test_strides():
    """Test row-major strides for mixed bounds"""
    assert strides((1, 2, 3)) == (12, 4, 1)
    assert strides((4,)) == (1,)


def test_covering_pairs_count():
    """Test (1, 2) has 1*3 + 2*2 covering pairs"""
    pairs = list(covering_pairs((1, 2)))

    assert len(pairs) == 7
    assert ((0, 0), 1, (0, 1)) in pairs


def test_points_with_small_support():
    """Test support at most one on {0,1,2}^3 is the origin plus six axis points"""
    points = list(points_with_small_support((2, 2, 2), max_support=1))

    assert len(points) == 7
    assert points == sorted(points)
    assert points[0] == (0, 0, 0)


def test_prefix_sums_of_ones():
    """Test the cumulative sum of ones counts the points below"""
    values = [Fraction(1)] * 4

    prefix_sums(values, (1, 1))

    assert values == [1, 2, 2, 4]


def test_unit_differences_undo_prefix_sums():
    """Test the two in-place transforms are inverse"""
    original = [Fraction(i * i - 3, i + 1) for i in range(12)]
    values = list(original)

    prefix_sums(values, (2, 3))
    unit_differences(values, (2, 3))

    assert values == original


def test_clamp_and_support():
    """Test clamping to bounds and reading the support"""
    assert clamp((3, 0, 2), (2, 2, 1)) == (2, 0, 1)
    assert support_of((0, 2, 0, 1)) == (1, 3)
