"""
Grid helpers shared by the models and services

A grid is described by its per-coordinate level bounds (m_1, ..., m_n); the
uniform k-ary grid is the special case m_i = k. Dense tables are stored in
lexicographic order of coordinates, which is the order of itertools.product.
"""

import itertools
import math
from collections.abc import Iterator, MutableSequence, Sequence
from fractions import Fraction

from .rationals import GridPoint


def uniform_bounds(n: int, k: int) -> tuple[int, ...]:
    return (k,) * n


def grid_size(bounds: Sequence[int]) -> int:
    return math.prod(m + 1 for m in bounds)


def grid_points(bounds: Sequence[int]) -> Iterator[GridPoint]:
    return itertools.product(*(range(m + 1) for m in bounds))


def strides(bounds: Sequence[int]) -> tuple[int, ...]:
    result = [1] * len(bounds)
    for i in range(len(bounds) - 2, -1, -1):
        result[i] = result[i + 1] * (bounds[i + 1] + 1)
    return tuple(result)


def point_index(point: Sequence[int], bounds: Sequence[int]) -> int:
    index = 0
    for coord, m in zip(point, bounds, strict=True):
        index = index * (m + 1) + coord
    return index


def in_bounds(point: Sequence[int], bounds: Sequence[int]) -> bool:
    return len(point) == len(bounds) and all(0 <= c <= m for c, m in zip(point, bounds, strict=True))


def leq(y: Sequence[int], z: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(y, z, strict=True))


def support_of(point: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, c in enumerate(point) if c > 0)


def clamp(point: Sequence[int], bounds: Sequence[int]) -> GridPoint:
    return tuple(min(c, m) for c, m in zip(point, bounds, strict=True))


def unit_step(point: Sequence[int], axis: int, step: int = 1) -> GridPoint:
    moved = list(point)
    moved[axis] += step
    return tuple(moved)


def covering_pairs(bounds: Sequence[int]) -> Iterator[tuple[GridPoint, int, GridPoint]]:
    """Yield (z, i, z + e_i) for every covering pair of the grid"""
    for z in grid_points(bounds):
        for i, m in enumerate(bounds):
            if z[i] < m:
                yield z, i, unit_step(z, i)


def points_with_small_support(bounds: Sequence[int], max_support: int = 2) -> Iterator[GridPoint]:
    """Grid points with at most max_support nonzero coordinates, lexicographic order"""
    n = len(bounds)
    found: list[GridPoint] = []
    for size in range(max_support + 1):
        for axes in itertools.combinations(range(n), size):
            for levels in itertools.product(*(range(1, bounds[a] + 1) for a in axes)):
                point = [0] * n
                for a, level in zip(axes, levels, strict=True):
                    point[a] = level
                found.append(tuple(point))
    yield from sorted(found)


def prefix_sums(values: MutableSequence[Fraction], bounds: Sequence[int]) -> None:
    """In-place zeta transform: cumulative sums along every axis"""
    size = len(values)
    for axis, stride in enumerate(strides(bounds)):
        width = bounds[axis] + 1
        for index in range(size):
            if (index // stride) % width:
                values[index] += values[index - stride]


def unit_differences(values: MutableSequence[Fraction], bounds: Sequence[int]) -> None:
    """In-place Möbius transform: successive unit differences along every axis"""
    size = len(values)
    for axis, stride in enumerate(strides(bounds)):
        width = bounds[axis] + 1
        for index in range(size - 1, -1, -1):
            if (index // stride) % width:
                values[index] -= values[index - stride]
