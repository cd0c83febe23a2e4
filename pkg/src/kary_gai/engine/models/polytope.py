"""
Antichains and vertices of the polytope of 2-additive k-ary capacities
"""

from functools import cached_property
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.lattice import grid_points, leq, prefix_sums, uniform_bounds
from ..utils.rationals import GridPoint
from .grid import KaryCapacity, MobiusMap


def antichain_defect(points: tuple[GridPoint, ...]) -> str | None:
    """Describe why `points` is not an admissible antichain, or None"""
    if not points:
        return "an antichain needs at least one point"
    dims = {len(p) for p in points}
    if len(dims) != 1 or dims.pop() not in (1, 2):
        return "antichain points must all have one or two coordinates"
    if any(c < 0 for p in points for c in p):
        return "antichain coordinates must be nonnegative"
    if len(set(points)) != len(points):
        return "antichain points must be distinct"
    for index, p in enumerate(points):
        for q in points[index + 1 :]:
            if leq(p, q) or leq(q, p):
                return f"points {p} and {q} are comparable"
    if len(points) == 1 and not any(points[0]):
        return "the antichain of the origin does not give a normalized capacity"
    return None


class Antichain(BaseModel):
    """Minimal winning coalitions on one or two axes, sorted by first coordinate"""

    model_config = ConfigDict(frozen=True)

    points: tuple[GridPoint, ...]

    @field_validator("points")
    @classmethod
    def _sorted_points(cls, points: tuple[GridPoint, ...]) -> tuple[GridPoint, ...]:
        return tuple(sorted(tuple(p) for p in points))

    @model_validator(mode="after")
    def _check_antichain(self) -> Self:
        defect = antichain_defect(self.points)
        if defect:
            raise ValueError(defect)
        return self

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return len(self.points[0])

    def joins(self) -> list[GridPoint]:
        """Joins of consecutive points; (a_{t+1}, b_t) since b decreases as a increases"""
        return [
            (self.points[t + 1][0], self.points[t][1]) for t in range(len(self.points) - 1)
        ]

    def on_one_axis(self) -> bool:
        """True when the antichain is a single threshold on one axis"""
        return len(self.points) == 1 and sum(1 for c in self.points[0] if c > 0) == 1


class VertexCapacity(BaseModel):
    """A 0-1 valued 2-additive k-ary capacity supported on one or two attributes"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    support: tuple[int, ...] = Field(..., min_length=1, max_length=2)
    antichain: Antichain
    mobius: MobiusMap

    @cached_property
    def capacity(self) -> KaryCapacity:
        bounds = uniform_bounds(self.n, self.k)
        values = [self.mobius.coefficient(z) for z in grid_points(bounds)]
        prefix_sums(values, bounds)
        return KaryCapacity(n=self.n, k=self.k, values=tuple(values))


class VertexCensus(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    k: int
    per_singleton: int
    per_pair: int
    total: int

