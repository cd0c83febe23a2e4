"""
k-ary games, capacities and Möbius maps on the grid {0..k}^n
"""

from collections.abc import Iterator, Mapping
from fractions import Fraction
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.lattice import covering_pairs, grid_points, in_bounds, point_index, support_of, uniform_bounds
from ..utils.rationals import GridPoint, Rational, format_point


class KaryGame(BaseModel):
    """Exact value table on {0..k}^n, dense, lexicographic order"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1, description="Number of attributes")
    k: int = Field(..., ge=1, description="Level bound of every attribute")
    values: tuple[Rational, ...] = Field(..., description="Values in lexicographic point order")

    @model_validator(mode="after")
    def _check_shape(self) -> Self:
        expected = (self.k + 1) ** self.n
        if len(self.values) != expected:
            raise ValueError(f"Expected {expected} values for n={self.n}, k={self.k}, got {len(self.values)}")
        return self

    @classmethod
    def from_mapping(cls, n: int, k: int, values: Mapping[GridPoint, Fraction]) -> Self:
        bounds = uniform_bounds(n, k)
        missing = [z for z in grid_points(bounds) if z not in values]
        if missing:
            raise ValueError(f"Value table is not total: missing {format_point(missing[0])}")
        return cls(n=n, k=k, values=tuple(Fraction(values[z]) for z in grid_points(bounds)))

    @property
    def bounds(self) -> tuple[int, ...]:
        return uniform_bounds(self.n, self.k)

    @property
    def origin(self) -> GridPoint:
        return (0,) * self.n

    @property
    def top(self) -> GridPoint:
        return (self.k,) * self.n

    def points(self) -> Iterator[GridPoint]:
        return grid_points(self.bounds)

    def value(self, point: GridPoint) -> Fraction:
        if not in_bounds(point, self.bounds):
            raise ValueError(f"Point {format_point(point)} is outside the grid n={self.n}, k={self.k}")
        return self.values[point_index(point, self.bounds)]

    def items(self) -> Iterator[tuple[GridPoint, Fraction]]:
        return zip(self.points(), self.values, strict=True)


class KaryCapacity(KaryGame):
    """A KaryGame that is zero at the origin, monotone and normalized"""

    @model_validator(mode="after")
    def _check_capacity(self) -> Self:
        if self.values[0] != 0:
            raise ValueError(f"Capacity must vanish at the origin, got {self.values[0]}")
        if self.values[-1] != 1:
            raise ValueError(f"Capacity must equal 1 at the top, got {self.values[-1]}")
        for z, _, upper in covering_pairs(self.bounds):
            if self.value(upper) < self.value(z):
                raise ValueError(f"Capacity is not monotone between {format_point(z)} and {format_point(upper)}")
        return self


class MobiusMap(BaseModel):
    """Sparse Möbius coefficients; zero entries are dropped on construction"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    coefficients: dict[GridPoint, Rational] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _drop_zeros(cls, data: object) -> object:
        if isinstance(data, dict) and isinstance(data.get("coefficients"), Mapping):
            data = dict(data)
            data["coefficients"] = {tuple(z): c for z, c in data["coefficients"].items() if c != 0}
        return data

    @model_validator(mode="after")
    def _check_points(self) -> Self:
        bounds = uniform_bounds(self.n, self.k)
        for z in self.coefficients:
            if not in_bounds(z, bounds):
                raise ValueError(f"Möbius atom {format_point(z)} is outside the grid n={self.n}, k={self.k}")
        return self

    def coefficient(self, point: GridPoint) -> Fraction:
        return self.coefficients.get(point, Fraction(0))

    def atoms(self) -> list[tuple[GridPoint, Fraction]]:
        """Nonzero atoms in lexicographic order"""
        return sorted(self.coefficients.items())

    def max_support_size(self) -> int:
        return max((len(support_of(z)) for z in self.coefficients), default=0)


class Violation(BaseModel):
    """A violating point or covering pair with a description"""

    model_config = ConfigDict(frozen=True)

    points: tuple[GridPoint, ...]
    description: str


class CapacityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    zero_grounded: bool
    monotone: bool
    normalized: bool
    violations: list[Violation] = Field(default_factory=list)

    @property
    def is_capacity(self) -> bool:
        return self.zero_grounded and self.monotone and self.normalized
