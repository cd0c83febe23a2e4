"""
Discrete GAI models over ordered attributes
"""

from collections.abc import Callable, Iterator, Mapping
from fractions import Fraction
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..utils.lattice import grid_points, in_bounds, point_index
from ..utils.rationals import GridPoint, Rational, format_point

# Level indices j_1..j_n, one per attribute
Alternative = GridPoint


class Attribute(BaseModel):
    """An attribute with its levels ordered from worst to best"""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    levels: tuple[str, ...] = Field(..., min_length=1, description="Level labels, worst first")

    @property
    def top_level(self) -> int:
        return len(self.levels) - 1


class AttributeSpace(BaseModel):
    model_config = ConfigDict(frozen=True)

    attributes: tuple[Attribute, ...] = Field(..., min_length=1)

    @classmethod
    def from_level_bounds(cls, bounds: tuple[int, ...], prefix: str = "x") -> Self:
        """Anonymous attributes x0, x1, ... with integer level labels"""
        return cls(
            attributes=tuple(
                Attribute(name=f"{prefix}{i}", levels=tuple(str(level) for level in range(m + 1)))
                for i, m in enumerate(bounds)
            )
        )

    @property
    def n(self) -> int:
        return len(self.attributes)

    @property
    def level_bounds(self) -> tuple[int, ...]:
        return tuple(a.top_level for a in self.attributes)

    @property
    def k(self) -> int:
        return max(self.level_bounds)

    @property
    def worst(self) -> Alternative:
        return (0,) * self.n

    @property
    def best(self) -> Alternative:
        return self.level_bounds

    def alternatives(self) -> Iterator[Alternative]:
        return grid_points(self.level_bounds)

    def contains(self, x: Alternative) -> bool:
        return in_bounds(x, self.level_bounds)

    def check(self, x: Alternative) -> Alternative:
        if not self.contains(x):
            raise ValueError(f"Alternative {format_point(x)} is outside levels {format_point(self.level_bounds)}")
        return tuple(x)


class GaiTerm(BaseModel):
    """A term u_S over the level grid of its scope"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scope: tuple[int, ...]
    values: dict[GridPoint, Rational]

    @field_validator("scope")
    @classmethod
    def _sorted_scope(cls, scope: tuple[int, ...]) -> tuple[int, ...]:
        if len(set(scope)) != len(scope) or any(i < 0 for i in scope):
            raise ValueError(f"Scope must list distinct attribute indices, got {scope}")
        return tuple(sorted(scope))

    def value(self, x: Alternative) -> Fraction:
        return self.values[tuple(x[i] for i in self.scope)]


class GaiModel(BaseModel):
    """U(x) = constant + sum of u_S(x_S) over the terms"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: AttributeSpace
    terms: tuple[GaiTerm, ...] = ()
    constant: Rational = Fraction(0)

    @model_validator(mode="after")
    def _check_terms(self) -> Self:
        scopes = [t.scope for t in self.terms]
        if len(set(scopes)) != len(scopes):
            raise ValueError("Term scopes must be distinct")
        bounds = self.space.level_bounds
        for term in self.terms:
            if any(i >= self.space.n for i in term.scope):
                raise ValueError(f"Scope {term.scope} refers to a missing attribute")
            scope_bounds = tuple(bounds[i] for i in term.scope)
            expected = set(grid_points(scope_bounds))
            if set(term.values) != expected:
                raise ValueError(f"Table of scope {term.scope} is not total over its level grid")
        return self

    def term(self, scope: tuple[int, ...]) -> GaiTerm | None:
        return next((t for t in self.terms if t.scope == tuple(sorted(scope))), None)


class TabulatedFunction(BaseModel):
    """A utility given pointwise on the alternative grid"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    space: AttributeSpace
    values: tuple[Rational, ...]

    @model_validator(mode="after")
    def _check_total(self) -> Self:
        expected = 1
        for m in self.space.level_bounds:
            expected *= m + 1
        if len(self.values) != expected:
            raise ValueError(f"Expected {expected} values, got {len(self.values)}")
        return self

    @classmethod
    def from_callable(cls, space: AttributeSpace, fn: Callable[[Alternative], Fraction | int]) -> Self:
        return cls(space=space, values=tuple(Fraction(fn(x)) for x in space.alternatives()))

    @classmethod
    def from_mapping(cls, space: AttributeSpace, values: Mapping[Alternative, Fraction]) -> Self:
        missing = [x for x in space.alternatives() if x not in values]
        if missing:
            raise ValueError(f"Value table is not total: missing {format_point(missing[0])}")
        return cls(space=space, values=tuple(Fraction(values[x]) for x in space.alternatives()))

    def value(self, x: Alternative) -> Fraction:
        return self.values[point_index(self.space.check(x), self.space.level_bounds)]

    def items(self) -> Iterator[tuple[Alternative, Fraction]]:
        return zip(self.space.alternatives(), self.values, strict=True)


class DeltaWitness(BaseModel):
    """Two contexts at which a variation over `scope` differs"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    scope: tuple[int, ...]
    from_levels: tuple[int, ...]
    to_levels: tuple[int, ...]
    base: Alternative
    other_base: Alternative
    value: Rational
    other_value: Rational


class PAdditivityCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    holds: bool
    witness: DeltaWitness | None = None

    def __bool__(self) -> bool:
        return self.holds
