"""
Monotone GAI decompositions, convex combinations of vertices and constraint census
"""

from fractions import Fraction
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.lattice import clamp
from ..utils.rationals import GridPoint, Rational
from .grid import MobiusMap
from .polytope import VertexCapacity


class MonotoneGaiDecomposition(BaseModel):
    """U(z) = sum_i u_i(z_i) + sum_{i<j} u_ij(z_i, z_j)

    Tables live on each attribute's own level range (`levels`); coordinates
    above a level bound are clamped when evaluating. Pair tables are stored
    row-major over (levels[i] + 1) x (levels[j] + 1).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=1)
    k: int = Field(..., ge=1)
    levels: tuple[int, ...]
    singletons: dict[int, tuple[Rational, ...]]
    pairs: dict[tuple[int, int], tuple[Rational, ...]]

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        if len(self.levels) != self.n or any(not 0 <= m <= self.k for m in self.levels):
            raise ValueError(f"Level bounds {self.levels} do not fit n={self.n}, k={self.k}")
        for i, table in self.singletons.items():
            if not 0 <= i < self.n or len(table) != self.levels[i] + 1:
                raise ValueError(f"Singleton table {i} has the wrong shape")
        for (i, j), table in self.pairs.items():
            if not 0 <= i < j < self.n or len(table) != (self.levels[i] + 1) * (self.levels[j] + 1):
                raise ValueError(f"Pair table ({i}, {j}) has the wrong shape")
        return self

    @classmethod
    def uniform(cls, n: int, k: int, singletons: dict, pairs: dict) -> Self:
        return cls(n=n, k=k, levels=(k,) * n, singletons=singletons, pairs=pairs)

    def singleton_value(self, i: int, a: int) -> Fraction:
        table = self.singletons.get(i)
        return table[a] if table is not None else Fraction(0)

    def pair_value(self, i: int, j: int, a: int, b: int) -> Fraction:
        table = self.pairs.get((i, j))
        return table[a * (self.levels[j] + 1) + b] if table is not None else Fraction(0)

    def value(self, z: GridPoint) -> Fraction:
        z = clamp(z, self.levels)
        total = sum((self.singleton_value(i, z[i]) for i in self.singletons), Fraction(0))
        for i, j in self.pairs:
            total += self.pair_value(i, j, z[i], z[j])
        return total

    def to_mobius(self) -> MobiusMap:
        """Möbius map of the recomposed game on {0..k}^n"""
        coefficients: dict[GridPoint, Fraction] = {}

        def add(point: list[int], value: Fraction) -> None:
            if value:
                key = tuple(point)
                coefficients[key] = coefficients.get(key, Fraction(0)) + value

        for i, table in self.singletons.items():
            for a in range(len(table)):
                point = [0] * self.n
                point[i] = a
                add(point, table[a] - (table[a - 1] if a else 0))
        for (i, j), table in self.pairs.items():
            for a in range(self.levels[i] + 1):
                for b in range(self.levels[j] + 1):
                    atom = self.pair_value(i, j, a, b)
                    if a:
                        atom -= self.pair_value(i, j, a - 1, b)
                    if b:
                        atom -= self.pair_value(i, j, a, b - 1)
                    if a and b:
                        atom += self.pair_value(i, j, a - 1, b - 1)
                    point = [0] * self.n
                    point[i], point[j] = a, b
                    add(point, atom)
        return MobiusMap(n=self.n, k=self.k, coefficients=coefficients)

    def tables(self) -> list[tuple[tuple[int, ...], tuple[int, ...], tuple[Fraction, ...]]]:
        """(scope, shape, values) for every table, singletons first"""
        result: list[tuple[tuple[int, ...], tuple[int, ...], tuple[Fraction, ...]]] = [
            ((i,), (self.levels[i] + 1,), table) for i, table in sorted(self.singletons.items())
        ]
        result.extend(
            ((i, j), (self.levels[i] + 1, self.levels[j] + 1), table) for (i, j), table in sorted(self.pairs.items())
        )
        return result


class WeightedVertex(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vertex: VertexCapacity
    weight: Rational


class ConvexCombination(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    atoms: tuple[WeightedVertex, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_weights(self) -> Self:
        if any(atom.weight <= 0 for atom in self.atoms):
            raise ValueError("Convex weights must be positive")
        total = sum((atom.weight for atom in self.atoms), Fraction(0))
        if total != 1:
            raise ValueError(f"Convex weights sum to {total}, expected 1")
        return self

    def to_mobius(self) -> MobiusMap:
        first = self.atoms[0].vertex
        coefficients: dict[GridPoint, Fraction] = {}
        for atom in self.atoms:
            for z, c in atom.vertex.mobius.coefficients.items():
                coefficients[z] = coefficients.get(z, Fraction(0)) + atom.weight * c
        return MobiusMap(n=first.n, k=first.k, coefficients=coefficients)


class ConstraintCensus(BaseModel):
    model_config = ConfigDict(frozen=True)

    levels: tuple[int, ...]
    variables: int
    full_monotonicity_constraints: int
    decomposed_monotonicity_constraints: int
