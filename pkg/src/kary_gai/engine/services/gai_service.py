"""
GAI service: evaluation, embedding into k-ary capacities, variations and decompositions
"""

import itertools
import logging
import time
from collections.abc import Iterator, Sequence
from fractions import Fraction
from typing import Literal

from ..config import settings
from ..errors import BudgetExceededError, CapacityViolationError, GridError, NotPAdditiveError
from ..models.gai import (
    Alternative,
    DeltaWitness,
    GaiModel,
    GaiTerm,
    PAdditivityCheck,
    TabulatedFunction,
)
from ..models.grid import KaryCapacity
from ..utils.lattice import clamp, covering_pairs, grid_points, grid_size, uniform_bounds
from ..utils.rationals import format_point

logger = logging.getLogger(__name__)

Fill = Literal["clamp", "constant"]


def _subsets(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    for size in range(len(items) + 1):
        yield from itertools.combinations(items, size)


class GaiService:
    """Service for discrete GAI utility models"""

    def __init__(self):
        self.default_fill: Fill = settings.default_fill
        self.exhaustive_max_points = settings.padditivity_exhaustive_max_points
        logger.info(f"GAI service initialized (default fill: {self.default_fill})")

    def evaluate(self, model: GaiModel, x: Alternative) -> Fraction:
        """U(x) = constant + sum over terms of u_S(x_S)"""
        x = model.space.check(x)
        return model.constant + sum((term.value(x) for term in model.terms), Fraction(0))

    def tabulate(self, model: GaiModel) -> TabulatedFunction:
        return TabulatedFunction(
            space=model.space, values=tuple(self.evaluate(model, x) for x in model.space.alternatives())
        )

    # ------------------------------------------------------------- embedding

    def check_assumptions(self, u: TabulatedFunction) -> None:
        """Monotone in level indices, 0 at the all-worst and 1 at the all-best alternative"""
        space = u.space
        if u.value(space.worst) != 0:
            raise CapacityViolationError(
                f"Utility of the all-worst alternative is {u.value(space.worst)}, expected 0",
                {"point": format_point(space.worst)},
            )
        if u.value(space.best) != 1:
            raise CapacityViolationError(
                f"Utility of the all-best alternative is {u.value(space.best)}, expected 1",
                {"point": format_point(space.best)},
            )
        for x, i, upper in covering_pairs(space.level_bounds):
            if u.value(upper) < u.value(x):
                raise CapacityViolationError(
                    f"Utility decreases when attribute {space.attributes[i].name} improves",
                    {"points": [format_point(x), format_point(upper)]},
                )

    def embed(self, u: TabulatedFunction | GaiModel, fill: Fill | None = None) -> KaryCapacity:
        """Map U onto {0..k}^n, k = max m_i, filling points with some z_i > m_i

        clamp: U at the componentwise clamped point; constant: U(m_1, ..., m_n).
        """
        fill = fill or self.default_fill
        table = self.tabulate(u) if isinstance(u, GaiModel) else u
        space = table.space
        if space.k < 1:
            raise GridError("Embedding needs at least one attribute with two levels")
        self.check_assumptions(table)
        bounds = space.level_bounds
        values = []
        for z in grid_points(uniform_bounds(space.n, space.k)):
            inside = all(c <= m for c, m in zip(z, bounds, strict=True))
            if inside:
                values.append(table.value(z))
            elif fill == "constant":
                values.append(table.value(bounds))
            else:
                values.append(table.value(clamp(z, bounds)))
        return KaryCapacity(n=space.n, k=space.k, values=tuple(values))

    # ------------------------------------------------------------- variations

    def delta_variation(
        self,
        u: TabulatedFunction,
        scope: Sequence[int],
        from_levels: Sequence[int],
        to_levels: Sequence[int],
        base: Alternative,
    ) -> Fraction:
        """Alternating sum over T subset of P of (-1)^|P-T| U(y_T, x_{P-T}, base_{-P})"""
        if not scope:
            raise GridError("A variation needs a nonempty attribute set")
        if not (len(scope) == len(from_levels) == len(to_levels)):
            raise GridError("Partial alternatives must match the attribute set")
        positions = range(len(scope))
        total = Fraction(0)
        for chosen in _subsets(list(positions)):
            point = list(base)
            for pos in positions:
                point[scope[pos]] = to_levels[pos] if pos in chosen else from_levels[pos]
            sign = -1 if (len(scope) - len(chosen)) % 2 else 1
            total += sign * u.value(tuple(point))
        return total

    def is_p_additive_function(self, u: TabulatedFunction, p: int, exhaustive: bool = False) -> PAdditivityCheck:
        """Context independence of every variation over p attributes

        The reduced check compares unit-cell variations across covering context
        changes; exhaustive=True sweeps every pair of partial alternatives and
        every context (small grids only).
        """
        space = u.space
        if not 1 <= p <= space.n:
            raise GridError(f"p must lie in 1..{space.n}, got {p}")
        if exhaustive:
            witness = self._exhaustive_witness(u, p)
        else:
            witness = self._reduced_witness(u, p)
        return PAdditivityCheck(p=p, holds=witness is None, witness=witness)

    def _reduced_witness(self, u: TabulatedFunction, p: int) -> DeltaWitness | None:
        bounds = u.space.level_bounds
        for scope in itertools.combinations(range(u.space.n), p):
            rest = [i for i in range(u.space.n) if i not in scope]
            cells = list(itertools.product(*(range(bounds[i]) for i in scope)))
            if not cells:
                continue
            rest_bounds = tuple(bounds[i] for i in rest)
            for context, _, upper in covering_pairs(rest_bounds):
                for cell in cells:
                    target = tuple(level + 1 for level in cell)
                    base = self._assemble(u.space.n, scope, cell, rest, context)
                    other = self._assemble(u.space.n, scope, cell, rest, upper)
                    value = self.delta_variation(u, scope, cell, target, base)
                    other_value = self.delta_variation(u, scope, cell, target, other)
                    if value != other_value:
                        return DeltaWitness(
                            scope=scope,
                            from_levels=cell,
                            to_levels=target,
                            base=base,
                            other_base=other,
                            value=value,
                            other_value=other_value,
                        )
        return None

    def _exhaustive_witness(self, u: TabulatedFunction, p: int) -> DeltaWitness | None:
        bounds = u.space.level_bounds
        size = grid_size(bounds)
        if size > self.exhaustive_max_points:
            raise BudgetExceededError(
                f"Exhaustive p-additivity sweep needs {size} points", required=size, budget=self.exhaustive_max_points
            )
        for scope in itertools.combinations(range(u.space.n), p):
            rest = [i for i in range(u.space.n) if i not in scope]
            partial = list(itertools.product(*(range(bounds[i] + 1) for i in scope)))
            contexts = list(grid_points(tuple(bounds[i] for i in rest)))
            for start, target in itertools.product(partial, repeat=2):
                reference = self._assemble(u.space.n, scope, start, rest, contexts[0])
                expected = self.delta_variation(u, scope, start, target, reference)
                for context in contexts[1:]:
                    other = self._assemble(u.space.n, scope, start, rest, context)
                    value = self.delta_variation(u, scope, start, target, other)
                    if value != expected:
                        return DeltaWitness(
                            scope=scope,
                            from_levels=start,
                            to_levels=target,
                            base=reference,
                            other_base=other,
                            value=expected,
                            other_value=value,
                        )
        return None

    @staticmethod
    def _assemble(
        n: int, scope: Sequence[int], levels: Sequence[int], rest: Sequence[int], context: Sequence[int]
    ) -> Alternative:
        point = [0] * n
        for i, level in zip(scope, levels, strict=True):
            point[i] = level
        for i, level in zip(rest, context, strict=True):
            point[i] = level
        return tuple(point)

    # --------------------------------------------------------- decompositions

    def delta_decomposition(self, u: TabulatedFunction, p: int) -> GaiModel:
        """Terms u_S(x_S) = variation from 0_S to x_S at the all-worst alternative, 0 < |S| <= p"""
        check = self.is_p_additive_function(u, p)
        if not check.holds:
            witness = check.witness
            assert witness is not None
            raise NotPAdditiveError(
                f"Utility is not {p}-additive: variation over {list(witness.scope)} depends on the context",
                witness.model_dump(mode="json"),
            )
        space = u.space
        worst = space.worst
        terms = []
        for size in range(1, p + 1):
            for scope in itertools.combinations(range(space.n), size):
                values = {}
                for levels in itertools.product(*(range(space.level_bounds[i] + 1) for i in scope)):
                    values[levels] = self.delta_variation(u, scope, (0,) * size, levels, worst)
                terms.append(GaiTerm(scope=scope, values=values))
        logger.info(f"Delta decomposition produced {len(terms)} terms for p={p}")
        return GaiModel(space=space, terms=tuple(terms), constant=u.value(worst))

    def canonical_decomposition(
        self,
        u: TabulatedFunction,
        scopes: Sequence[Sequence[int]],
        anchor: Alternative | None = None,
    ) -> GaiModel:
        """Anchor-based inclusion-exclusion terms; the result depends on the scope order

        u_j(x) = U(x[S_j]) + sum over nonempty K of earlier scopes of
        (-1)^|K| U(x[intersection of K with S_j]), where x[A] takes x on A and
        the anchor elsewhere.
        """
        space = u.space
        anchor = space.check(anchor if anchor is not None else space.worst)
        ordered = [tuple(sorted(set(scope))) for scope in scopes]
        for scope in ordered:
            if not scope or any(not 0 <= i < space.n for i in scope):
                raise GridError(f"Scope {list(scope)} is not a nonempty set of attribute indices")
        if len(set(ordered)) != len(ordered):
            raise GridError("Canonical scopes must be distinct")

        start_time = time.time()
        terms = []
        for j, scope in enumerate(ordered):
            overlaps = [set(ordered[t]) & set(scope) for t in range(j)]
            values = {}
            for levels in itertools.product(*(range(space.level_bounds[i] + 1) for i in scope)):
                x = dict(zip(scope, levels, strict=True))
                total = Fraction(0)
                for chosen in _subsets(list(range(j))):
                    kept = set(scope)
                    for t in chosen:
                        kept &= overlaps[t]
                    point = tuple(x[i] if i in kept else anchor[i] for i in range(space.n))
                    sign = -1 if len(chosen) % 2 else 1
                    total += sign * u.value(point)
                values[levels] = total
            terms.append(GaiTerm(scope=scope, values=values))
        logger.info(f"Canonical decomposition over {len(ordered)} scopes in {time.time() - start_time:.2f}s")
        return GaiModel(space=space, terms=tuple(terms))


# Global GAI service instance
gai_service = GaiService()
