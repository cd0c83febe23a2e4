"""
Monotone decomposition of 2-additive k-ary capacities

Every 2-additive k-ary capacity is a sum of nonnegative nondecreasing terms on
single attributes and attribute pairs. This service builds that decomposition
(closed form, by linear programming, or through a convex combination of
vertices), recomposes it, and counts the monotonicity constraints involved.
"""

import itertools
import logging
import math
import time
from collections.abc import Sequence
from fractions import Fraction
from typing import Literal

from ..config import settings
from ..errors import BudgetExceededError, DecompositionDefectError, GridError
from ..models.decomposition import ConstraintCensus, ConvexCombination, MonotoneGaiDecomposition, WeightedVertex
from ..models.grid import KaryCapacity, KaryGame, MobiusMap
from ..models.lp import UNIT, Constraint, LinearProgram, Objective
from ..utils.lattice import grid_points, points_with_small_support, uniform_bounds
from ..utils.rationals import GridPoint, format_point
from .kary_service import kary_service
from .lp_service import lp_service
from .polytope_service import polytope_service

logger = logging.getLogger(__name__)

Method = Literal["lp", "direct", "vertex"]
ObjectiveHeuristic = Literal["sparse"]


def singleton_name(i: int, a: int) -> str:
    return f"s{i}_{a}"


def pair_name(i: int, j: int, a: int, b: int) -> str:
    return f"p{i}_{j}_{a}_{b}"


class DecomposeService:
    """Service for monotone 2-additive decompositions"""

    def __init__(self):
        self.vertex_max = settings.vertex_decompose_max_vertices
        logger.info("Decompose service initialized")

    # ------------------------------------------------------------------ census

    def constraint_census(
        self, levels: Sequence[int] | None = None, *, n: int | None = None, k: int | None = None
    ) -> ConstraintCensus:
        """Unknowns and monotonicity constraints, for the full grid and for the decomposed form

        With `levels` the general per-attribute formulas are used; with (n, k)
        the uniform closed forms.
        """
        if levels is not None:
            bounds = tuple(levels)
            if len(bounds) < 2 or any(m < 1 for m in bounds):
                raise GridError(f"Census needs at least two attributes with m_i >= 1, got {list(bounds)}")
            pairs = list(itertools.combinations(range(len(bounds)), 2))
            variables = sum(m + 1 for m in bounds) + sum((bounds[i] + 1) * (bounds[j] + 1) for i, j in pairs)
            full = sum(
                m * math.prod(bounds[j] + 1 for j in range(len(bounds)) if j != i) for i, m in enumerate(bounds)
            )
            decomposed = sum(bounds) + sum(
                bounds[i] * (bounds[j] + 1) + bounds[j] * (bounds[i] + 1) for i, j in pairs
            )
            return ConstraintCensus(
                levels=bounds,
                variables=variables,
                full_monotonicity_constraints=full,
                decomposed_monotonicity_constraints=decomposed,
            )
        if n is None or k is None or n < 2 or k < 1:
            raise GridError(f"Census needs n >= 2 and k >= 1, got n={n}, k={k}")
        return ConstraintCensus(
            levels=uniform_bounds(n, k),
            variables=n * (k + 1) * (2 + (k + 1) * (n - 1)) // 2,
            full_monotonicity_constraints=n * k * (k + 1) ** (n - 1),
            decomposed_monotonicity_constraints=n * k * ((n - 1) * (k + 1) + 1),
        )

    # ------------------------------------------------------ program building

    def term_variables(self, levels: Sequence[int]) -> list[str]:
        """Table entries except the pinned origins, singletons first"""
        names = [singleton_name(i, a) for i, m in enumerate(levels) for a in range(1, m + 1)]
        for i, j in itertools.combinations(range(len(levels)), 2):
            names.extend(
                pair_name(i, j, a, b)
                for a in range(levels[i] + 1)
                for b in range(levels[j] + 1)
                if a or b
            )
        return names

    def monotonicity_rows(self, levels: Sequence[int]) -> list[Constraint]:
        """One row per covering pair inside every table"""

        def step(upper: str, lower: str | None) -> dict[str, Fraction]:
            coefficients = {upper: Fraction(1)}
            if lower is not None:
                coefficients[lower] = Fraction(-1)
            return coefficients

        rows = []
        for i, m in enumerate(levels):
            for a in range(m):
                lower = singleton_name(i, a) if a else None
                rows.append(
                    Constraint(name=f"mono_s{i}_{a}", coefficients=step(singleton_name(i, a + 1), lower), relation=">=")
                )
        for i, j in itertools.combinations(range(len(levels)), 2):
            for a in range(levels[i] + 1):
                for b in range(levels[j] + 1):
                    lower = pair_name(i, j, a, b) if a or b else None
                    if a < levels[i]:
                        rows.append(
                            Constraint(
                                name=f"mono_p{i}_{j}_{a}_{b}_i",
                                coefficients=step(pair_name(i, j, a + 1, b), lower),
                                relation=">=",
                            )
                        )
                    if b < levels[j]:
                        rows.append(
                            Constraint(
                                name=f"mono_p{i}_{j}_{a}_{b}_j",
                                coefficients=step(pair_name(i, j, a, b + 1), lower),
                                relation=">=",
                            )
                        )
        return rows

    def utility_row(self, levels: Sequence[int], z: GridPoint) -> dict[str, Fraction]:
        """Sum of every table lookup at z, pinned origins dropped"""
        coefficients: dict[str, Fraction] = {}
        for i in range(len(levels)):
            if z[i]:
                coefficients[singleton_name(i, z[i])] = Fraction(1)
        for i, j in itertools.combinations(range(len(levels)), 2):
            if z[i] or z[j]:
                coefficients[pair_name(i, j, z[i], z[j])] = Fraction(1)
        return coefficients

    def read_decomposition(self, levels: Sequence[int], k: int, point: dict[str, Fraction]) -> MonotoneGaiDecomposition:
        n = len(levels)
        singletons = {
            i: tuple([Fraction(0)] + [point[singleton_name(i, a)] for a in range(1, levels[i] + 1)])
            for i in range(n)
        }
        pairs = {
            (i, j): tuple(
                point[pair_name(i, j, a, b)] if a or b else Fraction(0)
                for a in range(levels[i] + 1)
                for b in range(levels[j] + 1)
            )
            for i, j in itertools.combinations(range(n), 2)
        }
        return MonotoneGaiDecomposition(n=n, k=k, levels=tuple(levels), singletons=singletons, pairs=pairs)

    def decomposition_point(self, d: MonotoneGaiDecomposition) -> dict[str, Fraction]:
        """Inverse of read_decomposition"""
        point = {}
        for i, m in enumerate(d.levels):
            for a in range(1, m + 1):
                point[singleton_name(i, a)] = d.singleton_value(i, a)
        for i, j in itertools.combinations(range(d.n), 2):
            for a in range(d.levels[i] + 1):
                for b in range(d.levels[j] + 1):
                    if a or b:
                        point[pair_name(i, j, a, b)] = d.pair_value(i, j, a, b)
        return point

    def build_monotone_lp(
        self, v: KaryCapacity | MobiusMap, objective: ObjectiveHeuristic | None = None
    ) -> LinearProgram:
        """Feasibility program for the monotone decomposition of a 2-additive capacity

        Equality rows sit only on points with at most two active attributes: two
        2-additive games agreeing there agree everywhere.
        """
        m = kary_service.two_additive_mobius(v)
        return self._build_monotone_lp(m, objective)

    def _build_monotone_lp(self, m: MobiusMap, objective: ObjectiveHeuristic | None) -> LinearProgram:
        levels = uniform_bounds(m.n, m.k)
        variables = self.term_variables(levels)
        rows = self.monotonicity_rows(levels)
        for z in points_with_small_support(levels):
            if not any(z):
                continue
            rows.append(
                Constraint(
                    name=f"eq_{'_'.join(map(str, z))}",
                    coefficients=self.utility_row(levels, z),
                    relation="=",
                    rhs=kary_service.evaluate_mobius(m, z),
                )
            )
        goal = None
        if objective == "sparse":
            goal = Objective(
                sense="min",
                coefficients={
                    pair_name(i, j, m.k, m.k): Fraction(1) for i, j in itertools.combinations(range(m.n), 2)
                },
            )
        logger.info(f"Monotone decomposition program: {len(variables)} variables, {len(rows)} rows")
        return lp_service.build(
            name="monotone_decomposition",
            variables=tuple(variables),
            objective=goal,
            constraints=tuple(rows),
            bounds={name: UNIT for name in variables},
        )

    # ---------------------------------------------------------- decomposition

    def direct_decomposition(self, v: KaryCapacity | MobiusMap) -> MonotoneGaiDecomposition:
        """Closed-form monotone decomposition

        Each pair term is the pure interaction table plus the smallest ramps on
        both axes that make it nondecreasing; each singleton term is the value
        on its axis minus the ramps placed on that attribute. The singleton
        terms are nondecreasing exactly when the capacity is monotone.
        """
        m = kary_service.two_additive_mobius(v)
        return self._direct(m)

    def _direct(self, m: MobiusMap) -> MonotoneGaiDecomposition:
        n, k = m.n, m.k
        axes = kary_service.axis_values(m)
        tables = kary_service.interaction_tables(m)
        ramps: dict[tuple[int, int], list[Fraction]] = {}
        pairs: dict[tuple[int, int], tuple[Fraction, ...]] = {}
        for i, j in itertools.combinations(range(n), 2):
            table = tables.get((i, j))
            if table is None:
                pairs[(i, j)] = tuple(Fraction(0) for _ in range((k + 1) ** 2))
                continue
            along_i = self._ramp(kary_service.minimal_steps(table, transpose=False))
            along_j = self._ramp(kary_service.minimal_steps(table, transpose=True))
            ramps[(i, j)] = along_i
            ramps[(j, i)] = along_j
            pairs[(i, j)] = tuple(
                table[a][b] + along_i[a] + along_j[b] for a in range(k + 1) for b in range(k + 1)
            )
        singletons = {}
        for i in range(n):
            singletons[i] = tuple(
                axes[i][a] - sum((ramps[(i, j)][a] for j in range(n) if (i, j) in ramps), Fraction(0))
                for a in range(k + 1)
            )
        return MonotoneGaiDecomposition.uniform(n, k, singletons, pairs)

    @staticmethod
    def _ramp(steps: list[tuple[Fraction, int]]) -> list[Fraction]:
        ramp = [Fraction(0)]
        for step, _ in steps:
            ramp.append(ramp[-1] - step)
        return ramp

    def monotone_decompose(
        self,
        v: KaryCapacity | MobiusMap,
        method: Method = "lp",
        objective: ObjectiveHeuristic | None = None,
        warm_start: bool = True,
    ) -> MonotoneGaiDecomposition:
        """Nonnegative nondecreasing singleton and pair terms summing to v

        method="lp" solves the feasibility program, offering the closed form
        as a start point unless warm_start is False; "direct" returns the
        closed form; "vertex" groups a convex combination of vertices by
        support. The objective heuristic "sparse" minimizes the sum of
        pair-table top values.
        """
        start_time = time.time()
        m = kary_service.two_additive_mobius(v)
        if method == "direct":
            decomposition = self._direct(m)
        elif method == "vertex":
            decomposition = self.group_by_support(self._vertex_decompose(m))
        elif method == "lp":
            lp = self._build_monotone_lp(m, objective)
            start = self.decomposition_point(self._direct(m)) if warm_start and not objective else None
            outcome = lp_service.solve(lp, start=start)
            if outcome.point is None:
                logger.error(f"Monotone decomposition program is {outcome.status} on a validated capacity")
                raise DecompositionDefectError(
                    f"Decomposition program is {outcome.status} for a validated 2-additive capacity",
                    {"status": outcome.status},
                )
            decomposition = self.read_decomposition(uniform_bounds(m.n, m.k), m.k, outcome.point)
        else:
            raise GridError(f"Unknown decomposition method {method!r}")
        self.verify_decomposition(decomposition, m)
        logger.info(f"Monotone decomposition ({method}) for n={m.n}, k={m.k} in {time.time() - start_time:.2f}s")
        return decomposition

    def term_defects(self, d: MonotoneGaiDecomposition) -> list[str]:
        """Tables that are negative, decreasing, above 1 or nonzero at their origin"""
        defects = []
        for scope, shape, table in d.tables():
            if table[0] != 0:
                defects.append(f"table {scope} is {table[0]} at its origin")
            if any(value < 0 or value > 1 for value in table):
                defects.append(f"table {scope} leaves [0, 1]")
            if len(shape) == 1:
                if any(table[a + 1] < table[a] for a in range(shape[0] - 1)):
                    defects.append(f"table {scope} decreases")
            else:
                rows, cols = shape
                decreasing = any(
                    (a + 1 < rows and table[(a + 1) * cols + b] < table[a * cols + b])
                    or (b + 1 < cols and table[a * cols + b + 1] < table[a * cols + b])
                    for a in range(rows)
                    for b in range(cols)
                )
                if decreasing:
                    defects.append(f"table {scope} decreases")
        return defects

    def verify_decomposition(self, d: MonotoneGaiDecomposition, m: MobiusMap) -> None:
        defects = self.term_defects(d)
        recomposed = d.to_mobius()
        if recomposed.coefficients != m.coefficients:
            differing = sorted(set(recomposed.coefficients.items()) ^ set(m.coefficients.items()))
            defects.append(f"recomposition differs at {format_point(differing[0][0])}")
        if defects:
            logger.error(f"Decomposition defects: {defects[:5]}")
            raise DecompositionDefectError("Decomposition violates its invariants", {"defects": defects[:20]})

    def recompose(self, d: MonotoneGaiDecomposition) -> KaryCapacity:
        """Pointwise sum of the terms over {0..k}^n"""
        values = tuple(d.value(z) for z in grid_points(uniform_bounds(d.n, d.k)))
        return kary_service.as_capacity(KaryGame(n=d.n, k=d.k, values=values))

    # ------------------------------------------------------------ vertex route

    def vertex_decompose(self, v: KaryCapacity | MobiusMap) -> ConvexCombination:
        """Convex weights over the enumerated vertices reproducing v"""
        return self._vertex_decompose(kary_service.two_additive_mobius(v))

    def _vertex_decompose(self, m: MobiusMap) -> ConvexCombination:
        census = polytope_service.count_vertices(m.n, m.k)
        if census.total > self.vertex_max:
            raise BudgetExceededError(
                f"Vertex decomposition needs {census.total} vertices", required=census.total, budget=self.vertex_max
            )
        vertices = list(polytope_service.enumerate_vertices(m.n, m.k))
        names = [f"lam{index}" for index in range(len(vertices))]
        rows = [Constraint(name="total_weight", coefficients={name: Fraction(1) for name in names}, relation="=", rhs=1)]
        for z in points_with_small_support(uniform_bounds(m.n, m.k)):
            if not any(z):
                continue
            coefficients = {}
            for name, vertex in zip(names, vertices, strict=True):
                value = kary_service.evaluate_mobius(vertex.mobius, z)
                if value:
                    coefficients[name] = value
            rows.append(
                Constraint(
                    name=f"eq_{'_'.join(map(str, z))}",
                    coefficients=coefficients,
                    relation="=",
                    rhs=kary_service.evaluate_mobius(m, z),
                )
            )
        lp = lp_service.build(name="vertex_combination", variables=tuple(names), constraints=tuple(rows))
        outcome = lp_service.solve(lp)
        if outcome.point is None:
            logger.error("Vertex combination program is infeasible on a validated capacity")
            raise DecompositionDefectError("No convex combination of vertices reproduces the capacity")
        atoms = tuple(
            WeightedVertex(vertex=vertex, weight=outcome.point[name])
            for name, vertex in zip(names, vertices, strict=True)
            if outcome.point[name] > 0
        )
        combination = ConvexCombination(atoms=atoms)
        if combination.to_mobius().coefficients != m.coefficients:
            raise DecompositionDefectError("Convex combination does not reproduce the capacity")
        logger.info(f"Vertex decomposition uses {len(atoms)} of {len(vertices)} vertices")
        return combination

    def group_by_support(self, combination: ConvexCombination) -> MonotoneGaiDecomposition:
        """Sum the weighted vertices into one table per support"""
        n, k = combination.atoms[0].vertex.n, combination.atoms[0].vertex.k
        singletons = {i: [Fraction(0)] * (k + 1) for i in range(n)}
        pairs = {pair: [Fraction(0)] * (k + 1) ** 2 for pair in itertools.combinations(range(n), 2)}
        for atom in combination.atoms:
            vertex, weight = atom.vertex, atom.weight
            if len(vertex.support) == 1:
                (i,) = vertex.support
                (threshold,) = vertex.antichain.points[0]
                for a in range(threshold, k + 1):
                    singletons[i][a] += weight
                continue
            pair = (vertex.support[0], vertex.support[1])
            for a in range(k + 1):
                for b in range(k + 1):
                    if any(p[0] <= a and p[1] <= b for p in vertex.antichain.points):
                        pairs[pair][a * (k + 1) + b] += weight
        return MonotoneGaiDecomposition.uniform(
            n,
            k,
            {i: tuple(table) for i, table in singletons.items()},
            {pair: tuple(table) for pair, table in pairs.items()},
        )


# Global decompose service instance
decompose_service = DecomposeService()
