"""
Vertices of the polytope of 2-additive k-ary capacities: antichains, census, oracles
"""

import itertools
import logging
import math
import time
from collections.abc import Iterator
from fractions import Fraction

from ..config import settings
from ..errors import AntichainError, BudgetExceededError, CapacityViolationError, GridError, NotTwoAdditiveError
from ..models.grid import KaryCapacity, MobiusMap
from ..models.lp import FREE, Constraint, Objective
from ..models.polytope import Antichain, VertexCapacity, VertexCensus, antichain_defect
from ..utils.lattice import grid_points, grid_size, leq, support_of, uniform_bounds
from ..utils.rationals import GridPoint, format_point
from .kary_service import kary_service
from .lp_service import lp_service

logger = logging.getLogger(__name__)


class PolytopeService:
    """Service enumerating and checking extreme points of the 2-additive k-ary polytope"""

    def __init__(self):
        self.bruteforce_max_grid_points = settings.bruteforce_max_grid_points
        self.extreme_check_max_points = settings.extreme_check_max_points
        logger.info("Polytope service initialized")

    # ------------------------------------------------------------- antichains

    def make_antichain(self, points: list[GridPoint] | tuple[GridPoint, ...], k: int | None = None) -> Antichain:
        normalized = tuple(sorted(tuple(p) for p in points))
        defect = antichain_defect(normalized)
        if defect is None and k is not None and any(c > k for p in normalized for c in p):
            defect = f"coordinates exceed k={k}"
        if defect:
            raise AntichainError(f"Malformed antichain: {defect}", {"points": [list(p) for p in normalized]})
        return Antichain(points=normalized)

    def enumerate_antichains(self, k: int) -> list[Antichain]:
        """Every antichain of {0..k}^2 except the origin, by size then lexicographically

        An antichain of size l pairs l distinct first coordinates, increasing,
        with l distinct second coordinates, decreasing.
        """
        if k < 1:
            raise GridError(f"k must be at least 1, got {k}")
        levels = range(k + 1)
        result: list[Antichain] = []
        for size in range(1, k + 2):
            batch = []
            for firsts in itertools.combinations(levels, size):
                for seconds in itertools.combinations(levels, size):
                    points = tuple(zip(firsts, reversed(seconds), strict=True))
                    if points == ((0, 0),):
                        continue
                    batch.append(points)
            result.extend(Antichain(points=points) for points in sorted(batch))
        return result

    def vertex_from_antichain(
        self, antichain: Antichain, pair: tuple[int, ...], n: int, k: int
    ) -> VertexCapacity:
        """+1 on each minimal winning coalition, -1 on each consecutive join, embedded on `pair`"""
        defect = antichain_defect(antichain.points)
        if defect is None and any(c > k for p in antichain.points for c in p):
            defect = f"coordinates exceed k={k}"
        if defect is None and antichain.dimension != len(pair):
            defect = f"{antichain.dimension}-dimensional antichain placed on {len(pair)} attributes"
        if defect:
            raise AntichainError(f"Malformed antichain: {defect}")
        if n < 1 or k < 1 or len(set(pair)) != len(pair) or any(not 0 <= i < n for i in pair):
            raise GridError(f"Attributes {pair} are not distinct indices below n={n}")
        if list(pair) != sorted(pair):
            raise GridError(f"Attribute pair must be increasing, got {pair}")

        coefficients: dict[GridPoint, Fraction] = {}

        def place(local: GridPoint, value: int) -> None:
            point = [0] * n
            for axis, level in zip(pair, local, strict=True):
                point[axis] = level
            coefficients[tuple(point)] = coefficients.get(tuple(point), Fraction(0)) + value

        for point in antichain.points:
            place(point, 1)
        if antichain.dimension == 2:
            for join in antichain.joins():
                place(join, -1)
        used = tuple(sorted({axis for z in coefficients for axis in support_of(z)}))
        return VertexCapacity(
            n=n, k=k, support=used, antichain=antichain, mobius=MobiusMap(n=n, k=k, coefficients=coefficients)
        )

    def minimal_winning_coalitions(self, v: KaryCapacity) -> list[GridPoint]:
        """Minimal points where a 0-1 valued capacity equals 1, lexicographic order"""
        for z, value in v.items():
            if value not in (0, 1):
                raise CapacityViolationError(
                    f"Capacity is not 0-1 valued: {value} at {format_point(z)}", {"point": format_point(z)}
                )
        winning = []
        for z, value in v.items():
            if value != 1:
                continue
            lower_covers = (tuple(c - (a == i) for a, c in enumerate(z)) for i in range(v.n) if z[i] > 0)
            if all(v.value(y) == 0 for y in lower_covers):
                winning.append(z)
        return winning

    # ----------------------------------------------------------------- census

    def count_vertices(self, n: int, k: int) -> VertexCensus:
        if n < 2 or k < 1:
            raise GridError(f"Vertex census needs n >= 2 and k >= 1, got n={n}, k={k}")
        per_pair = math.comb(2 * k + 2, k + 1) - 2
        pairs = n * (n - 1) // 2
        total = (per_pair - 2 * k) * pairs + k * n
        return VertexCensus(n=n, k=k, per_singleton=k, per_pair=per_pair, total=total)

    def enumerate_vertices(self, n: int, k: int) -> Iterator[VertexCapacity]:
        """Each vertex once: singleton thresholds first, then per pair every antichain
        that is not a single threshold on one axis"""
        census = self.count_vertices(n, k)
        logger.info(f"Enumerating {census.total} vertices for n={n}, k={k}")
        for i in range(n):
            for level in range(1, k + 1):
                yield self.vertex_from_antichain(Antichain(points=((level,),)), (i,), n, k)
        antichains = [a for a in self.enumerate_antichains(k) if not a.on_one_axis()]
        for pair in itertools.combinations(range(n), 2):
            for antichain in antichains:
                yield self.vertex_from_antichain(antichain, pair, n, k)

    # ---------------------------------------------------------------- oracles

    def is_extreme_bruteforce(self, v: KaryCapacity) -> bool:
        """Search for a perturbation d with v + d and v - d both in the polytope

        Variables are Möbius atoms with one or two active attributes. For each
        atom, maximize d(atom); the feasible set is symmetric, so v is extreme
        iff every maximum is 0.
        """
        size = grid_size(v.bounds)
        if size > self.extreme_check_max_points:
            raise BudgetExceededError(
                f"Extremality check needs {size} grid points", required=size, budget=self.extreme_check_max_points
            )
        m = kary_service.mobius(v)
        if m.max_support_size() > 2:
            raise NotTwoAdditiveError("Capacity is not 2-additive, it lies outside the polytope")

        atoms = [z for z in grid_points(v.bounds) if 1 <= len(support_of(z)) <= 2]
        names = {z: f"d_{'_'.join(map(str, z))}" for z in atoms}
        rows = [Constraint(name="normalization", coefficients={names[z]: Fraction(1) for z in atoms}, relation="=")]
        for z in grid_points(v.bounds):
            for i in range(v.n):
                if z[i] == v.k:
                    continue
                upper = tuple(c + (a == i) for a, c in enumerate(z))
                slack = v.value(upper) - v.value(z)
                # atoms below upper but not below z
                entering = {
                    names[x]: Fraction(1)
                    for x in atoms
                    if x[i] == upper[i] and leq(x, upper)
                }
                if not entering:
                    continue
                label = f"{'_'.join(map(str, z))}_{i}"
                rows.append(Constraint(name=f"up_{label}", coefficients=entering, relation="<=", rhs=slack))
                rows.append(Constraint(name=f"down_{label}", coefficients=entering, relation=">=", rhs=-slack))

        variables = tuple(names[z] for z in atoms)
        bounds = {name: FREE for name in variables}
        for z in atoms:
            lp = lp_service.build(
                name=f"extreme_{names[z]}",
                variables=variables,
                objective=Objective(sense="max", coefficients={names[z]: Fraction(1)}),
                constraints=tuple(rows),
                bounds=bounds,
            )
            outcome = lp_service.solve(lp)
            if outcome.status != "optimal" or outcome.objective_value != 0:
                logger.debug(f"Perturbation found along {format_point(z)}")
                return False
        return True

    def enumerate_01_2additive_bruteforce(self, n: int, k: int) -> list[KaryCapacity]:
        """Every 0-1 valued 2-additive k-ary capacity, by exhaustive monotone search"""
        bounds = uniform_bounds(n, k)
        size = grid_size(bounds)
        if size > self.bruteforce_max_grid_points:
            raise BudgetExceededError(
                f"Exhaustive 0-1 enumeration needs {size} grid points",
                required=size,
                budget=self.bruteforce_max_grid_points,
            )
        start_time = time.time()
        points = list(grid_points(bounds))
        position = {z: index for index, z in enumerate(points)}
        lower_covers = [
            [position[tuple(c - (a == i) for a, c in enumerate(z))] for i in range(n) if z[i] > 0] for z in points
        ]
        found: list[tuple[int, ...]] = []
        assignment = [0] * size

        def search(index: int) -> None:
            if index == size:
                if assignment[-1] == 1:
                    found.append(tuple(assignment))
                return
            if index == 0:
                choices: tuple[int, ...] = (0,)
            elif any(assignment[c] for c in lower_covers[index]):
                choices = (1,)
            else:
                choices = (0, 1)
            for value in choices:
                assignment[index] = value
                search(index + 1)
            assignment[index] = 0

        search(0)
        result = []
        for values in sorted(found):
            capacity = KaryCapacity(n=n, k=k, values=tuple(Fraction(x) for x in values))
            if kary_service.p_additivity_degree(capacity) <= 2:
                result.append(capacity)
        logger.info(
            f"Brute force found {len(result)} 0-1 2-additive capacities out of {len(found)} "
            f"in {time.time() - start_time:.2f}s"
        )
        return result


# Global polytope service instance
polytope_service = PolytopeService()
