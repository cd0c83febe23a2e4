"""
k-ary games and capacities: Möbius/zeta transforms, capacity checks and additivity degree
"""

import logging
from collections.abc import Sequence
from fractions import Fraction
from functools import cache

from ..config import settings
from ..errors import BudgetExceededError, CapacityViolationError, GridError, NotTwoAdditiveError
from ..models.grid import CapacityReport, KaryCapacity, KaryGame, MobiusMap, Violation
from ..utils.lattice import (
    covering_pairs,
    grid_points,
    grid_size,
    in_bounds,
    leq,
    prefix_sums,
    support_of,
    uniform_bounds,
    unit_differences,
    unit_step,
)
from ..utils.rationals import GridPoint, format_point

logger = logging.getLogger(__name__)


@cache
def chain_mobius(a: int, b: int) -> int:
    """Möbius function of the chain 0 < 1 < ... < k, by the defining recursion"""
    if a > b:
        return 0
    if a == b:
        return 1
    return -sum(chain_mobius(a, t) for t in range(a, b))


class KaryService:
    """Service for transforms and checks on the grid {0..k}^n"""

    def __init__(self):
        self.mobius_bruteforce_max_points = settings.mobius_bruteforce_max_points
        logger.info("Kary service initialized")

    # ------------------------------------------------------------ transforms

    def zeta(self, m: MobiusMap) -> KaryGame:
        """v(z) = sum of m(y) over y <= z"""
        bounds = uniform_bounds(m.n, m.k)
        values = [m.coefficient(z) for z in grid_points(bounds)]
        prefix_sums(values, bounds)
        return KaryGame(n=m.n, k=m.k, values=tuple(values))

    def mobius(self, v: KaryGame) -> MobiusMap:
        """Inverse of zeta, by unit differences along every axis"""
        values = list(v.values)
        unit_differences(values, v.bounds)
        return MobiusMap(n=v.n, k=v.k, coefficients=dict(zip(v.points(), values, strict=True)))

    def mobius_bruteforce(self, v: KaryGame) -> MobiusMap:
        """Generic poset inversion m(x) = sum over y <= x of mu(y, x) v(y)

        mu is the product of chain Möbius functions; used as an oracle for `mobius`.
        """
        size = grid_size(v.bounds)
        if size > self.mobius_bruteforce_max_points:
            raise BudgetExceededError(
                f"Brute-force Möbius inversion needs {size} points", required=size, budget=self.mobius_bruteforce_max_points
            )
        coefficients: dict[GridPoint, Fraction] = {}
        for x in v.points():
            total = Fraction(0)
            for y in grid_points(x):
                weight = 1
                for a, b in zip(y, x, strict=True):
                    weight *= chain_mobius(a, b)
                    if not weight:
                        break
                if weight:
                    total += weight * v.value(y)
            coefficients[x] = total
        return MobiusMap(n=v.n, k=v.k, coefficients=coefficients)

    def evaluate_mobius(self, m: MobiusMap, z: GridPoint) -> Fraction:
        """Sparse evaluation of zeta(m) at a single point"""
        return sum((c for x, c in m.coefficients.items() if leq(x, z)), Fraction(0))

    def unanimity(self, x: GridPoint, k: int) -> KaryCapacity:
        """u_x(z) = 1 iff z >= x"""
        n = len(x)
        if n < 1 or k < 1 or not in_bounds(x, uniform_bounds(n, k)):
            raise GridError(f"Point {format_point(x)} is not on a grid with k={k}")
        if not any(x):
            raise GridError("The unanimity game centered on the origin is not a capacity")
        values = tuple(Fraction(1) if leq(x, z) else Fraction(0) for z in grid_points(uniform_bounds(n, k)))
        return KaryCapacity(n=n, k=k, values=values)

    # ---------------------------------------------------------------- checks

    def check_capacity(self, v: KaryGame) -> CapacityReport:
        violations: list[Violation] = []
        zero_grounded = v.value(v.origin) == 0
        if not zero_grounded:
            violations.append(Violation(points=(v.origin,), description=f"value at origin is {v.value(v.origin)}"))
        monotone = True
        for z, i, upper in covering_pairs(v.bounds):
            if v.value(upper) < v.value(z):
                monotone = False
                violations.append(
                    Violation(points=(z, upper), description=f"value decreases along attribute {i}")
                )
        normalized = v.value(v.top) == 1
        if not normalized:
            violations.append(Violation(points=(v.top,), description=f"value at top is {v.value(v.top)}"))
        return CapacityReport(
            zero_grounded=zero_grounded, monotone=monotone, normalized=normalized, violations=violations
        )

    def as_capacity(self, v: KaryGame) -> KaryCapacity:
        """Promote a game to a capacity, raising with the first witness on failure"""
        if isinstance(v, KaryCapacity):
            return v
        report = self.check_capacity(v)
        if not report.is_capacity:
            witness = report.violations[0]
            raise CapacityViolationError(
                f"Not a k-ary capacity: {witness.description}",
                {"points": [format_point(p) for p in witness.points], "violations": len(report.violations)},
            )
        return KaryCapacity(n=v.n, k=v.k, values=v.values)

    def is_zero_one_valued(self, v: KaryGame) -> bool:
        return all(value in (0, 1) for value in v.values)

    def p_additivity_degree(self, v: KaryGame | MobiusMap) -> int:
        """Smallest p with m(z) = 0 whenever |supp(z)| > p; 0 for the zero game"""
        m = v if isinstance(v, MobiusMap) else self.mobius(v)
        degree = m.max_support_size()
        if not m.coefficients:
            logger.warning("p-additivity degree requested for the identically zero game, reporting 0")
        return degree

    def support(self, v: KaryGame | MobiusMap) -> frozenset[int]:
        m = v if isinstance(v, MobiusMap) else self.mobius(v)
        return frozenset(i for z in m.coefficients for i in support_of(z))

    def two_additive_mobius(self, v: KaryGame | MobiusMap) -> MobiusMap:
        """Möbius map of a 2-additive capacity; raises with a witness atom otherwise

        Dense games are checked as capacities on the full grid; sparse Möbius maps
        use the quadratic check.
        """
        m = v if isinstance(v, MobiusMap) else self.mobius(v)
        wide = [(z, c) for z, c in m.atoms() if len(support_of(z)) > 2]
        if wide:
            z, c = wide[0]
            raise NotTwoAdditiveError(
                f"Möbius coefficient {c} at {format_point(z)} has support of size {len(support_of(z))}",
                {"point": format_point(z), "coefficient": str(c)},
            )
        if isinstance(v, MobiusMap):
            report = self.check_two_additive_capacity(m)
            if not report.is_capacity:
                witness = report.violations[0]
                raise CapacityViolationError(
                    f"Not a k-ary capacity: {witness.description}",
                    {"points": [format_point(p) for p in witness.points]},
                )
        else:
            self.as_capacity(v)
        return m

    # ------------------------------------------------- quadratic 2-additive check

    def axis_values(self, m: MobiusMap) -> dict[int, list[Fraction]]:
        """A_i(l): value of zeta(m) at l * e_i"""
        origin = m.coefficient((0,) * m.n)
        axes: dict[int, list[Fraction]] = {}
        for i in range(m.n):
            running = origin
            column = [origin]
            for level in range(1, m.k + 1):
                point = [0] * m.n
                point[i] = level
                running += m.coefficient(tuple(point))
                column.append(running)
            axes[i] = column
        return axes

    def interaction_tables(self, m: MobiusMap) -> dict[tuple[int, int], list[list[Fraction]]]:
        """I_ij(a, b): cumulative pair atoms with both coordinates positive, for pairs carrying mass"""
        atoms: dict[tuple[int, int], dict[tuple[int, int], Fraction]] = {}
        for z, c in m.coefficients.items():
            axes = support_of(z)
            if len(axes) == 2:
                i, j = axes
                atoms.setdefault((i, j), {})[(z[i], z[j])] = c
        tables: dict[tuple[int, int], list[list[Fraction]]] = {}
        for pair, local in atoms.items():
            table = [[Fraction(0)] * (m.k + 1) for _ in range(m.k + 1)]
            for a in range(1, m.k + 1):
                for b in range(1, m.k + 1):
                    table[a][b] = local.get((a, b), Fraction(0)) + table[a - 1][b] + table[a][b - 1] - table[a - 1][b - 1]
            tables[pair] = table
        return tables

    @staticmethod
    def minimal_steps(table: Sequence[Sequence[Fraction]], transpose: bool) -> list[tuple[Fraction, int]]:
        """For each level l, the smallest increment of the table along its first (or second) axis

        Returns (increment, level of the other axis attaining it); the increment is never
        positive because the table vanishes on the axes.
        """
        size = len(table)
        steps = []
        for level in range(size - 1):
            best = (Fraction(0), 0)
            for other in range(size):
                if transpose:
                    step = table[other][level + 1] - table[other][level]
                else:
                    step = table[level + 1][other] - table[level][other]
                if step < best[0]:
                    best = (step, other)
            steps.append(best)
        return steps

    def check_two_additive_capacity(self, m: MobiusMap) -> CapacityReport:
        """Decide whether zeta(m) is a k-ary capacity in O(n^2 k^2), without the dense grid

        m must be 2-additive. Along attribute i at level l the smallest increment
        of zeta(m) is A_i(l+1) - A_i(l) plus, for every other attribute j, the
        smallest increment of I_ij, each minimized independently over z_j.
        """
        if m.max_support_size() > 2:
            raise NotTwoAdditiveError("The quadratic capacity check needs a 2-additive Möbius map")
        violations: list[Violation] = []
        origin = (0,) * m.n
        top = (m.k,) * m.n
        zero_grounded = m.coefficient(origin) == 0
        if not zero_grounded:
            violations.append(Violation(points=(origin,), description=f"value at origin is {m.coefficient(origin)}"))
        axes = self.axis_values(m)
        tables = self.interaction_tables(m)
        steps: dict[tuple[int, int], list[tuple[Fraction, int]]] = {}
        for (i, j), table in tables.items():
            steps[(i, j)] = self.minimal_steps(table, transpose=False)
            steps[(j, i)] = self.minimal_steps(table, transpose=True)

        monotone = True
        for i in range(m.n):
            for level in range(m.k):
                increment = axes[i][level + 1] - axes[i][level]
                witness = [0] * m.n
                witness[i] = level
                for j in range(m.n):
                    if (i, j) in steps:
                        step, other = steps[(i, j)][level]
                        increment += step
                        witness[j] = other
                if increment < 0:
                    monotone = False
                    z = tuple(witness)
                    violations.append(
                        Violation(points=(z, unit_step(z, i)), description=f"value decreases along attribute {i}")
                    )
        top_value = sum(m.coefficients.values(), Fraction(0))
        normalized = top_value == 1
        if not normalized:
            violations.append(Violation(points=(top,), description=f"value at top is {top_value}"))
        return CapacityReport(
            zero_grounded=zero_grounded, monotone=monotone, normalized=normalized, violations=violations
        )


# Global kary service instance
kary_service = KaryService()
