"""
Exact rational simplex solver with certificates
"""

import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any

from pydantic import ValidationError

from ..config import settings
from ..errors import EngineError, LpFormatError, SolverBudgetError
from ..models.lp import Bound, LinearProgram, LpCertificate, LpOutcome

logger = logging.getLogger(__name__)

ZERO = Fraction(0)


@dataclass
class _StandardForm:
    """A program rewritten as A x' = b, x' >= 0, b >= 0

    Each original variable maps to one column (shifted by its lower bound or
    mirrored at its upper bound) or to two columns when it is free. Rows keep
    the sign bookkeeping needed to map multipliers back to the original rows.
    """

    columns: dict[str, tuple[str, list[int], Fraction]] = field(default_factory=dict)
    structural: int = 0
    rows: list[dict[int, Fraction]] = field(default_factory=list)
    rhs: list[Fraction] = field(default_factory=list)
    basis: list[int] = field(default_factory=list)
    unit_column: list[int] = field(default_factory=list)
    row_origin: list[str | None] = field(default_factory=list)
    row_sign: list[int] = field(default_factory=list)
    artificial_start: int = 0
    width: int = 0


class _Tableau:
    """Sparse simplex tableau with a column to rows index"""

    def __init__(self, form: _StandardForm, max_iterations: int):
        self.rows = form.rows
        self.rhs = form.rhs
        self.basis = form.basis
        self.artificial_start = form.artificial_start
        self.col_rows: dict[int, set[int]] = defaultdict(set)
        for r, row in enumerate(self.rows):
            for col in row:
                self.col_rows[col].add(r)
        self.iterations = 0
        self.max_iterations = max_iterations

    def is_artificial(self, col: int) -> bool:
        return col >= self.artificial_start

    def reduced_costs(self, costs: dict[int, Fraction]) -> dict[int, Fraction]:
        reduced = {col: c for col, c in costs.items() if c}
        for r, basic in enumerate(self.basis):
            cb = costs.get(basic)
            if not cb:
                continue
            for col, val in self.rows[r].items():
                updated = reduced.get(col, ZERO) - cb * val
                if updated:
                    reduced[col] = updated
                else:
                    reduced.pop(col, None)
        return reduced

    def pivot(self, r: int, j: int, reduced: dict[int, Fraction] | None = None) -> None:
        pivot_row = self.rows[r]
        factor = pivot_row[j]
        if factor != 1:
            for col in pivot_row:
                pivot_row[col] /= factor
            self.rhs[r] /= factor
        for i in list(self.col_rows[j]):
            if i == r:
                continue
            row = self.rows[i]
            f = row[j]
            for col, val in pivot_row.items():
                updated = row.get(col, ZERO) - f * val
                if updated:
                    row[col] = updated
                    self.col_rows[col].add(i)
                else:
                    row.pop(col, None)
                    self.col_rows[col].discard(i)
            self.rhs[i] -= f * self.rhs[r]
        if reduced is not None and reduced.get(j):
            f = reduced[j]
            for col, val in pivot_row.items():
                updated = reduced.get(col, ZERO) - f * val
                if updated:
                    reduced[col] = updated
                else:
                    reduced.pop(col, None)
        self.basis[r] = j

    def run(self, costs: dict[int, Fraction]) -> tuple[str, dict[int, Fraction], int | None]:
        """Maximize with Bland's rule; artificial columns never enter"""
        reduced = self.reduced_costs(costs)
        while True:
            entering = min(
                (col for col, d in reduced.items() if d > 0 and not self.is_artificial(col)),
                default=None,
            )
            if entering is None:
                return "optimal", reduced, None
            leaving: int | None = None
            best: tuple[Fraction, int] | None = None
            for i in self.col_rows[entering]:
                a = self.rows[i][entering]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best:
                        best, leaving = key, i
            if leaving is None:
                return "unbounded", reduced, entering
            self.iterations += 1
            if self.iterations > self.max_iterations:
                raise SolverBudgetError(
                    f"Simplex exceeded {self.max_iterations} pivots",
                    {"iterations": self.iterations, "budget": self.max_iterations},
                )
            self.pivot(leaving, entering, reduced)

    def drive_out_artificials(self) -> None:
        for r, basic in enumerate(self.basis):
            if not self.is_artificial(basic):
                continue
            replacement = min((col for col in self.rows[r] if not self.is_artificial(col)), default=None)
            if replacement is not None:
                self.pivot(r, replacement)


class LpService:
    """Service solving exact linear programs"""

    def __init__(self):
        self.max_iterations = settings.lp_max_iterations
        self.verify_duals = settings.lp_verify_duals
        self.dual_check_max_variables = settings.lp_dual_check_max_variables
        logger.info(f"LP service initialized (pivot budget {self.max_iterations})")

    def build(self, **fields: Any) -> LinearProgram:
        """Construct a program, reporting malformed input as LpFormatError"""
        try:
            return LinearProgram(**fields)
        except ValidationError as e:
            messages = [error["msg"] for error in e.errors(include_url=False)]
            raise LpFormatError(f"Malformed program: {messages[0]}", {"errors": messages}) from e

    # ------------------------------------------------------------------ solve

    def solve(self, lp: LinearProgram, start: dict[str, Fraction] | None = None) -> LpOutcome:
        """Solve `lp` exactly.

        A feasibility program (no objective) given a `start` point that satisfies
        every row and bound is returned as feasible without pivoting.
        """
        if start is not None and lp.objective is not None:
            logger.debug(f"Program {lp.name}: start point ignored for an optimization program")
        elif start is not None:
            if self.verify_point(lp, start):
                logger.info(f"Program {lp.name}: start point accepted without pivoting")
                return LpOutcome(status="feasible", point={v: Fraction(start[v]) for v in lp.variables})
            logger.warning(f"Program {lp.name}: start point rejected, running the simplex")

        start_time = time.time()
        form = self._standard_form(lp)
        tableau = _Tableau(form, self.max_iterations)
        logger.debug(f"Program {lp.name}: {len(form.rows)} rows, {form.width} columns")

        outcome = self._run(lp, form, tableau)
        logger.info(
            f"Program {lp.name}: {outcome.status} after {tableau.iterations} pivots "
            f"in {time.time() - start_time:.2f}s"
        )
        return outcome

    def _run(self, lp: LinearProgram, form: _StandardForm, tableau: _Tableau) -> LpOutcome:
        if form.artificial_start < form.width:
            phase1_costs = {col: Fraction(-1) for col in range(form.artificial_start, form.width)}
            _, reduced, _ = tableau.run(phase1_costs)
            infeasible = any(
                tableau.is_artificial(basic) and tableau.rhs[r] > 0 for r, basic in enumerate(tableau.basis)
            )
            if infeasible:
                multipliers = self._row_multipliers(form, tableau, phase1_costs, reduced)
                certificate = LpCertificate(kind="farkas", multipliers=multipliers)
                if self.verify_duals:
                    if not self.verify_farkas(lp, multipliers):
                        raise EngineError(f"Program {lp.name}: Farkas certificate failed verification")
                    certificate = certificate.model_copy(update={"verified": True})
                return LpOutcome(status="infeasible", certificate=certificate, iterations=tableau.iterations)
            tableau.drive_out_artificials()

        if lp.objective is None:
            point = self._extract_point(lp, form, tableau)
            return LpOutcome(status="feasible", point=point, iterations=tableau.iterations)

        sign = 1 if lp.objective.sense == "max" else -1
        costs: dict[int, Fraction] = {}
        for variable, c in lp.objective.coefficients.items():
            kind, cols, _ = form.columns[variable]
            if kind == "flip":
                costs[cols[0]] = -sign * c
            elif kind == "split":
                costs[cols[0]] = sign * c
                costs[cols[1]] = -sign * c
            else:
                costs[cols[0]] = sign * c
        status, reduced, entering = tableau.run(costs)

        if status == "unbounded":
            assert entering is not None
            direction = self._ray(lp, form, tableau, entering)
            certificate = LpCertificate(kind="ray", direction=direction)
            if self.verify_duals:
                if not self.verify_ray(lp, direction):
                    raise EngineError(f"Program {lp.name}: unbounded ray failed verification")
                certificate = certificate.model_copy(update={"verified": True})
            return LpOutcome(status="unbounded", certificate=certificate, iterations=tableau.iterations)

        point = self._extract_point(lp, form, tableau)
        value = sum((c * point[v] for v, c in lp.objective.coefficients.items()), ZERO)
        multipliers = self._row_multipliers(form, tableau, costs, reduced)
        certificate = LpCertificate(kind="dual", multipliers=multipliers)
        if self.verify_duals and len(lp.variables) <= self.dual_check_max_variables:
            bound = self.verify_dual(lp, multipliers)
            if bound != value:
                raise EngineError(f"Program {lp.name}: dual bound {bound} does not match optimum {value}")
            certificate = certificate.model_copy(update={"verified": True})
        return LpOutcome(
            status="optimal",
            point=point,
            objective_value=value,
            certificate=certificate,
            iterations=tableau.iterations,
        )

    # ---------------------------------------------------------- standard form

    def _standard_form(self, lp: LinearProgram) -> _StandardForm:
        form = _StandardForm()
        col = 0
        for variable in lp.variables:
            bound = lp.bound(variable)
            if bound.lower is not None:
                form.columns[variable] = ("shift", [col], bound.lower)
                col += 1
            elif bound.upper is not None:
                form.columns[variable] = ("flip", [col], bound.upper)
                col += 1
            else:
                form.columns[variable] = ("split", [col, col + 1], ZERO)
                col += 2
        form.structural = col

        pending: list[tuple[dict[int, Fraction], str, Fraction, str | None, int]] = []
        for row in lp.constraints:
            coeffs: dict[int, Fraction] = defaultdict(Fraction)
            constant = ZERO
            for variable, a in row.coefficients.items():
                kind, cols, offset = form.columns[variable]
                if kind == "shift":
                    coeffs[cols[0]] += a
                    constant += a * offset
                elif kind == "flip":
                    coeffs[cols[0]] -= a
                    constant += a * offset
                else:
                    coeffs[cols[0]] += a
                    coeffs[cols[1]] -= a
            rhs = row.rhs - constant
            relation = row.relation
            orientation = 1
            if relation == ">=":
                coeffs = defaultdict(Fraction, {c: -a for c, a in coeffs.items()})
                rhs, relation, orientation = -rhs, "<=", -1
            pending.append(({c: a for c, a in coeffs.items() if a}, relation, rhs, row.name, orientation))

        for variable in lp.variables:
            kind, cols, offset = form.columns[variable]
            upper = lp.bound(variable).upper
            if kind == "shift" and upper is not None:
                pending.append(({cols[0]: Fraction(1)}, "<=", upper - offset, None, 1))

        # slack columns follow the structural ones, artificial columns come last
        artificial_col = col + sum(1 for entry in pending if entry[1] == "<=")
        form.artificial_start = artificial_col
        next_slack = col
        for coeffs, relation, rhs, origin, orientation in pending:
            row = dict(coeffs)
            sign = 1
            slack = None
            if relation == "<=":
                slack = next_slack
                next_slack += 1
                row[slack] = Fraction(1)
            if rhs < 0:
                row = {c: -a for c, a in row.items()}
                rhs, sign = -rhs, -1
            if slack is not None and sign == 1:
                unit = slack
            else:
                unit = artificial_col
                row[unit] = Fraction(1)
                artificial_col += 1
            form.rows.append(row)
            form.rhs.append(rhs)
            form.basis.append(unit)
            form.unit_column.append(unit)
            form.row_origin.append(origin)
            form.row_sign.append(sign * orientation)
        form.width = artificial_col
        return form

    # ------------------------------------------------------------- read back

    def _extract_point(self, lp: LinearProgram, form: _StandardForm, tableau: _Tableau) -> dict[str, Fraction]:
        values: dict[int, Fraction] = {}
        for r, basic in enumerate(tableau.basis):
            if basic < form.structural:
                values[basic] = tableau.rhs[r]
        point: dict[str, Fraction] = {}
        for variable in lp.variables:
            kind, cols, offset = form.columns[variable]
            if kind == "shift":
                point[variable] = offset + values.get(cols[0], ZERO)
            elif kind == "flip":
                point[variable] = offset - values.get(cols[0], ZERO)
            else:
                point[variable] = values.get(cols[0], ZERO) - values.get(cols[1], ZERO)
        violated = self.point_violations(lp, point)
        if violated:
            logger.error(f"Program {lp.name}: extracted point violates {violated[:5]}")
            raise EngineError(f"Program {lp.name}: solver produced an inexact point", {"violated": violated[:20]})
        return point

    def _row_multipliers(
        self,
        form: _StandardForm,
        tableau: _Tableau,
        costs: dict[int, Fraction],
        reduced: dict[int, Fraction],
    ) -> dict[str, Fraction]:
        """Simplex multipliers read off the initial unit columns, mapped to the original rows"""
        multipliers: dict[str, Fraction] = {}
        for r, origin in enumerate(form.row_origin):
            if origin is None:
                continue
            unit = form.unit_column[r]
            y = costs.get(unit, ZERO) - reduced.get(unit, ZERO)
            multipliers[origin] = form.row_sign[r] * y
        return multipliers

    def _ray(self, lp: LinearProgram, form: _StandardForm, tableau: _Tableau, entering: int) -> dict[str, Fraction]:
        col_direction: dict[int, Fraction] = {entering: Fraction(1)}
        for i in tableau.col_rows[entering]:
            col_direction[tableau.basis[i]] = -tableau.rows[i][entering]
        direction: dict[str, Fraction] = {}
        for variable in lp.variables:
            kind, cols, _ = form.columns[variable]
            if kind == "shift":
                step = col_direction.get(cols[0], ZERO)
            elif kind == "flip":
                step = -col_direction.get(cols[0], ZERO)
            else:
                step = col_direction.get(cols[0], ZERO) - col_direction.get(cols[1], ZERO)
            if step:
                direction[variable] = step
        return direction

    # -------------------------------------------------------------- verifiers

    def point_violations(self, lp: LinearProgram, point: dict[str, Fraction]) -> list[str]:
        violated = [f"bound:{v}" for v in lp.variables if not lp.bound(v).contains(point[v])]
        violated.extend(str(row.name) for row in lp.constraints if not row.holds(point))
        return violated

    def verify_point(self, lp: LinearProgram, point: dict[str, Fraction]) -> bool:
        """True iff `point` satisfies every row and bound with zero residual"""
        if any(v not in point for v in lp.variables):
            return False
        return not self.point_violations(lp, point)

    def _aggregate(self, lp: LinearProgram, multipliers: dict[str, Fraction]) -> tuple[dict[str, Fraction], Fraction] | None:
        """Combine rows into g x <= h; None when a multiplier has the wrong sign"""
        combined: dict[str, Fraction] = defaultdict(Fraction)
        rhs = ZERO
        for row in lp.constraints:
            y = multipliers.get(str(row.name), ZERO)
            if not y:
                continue
            if (row.relation == "<=" and y < 0) or (row.relation == ">=" and y > 0):
                return None
            for variable, a in row.coefficients.items():
                combined[variable] += y * a
            rhs += y * row.rhs
        return dict(combined), rhs

    @staticmethod
    def _box_extreme(bound: Bound, coefficient: Fraction, maximize: bool) -> Fraction | None:
        """max (or min) of coefficient * x over the bound interval; None when unbounded"""
        if not coefficient:
            return ZERO
        upward = (coefficient > 0) == maximize
        limit = bound.upper if upward else bound.lower
        return None if limit is None else coefficient * limit

    def verify_farkas(self, lp: LinearProgram, multipliers: dict[str, Fraction]) -> bool:
        """True iff the combined row g x <= h has no solution inside the bounds"""
        aggregated = self._aggregate(lp, multipliers)
        if aggregated is None:
            return False
        combined, rhs = aggregated
        lowest = ZERO
        for variable in lp.variables:
            term = self._box_extreme(lp.bound(variable), combined.get(variable, ZERO), maximize=False)
            if term is None:
                return False
            lowest += term
        return lowest > rhs

    def verify_dual(self, lp: LinearProgram, multipliers: dict[str, Fraction]) -> Fraction | None:
        """Upper bound (lower bound for min) on the objective implied by the multipliers"""
        if lp.objective is None:
            raise LpFormatError(f"Program {lp.name} has no objective to bound")
        aggregated = self._aggregate(lp, multipliers)
        if aggregated is None:
            return None
        combined, rhs = aggregated
        sign = 1 if lp.objective.sense == "max" else -1
        bound = rhs
        for variable in lp.variables:
            reduced = sign * lp.objective.coefficients.get(variable, ZERO) - combined.get(variable, ZERO)
            term = self._box_extreme(lp.bound(variable), reduced, maximize=True)
            if term is None:
                return None
            bound += term
        return sign * bound

    def verify_ray(self, lp: LinearProgram, direction: dict[str, Fraction]) -> bool:
        """True iff `direction` is a recession direction that improves the objective"""
        if lp.objective is None:
            return False
        for variable in lp.variables:
            step = direction.get(variable, ZERO)
            bound = lp.bound(variable)
            if (bound.lower is not None and step < 0) or (bound.upper is not None and step > 0):
                return False
        for row in lp.constraints:
            change = sum((a * direction.get(v, ZERO) for v, a in row.coefficients.items()), ZERO)
            if (row.relation == "<=" and change > 0) or (row.relation == ">=" and change < 0):
                return False
            if row.relation == "=" and change != 0:
                return False
        gain = sum((c * direction.get(v, ZERO) for v, c in lp.objective.coefficients.items()), ZERO)
        return gain > 0 if lp.objective.sense == "max" else gain < 0

    # ------------------------------------------------------------------- dump

    def to_lp_format(self, lp: LinearProgram, digits: int = 17) -> str:
        """Render the program in the CPLEX LP text format (decimal coefficients)"""

        def number(value: Fraction) -> str:
            if value.denominator == 1:
                return str(value.numerator)
            with localcontext() as ctx:
                ctx.prec = digits
                return str(Decimal(value.numerator) / Decimal(value.denominator))

        def expression(coefficients: dict[str, Fraction]) -> str:
            parts = []
            for variable in lp.variables:
                c = coefficients.get(variable)
                if not c:
                    continue
                sign = "-" if c < 0 else "+"
                magnitude = "" if abs(c) == 1 else f"{number(abs(c))} "
                parts.append(f"{sign} {magnitude}{variable}")
            if not parts:
                return f"0 {lp.variables[0]}" if lp.variables else "0"
            text = " ".join(parts)
            return text[2:] if text.startswith("+ ") else text

        lines = [f"\\ {lp.name}"]
        if lp.objective is None:
            lines += ["Minimize", f" obj: {expression({})}"]
        else:
            lines += ["Maximize" if lp.objective.sense == "max" else "Minimize"]
            lines.append(f" obj: {expression(lp.objective.coefficients)}")
        lines.append("Subject To")
        for row in lp.constraints:
            lines.append(f" {row.name}: {expression(row.coefficients)} {row.relation} {number(row.rhs)}")
        lines.append("Bounds")
        for variable in lp.variables:
            bound = lp.bound(variable)
            if bound.lower is None and bound.upper is None:
                lines.append(f" {variable} free")
            elif bound.lower is None:
                lines.append(f" -inf <= {variable} <= {number(bound.upper)}")  # type: ignore[arg-type]
            elif bound.upper is None:
                if bound.lower != 0:
                    lines.append(f" {variable} >= {number(bound.lower)}")
            else:
                lines.append(f" {number(bound.lower)} <= {variable} <= {number(bound.upper)}")
        lines.append("End")
        return "\n".join(lines) + "\n"


# Global LP service instance
lp_service = LpService()
