"""
Exact linear programs and solver outcomes
"""

from fractions import Fraction
from typing import Literal
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.rationals import Rational

Relation = Literal["<=", "=", ">="]
Status = Literal["optimal", "feasible", "infeasible", "unbounded"]


class Bound(BaseModel):
    """Variable bounds; None means unbounded on that side"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lower: Rational | None = Fraction(0)
    upper: Rational | None = None

    def contains(self, value: Fraction) -> bool:
        if self.lower is not None and value < self.lower:
            return False
        return self.upper is None or value <= self.upper


FREE = Bound(lower=None, upper=None)
NONNEGATIVE = Bound()
UNIT = Bound(lower=Fraction(0), upper=Fraction(1))


class Objective(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sense: Literal["max", "min"] = "max"
    coefficients: dict[str, Rational] = Field(default_factory=dict)


class Constraint(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str | None = None
    coefficients: dict[str, Rational]
    relation: Relation
    rhs: Rational = Fraction(0)

    def activity(self, point: dict[str, Fraction]) -> Fraction:
        return sum((c * point[v] for v, c in self.coefficients.items()), Fraction(0))

    def holds(self, point: dict[str, Fraction]) -> bool:
        lhs = self.activity(point)
        if self.relation == "<=":
            return lhs <= self.rhs
        if self.relation == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


class LinearProgram(BaseModel):
    """Variables default to [0, inf) unless `bounds` says otherwise"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = "program"
    variables: tuple[str, ...]
    objective: Objective | None = None
    constraints: tuple[Constraint, ...] = ()
    bounds: dict[str, Bound] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_program(self) -> Self:
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ValueError("Variable names must be unique")
        named: list[Constraint] = []
        for index, row in enumerate(self.constraints):
            undeclared = set(row.coefficients) - declared
            if undeclared:
                raise ValueError(f"Constraint {row.name or index} uses undeclared variables {sorted(undeclared)}")
            named.append(row if row.name else row.model_copy(update={"name": f"c{index}"}))
        names = [row.name for row in named]
        if len(set(names)) != len(names):
            raise ValueError("Constraint names must be unique")
        if self.objective is not None:
            undeclared = set(self.objective.coefficients) - declared
            if undeclared:
                raise ValueError(f"Objective uses undeclared variables {sorted(undeclared)}")
        for variable, bound in self.bounds.items():
            if variable not in declared:
                raise ValueError(f"Bound given for undeclared variable {variable}")
            if bound.lower is not None and bound.upper is not None and bound.lower > bound.upper:
                raise ValueError(f"Empty bound interval for {variable}")
        object.__setattr__(self, "constraints", tuple(named))
        return self

    def bound(self, variable: str) -> Bound:
        return self.bounds.get(variable, NONNEGATIVE)


class LpCertificate(BaseModel):
    """Farkas multipliers, an improving ray, or optimal dual multipliers

    Multipliers are keyed by constraint name and apply to the rows as written:
    nonnegative on "<=" rows, nonpositive on ">=" rows, free on "=" rows.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: Literal["farkas", "ray", "dual"]
    multipliers: dict[str, Rational] = Field(default_factory=dict)
    direction: dict[str, Rational] = Field(default_factory=dict)
    verified: bool = False


class LpOutcome(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: Status
    point: dict[str, Rational] | None = None
    objective_value: Rational | None = None
    certificate: LpCertificate | None = None
    iterations: int = 0
