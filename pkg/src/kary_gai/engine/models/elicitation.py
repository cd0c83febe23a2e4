"""
Preference data and elicitation results
"""

from typing import Literal
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.rationals import Rational
from .decomposition import MonotoneGaiDecomposition
from .gai import Alternative, AttributeSpace
from .lp import LpCertificate


class PreferencePair(BaseModel):
    model_config = ConfigDict(frozen=True)

    better: Alternative
    worse: Alternative


class CategoryAssignment(BaseModel):
    """An alternative sorted into an ordered category, 0 being the worst"""

    model_config = ConfigDict(frozen=True)

    alternative: Alternative
    category: int = Field(..., ge=0)


class PreferenceDataset(BaseModel):
    model_config = ConfigDict(frozen=True)

    space: AttributeSpace
    strict: tuple[PreferencePair, ...] = ()
    weak: tuple[PreferencePair, ...] = ()
    assignments: tuple[CategoryAssignment, ...] = ()
    categories: int | None = Field(None, ge=1, description="Number of categories, default max index + 1")

    @model_validator(mode="after")
    def _check_alternatives(self) -> Self:
        for pair in (*self.strict, *self.weak):
            self.space.check(pair.better)
            self.space.check(pair.worse)
        for assignment in self.assignments:
            self.space.check(assignment.alternative)
            if self.categories is not None and assignment.category >= self.categories:
                raise ValueError(f"Category {assignment.category} exceeds {self.categories} categories")
        if not (self.strict or self.weak or self.assignments):
            raise ValueError("A preference dataset needs at least one comparison or assignment")
        return self

    @property
    def category_count(self) -> int:
        if self.categories is not None:
            return self.categories
        return max((a.category for a in self.assignments), default=0) + 1


class ElicitationResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: Literal["consistent", "infeasible_with_certificate", "relaxed"]
    model: MonotoneGaiDecomposition | None = None
    margin: Rational | None = None
    thresholds: tuple[Rational, ...] = ()
    violation: Rational | None = Field(None, description="Total slack used in soft mode")
    certificate: LpCertificate | None = None
    certificate_kind: Literal["farkas", "zero_margin"] | None = None
