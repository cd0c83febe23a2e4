"""
Elicitation of a monotone 2-additive GAI model from preference data
"""

import logging
import time
from fractions import Fraction
from typing import Literal

from ..config import settings
from ..errors import DecompositionDefectError, GridError
from ..models.elicitation import ElicitationResult, PreferenceDataset
from ..models.lp import UNIT, Bound, Constraint, LinearProgram, Objective
from .decompose_service import decompose_service
from .lp_service import lp_service

logger = logging.getLogger(__name__)

Mode = Literal["margin", "soft"]

MARGIN = "delta"


def _combine(*parts: tuple[int, dict[str, Fraction]]) -> dict[str, Fraction]:
    combined: dict[str, Fraction] = {}
    for sign, coefficients in parts:
        for name, value in coefficients.items():
            combined[name] = combined.get(name, Fraction(0)) + sign * value
    return {name: value for name, value in combined.items() if value}


class ElicitService:
    """Service fitting monotone 2-additive models to comparisons and category assignments"""

    def __init__(self):
        self.soft_margin = settings.elicitation_soft_margin
        logger.info(f"Elicit service initialized (soft margin {self.soft_margin})")

    def build_elicitation_lp(self, data: PreferenceDataset, mode: Mode = "margin") -> LinearProgram:
        """Term tables on each attribute's own level range, normalized to [0, 1]

        margin mode maximizes a shared separation `delta` of the strict pairs;
        soft mode fixes the separation and minimizes the total slack.
        """
        levels = data.space.level_bounds
        if data.space.k < 1:
            raise GridError("Elicitation needs at least one attribute with two levels")
        variables = decompose_service.term_variables(levels)
        bounds: dict[str, Bound] = {}
        rows = decompose_service.monotonicity_rows(levels)
        rows.append(
            Constraint(
                name="normalization",
                coefficients=decompose_service.utility_row(levels, data.space.best),
                relation="=",
                rhs=Fraction(1),
            )
        )

        soft = mode == "soft"
        slacks: list[str] = []

        def utility(x: tuple[int, ...]) -> dict[str, Fraction]:
            return decompose_service.utility_row(levels, x)

        def add_row(name: str, coefficients: dict[str, Fraction], relation: str, separated: bool) -> None:
            """Append a row; strict rows need the margin, soft rows get their own slack"""
            coefficients = dict(coefficients)
            rhs = Fraction(0)
            if soft:
                slack = f"slack_{name}"
                slacks.append(slack)
                coefficients[slack] = Fraction(1) if relation == ">=" else Fraction(-1)
                if separated:
                    rhs = self.soft_margin
            elif separated:
                coefficients[MARGIN] = Fraction(-1)
            rows.append(Constraint(name=name, coefficients=coefficients, relation=relation, rhs=rhs))  # type: ignore[arg-type]

        for index, pair in enumerate(data.strict):
            add_row(f"strict_{index}", _combine((1, utility(pair.better)), (-1, utility(pair.worse))), ">=", True)
        for index, pair in enumerate(data.weak):
            add_row(f"weak_{index}", _combine((1, utility(pair.better)), (-1, utility(pair.worse))), ">=", False)

        thresholds = [f"t{c}" for c in range(1, data.category_count)] if data.assignments else []
        for name in thresholds:
            bounds[name] = UNIT
        for lower, upper in zip(thresholds, thresholds[1:], strict=False):
            rows.append(
                Constraint(
                    name=f"order_{lower}_{upper}",
                    coefficients={upper: Fraction(1), lower: Fraction(-1)},
                    relation=">=",
                )
            )
        for index, assignment in enumerate(data.assignments):
            c = assignment.category
            value = utility(assignment.alternative)
            if c >= 1:
                add_row(f"category_low_{index}", _combine((1, value), (-1, {f"t{c}": Fraction(1)})), ">=", True)
            if c <= data.category_count - 2:
                add_row(f"category_high_{index}", _combine((1, value), (-1, {f"t{c + 1}": Fraction(1)})), "<=", False)

        if soft:
            objective = Objective(sense="min", coefficients={name: Fraction(1) for name in slacks})
            extra = thresholds + slacks
        else:
            bounds[MARGIN] = UNIT
            objective = Objective(sense="max", coefficients={MARGIN: Fraction(1)})
            extra = [MARGIN, *thresholds]
        logger.info(
            f"Elicitation program ({mode}): {len(variables) + len(extra)} variables, {len(rows)} rows, "
            f"{len(data.strict)} strict and {len(data.weak)} weak pairs, {len(data.assignments)} assignments"
        )
        return lp_service.build(
            name=f"elicitation_{mode}",
            variables=(*variables, *extra),
            objective=objective,
            constraints=tuple(rows),
            bounds=bounds,
        )

    def elicit(self, data: PreferenceDataset, mode: Mode = "margin") -> ElicitationResult:
        """Fit the data; consistent iff the optimal margin is positive (or the program is
        feasible when nothing needs separating)"""
        start_time = time.time()
        lp = self.build_elicitation_lp(data, mode)
        outcome = lp_service.solve(lp)
        levels = data.space.level_bounds
        thresholds = tuple(f"t{c}" for c in range(1, data.category_count)) if data.assignments else ()

        if outcome.status == "infeasible":
            logger.info("Preference data is inconsistent with every normalized monotone model")
            return ElicitationResult(
                status="infeasible_with_certificate", certificate=outcome.certificate, certificate_kind="farkas"
            )
        if outcome.point is None:
            raise DecompositionDefectError(f"Elicitation program ended {outcome.status}")

        point = outcome.point
        model = decompose_service.read_decomposition(levels, data.space.k, point)
        defects = decompose_service.term_defects(model)
        if defects:
            raise DecompositionDefectError("Elicited terms violate monotonicity or bounds", {"defects": defects})
        fitted_thresholds = tuple(point[t] for t in thresholds)

        if mode == "soft":
            violation = sum((value for name, value in point.items() if name.startswith("slack_")), Fraction(0))
            logger.info(f"Soft elicitation finished with total violation {violation} in {time.time() - start_time:.2f}s")
            return ElicitationResult(
                status="consistent" if violation == 0 else "relaxed",
                model=model,
                margin=self.soft_margin,
                thresholds=fitted_thresholds,
                violation=violation,
            )

        margin = point[MARGIN]
        separating = bool(data.strict) or any(a.category >= 1 for a in data.assignments)
        if separating and margin == 0:
            certificate = outcome.certificate
            if certificate is not None:
                bound = lp_service.verify_dual(lp, dict(certificate.multipliers))
                certificate = certificate.model_copy(update={"verified": bound == 0})
            logger.info("Strict preferences cannot be separated, margin is 0")
            return ElicitationResult(
                status="infeasible_with_certificate", certificate=certificate, certificate_kind="zero_margin"
            )
        logger.info(f"Elicitation consistent with margin {margin} in {time.time() - start_time:.2f}s")
        return ElicitationResult(status="consistent", model=model, margin=margin, thresholds=fitted_thresholds)


# Global elicit service instance
elicit_service = ElicitService()
