"""
Engine exceptions and machine-readable error payloads
"""

from datetime import datetime
from typing import Any

from pydantic import BaseModel, Field


class ErrorResponse(BaseModel):
    """Error payload written to the diagnostic stream"""

    success: bool = Field(False, description="Always false for errors")
    message: str = Field(..., description="Human readable message")
    error_code: str = Field(..., description="Stable error code")
    details: dict[str, Any] | None = Field(None, description="Witnesses and context")
    timestamp: datetime = Field(default_factory=datetime.now, description="Error timestamp")


class EngineError(ValueError):
    """Base class for every validation or solver failure raised by the engine"""

    error_code = "ENGINE_ERROR"

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_response(self) -> ErrorResponse:
        return ErrorResponse(message=self.message, error_code=self.error_code, details=self.details)


class GridError(EngineError):
    error_code = "GRID_ERROR"


class DocumentError(EngineError):
    """Unreadable or malformed JSON input; details carry path, line and column"""

    error_code = "MALFORMED_DOCUMENT"


class CapacityViolationError(EngineError):
    """Utility monotonicity, normalization or a capacity property does not hold; details carry the witness"""

    error_code = "CAPACITY_VIOLATION"


class NotTwoAdditiveError(EngineError):
    """A Möbius atom with more than two active attributes was found"""

    error_code = "NOT_TWO_ADDITIVE"


class NotPAdditiveError(EngineError):
    error_code = "NOT_P_ADDITIVE"


class AntichainError(EngineError):
    error_code = "MALFORMED_ANTICHAIN"


class BudgetExceededError(EngineError):
    error_code = "BUDGET_EXCEEDED"

    def __init__(self, message: str, required: int, budget: int):
        super().__init__(message, {"required": required, "budget": budget})
        self.required = required
        self.budget = budget


class LpFormatError(EngineError):
    error_code = "MALFORMED_PROGRAM"


class SolverBudgetError(EngineError):
    error_code = "SOLVER_BUDGET_EXCEEDED"


class DecompositionDefectError(EngineError):
    """A validated 2-additive capacity produced an infeasible decomposition program"""

    error_code = "DECOMPOSITION_DEFECT"
