"""
Configuration settings for the engine
"""

import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from .utils.rationals import Rational

logger = logging.getLogger(__name__)

# Compute env_file path outside of class for Pydantic V2
_project_root = Path(__file__).parent.parent.parent.parent
_path_env_file_default = _project_root / ".env"
_env_file_path = os.getenv("KARY_GAI_ENV_FILE_PATH", _path_env_file_default)
_env_file = Path(_env_file_path) if isinstance(_env_file_path, str) else _env_file_path


class Settings(BaseSettings):
    """Engine settings"""

    # Logging
    log_level: str = "INFO"
    debug_config: bool = False

    # LP solver
    lp_max_iterations: int = Field(default=50_000, ge=1)
    lp_verify_duals: bool = True
    lp_dual_check_max_variables: int = Field(default=100, ge=0)

    # Oracle budgets
    mobius_bruteforce_max_points: int = Field(default=100_000, ge=1)
    padditivity_exhaustive_max_points: int = Field(default=10_000, ge=1)
    bruteforce_max_grid_points: int = Field(default=20, ge=1)
    extreme_check_max_points: int = Field(default=1_000, ge=1)
    vertex_decompose_max_vertices: int = Field(default=5_000, ge=1)

    # Modelling defaults
    default_fill: Literal["clamp", "constant"] = "clamp"
    elicitation_soft_margin: Rational = Fraction(1, 100)

    # Output
    decimal_digits: int | None = None

    # Pydantic V2 configuration
    model_config = SettingsConfigDict(
        env_prefix="KARY_GAI_",
        env_file=_env_file,
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",  # Ignore extra variables from the .env
        arbitrary_types_allowed=True,
    )


# Global settings instance
settings = Settings()

# Optional: Debug information
if settings.debug_config:
    logger.info(f"Using .env file: {_env_file}")
    logger.info(f"File exists: {_env_file.exists()}")
    logger.info(f"Project root: {_project_root}")
