"""
Configuration module for the osdyn toolkit.

This module defines the settings and numerical defaults used across the toolkit.
It uses Pydantic's Settings management to load configuration from environment
variables (prefixed with ``OSDYN_``) and an optional ``.env`` file.
"""

import os
from enum import Enum
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class LogLevel(str, Enum):
    """Log level enumeration."""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class Environment(str, Enum):
    """Environment enumeration."""
    DEVELOPMENT = "development"
    STAGING = "staging"
    PRODUCTION = "production"
    TEST = "test"


def _default_threads() -> int:
    return max(1, min(8, os.cpu_count() or 1))


class Settings(BaseSettings):
    """
    Toolkit settings loaded from environment variables.

    Numerical defaults live here so that every command and library entry point
    agrees on tolerances, sampling densities and simulation lengths.
    """
    # General settings
    PROJECT_NAME: str = "osdyn"
    PROJECT_DESCRIPTION: str = "Seasonally forced Owen-Smith model analysis toolkit"
    VERSION: str = "0.1.0"
    ENVIRONMENT: Environment = Environment.DEVELOPMENT
    LOG_LEVEL: LogLevel = LogLevel.INFO
    OUTPUT_DIR: Path = Path("./output")

    # Concurrency
    THREADS: int = Field(default_factory=_default_threads, ge=1)

    # Integrator defaults
    REL_TOL: float = Field(default=1e-9, gt=0)
    ABS_TOL: float = Field(default=1e-11, gt=0)
    STEPS_PER_PERIOD: int = Field(default=64, ge=1)
    BLOWUP_THRESHOLD: float = 1e12

    # Coefficient calculus
    QUADRATURE_TOL: float = Field(default=1e-12, gt=0)
    EXTREMA_SAMPLES: int = Field(default=4096, ge=64)
    INF_SAMPLES: int = Field(default=8192, ge=64)

    # Condition checkers
    BOUND_PERIODS: int = Field(default=100, ge=2)
    BOUND_SAFETY: float = 1.05
    EPSILON_FRACTION: float = 1e-3

    # Periodic orbits
    FP_TOL: float = Field(default=1e-10, gt=0)
    FP_MAX_ITER: int = Field(default=50, ge=1)
    FP_FALLBACK_ITER: int = Field(default=200, ge=0)
    FP_VERIFY_FACTOR: float = Field(default=10.0, ge=1.0)
    FD_STEP: float = Field(default=1e-6, gt=0)
    SHOOTING_STEPS: int = Field(default=512, ge=16)
    ORBIT_WARMUP_PERIODS: int = Field(default=20, ge=0)
    ORBIT_SAMPLES: int = Field(default=256, ge=2)
    ORBIT_DISTINCT_TOL: float = 1e-6
    MARGINAL_BAND: float = 1e-6

    @field_validator("LOG_LEVEL", mode="before")
    def normalize_log_level(cls, v: object) -> object:
        """
        Accept lower-case log level names from the environment.

        Args:
            v: The raw value

        Returns:
            Upper-cased level name when a string was given
        """
        if isinstance(v, str):
            return v.upper()
        return v

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="OSDYN_",
        case_sensitive=True,
        use_enum_values=True,
        extra="ignore",
    )


# Create global settings instance
settings = Settings()
