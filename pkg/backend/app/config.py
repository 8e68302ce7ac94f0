"""
dS QFT Lab - Configuration

Runtime settings loaded from environment variables (prefix DSQFT_) and the project .env file.
"""

import os
from enum import Enum
from functools import lru_cache

from pydantic_settings import BaseSettings


class Precision(str, Enum):
    """Arithmetic mode for special functions and the modular suite."""
    DOUBLE = "double"
    EXTENDED = "extended"


class Settings(BaseSettings):
    """Application settings."""

    # Application settings
    log_level: str = "INFO"

    # Numerics
    precision: Precision = Precision.DOUBLE
    extended_dps: int = 50
    # Largest admissible modular amplification e^{pi * window}
    double_amplification_budget: float = 1e12
    extended_amplification_budget: float = 1e40

    # Fock layer guard
    fock_dim_limit: int = 200_000

    # Suite runner
    workers: int = 2
    output_dir: str = "reports"

    class Config:
        # Resolve .env file from project root: dsqft/.env
        # dsqft/backend/app/config.py -> ../../../.env
        env_file = os.path.join(
            os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), ".env"
        )
        env_file_encoding = "utf-8"
        env_prefix = "DSQFT_"
        extra = "ignore"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
