from typing import Optional, Literal

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Settings(BaseSettings):
    """
    Configuration settings for orcalc.

    Values can be overridden by environment variables with ORCALC_ prefix.
    e.g. ORCALC_TOL=1e-8
    """
    model_config = SettingsConfigDict(
        env_prefix="ORCALC_",
        env_nested_delimiter="__",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application settings
    app_name: str = Field(default="orcalc", description="Application name")
    app_version: str = Field(default="0.1.0", description="Application version")

    # Tolerance policy (can be overridden by CLI)
    tol: float = Field(
        default=1e-9,
        gt=0.0,
        lt=1.0,
        description="Relative residual and Hermiticity tolerance for every equation check."
    )
    rank_tol: Optional[float] = Field(
        default=None,
        gt=0.0,
        lt=1.0,
        description="Relative singular-value cutoff. None means 64 * unit roundoff * max(n, m)."
    )

    # CLI behaviour
    strict: bool = Field(
        default=False,
        description="Exit with code 2 when a checked property is false."
    )
    log_level: Literal["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="WARNING",
        description="Level of the stderr log sink installed by the CLI."
    )

    # Truncation lab model parameters
    lab_decay: float = Field(
        default=1.0,
        gt=0.0,
        description="Decay exponent of the lab diagonals: a_i = i ** -lab_decay."
    )
    lab_coupling: float = Field(
        default=1.0,
        gt=0.0,
        description="Scale of the off-diagonal block b = coupling * I in the ex1 lab model."
    )

    # Sampling
    sample_count: int = Field(
        default=8,
        ge=0,
        description="Number of random members drawn when sampling M(B, S)."
    )


def get_settings() -> Settings:
    """Retrieve application settings."""
    return Settings()
