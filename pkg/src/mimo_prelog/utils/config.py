"""Configuration management for the pre-log toolkit."""

from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..exceptions import ConfigurationError


class Config(BaseModel):
    """Numerical defaults shared by every operation.

    Values are set in code or through CLI flags; there is no config file.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    # Rank / nonsingularity tolerances
    rank_tol: float = Field(default=1e-10, gt=0)
    nonsingular_tol: float = Field(default=1e-9, gt=0)
    witness_tol: float = Field(default=1e-6, gt=0)
    witness_retries: int = Field(default=16, ge=1)

    # Entropy estimation
    knn_k: int = Field(default=4, ge=1)
    max_rl_for_knn: int = Field(default=4, ge=1)
    min_samples_per_k: int = Field(default=100, ge=1)

    # Sampling
    chunk_size: int = Field(default=4096, ge=1)
    max_workers: int = Field(default=1, ge=1)

    # Default SNR grid (dB)
    snr_start_db: float = 20.0
    snr_stop_db: float = 40.0
    snr_points: int = Field(default=5, ge=3)

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"

    @model_validator(mode="after")
    def _check_grid(self) -> "Config":
        if self.snr_stop_db <= self.snr_start_db:
            raise ValueError("snr_stop_db must exceed snr_start_db")
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return self.model_dump()

    def with_overrides(self, **overrides: Any) -> "Config":
        """Return a copy with the non-None overrides applied and re-validated."""
        values = self.model_dump()
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return Config(**values)
        except ValidationError as exc:
            key = ".".join(str(part) for part in exc.errors()[0]["loc"]) or None
            raise ConfigurationError(
                f"invalid configuration override: {exc.errors()[0]['msg']}",
                config_key=key,
                original_exception=exc,
            ) from exc


class OutputSettings(BaseSettings):
    """Environment-driven output location (the single supported override)."""

    model_config = SettingsConfigDict(case_sensitive=False, extra="ignore")

    output_dir: Optional[Path] = Field(default=None, validation_alias="PRELOG_OUTPUT_DIR")

    def resolve(self, path: Path) -> Path:
        """Resolve a relative report path against the configured directory."""
        if path.is_absolute() or self.output_dir is None:
            return path
        return self.output_dir / path


@lru_cache(maxsize=1)
def get_config() -> Config:
    """Return the process-wide default configuration."""
    return Config()
