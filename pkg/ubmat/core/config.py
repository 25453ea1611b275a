"""
Application configuration.
"""

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional
import warnings

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application
    app_name: str = "ubmat"
    app_version: str = "1.0.0"
    environment: str = "development"
    log_level: str = "WARNING"

    # Numerical tolerances
    structure_rtol: float = 1e-8
    singular_rtol: float = 1e-12
    pd_tol: float = 1e-10
    symmetry_tol: float = 1e-10

    # Testing defaults
    alpha: float = 0.05
    seed: int = 20240101
    allow_small_n: bool = False

    # Monte Carlo
    mc_replicates: int = 100_000
    mc_block_size: int = 8192
    workers: int = 1

    # Benchmarks
    bench_repeats: int = 7
    dense_eig_max_dim: int = 256

    model_config = SettingsConfigDict(
        env_prefix="UBMAT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )


@dataclass(frozen=True)
class Tolerances:
    """Tolerance context shared by the coordinate algebra and file readers."""

    structure_rtol: float = 1e-8
    singular_rtol: float = 1e-12
    pd_tol: float = 1e-10
    symmetry_tol: float = 1e-10

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "Tolerances":
        settings = settings or get_settings()
        return cls(
            structure_rtol=settings.structure_rtol,
            singular_rtol=settings.singular_rtol,
            pd_tol=settings.pd_tol,
            symmetry_tol=settings.symmetry_tol,
        )

    def with_overrides(self, **changes: Optional[float]) -> "Tolerances":
        """Return a copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def validate_settings(settings: Settings) -> None:
    """Validate tolerance and Monte Carlo settings."""
    for name in ("structure_rtol", "singular_rtol", "pd_tol", "symmetry_tol"):
        value = getattr(settings, name)
        if not 0 < value < 1e-2:
            raise ValueError(f"{name} must lie in (0, 1e-2), got {value}")

    if not 0 < settings.alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {settings.alpha}")

    if settings.mc_block_size < 1 or settings.workers < 1:
        raise ValueError("mc_block_size and workers must be positive")

    if settings.mc_replicates < 1000:
        warnings.warn(
            f"mc_replicates={settings.mc_replicates} gives coarse quantiles and p-values.",
            UserWarning
        )


@lru_cache()
def get_settings() -> Settings:
    return Settings()


def get_tolerances(tol: Optional[Tolerances] = None) -> Tolerances:
    """Resolve an explicit tolerance context or fall back to the settings."""
    return tol if tol is not None else Tolerances.from_settings()


settings = get_settings()
validate_settings(settings)
