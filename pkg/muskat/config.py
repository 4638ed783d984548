from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    OUT_DIR: Path = Path("output")
    SEED: int = 0
    THREADS: int = 1
    LOG_LEVEL: str = "INFO"

    SOLVER_TOL: float = 1e-12
    DENSE_SOLVE_MAX_N: int = 1024
    GMRES_MAX_ITER: int = 200
    SIGMA_MIN_MAX_N: int = 512

    INVARIANT_TOL: float = 1e-6
    INVARIANT_DX2_FACTOR: float = 10.0
    CALIBRATION_MARGIN: float = 2.0

    model_config = SettingsConfigDict(
        env_prefix="MUSKAT_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


settings = Settings()


def invariant_tolerance(spacing: float) -> float:
    """Tolerance separating solver error from genuine maximum-principle violations"""
    return settings.INVARIANT_TOL + settings.INVARIANT_DX2_FACTOR * spacing**2
