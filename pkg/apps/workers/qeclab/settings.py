# apps/workers/qeclab/settings.py
import os
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

BASE_DIR = Path(__file__).resolve().parent


class Tolerances(BaseModel):
    """Numerical tolerances shared by every module."""
    model_config = ConfigDict(frozen=True)

    hermiticity: float = 1e-12
    trace: float = 1e-12
    positivity: float = 1e-10   # smallest eigenvalue may dip this far below zero
    normalization: float = 1e-12
    cptp: float = 1e-10         # Σ K†K = I
    unitarity: float = 1e-8
    recovery_residual: float = 1e-6
    code_overlap: float = 1e-10
    trajectory_trace: float = 1e-9
    max_qubits: int = 12        # dense storage, 2^12 at most

    @property
    def max_dim(self) -> int:
        return 2 ** self.max_qubits


DEFAULT_TOLERANCES = Tolerances()


class Settings(BaseSettings):
    LOG_LEVEL: str = "INFO"
    NOISY_LEVEL: str = "WARNING"

    APP_NAME: Optional[str] = "qeclab"
    OUT_DIR: Optional[str] = Field(default=None, description="output directory override (QECLAB_OUT_DIR)")
    JOBS: int = 1
    TOLERANCES: Tolerances = Field(default_factory=Tolerances)

    @classmethod
    def settings_customise_sources(
            cls,
            settings_cls,
            init_settings,
            env_settings,
            dotenv_settings,
            file_secret_settings,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        if os.getenv("APP_ENV") == "production":
            return env_settings, init_settings, file_secret_settings

        return env_settings, init_settings, file_secret_settings, dotenv_settings

    model_config = SettingsConfigDict(
        env_prefix="QECLAB_",
        env_file=(BASE_DIR / ".env", BASE_DIR / ".env.local"),
        env_file_encoding="utf-8",
        extra="ignore",
        env_nested_delimiter="__",
    )
