from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    app_name: str = "Tuned Quantization Engine"
    debug: bool = False
    log_level: str = "INFO"
    default_n: int = Field(default=1, ge=1)
    default_params: str = "hbar=1,m=1,omega=1"
    metric_kind: Literal["phase", "configuration"] = "phase"
    strict_tuning: bool = False
    grid_points: int = Field(default=2000, ge=3)
    domain_half_width: float = Field(default=10.0, gt=0)
    eigen_count: int = Field(default=6, ge=1)
    seed: int = 1
    property_trials: int = Field(default=100, ge=1)
    equivariance_trials: int = Field(default=50, ge=1)
    max_concurrency: int = Field(default=4, ge=1, le=32)
    max_stored_runs: int = Field(default=20, ge=1)

    def numeric_params(self) -> dict[str, float]:
        return parse_params(self.default_params)


def parse_params(text: str) -> dict[str, float]:
    """Parse ``"hbar=1,m=1,omega=1"`` into a name -> value mapping."""
    values: dict[str, float] = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, sep, raw = chunk.partition("=")
        if not sep or not name.strip():
            raise ValueError(f"Malformed parameter binding: {chunk!r}")
        value = float(raw)
        if value <= 0:
            raise ValueError(f"Parameter {name.strip()} must be positive, got {value}")
        values[name.strip()] = value
    return values


settings = Settings()
