"""
Configuration

Every tunable lives in `Settings`. Sources, lowest to highest precedence:
defaults, environment variables, a flat KEY=value config file, command-line
flags.

Usage:
    settings = load_settings("usage.conf", gap_threshold_s=120)
"""

from functools import lru_cache
from pathlib import Path
from typing import Any

from pydantic import Field, field_validator, model_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource

from usage_synth import __version__


class Settings(BaseSettings):
    """Application settings loaded from environment variables and an optional config file."""

    # Sessionizer
    gap_threshold_s: int = Field(60, ge=0)

    # Realism criteria
    top_k: int = Field(5, gt=0)
    ks_fail_threshold: float | None = Field(None, ge=0.0, le=1.0)
    b1_min_hours: float = 1.0
    b1_max_hours: float = 20.0
    sleep_window_start_hour: int = Field(20, ge=0, lt=24)
    sleep_window_end_hour: int = Field(10, ge=0, lt=24)
    min_sleep_gap_s: int = Field(18_000, gt=0)
    app_alias_path: str = ""  # empty = bundled alias file

    # Baseline generator
    seed_value: int = Field(0, ge=0)
    target_log_count: int | None = Field(None, gt=0)  # None = seed's own log count
    duration_jitter_pct: float = 20.0
    quiet_window_start_hour: int | None = 1
    quiet_window_end_hour: int | None = 8
    duration_strategy: str = "empirical"

    # Chat-completion endpoint
    endpoint_url: str = "https://api.openai.com/v1"
    model_name: str = "gpt-4o"
    request_timeout_s: float = Field(300.0, gt=0)
    max_retries: int = Field(2, ge=0)
    temperature: float | None = None
    usage_synth_api_key: str = ""

    # Runs
    attempts: int = Field(2, gt=0)
    output_dir: str = "runs"

    # Logging
    log_level: str = "INFO"

    model_config = {
        "env_file_encoding": "utf-8",
        "extra": "ignore",
        "protected_namespaces": (),
    }

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # flags > config file > environment
        return init_settings, dotenv_settings, env_settings, file_secret_settings

    @field_validator("duration_strategy")
    @classmethod
    def _known_strategy(cls, value: str) -> str:
        if value not in ("empirical", "uniform"):
            raise ValueError("duration_strategy must be 'empirical' or 'uniform'")
        return value

    @model_validator(mode="after")
    def _check_bounds(self) -> "Settings":
        if self.b1_min_hours > self.b1_max_hours:
            raise ValueError("b1_min_hours must not exceed b1_max_hours")
        if (self.quiet_window_start_hour is None) != (self.quiet_window_end_hour is None):
            raise ValueError("quiet window needs both a start and an end hour")
        return self

    def echo(self) -> dict[str, Any]:
        """Effective configuration for report output, secrets redacted."""
        data = self.model_dump()
        if data.get("usage_synth_api_key"):
            data["usage_synth_api_key"] = "***"
        data["tool_version"] = __version__
        return data


def load_settings(config_path: str | Path | None = None, **overrides: Any) -> Settings:
    """
    Build the effective settings.

    `overrides` are command-line values; entries set to None are treated as
    "flag not given" and do not shadow the file or the environment. Without a
    file or any flag this is the cached environment-only `get_settings()`.
    """
    explicit = {key: value for key, value in overrides.items() if value is not None}
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise FileNotFoundError(f"Config file not found: {path}")
        return Settings(_env_file=str(path), **explicit)
    if not explicit:
        return get_settings()
    return Settings(**explicit)


@lru_cache
def get_settings() -> Settings:
    return Settings()
