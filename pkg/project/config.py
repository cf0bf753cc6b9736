from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any

import yaml
from pydantic import ValidationError

from project.exceptions import ConfigError
from project.models import SuiteConfig

_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _optional_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigError(f"Invalid integer for {name}: {raw}") from e
    return value


def _optional_choice(name: str, default: str, choices: tuple[str, ...]) -> str:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    value = raw.strip().upper()
    if value not in choices:
        raise ConfigError(f"{name} must be one of {', '.join(choices)} (got: {raw})")
    return value


@dataclass(frozen=True, slots=True)
class Settings:
    log_level: str
    parallelism: int


def load_settings_from_env() -> Settings:
    """
    Process-level knobs. Neither affects numeric results:
      - LOG_LEVEL (default INFO)
      - VERIFY_PARALLELISM (default 1): worker threads for suite cases
    """

    parallelism = _optional_int("VERIFY_PARALLELISM", 1)
    if parallelism < 1:
        raise ConfigError(f"VERIFY_PARALLELISM must be >= 1 (got: {parallelism})")
    return Settings(
        log_level=_optional_choice("LOG_LEVEL", "INFO", _LOG_LEVELS),
        parallelism=parallelism,
    )


def load_suite_config(*, path: str | None) -> SuiteConfig:
    if path is None:
        return SuiteConfig()
    try:
        with open(path, encoding="utf-8") as f:
            raw: Any = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in config file: {path}") from e

    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("Config YAML must be a mapping (object) at top level")

    unknown = sorted(set(raw) - set(SuiteConfig.model_fields))
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(map(str, unknown))}")
    try:
        return SuiteConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid suite config in {path}: {e.error_count()} error(s)") from e
