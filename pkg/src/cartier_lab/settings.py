import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError

load_dotenv()

CONFIG_ENV_VAR = "CARTIER_LAB_CONFIG"
LOG_LEVEL_ENV_VAR = "CARTIER_LAB_LOG_LEVEL"
JSON_ENV_VAR = "CARTIER_LAB_JSON"
DEFAULTS_FILE = Path(__file__).resolve().parent / "config" / "defaults.yaml"


class Settings(BaseModel):
    """Resolved defaults for every command and verification suite."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    trunc_univariate: int = Field(12, ge=1, description="Truncation for one-dimensional series.")
    trunc_multivariate: int = Field(8, ge=1, description="Truncation for laws of dimension >= 2.")
    witt_length: int = Field(8, ge=1, description="Default k for W_[1,k].")
    universal_ceiling: int = Field(8, ge=1, description="Largest k for universal polynomials.")
    cartier_vbound: int = Field(13, ge=2, description="V-filtration cutoff.")
    sweep_max_n: int = Field(40, ge=0)
    sweep_workers: int = Field(1, ge=1)
    verify_cases: int = Field(100, ge=1)
    ghost_cases: int = Field(500, ge=1, description="Random pairs for the ghost-map checks in `verify`.")
    seed: int = Field(0, ge=0)
    log_level: str = "WARNING"
    json_output: bool = False

    def with_overrides(self, **flags: Any) -> "Settings":
        """Return a copy with every non-None flag applied."""
        update = {key: value for key, value in flags.items() if value is not None}
        if not update:
            return self
        try:
            return self.model_validate({**self.model_dump(), **update})
        except ValidationError as exc:
            raise ConfigError(str(exc)) from exc


def _env_bool(name: str, default: bool = False) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "y", "on"}


def _env_path(name: str) -> Path | None:
    value = os.getenv(name)
    if not value or not value.strip():
        return None
    return Path(value.strip()).expanduser()


def _read_yaml(path: Path) -> dict[str, Any]:
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"Cannot read defaults file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Defaults file {path} must hold a mapping")
    return data


def _read_json(path: Path) -> dict[str, Any]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"{CONFIG_ENV_VAR} points to a missing file: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    return data


@lru_cache(maxsize=8)
def load_settings(config_path: Path | None = None) -> Settings:
    """Merge the YAML built-ins with the JSON file named by CARTIER_LAB_CONFIG."""
    merged = _read_yaml(DEFAULTS_FILE)
    override_path = config_path if config_path is not None else _env_path(CONFIG_ENV_VAR)
    if override_path is not None:
        merged.update(_read_json(override_path))
    log_level = os.getenv(LOG_LEVEL_ENV_VAR)
    if log_level:
        merged["log_level"] = log_level.strip().upper()
    if _env_bool(JSON_ENV_VAR):
        merged["json_output"] = True
    try:
        return Settings.model_validate(merged)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration: {exc}") from exc
