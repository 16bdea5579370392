"""Run settings shared by every subcommand: seed, threads, prior, ML limits, truncation, folds.

Each layer may set any subset of keys; a later layer wins per key:
package defaults, ~/.walsnb/config.yaml, the nearest walsnb.yaml at or above
the working directory, WALSNB_* variables, then command-line flags.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any

import yaml

from walsnb.config.defaults import get_defaults

logger = logging.getLogger(__name__)

_GLOBAL_CONFIG_PATH = Path.home() / ".walsnb" / "config.yaml"
_PROJECT_CONFIG_NAME = "walsnb.yaml"

_ENV_MAP: dict[str, str] = {
    "WALSNB_SEED": "seed",
    "WALSNB_THREADS": "threads",
    "WALSNB_PRIOR": "prior",
    "WALSNB_MAX_ITER": "max_iter",
    "WALSNB_TOL": "tol",
    "WALSNB_TRUNCATION": "truncation",
    "WALSNB_FOLDS": "folds",
    "WALSNB_RECORD_TIMINGS": "record_timings",
    "WALSNB_LOG_LEVEL": "log_level",
}

_TYPE_MAP: dict[str, type] = {
    "seed": int,
    "threads": int,
    "max_iter": int,
    "tol": float,
    "truncation": int,
    "folds": int,
}

_BOOL_KEYS = {"record_timings"}

_TRUTHY = {"1", "true", "yes", "on"}


def load_config_hierarchy(**runtime_overrides: Any) -> dict[str, Any]:
    """Resolved settings dict, ready for ``CliConfig.model_validate``.

    Flags passed as None (not given on the command line) leave the lower layers alone.
    """
    config = get_defaults()

    global_cfg = _load_yaml_config(_GLOBAL_CONFIG_PATH)
    if global_cfg:
        config.update(global_cfg)

    project_path = _find_project_config()
    if project_path:
        project_cfg = _load_yaml_config(project_path)
        if project_cfg:
            logger.debug("Using project config %s", project_path)
            config.update(project_cfg)

    config.update(_load_env_vars())

    for key, value in runtime_overrides.items():
        if value is not None:
            config[key] = value

    return config


def _load_yaml_config(path: Path) -> dict[str, Any] | None:
    """Settings mapping from one layer file; a missing or unreadable file contributes nothing."""
    if not path.exists() or not path.is_file():
        return None
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
        if isinstance(data, dict):
            return data
        logger.warning("Settings file %s is not a mapping, ignoring", path)
    except (OSError, yaml.YAMLError) as e:
        logger.warning("Skipping settings file %s: %s", path, e)
    return None


def _find_project_config() -> Path | None:
    """Nearest walsnb.yaml walking up from the working directory."""
    cwd = Path.cwd()
    for parent in [cwd, *cwd.parents]:
        candidate = parent / _PROJECT_CONFIG_NAME
        if candidate.exists():
            return candidate
    return None


def _load_env_vars() -> dict[str, Any]:
    result: dict[str, Any] = {}
    for env_key, config_key in _ENV_MAP.items():
        value = os.environ.get(env_key)
        if value is None:
            continue
        result[config_key] = _coerce_env_value(config_key, value)
    return result


def _coerce_env_value(key: str, value: str) -> Any:
    """Typed value for numeric and flag keys; an unparseable number is passed through for pydantic to reject."""
    if key in _BOOL_KEYS:
        return value.lower() in _TRUTHY

    target_type = _TYPE_MAP.get(key)
    if target_type:
        try:
            return target_type(value)
        except (ValueError, TypeError):
            logger.warning(
                "Cannot convert env var for '%s' to %s: %s", key, target_type.__name__, value
            )
            return value

    return value
