"""YAML config loading and validation."""

from __future__ import annotations

import json
import os
from functools import lru_cache
from pathlib import Path
from typing import Any

import yaml

from walsnb.config.schema import (
    ColumnSchema,
    ColumnType,
    CvConfig,
    DataSchema,
    DesignSpec,
    ExperimentConfig,
)
from walsnb.types import PriorFamily

_PRIORS_FILE = Path(__file__).parent / "priors.yaml"
_PRIORS_ENV = "WALSNB_PRIORS_FILE"

_EMBED_PREFIX = "# "
_EMBED_CONFIG_KEY = "config"


def load_yaml(path: str | Path) -> dict[str, Any]:
    """Load any YAML file safely."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"YAML file not found: {path}")

    with open(path) as f:
        raw = yaml.safe_load(f)

    if not isinstance(raw, dict):
        raise ValueError(f"Expected YAML mapping, got {type(raw).__name__} in {path}")

    return raw


def _section(path: str | Path, key: str) -> dict[str, Any]:
    raw = load_yaml(path)
    if key not in raw or not isinstance(raw[key], dict):
        raise ValueError(f"Invalid {key} YAML: missing top-level '{key}' key in {path}")
    section: dict[str, Any] = raw[key]
    return section


def load_experiment(path: str | Path) -> ExperimentConfig:
    """Load a simulation experiment YAML and return a validated ExperimentConfig.

    A results CSV written by the simulation engine is accepted too: its
    embedded config is re-read so the run can be repeated exactly.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return ExperimentConfig(**read_embedded_config(path))
    return ExperimentConfig(**_section(path, "experiment"))


def load_cv_config(path: str | Path) -> CvConfig:
    """Load a cross-validation YAML and return a validated CvConfig."""
    return CvConfig(**_section(path, "cv"))


def load_design_spec(path: str | Path) -> DesignSpec:
    """Load a single design YAML and return a validated DesignSpec."""
    return DesignSpec(**_section(path, "design"))


def load_data_schema(path: str | Path, design: DesignSpec | None = None) -> DataSchema:
    """The optional top-level 'schema' section of a design or CV file.

    Without one, the schema is inferred from ``design``: an integer response
    and float base columns.
    """
    raw = load_yaml(path)
    if isinstance(raw.get("schema"), dict):
        return DataSchema(**raw["schema"])
    if design is None:
        raise ValueError(f"No schema section in {path} and no design to infer one from")
    columns = [ColumnSchema(name=design.response, type=ColumnType.INT)]
    columns += [ColumnSchema(name=c) for c in design.base_columns if c != design.response]
    return DataSchema(columns=columns)


@lru_cache(maxsize=4)
def _read_prior_constants(path: str) -> dict[PriorFamily, dict[str, float]]:
    raw = load_yaml(path)
    priors = raw.get("priors")
    if not isinstance(priors, dict):
        raise ValueError(f"Invalid priors file: missing 'priors' mapping in {path}")
    return {
        PriorFamily(name): {k: float(v) for k, v in (params or {}).items()}
        for name, params in priors.items()
    }


def load_prior_constants(path: str | Path | None = None) -> dict[PriorFamily, dict[str, float]]:
    """Prior hyperparameters from the versioned constants file.

    WALSNB_PRIORS_FILE points at a replacement file.
    """
    chosen = path or os.environ.get(_PRIORS_ENV) or _PRIORS_FILE
    constants = _read_prior_constants(str(chosen))
    return {family: dict(params) for family, params in constants.items()}


# ── Embedded run metadata ──


def embed_header(version: str, seed: int, config: dict[str, Any]) -> str:
    """Comment lines placed on top of every results CSV."""
    compact = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return (
        f"{_EMBED_PREFIX}walsnb {version}\n"
        f"{_EMBED_PREFIX}seed: {seed}\n"
        f"{_EMBED_PREFIX}{_EMBED_CONFIG_KEY}: {compact}\n"
    )


def read_embedded_config(path: str | Path) -> dict[str, Any]:
    """Pull the resolved config back out of a results CSV header."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Results file not found: {path}")
    marker = f"{_EMBED_PREFIX}{_EMBED_CONFIG_KEY}: "
    with open(path) as f:
        for line in f:
            if not line.startswith("#"):
                break
            if line.startswith(marker):
                config: dict[str, Any] = json.loads(line[len(marker) :])
                return config
    raise ValueError(f"No embedded config found in {path}")
