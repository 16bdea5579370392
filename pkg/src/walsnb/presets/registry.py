"""Preset registry — discover and look up simulation experiment configs."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import NamedTuple

import yaml

from walsnb.config.loader import load_experiment
from walsnb.config.schema import ExperimentConfig

logger = logging.getLogger(__name__)

_BUILTIN_PRESETS_DIR = Path(__file__).parent / "builtin"


class PresetInfo(NamedTuple):
    name: str
    version: str
    description: str
    builtin: bool
    scenario_count: int
    runs: int


class PresetRegistry:
    """Experiment presets from the builtin directory plus user directories."""

    def __init__(self, user_dirs: list[Path] | None = None) -> None:
        self._presets: dict[str, ExperimentConfig] = {}
        self._sources: dict[str, bool] = {}  # name → is_builtin
        self._scan(_BUILTIN_PRESETS_DIR, builtin=True)
        for d in user_dirs or []:
            self._scan(d, builtin=False)

    def get(self, name: str) -> ExperimentConfig:
        if name not in self._presets:
            raise KeyError(f"Preset '{name}' not found in registry")
        return self._presets[name]

    def has(self, name: str) -> bool:
        return name in self._presets

    def list_presets(self) -> list[PresetInfo]:
        return [
            PresetInfo(
                name=c.name,
                version=c.version,
                description=c.description,
                builtin=self._sources[c.name],
                scenario_count=len(c.grid),
                runs=c.runs,
            )
            for c in self._presets.values()
        ]

    def register(self, config: ExperimentConfig, builtin: bool = False) -> None:
        self._presets[config.name] = config
        self._sources[config.name] = builtin

    def _scan(self, directory: Path, builtin: bool) -> None:
        if not directory.exists():
            return
        for path in sorted(directory.glob("*.yaml")):
            try:
                with open(path) as f:
                    raw = yaml.safe_load(f)
                if not isinstance(raw, dict) or "experiment" not in raw:
                    continue  # not an experiment file
                config = load_experiment(path)
                # user presets override builtins
                if config.name not in self._presets or not builtin:
                    self.register(config, builtin=builtin)
            except Exception as e:
                logger.warning("Failed to load preset %s: %s", path, e)


def resolve_experiment(name_or_path: str, registry: PresetRegistry | None = None) -> ExperimentConfig:
    """A preset name, an experiment YAML, or a results CSV with an embedded config."""
    path = Path(name_or_path)
    if path.suffix.lower() in {".yaml", ".yml", ".csv"} or path.exists():
        return load_experiment(path)
    return (registry or PresetRegistry()).get(name_or_path)
