"""Built-in and user simulation presets."""

from walsnb.presets.registry import PresetInfo, PresetRegistry, resolve_experiment

__all__ = ["PresetInfo", "PresetRegistry", "resolve_experiment"]
