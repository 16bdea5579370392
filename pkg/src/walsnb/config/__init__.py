"""Configuration — defaults, layered resolution and validated config files."""
