"""Tests for config hierarchy."""

import pytest

from walsnb.config import hierarchy
from walsnb.config.defaults import DEFAULT_FOLDS, DEFAULT_SEED, get_defaults
from walsnb.config.hierarchy import _coerce_env_value, _load_yaml_config, load_config_hierarchy
from walsnb.config.schema import CliConfig


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """No global or project config files, no WALSNB_* variables."""
    monkeypatch.setattr(hierarchy, "_GLOBAL_CONFIG_PATH", tmp_path / "home" / "config.yaml")
    monkeypatch.chdir(tmp_path)
    for key in hierarchy._ENV_MAP:
        monkeypatch.delenv(key, raising=False)


class TestLoadConfigHierarchy:
    def test_returns_defaults(self):
        config = load_config_hierarchy()
        assert config == get_defaults()
        assert config["seed"] == DEFAULT_SEED
        assert config["folds"] == DEFAULT_FOLDS

    def test_runtime_overrides(self):
        config = load_config_hierarchy(seed=7, threads=4)
        assert config["seed"] == 7
        assert config["threads"] == 4

    def test_none_overrides_ignored(self):
        config = load_config_hierarchy(seed=None)
        assert config["seed"] == DEFAULT_SEED

    def test_env_var_override(self, monkeypatch):
        monkeypatch.setenv("WALSNB_PRIOR", "weibull")
        assert load_config_hierarchy()["prior"] == "weibull"

    def test_runtime_beats_env(self, monkeypatch):
        monkeypatch.setenv("WALSNB_SEED", "3")
        assert load_config_hierarchy(seed=9)["seed"] == 9

    def test_env_numeric_coercion(self, monkeypatch):
        monkeypatch.setenv("WALSNB_THREADS", "6")
        monkeypatch.setenv("WALSNB_TOL", "1e-6")
        config = load_config_hierarchy()
        assert config["threads"] == 6
        assert isinstance(config["threads"], int)
        assert config["tol"] == 1e-6

    def test_env_bool_coercion(self, monkeypatch):
        monkeypatch.setenv("WALSNB_RECORD_TIMINGS", "yes")
        assert load_config_hierarchy()["record_timings"] is True

    def test_project_config(self, tmp_path):
        (tmp_path / "walsnb.yaml").write_text("seed: 42\nfolds: 5\n")
        config = load_config_hierarchy()
        assert config["seed"] == 42
        assert config["folds"] == 5

    def test_project_config_searched_upward(self, tmp_path, monkeypatch):
        (tmp_path / "walsnb.yaml").write_text("max_iter: 50\n")
        nested = tmp_path / "a" / "b"
        nested.mkdir(parents=True)
        monkeypatch.chdir(nested)
        assert load_config_hierarchy()["max_iter"] == 50

    def test_global_config_below_project(self, tmp_path):
        home = tmp_path / "home"
        home.mkdir()
        (home / "config.yaml").write_text("seed: 1\nthreads: 3\n")
        (tmp_path / "walsnb.yaml").write_text("seed: 2\n")
        config = load_config_hierarchy()
        assert config["seed"] == 2
        assert config["threads"] == 3

    def test_feeds_cli_config(self, monkeypatch):
        monkeypatch.setenv("WALSNB_MAX_ITER", "40")
        config = CliConfig(**load_config_hierarchy(prior="identity"))
        assert config.ml_options().max_outer_iter == 40
        assert config.prior_spec("laplace").family == "identity"


class TestLoadYamlConfig:
    def test_loads_valid_yaml(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("seed: 5\n")
        assert _load_yaml_config(path) == {"seed": 5}

    def test_returns_none_for_missing(self, tmp_path):
        assert _load_yaml_config(tmp_path / "nonexistent.yaml") is None

    def test_returns_none_for_non_dict(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("- item1\n- item2\n")
        assert _load_yaml_config(path) is None

    def test_malformed_project_file_skipped(self, tmp_path, caplog):
        (tmp_path / "walsnb.yaml").write_text("seed: [unclosed\n")
        config = load_config_hierarchy()
        assert config["seed"] == DEFAULT_SEED
        assert "Skipping settings file" in caplog.text


class TestCoerceEnvValue:
    def test_bool_true(self):
        assert _coerce_env_value("record_timings", "1") is True

    def test_bool_false(self):
        assert _coerce_env_value("record_timings", "off") is False

    def test_int(self):
        assert _coerce_env_value("folds", "5") == 5

    def test_float(self):
        assert _coerce_env_value("tol", "0.001") == 0.001

    def test_invalid_int_kept_as_string(self):
        assert _coerce_env_value("seed", "abc") == "abc"

    def test_string_passthrough(self):
        assert _coerce_env_value("log_level", "INFO") == "INFO"
