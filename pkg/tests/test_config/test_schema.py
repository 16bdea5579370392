"""Tests for config schema validation."""

import math

import pytest
from pydantic import ValidationError

from walsnb.config.schema import (
    ColumnSchema,
    CvConfig,
    CvProcedure,
    DesignSpec,
    ExperimentConfig,
    MlOptions,
    PriorSpec,
    Scenario,
    ScenarioGrid,
    parse_term,
)
from walsnb.types import SIMULATION_PROCEDURES, PriorFamily

GRID = {"n": [100], "k1": [1], "k2": [3], "rho": [1.0], "b": [0.0]}


class TestScenario:
    def test_valid(self):
        s = Scenario(n=500, k1=1, k2=100, rho=0.5, b=0.5)
        assert s.runs == 300
        assert s.n_eval == 4000

    @pytest.mark.parametrize(
        "field",
        [{"b": 1.0}, {"b": 1.5}, {"b": -0.1}, {"rho": 0.0}, {"k1": 11}, {"k2": 101}, {"k2": 0}],
    )
    def test_out_of_range(self, field):
        with pytest.raises(ValidationError):
            Scenario(**{"n": 500, "k1": 1, "k2": 3, "rho": 1.0, "b": 0.0, **field})

    def test_too_few_observations(self):
        with pytest.raises(ValidationError, match="too small"):
            Scenario(n=12, k1=1, k2=10, rho=1.0, b=0.0)
        Scenario(n=13, k1=1, k2=10, rho=1.0, b=0.0)


class TestScenarioGrid:
    def test_expand_is_cartesian(self):
        grid = ScenarioGrid(n=[100, 200], k1=[1, 2], k2=[3], rho=[0.5, 1.0, 2.0], b=[0.0])
        scenarios = grid.expand(runs=5, seed=1, n_eval=50)
        assert len(scenarios) == len(grid) == 12
        assert scenarios[0].n == 100 and scenarios[-1].n == 200
        assert [s.rho for s in scenarios[:3]] == [0.5, 1.0, 2.0]
        assert all(s.runs == 5 and s.n_eval == 50 for s in scenarios)

    def test_empty_axis(self):
        with pytest.raises(ValidationError):
            ScenarioGrid(**{**GRID, "k2": []})


class TestExperimentConfig:
    def test_defaults(self):
        config = ExperimentConfig(grid=GRID)
        assert tuple(config.procedures) == SIMULATION_PROCEDURES
        assert config.prior.family is PriorFamily.WEIBULL
        assert config.truncation == 150

    def test_rejects_cv_procedure(self):
        with pytest.raises(ValidationError, match="not a simulation procedure"):
            ExperimentConfig(grid=GRID, procedures=["walsNB-aux", "ML-main"])

    def test_rejects_unknown_procedure(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(grid=GRID, procedures=["lasso"])

    def test_rejects_empty_roster(self):
        with pytest.raises(ValidationError, match="at least one"):
            ExperimentConfig(grid=GRID, procedures=[])

    def test_grid_scenario_validation(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(grid={**GRID, "b": [1.5]})


class TestPriorSpec:
    def test_default_constants(self):
        laplace = PriorSpec.default("laplace")
        assert laplace.hyperparameters["c"] == pytest.approx(math.log(2))
        weibull = PriorSpec.default(PriorFamily.WEIBULL)
        assert weibull.hyperparameters == {"q": pytest.approx(0.887630085), "c": pytest.approx(math.log(2))}
        assert PriorSpec.default("identity").hyperparameters == {}

    def test_missing_hyperparameter(self):
        with pytest.raises(ValidationError, match=r"missing hyperparameters \['q'\]"):
            PriorSpec(family="weibull", hyperparameters={"c": 0.7})

    @pytest.mark.parametrize("value", [0.0, -1.0, math.inf, math.nan])
    def test_nonpositive(self, value):
        with pytest.raises(ValidationError, match="positive and finite"):
            PriorSpec(family="laplace", hyperparameters={"c": value})

    def test_unknown_family(self):
        with pytest.raises(ValidationError):
            PriorSpec(family="cauchy")


class TestMlOptions:
    def test_bounds_ordered(self):
        with pytest.raises(ValidationError, match="0 < lo < hi"):
            MlOptions(rho_start_bounds=(10.0, 1.0))

    def test_positive_tolerance(self):
        with pytest.raises(ValidationError):
            MlOptions(tol=0.0)


class TestDesignTerms:
    @pytest.mark.parametrize(
        ("term", "expected"),
        [
            ("(Intercept)", ("intercept", [], 0)),
            ("age", ("main", ["age"], 1)),
            ("age:income", ("interaction", ["age", "income"], 1)),
            (" age : income ", ("interaction", ["age", "income"], 1)),
            ("age^2", ("power", ["age"], 2)),
        ],
    )
    def test_parse(self, term, expected):
        assert parse_term(term) == expected

    @pytest.mark.parametrize("term", ["a:b:c", "a:", "age^1", "age^x", ""])
    def test_parse_errors(self, term):
        with pytest.raises(ValueError):
            parse_term(term)

    def test_design_properties(self):
        spec = DesignSpec(
            name="int", response="visits", focus=["(Intercept)", "age"], auxiliary=["age^2", "age:income"]
        )
        assert spec.intercept
        assert spec.base_columns == ["age", "income"]
        assert spec.interactions == [("age", "income")]
        assert spec.powers == [("age", 2)]

    def test_duplicate_term(self):
        with pytest.raises(ValidationError, match="listed twice"):
            DesignSpec(name="d", response="y", focus=["(Intercept)", "a"], auxiliary=["a"])

    def test_empty_focus(self):
        with pytest.raises(ValidationError, match="may not be empty"):
            DesignSpec(name="d", response="y", focus=[], auxiliary=["a"])

    def test_bad_term(self):
        with pytest.raises(ValidationError):
            DesignSpec(name="d", response="y", auxiliary=["a::b"])

    def test_binary_levels(self):
        with pytest.raises(ValidationError, match="exactly two levels"):
            ColumnSchema(name="g", type="binary", levels=["a", "b", "c"])


class TestCvConfig:
    BASE = {
        "schema": {"columns": [{"name": "y", "type": "int"}, {"name": "a"}]},
        "designs": [{"name": "d", "response": "y", "focus": ["(Intercept)", "a"]}],
        "procedures": [{"name": "ML", "estimator": "ml", "design": "d"}],
    }

    def test_alias(self):
        config = CvConfig(**self.BASE)
        assert [c.name for c in config.data_schema.columns] == ["y", "a"]
        assert config.folds == 10
        assert config.design("d").response == "y"
        with pytest.raises(KeyError):
            config.design("missing")

    def test_unknown_design(self):
        procedures = [{"name": "W", "estimator": "wals", "design": "nope"}]
        with pytest.raises(ValidationError, match="unknown design nope"):
            CvConfig(**{**self.BASE, "procedures": procedures})

    def test_grid_positive(self):
        with pytest.raises(ValidationError, match="positive"):
            CvConfig(**{**self.BASE, "grid": [100, 0]})

    def test_folds_at_least_two(self):
        with pytest.raises(ValidationError):
            CvConfig(**{**self.BASE, "folds": 1})

    def test_oracle_not_fittable(self):
        with pytest.raises(ValidationError, match="only exists in simulations"):
            CvProcedure(name="o", estimator="oracle", design="d")
