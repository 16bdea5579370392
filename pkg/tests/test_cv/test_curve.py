"""Tests for cross-validated learning curves."""

import os
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from walsnb.config.loader import load_cv_config, read_embedded_config
from walsnb.config.schema import CvProcedure, DesignSpec
from walsnb.cv import (
    ingest_csv,
    learning_curve,
    learning_curve_from_config,
    register_procedure,
    registered_procedures,
    unregister_procedure,
    write_learning_curve,
)
from walsnb.errors import DomainError, NonConvergence
from walsnb.types import Metric

DESIGNS = [
    DesignSpec(name="wals", response="y", focus=["(Intercept)", "x1"], auxiliary=["x2", "x3", "x4", "g"]),
    DesignSpec(name="ml", response="y", focus=["(Intercept)", "x1", "x2", "x3", "x4", "g"]),
]
PROCEDURES = [
    CvProcedure(name="walsNB", estimator="wals", design="wals"),
    CvProcedure(name="ML", estimator="ml", design="ml"),
]


def _intercept_only(train, valid):
    return np.full(valid.n, train.y.mean()), 1.0


def _always_fails(train, valid):
    raise NonConvergence("external fit gave up", iterations=3)


@pytest.fixture(scope="module")
def curve(count_table):
    return learning_curve(count_table, DESIGNS, PROCEDURES, grid=[100, 200], K=5, seed=2)


@pytest.fixture
def external():
    register_procedure("mean", _intercept_only)
    register_procedure("broken", _always_fails)
    yield
    unregister_procedure("mean")
    unregister_procedure("broken")


class TestLearningCurve:
    def test_shapes(self, curve):
        assert curve.grid == (100, 200)
        assert curve.procedures == ("walsNB", "ML")
        for metric in Metric:
            assert curve.values[metric].shape == (2, 2, 5)
            assert curve.cv_means(metric).shape == (2, 2)

    def test_all_cells_converge(self, curve):
        assert curve.converged.all()
        assert (curve.failure_counts() == 0).all()

    def test_means_average_folds(self, curve):
        np.testing.assert_allclose(
            curve.cv_means(Metric.RMSE), curve.values[Metric.RMSE].mean(axis=2), rtol=1e-12
        )

    def test_truncation_defaults_to_largest_count(self, curve, count_table):
        assert curve.truncation == int(count_table["y"].max())

    def test_more_data_does_not_hurt_ml_much(self, curve):
        log = curve.cv_means(Metric.LOG)
        assert log[1, 1] < log[0, 1] + 0.05

    def test_deterministic(self, count_table, curve):
        again = learning_curve(count_table, DESIGNS, PROCEDURES, grid=[100, 200], K=5, seed=2)
        for metric in Metric:
            np.testing.assert_array_equal(again.values[metric], curve.values[metric])

    def test_threads_do_not_change_values(self, count_table, curve):
        threaded = learning_curve(
            count_table, DESIGNS, PROCEDURES, grid=[100, 200], K=5, seed=2, threads=2
        )
        np.testing.assert_array_equal(threaded.values[Metric.LOG], curve.values[Metric.LOG])

    def test_grid_defaults_to_t_max(self, count_table):
        result = learning_curve(count_table, DESIGNS, PROCEDURES[1:], K=4, seed=1)
        assert result.grid == (300,)

    def test_t_out_of_range(self, count_table):
        with pytest.raises(DomainError, match="outside 1..320"):
            learning_curve(count_table, DESIGNS, PROCEDURES, grid=[321], K=5, seed=2)

    def test_responses_must_agree(self, count_table):
        designs = [*DESIGNS, DesignSpec(name="other", response="x4", focus=["(Intercept)"])]
        procedures = [*PROCEDURES, CvProcedure(name="odd", estimator="ml", design="other")]
        with pytest.raises(DomainError, match="one response"):
            learning_curve(count_table, designs, procedures, grid=[100], K=5)


class TestExternalProcedures:
    def test_registered(self, external):
        assert {"mean", "broken"} <= set(registered_procedures())

    def test_unregistered_external_rejected(self, count_table):
        procedures = [CvProcedure(name="lasso-int", estimator="external", design="ml")]
        with pytest.raises(DomainError, match="lasso-int"):
            learning_curve(count_table, DESIGNS, procedures, grid=[100], K=5)

    def test_external_scored_alongside(self, count_table, external):
        procedures = [*PROCEDURES, CvProcedure(name="mean", estimator="external", design="ml")]
        result = learning_curve(count_table, DESIGNS, procedures, grid=[150], K=5, seed=2)
        log = result.cv_means(Metric.LOG)[0]
        assert np.isfinite(log).all()
        # a covariate-free geometric fit should lose to the regression fits
        assert log[2] > log[1]

    def test_external_failures_recorded(self, count_table, external):
        procedures = [PROCEDURES[1], CvProcedure(name="broken", estimator="external", design="ml")]
        result = learning_curve(count_table, DESIGNS, procedures, grid=[150], K=5, seed=2)
        assert result.failure_counts().tolist() == [[0, 5]]
        assert np.isnan(result.cv_means(Metric.RMSE)[0, 1])
        assert np.isfinite(result.cv_means(Metric.RMSE)[0, 0])


class TestOutput:
    def test_long_frame(self, curve):
        frame = curve.to_long_frame()
        assert list(frame.columns) == ["t", "procedure", "fold", "metric", "value", "converged"]
        assert len(frame) == 2 * 2 * 5 * len(Metric)
        assert frame["fold"].min() == 1

    def test_write(self, tmp_path, curve):
        paths = write_learning_curve(curve, tmp_path / "cv", version="0.1.0", seed=2, config={"seed": 2})
        names = sorted(p.name for p in paths)
        assert names == sorted(
            ["curve_long.csv", "curve_failures.csv", *(f"curve_means_{m.value}.csv" for m in Metric)]
        )
        means = pd.read_csv(tmp_path / "cv" / "curve_means_rmse.csv", comment="#", index_col="t")
        assert list(means.index) == [100, 200]
        assert list(means.columns) == ["walsNB", "ML"]
        assert read_embedded_config(tmp_path / "cv" / "curve_long.csv") == {"seed": 2}


class TestFromConfig:
    def test_config_round_trip(self, cv_yaml, count_csv):
        config = load_cv_config(cv_yaml)
        table = ingest_csv(count_csv, config.data_schema)
        result = learning_curve_from_config(table, config)
        assert result.grid == (100, 250)
        assert result.folds.K == 4
        assert result.procedures == ("walsNB", "ML")


@pytest.mark.dataset
@pytest.mark.skipif(
    "WALSNB_DOCTORVISITS" not in os.environ,
    reason="set WALSNB_DOCTORVISITS to the DoctorVisits CSV to run",
)
class TestDoctorVisits:
    def test_shipped_experiment(self):
        config = load_cv_config(Path(__file__).parents[2] / "experiments" / "doctorvisits.yaml")
        table = ingest_csv(os.environ["WALSNB_DOCTORVISITS"], config.data_schema)
        assert len(table) == 5190
        result = learning_curve_from_config(table, config.model_copy(update={"grid": [200]}))
        assert np.isfinite(result.cv_means(Metric.LOG)).all()
