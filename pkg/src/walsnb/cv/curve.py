"""K-fold cross-validated learning curves.

For every training size t on the grid and every fold k, each procedure is
fitted on the first t observations of fold k's training portion and scored on
fold k. Validation folds never change with t, and the training sets are
nested in t.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from walsnb.concurrency import WorkerPool
from walsnb.config import defaults
from walsnb.config.loader import embed_header
from walsnb.config.schema import CvConfig, CvProcedure, DesignSpec, MlOptions, PriorSpec
from walsnb.cv.design import build_design
from walsnb.cv.folds import FoldPlan, make_folds
from walsnb.errors import DomainError, EstimationError, NumericOverflow, ScoringError
from walsnb.ml import fit_ml
from walsnb.scoring import report_metrics, score_predictions
from walsnb.types import Dataset, Estimator, FloatArray, Metric, MlFit
from walsnb.wals import fit_walsnb

logger = logging.getLogger(__name__)

# (training, validation) -> (predicted means, dispersion) on the validation rows
ExternalProcedure = Callable[[Dataset, Dataset], tuple[FloatArray, "float | FloatArray"]]

_EXTERNAL: dict[str, ExternalProcedure] = {}

METRICS: tuple[Metric, ...] = tuple(Metric)


# ── External procedures ──


def register_procedure(name: str, fn: ExternalProcedure) -> None:
    """Make ``fn`` available to CV procedures with ``estimator: external``.

    The function should raise an EstimationError subclass when it cannot
    fit; that cell is then recorded as a failure.
    """
    if name in _EXTERNAL:
        logger.info("Replacing external procedure %s", name)
    _EXTERNAL[name] = fn


def unregister_procedure(name: str) -> None:
    _EXTERNAL.pop(name, None)


def registered_procedures() -> list[str]:
    return sorted(_EXTERNAL)


# ── Result container ──


@dataclass(frozen=True, eq=False)
class LearningCurve:
    """Fold metrics indexed [grid point, procedure, fold]; NaN marks a failed cell."""

    grid: tuple[int, ...]
    procedures: tuple[str, ...]
    folds: FoldPlan
    truncation: int
    values: dict[Metric, FloatArray]
    converged: np.ndarray

    def cv_means(self, metric: Metric) -> FloatArray:
        """Mean over the folds that produced a value, per grid point and procedure."""
        vals = self.values[metric]
        out = np.full(vals.shape[:2], np.nan)
        for idx in np.ndindex(*vals.shape[:2]):
            present = vals[idx][self.converged[idx]]
            if present.size:
                out[idx] = math.fsum(present.tolist()) / present.size
        return out

    def failure_counts(self) -> np.ndarray:
        return np.sum(~self.converged, axis=2)

    def to_long_frame(self) -> pd.DataFrame:
        """Columns t, procedure, fold, metric, value, converged."""
        rows: list[dict[str, Any]] = []
        for li, t in enumerate(self.grid):
            for mi, proc in enumerate(self.procedures):
                for k in range(self.folds.K):
                    ok = bool(self.converged[li, mi, k])
                    for metric in METRICS:
                        rows.append(
                            {
                                "t": t,
                                "procedure": proc,
                                "fold": k + 1,
                                "metric": metric.value,
                                "value": float(self.values[metric][li, mi, k]) if ok else np.nan,
                                "converged": ok,
                            }
                        )
        return pd.DataFrame(rows, columns=["t", "procedure", "fold", "metric", "value", "converged"])

    def means_table(self, metric: Metric) -> pd.DataFrame:
        """t in rows, procedures in columns."""
        return pd.DataFrame(
            self.cv_means(metric), index=pd.Index(self.grid, name="t"), columns=list(self.procedures)
        )

    def failures_frame(self) -> pd.DataFrame:
        counts = self.failure_counts()
        return pd.DataFrame(
            [
                {"t": t, "procedure": proc, "n_failed": int(counts[li, mi])}
                for li, t in enumerate(self.grid)
                for mi, proc in enumerate(self.procedures)
            ]
        )


# ── Per-grid-point work ──


@dataclass(frozen=True, eq=False)
class _GridTask:
    plan: FoldPlan
    datasets: dict[str, Dataset]
    procedures: tuple[CvProcedure, ...]
    externals: dict[str, ExternalProcedure]
    prior: PriorSpec
    ml: MlOptions
    truncation: int


Cell = tuple[dict[Metric, float] | None, str | None]


def _fit_cell(
    task: _GridTask,
    proc: CvProcedure,
    train: Dataset,
    valid: Dataset,
    ml_cache: dict[tuple[str, ...], MlFit | EstimationError],
) -> tuple[FloatArray, float | FloatArray]:
    def ml_fit(data: Dataset) -> MlFit:
        key = data.names
        if key not in ml_cache:
            try:
                ml_cache[key] = fit_ml(data, task.ml)
            except EstimationError as e:
                ml_cache[key] = e
        cached = ml_cache[key]
        if isinstance(cached, EstimationError):
            raise cached
        return cached

    if proc.estimator is Estimator.EXTERNAL:
        return task.externals[proc.name](train, valid)
    start = ml_fit(train.as_unrestricted())
    if proc.estimator is Estimator.ML:
        beta, rho = start.params.beta, start.params.rho
    else:
        fit = fit_walsnb(train, task.prior, start)
        beta, rho = fit.beta_hat, fit.rho_hat
    with np.errstate(over="ignore"):
        mu = np.exp(valid.X @ beta)
    if not np.all(np.isfinite(mu)):
        raise NumericOverflow("predicted means overflowed")
    return mu, rho


def _run_grid_point(task: _GridTask, t: int) -> list[list[Cell]]:
    """cells[procedure][fold]."""
    logger.info("Learning curve: t=%d", t)
    cells: list[list[Cell]] = [[] for _ in task.procedures]
    for k in range(1, task.plan.K + 1):
        train_rows = task.plan.training_prefix(k, t)
        valid_rows = task.plan.validation(k)
        ml_cache: dict[tuple[str, ...], MlFit | EstimationError] = {}
        for pi, proc in enumerate(task.procedures):
            data = task.datasets[proc.design]
            valid = data.subset(valid_rows)
            try:
                mu, rho = _fit_cell(task, proc, data.subset(train_rows), valid, ml_cache)
                report = score_predictions(mu, rho, valid.y, task.truncation)
            except (EstimationError, ScoringError) as e:
                reason = e.message or type(e).__name__
                logger.warning("t=%d fold %d: %s failed: %s", t, k, proc.name, reason)
                cells[pi].append((None, reason))
                continue
            cells[pi].append((report_metrics(report), None))
    return cells


# ── Driver ──


def learning_curve(
    table: pd.DataFrame,
    designs: Sequence[DesignSpec],
    procedures: Sequence[CvProcedure],
    grid: Sequence[int] | None = None,
    K: int = defaults.DEFAULT_FOLDS,
    seed: int = defaults.DEFAULT_SEED,
    *,
    prior: PriorSpec | None = None,
    ml: MlOptions | None = None,
    truncation: int | None = None,
    threads: int = defaults.DEFAULT_THREADS,
) -> LearningCurve:
    """Algorithm over the training-size grid; ``grid`` defaults to the largest size."""
    by_name = {d.name: d for d in designs}
    responses = {by_name[p.design].response for p in procedures}
    if len(responses) != 1:
        raise DomainError(f"procedures must share one response column, got {sorted(responses)}")
    missing = [p.name for p in procedures if p.estimator is Estimator.EXTERNAL and p.name not in _EXTERNAL]
    if missing:
        raise DomainError(f"external procedures not registered: {missing}")

    datasets = {name: build_design(table, by_name[name]) for name in {p.design for p in procedures}}
    y = next(iter(datasets.values())).y
    plan = make_folds(y.shape[0], K, seed)

    grid = list(grid) if grid else [plan.t_max]
    too_large = [t for t in grid if not 1 <= t <= plan.t_max]
    if too_large:
        raise DomainError(f"training sizes {too_large} outside 1..{plan.t_max}")

    if truncation is None:
        truncation = int(np.max(y))
        logger.info("Truncating Brier/spherical sums at the largest count %d", truncation)

    task = _GridTask(
        plan=plan,
        datasets=datasets,
        procedures=tuple(procedures),
        externals={p.name: _EXTERNAL[p.name] for p in procedures if p.estimator is Estimator.EXTERNAL},
        prior=prior or PriorSpec.default(defaults.DEFAULT_CV_PRIOR),
        ml=ml or MlOptions(),
        truncation=truncation,
    )
    per_point = WorkerPool(max_workers=threads).map_ordered(partial(_run_grid_point, task), grid)

    shape = (len(grid), len(procedures), K)
    values = {m: np.full(shape, np.nan) for m in METRICS}
    converged = np.zeros(shape, dtype=bool)
    for li, cells in enumerate(per_point):
        for pi, folds in enumerate(cells):
            for ki, (metrics, _) in enumerate(folds):
                if metrics is None:
                    continue
                converged[li, pi, ki] = True
                for m in METRICS:
                    values[m][li, pi, ki] = metrics[m]

    return LearningCurve(
        grid=tuple(grid),
        procedures=tuple(p.name for p in procedures),
        folds=plan,
        truncation=truncation,
        values=values,
        converged=converged,
    )


def learning_curve_from_config(
    table: pd.DataFrame, config: CvConfig, threads: int | None = None
) -> LearningCurve:
    return learning_curve(
        table,
        config.designs,
        config.procedures,
        config.grid,
        config.folds,
        config.seed,
        prior=config.prior,
        ml=config.ml,
        truncation=config.truncation,
        threads=threads or config.threads,
    )


# ── Output ──


def write_learning_curve(
    curve: LearningCurve,
    out_dir: str | Path,
    *,
    version: str,
    seed: int,
    config: dict[str, Any],
) -> list[Path]:
    """Long CSV, one means table per metric and the failure counts."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = embed_header(version, seed, config)
    written: list[Path] = []

    def write(frame: pd.DataFrame, name: str, index: bool = False) -> None:
        path = out / name
        with open(path, "w", newline="") as f:
            f.write(header)
            frame.to_csv(f, index=index, na_rep="NA", float_format=defaults.FLOAT_FORMAT)
        written.append(path)

    write(curve.to_long_frame(), "curve_long.csv")
    for metric in METRICS:
        write(curve.means_table(metric), f"curve_means_{metric.value}.csv", index=True)
    write(curve.failures_frame(), "curve_failures.csv")
    logger.info("Wrote learning curve tables to %s", out)
    return written
