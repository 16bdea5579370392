"""Monte-Carlo runs — draw, fit every procedure, score on a fresh validation set."""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from walsnb.concurrency import WorkerPool
from walsnb.config import defaults
from walsnb.config.schema import INTERCEPT, ExperimentConfig, MlOptions, PriorSpec, Scenario
from walsnb.errors import EstimationError, NonConvergence, ScoringError
from walsnb.ml import fit_ml
from walsnb.scoring import score_predictions
from walsnb.simulation.design import SimulatedSample, draw_sample
from walsnb.simulation.pools import CoefficientPool, generate_pools
from walsnb.types import (
    SIMULATION_PROCEDURES,
    Dataset,
    Estimator,
    FloatArray,
    MlFit,
    Procedure,
    RunResult,
)
from walsnb.wals import fit_walsnb

logger = logging.getLogger(__name__)

_TRAIN_STREAM = 0
_VALIDATION_STREAM = 1


def run_rng(seed: int, scenario_index: int, run: int, stream: int) -> np.random.Generator:
    """Independent generator per (scenario, run, training|validation)."""
    key = (1, scenario_index, run, stream)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# ── Column plans ──


def procedure_dataset(procedure: Procedure, sample: SimulatedSample) -> Dataset:
    """Focus / auxiliary split each simulation procedure fits."""
    n = sample.y.shape[0]
    const = np.ones((n, 1))
    k1, k2 = sample.x1.shape[1], sample.x2.shape[1]
    names1 = tuple(f"x1_{j + 1}" for j in range(k1))
    names2 = tuple(f"x2_{j + 1}" for j in range(k2))
    empty = np.empty((n, 0))

    x1 = (np.hstack([const, sample.x1]), (INTERCEPT, *names1))
    x2 = (sample.x2, names2)
    x12 = (np.hstack([sample.x1, sample.x2]), names1 + names2)

    if procedure is Procedure.WALS_DGP:
        focus, aux = x1, x2
    elif procedure is Procedure.WALS_AUX:
        focus, aux = (const, (INTERCEPT,)), x12
    elif procedure is Procedure.ML_U:
        focus, aux = (np.hstack([const, x12[0]]), (INTERCEPT, *x12[1])), (empty, ())
    elif procedure is Procedure.ML_FOCUS:
        focus, aux = x1, (empty, ())
    elif procedure is Procedure.ML_AC:
        focus, aux = (np.hstack([const, sample.x2]), (INTERCEPT, *names2)), (empty, ())
    else:
        raise ValueError(f"{procedure} has no fitted design")
    return Dataset(sample.y, focus[0], aux[0], focus[1], aux[1])


# ── One run ──


@dataclass(frozen=True, eq=False)
class ScenarioTask:
    """Everything a worker needs for the runs of one scenario."""

    scenario_index: int
    scenario: Scenario
    pool: CoefficientPool
    procedures: tuple[Procedure, ...]
    prior: PriorSpec
    ml: MlOptions = field(default_factory=MlOptions)
    truncation: int = defaults.DEFAULT_SIM_TRUNCATION
    record_timings: bool = defaults.DEFAULT_RECORD_TIMINGS


def _failure(task: ScenarioTask, run: int, procedure: Procedure, reason: str) -> RunResult:
    logger.warning(
        "Scenario %d run %d: %s failed: %s", task.scenario_index, run, procedure, reason
    )
    return RunResult(
        scenario_id=task.scenario_index,
        run=run,
        procedure=procedure,
        converged=False,
        failure_reason=reason,
    )


def _scored(
    task: ScenarioTask,
    run: int,
    procedure: Procedure,
    mu_hat: FloatArray,
    rho_hat: float | FloatArray,
    y: FloatArray,
    millis: float | None,
) -> RunResult:
    try:
        report = score_predictions(mu_hat, rho_hat, y, task.truncation)
    except ScoringError as e:
        return _failure(task, run, procedure, f"scoring: {e.message}")
    return RunResult(
        scenario_id=task.scenario_index,
        run=run,
        procedure=procedure,
        converged=True,
        rmse=report.rmse,
        log=report.log_score,
        brier=report.brier_score,
        spherical=report.spherical_score,
        fit_millis=millis if task.record_timings else None,
    )


def simulate_run(task: ScenarioTask, run: int) -> list[RunResult]:
    """Fit and score every procedure of ``task`` on run ``run``'s data."""
    sc = task.scenario
    train_rng = run_rng(sc.seed, task.scenario_index, run, _TRAIN_STREAM)
    valid_rng = run_rng(sc.seed, task.scenario_index, run, _VALIDATION_STREAM)
    train = draw_sample(sc.n, sc.k1, sc.k2, sc.rho, sc.b, task.pool, train_rng)
    valid = draw_sample(sc.n_eval, sc.k1, sc.k2, sc.rho, sc.b, task.pool, valid_rng)

    ml_cache: dict[Procedure, MlFit | EstimationError] = {}

    def ml_fit(procedure: Procedure) -> MlFit:
        if procedure not in ml_cache:
            try:
                ml_cache[procedure] = fit_ml(procedure_dataset(procedure, train), task.ml)
            except EstimationError as e:
                ml_cache[procedure] = e
        cached = ml_cache[procedure]
        if isinstance(cached, EstimationError):
            raise cached
        return cached

    results: list[RunResult] = []
    for procedure in task.procedures:
        if procedure.estimator is Estimator.ORACLE:
            results.append(_scored(task, run, procedure, valid.mu, sc.rho, valid.y, 0.0))
            continue

        started = time.perf_counter()
        try:
            if procedure.estimator is Estimator.WALS:
                try:
                    start = ml_fit(Procedure.ML_U)
                except EstimationError as e:
                    raise NonConvergence(f"unrestricted ML start failed: {e.message}") from e
                fit = fit_walsnb(procedure_dataset(procedure, train), task.prior, start)
                beta, rho_hat = fit.beta_hat, fit.rho_hat
            else:
                ml = ml_fit(procedure)
                beta, rho_hat = ml.params.beta, ml.params.rho
            X_valid = procedure_dataset(procedure, valid).X
            with np.errstate(over="ignore"):
                mu_hat = np.exp(X_valid @ beta)
            if not np.all(np.isfinite(mu_hat)):
                raise NonConvergence("predicted means overflowed")
        except EstimationError as e:
            results.append(_failure(task, run, procedure, e.message or type(e).__name__))
            continue
        millis = (time.perf_counter() - started) * 1000.0
        results.append(_scored(task, run, procedure, mu_hat, rho_hat, valid.y, millis))
    return results


# ── Scenario and experiment drivers ──


def scenario_label(scenario: Scenario) -> str:
    return (
        f"n={scenario.n} k1={scenario.k1} k2={scenario.k2} "
        f"rho={scenario.rho:g} b={scenario.b:g} ({scenario.runs} runs)"
    )


def run_scenario(
    scenario: Scenario,
    pool: CoefficientPool,
    procedures: Sequence[Procedure] = SIMULATION_PROCEDURES,
    *,
    prior: PriorSpec | None = None,
    ml: MlOptions | None = None,
    truncation: int = defaults.DEFAULT_SIM_TRUNCATION,
    scenario_index: int = 0,
    record_timings: bool = defaults.DEFAULT_RECORD_TIMINGS,
    threads: int = defaults.DEFAULT_THREADS,
) -> list[RunResult]:
    """All runs of one scenario, ordered by (run, procedure)."""
    task = ScenarioTask(
        scenario_index=scenario_index,
        scenario=scenario,
        pool=pool,
        procedures=tuple(procedures),
        prior=prior or PriorSpec.default(defaults.DEFAULT_SIM_PRIOR),
        ml=ml or MlOptions(),
        truncation=truncation,
        record_timings=record_timings,
    )
    per_run = WorkerPool(max_workers=threads).map_ordered(partial(simulate_run, task), range(scenario.runs))
    return [r for run_results in per_run for r in run_results]


def run_experiment(config: ExperimentConfig, threads: int | None = None) -> list[RunResult]:
    """Every scenario of the grid; pools are drawn once from the experiment seed."""
    pool = generate_pools(config.seed)
    scenarios = config.scenarios()
    results: list[RunResult] = []
    for index, scenario in enumerate(scenarios):
        logger.info("Scenario %d/%d: %s", index + 1, len(scenarios), scenario_label(scenario))
        results.extend(
            run_scenario(
                scenario,
                pool,
                config.procedures,
                prior=config.prior,
                ml=config.ml,
                truncation=config.truncation,
                scenario_index=index,
                record_timings=config.record_timings,
                threads=threads or config.threads,
            )
        )
    return results
