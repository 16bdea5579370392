"""Monte-Carlo comparison of WALS-NB against ML benchmarks and the oracle."""

from walsnb.simulation.design import SimulatedSample, draw_sample, sample_design
from walsnb.simulation.pools import CoefficientPool, generate_pools
from walsnb.simulation.report import aggregate_results, emit_report, read_results, results_frame
from walsnb.simulation.runner import (
    ScenarioTask,
    procedure_dataset,
    run_experiment,
    run_rng,
    run_scenario,
    simulate_run,
)

__all__ = [
    "CoefficientPool",
    "ScenarioTask",
    "SimulatedSample",
    "aggregate_results",
    "draw_sample",
    "emit_report",
    "generate_pools",
    "procedure_dataset",
    "read_results",
    "results_frame",
    "run_experiment",
    "run_rng",
    "run_scenario",
    "sample_design",
    "simulate_run",
]
