"""Results tables — tidy per-run CSV and per-scenario aggregates."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from walsnb.config import defaults
from walsnb.config.loader import embed_header
from walsnb.config.schema import Scenario
from walsnb.errors import DomainError
from walsnb.types import Metric, RunResult

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "scenario_id",
    "run",
    "procedure",
    "converged",
    "rmse",
    "log",
    "brier",
    "spherical",
    "fit_millis",
]
METRIC_COLUMNS = [m.value for m in Metric]
AGGREGATE_COLUMNS = ["mean", "q25", "median", "q75", "n_ok", "n_failed"]
NA_REP = "NA"


def results_frame(results: Sequence[RunResult]) -> pd.DataFrame:
    """One row per (scenario, run, procedure) in the fixed column order."""
    rows = [r.model_dump(mode="json", include=set(RESULT_COLUMNS)) for r in results]
    frame = pd.DataFrame(rows, columns=RESULT_COLUMNS)
    for col in [*METRIC_COLUMNS, "fit_millis"]:
        frame[col] = frame[col].astype("float64")
    return frame


def _write(frame: pd.DataFrame, path: Path, header: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(header)
        frame.to_csv(f, index=False, na_rep=NA_REP, float_format=defaults.FLOAT_FORMAT)


def emit_report(
    results: Sequence[RunResult],
    path: str | Path,
    *,
    version: str,
    seed: int,
    config: dict[str, Any],
    scenarios: Sequence[Scenario] | None = None,
) -> tuple[Path, Path]:
    """Write the per-run CSV and ``<stem>_summary.csv`` next to it.

    Failed metrics are written as NA. Both files start with the embedded run
    metadata, so readers pass ``comment="#"``.
    """
    if not results:
        raise DomainError("no results to report")
    path = Path(path)
    header = embed_header(version, seed, config)
    _write(results_frame(results), path, header)

    summary_path = path.with_name(f"{path.stem}_summary{path.suffix or '.csv'}")
    _write(aggregate_results(results, scenarios), summary_path, header)
    logger.info("Wrote %d result rows to %s and summary to %s", len(results), path, summary_path)
    return path, summary_path


def read_results(path: str | Path) -> pd.DataFrame:
    """Parse a results or summary CSV written by emit_report."""
    return pd.read_csv(path, comment="#", na_values=[NA_REP], keep_default_na=False)


def aggregate_results(
    results: Sequence[RunResult] | pd.DataFrame,
    scenarios: Sequence[Scenario] | None = None,
) -> pd.DataFrame:
    """Mean, quartiles and success/failure counts per scenario, procedure and metric.

    Failed runs contribute to ``n_failed`` only; no metric is imputed.
    """
    frame = results if isinstance(results, pd.DataFrame) else results_frame(results)
    long = frame.melt(
        id_vars=["scenario_id", "run", "procedure", "converged"],
        value_vars=METRIC_COLUMNS,
        var_name="metric",
        value_name="value",
    )
    long["converged"] = long["converged"].astype(bool)
    long["value"] = long["value"].where(long["converged"])
    keys = ["scenario_id", "procedure", "metric"]
    grouped = long.groupby(keys, sort=False)["value"]
    stats = pd.DataFrame(
        {
            "mean": grouped.mean(),
            "q25": grouped.quantile(0.25),
            "median": grouped.median(),
            "q75": grouped.quantile(0.75),
        }
    )
    counts = long.groupby(keys, sort=False)["converged"].agg(
        n_ok=lambda s: int(s.sum()),
        n_failed=lambda s: int((~s).sum()),
    )
    out = counts.join(stats, how="left").reset_index()[[*keys, *AGGREGATE_COLUMNS]]

    if scenarios is not None:
        params = pd.DataFrame(
            [
                {"scenario_id": i, "n": s.n, "k1": s.k1, "k2": s.k2, "rho": s.rho, "b": s.b}
                for i, s in enumerate(scenarios)
            ]
        )
        out = out.merge(params, on="scenario_id", how="left")

    # roster order for procedures, Metric order for metrics
    rank = {
        "procedure": {p: i for i, p in enumerate(dict.fromkeys(frame["procedure"]))},
        "metric": {m: i for i, m in enumerate(METRIC_COLUMNS)},
    }
    out = out.sort_values(
        ["scenario_id", "procedure", "metric"],
        key=lambda col: col.map(rank[str(col.name)]) if col.name in rank else col,
        kind="stable",
    )
    return out.reset_index(drop=True)
