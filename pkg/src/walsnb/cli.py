"""Click CLI for walsnb — fit, simulate, cross-validate and score NB2 count models."""

from __future__ import annotations

import logging
import math
import sys
from pathlib import Path
from typing import Any

import click
import numpy as np
import pandas as pd
import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from walsnb import __version__
from walsnb.config.hierarchy import load_config_hierarchy
from walsnb.config.schema import CliConfig
from walsnb.errors import DataError, EstimationError, InputError, NonConvergence, ScoringError
from walsnb.types import MlFit

console = Console()
error_console = Console(stderr=True)

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_ESTIMATION = 2
EXIT_IO = 3


def _setup_logging(verbosity: int, default: str = "WARNING") -> None:
    """Configure logging based on verbosity level."""
    level = logging.getLevelName(default.upper())
    if not isinstance(level, int):
        level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG

    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=error_console, show_time=False, show_path=False)],
    )
    logging.getLogger().setLevel(level)


def _resolve(**overrides: Any) -> CliConfig:
    return CliConfig(**load_config_hierarchy(**overrides))


# ── YAML output with 17 significant digits ──


class _FloatDumper(yaml.SafeDumper):
    pass


def _represent_float(dumper: yaml.SafeDumper, value: float) -> yaml.ScalarNode:
    if math.isnan(value):
        text = ".nan"
    elif math.isinf(value):
        text = ".inf" if value > 0 else "-.inf"
    else:
        # YAML 1.1 floats need a dot, exponent or not
        mantissa, e, exponent = f"{value:.17g}".partition("e")
        if "." not in mantissa:
            mantissa += ".0"
        text = mantissa + e + exponent
    return dumper.represent_scalar("tag:yaml.org,2002:float", text)


_FloatDumper.add_representer(float, _represent_float)


def _dump_yaml(data: dict[str, Any], path: str | None) -> None:
    text = yaml.dump(data, Dumper=_FloatDumper, sort_keys=False, allow_unicode=True)
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
        console.print(f"[green]Written to {path}[/green]")
    else:
        click.echo(text, nl=False)


def _floats(values: Any) -> list[float]:
    return [float(v) for v in np.asarray(values).reshape(-1)]


# ── Exit-code mapping ──


class WalsNbGroup(click.Group):
    """Maps failures to exit codes: 1 usage/config, 2 estimation or scoring, 3 I/O or data."""

    def main(self, *args: Any, standalone_mode: bool = True, **kwargs: Any) -> Any:
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.exceptions.Exit as e:
            code = e.exit_code
        except click.Abort:
            error_console.print("Aborted!")
            code = EXIT_USAGE
        except click.ClickException as e:
            e.show()
            code = EXIT_USAGE
        except ValidationError as e:
            error_console.print(f"[red]Invalid configuration:[/red] {e}")
            code = EXIT_USAGE
        except (EstimationError, ScoringError) as e:
            error_console.print(f"[red]Failed ({e.error_type}):[/red] {e.message}")
            code = EXIT_ESTIMATION
        except (OSError, DataError) as e:
            error_console.print(f"[red]Error:[/red] {e}")
            code = EXIT_IO
        except InputError as e:
            error_console.print(f"[red]Invalid input ({e.error_type}):[/red] {e.message}")
            code = EXIT_USAGE
        except (ValueError, KeyError) as e:
            error_console.print(f"[red]Error:[/red] {e}")
            code = EXIT_USAGE
        else:
            code = rv if isinstance(rv, int) else 0
        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=WalsNbGroup)
@click.version_option(package_name="walsnb")
def cli() -> None:
    """walsnb — WALS model averaging for negative binomial count regression."""


# ── fit ──


@cli.command()
@click.argument("data_path", type=click.Path())
@click.option("-d", "--design", "design_path", type=click.Path(), required=True, help="Design YAML.")
@click.option("-o", "--output", type=click.Path(), help="Output YAML path (default: stdout).")
@click.option(
    "--prior", type=click.Choice(["laplace", "weibull", "identity"]), default=None, help="WALS prior."
)
@click.option("--ml-only", is_flag=True, default=False, help="Skip the WALS step.")
@click.option(
    "--allow-unconverged", is_flag=True, default=False, help="Use an unconverged ML start anyway."
)
@click.option("--max-iter", type=int, default=None, help="ML iteration limit.")
@click.option("--tol", type=float, default=None, help="ML relative deviance tolerance.")
@click.option("--seed", type=int, default=None, help="Recorded for reproducibility.")
@click.option("-v", "--verbose", count=True, help="Increase verbosity (-v info, -vv debug).")
def fit(
    data_path: str,
    design_path: str,
    output: str | None,
    prior: str | None,
    ml_only: bool,
    allow_unconverged: bool,
    max_iter: int | None,
    tol: float | None,
    seed: int | None,
    verbose: int,
) -> None:
    """Fit ML and WALS-NB to a CSV with the focus/auxiliary split of DESIGN."""
    from walsnb.config.loader import load_data_schema, load_design_spec
    from walsnb.cv import build_design, ingest_csv
    from walsnb.ml import fit_ml
    from walsnb.wals import fit_walsnb

    config = _resolve(prior=prior, max_iter=max_iter, tol=tol, seed=seed)
    _setup_logging(verbose, config.log_level)

    design = load_design_spec(design_path)
    table = ingest_csv(data_path, load_data_schema(design_path, design))
    data = build_design(table, design)
    prior_spec = config.prior_spec("laplace")

    try:
        ml = fit_ml(data.as_unrestricted(), config.ml_options())
    except NonConvergence as e:
        if not (allow_unconverged and isinstance(e.fit, MlFit)):
            raise
        logger.warning("ML start did not converge: %s", e.message)
        ml = e.fit

    result: dict[str, Any] = {
        "meta": {"walsnb": __version__, "seed": config.seed},
        "config": {**config.to_dict(), "prior": prior_spec.model_dump(mode="json"), "design": design.model_dump()},
        "ml": {
            "coefficients": [
                {"name": name, "beta": b} for name, b in zip(data.names, _floats(ml.params.beta), strict=True)
            ],
            "rho": ml.params.rho,
            "loglik": ml.loglik,
            "outer_iterations": ml.outer_iterations,
            "inner_iterations": ml.inner_iterations,
            "converged": ml.converged,
        },
    }

    if not ml_only and data.k2 > 0:
        wals = fit_walsnb(data, prior_spec, ml, allow_unconverged=allow_unconverged)
        coefficients: list[dict[str, Any]] = [
            {"name": name, "role": "focus", "beta": b, "gamma": g}
            for name, b, g in zip(data.names1, _floats(wals.beta1_hat), _floats(wals.gamma1_hat), strict=True)
        ]
        coefficients += [
            {"name": name, "role": "auxiliary", "beta": b, "gamma": g, "weight": w, "gamma_unrestricted": gu}
            for name, b, g, w, gu in zip(
                data.names2,
                _floats(wals.beta2_hat),
                _floats(wals.gamma2_hat),
                _floats(wals.w_diag),
                _floats(wals.gamma2_tilde_u),
                strict=True,
            )
        ]
        result["wals"] = {
            "coefficients": coefficients,
            "rho": wals.rho_hat,
            "alpha": wals.alpha_hat,
            "start_loglik": ml.loglik,
            "start_converged": ml.converged,
        }
        _print_coefficients(coefficients, wals.rho_hat)

    _dump_yaml(result, output)


def _print_coefficients(coefficients: list[dict[str, Any]], rho: float) -> None:
    table = Table(title=f"WALS-NB estimates (rho = {rho:.4g})", show_header=True)
    table.add_column("Term", style="cyan")
    table.add_column("Role")
    table.add_column("beta", justify="right")
    table.add_column("w", justify="right")
    for c in coefficients:
        w = c.get("weight")
        table.add_row(c["name"], c["role"], f"{c['beta']:.6g}", "-" if w is None else f"{w:.3f}")
    error_console.print(table)


# ── simulate ──


@cli.command()
@click.argument("experiment", type=str)
@click.option("-o", "--output", type=click.Path(), required=True, help="Results CSV path.")
@click.option("--runs", type=int, default=None, help="Override runs per scenario.")
@click.option("--seed", type=int, default=None, help="Override the experiment seed.")
@click.option("--threads", type=int, default=None, help="Worker processes.")
@click.option(
    "--prior", type=click.Choice(["laplace", "weibull", "identity"]), default=None, help="WALS prior."
)
@click.option("--timings", is_flag=True, default=None, help="Record fit durations.")
@click.option(
    "--custom-dir", type=click.Path(), default=None, help="Directory with user preset YAMLs."
)
@click.option("-v", "--verbose", count=True, help="Increase verbosity (-v info, -vv debug).")
def simulate(
    experiment: str,
    output: str,
    runs: int | None,
    seed: int | None,
    threads: int | None,
    prior: str | None,
    timings: bool | None,
    custom_dir: str | None,
    verbose: int,
) -> None:
    """Run a Monte-Carlo EXPERIMENT (preset name, YAML, or earlier results CSV)."""
    from walsnb.config.schema import PriorSpec
    from walsnb.presets import PresetRegistry, resolve_experiment
    from walsnb.simulation import aggregate_results, emit_report, run_experiment

    config = _resolve(threads=threads, prior=prior, record_timings=timings, seed=seed)
    _setup_logging(verbose, config.log_level)

    registry = PresetRegistry(user_dirs=[Path(custom_dir)] if custom_dir else None)
    base = resolve_experiment(experiment, registry)
    updates: dict[str, Any] = {
        "threads": threads if threads is not None else max(config.threads, base.threads),
        "record_timings": config.record_timings or base.record_timings,
    }
    if runs is not None:
        updates["runs"] = runs
    if seed is not None:
        updates["seed"] = seed
    if config.prior is not None:
        updates["prior"] = PriorSpec.default(config.prior)
    exp = type(base).model_validate({**base.model_dump(), **updates})

    results = run_experiment(exp)
    exp_dict = exp.model_dump(mode="json")
    # thread count does not change results
    embedded = {k: v for k, v in exp_dict.items() if k != "threads"}
    _, summary_path = emit_report(
        results, output, version=__version__, seed=exp.seed, config=embedded, scenarios=exp.scenarios()
    )

    summary = aggregate_results(results)
    failed = sum(1 for r in results if not r.converged)
    table = Table(title=f"{exp.name}: mean scores", show_header=True)
    for col in ["scenario", "procedure", "metric", "mean", "median", "ok", "failed"]:
        table.add_column(col)
    for row in summary.itertuples(index=False):
        table.add_row(
            str(row.scenario_id),
            str(row.procedure),
            str(row.metric),
            "NA" if pd.isna(row.mean) else f"{row.mean:.6g}",
            "NA" if pd.isna(row.median) else f"{row.median:.6g}",
            str(row.n_ok),
            str(row.n_failed),
        )
    if verbose >= 1:
        error_console.print(table)
    console.print(f"[green]Wrote {len(results)} results to {output} and {summary_path}[/green]")
    if failed:
        console.print(f"[yellow]{failed} fits failed and are excluded from the summary[/yellow]")


# ── cv ──


@cli.command()
@click.argument("config_path", type=click.Path())
@click.option("--data", "data_path", type=click.Path(), default=None, help="CSV (overrides config).")
@click.option("-o", "--output-dir", type=click.Path(), required=True, help="Output directory.")
@click.option("--grid", type=str, default=None, help="Comma-separated training sizes.")
@click.option("--folds", type=int, default=None, help="Number of folds K.")
@click.option("--seed", type=int, default=None, help="Fold seed.")
@click.option("-R", "--truncation", type=int, default=None, help="Brier/spherical truncation.")
@click.option(
    "--prior", type=click.Choice(["laplace", "weibull", "identity"]), default=None, help="WALS prior."
)
@click.option("--threads", type=int, default=None, help="Worker processes over grid points.")
@click.option("-v", "--verbose", count=True, help="Increase verbosity (-v info, -vv debug).")
def cv(
    config_path: str,
    data_path: str | None,
    output_dir: str,
    grid: str | None,
    folds: int | None,
    seed: int | None,
    truncation: int | None,
    prior: str | None,
    threads: int | None,
    verbose: int,
) -> None:
    """Cross-validated learning curves for the procedures of CONFIG_PATH."""
    from walsnb.config.loader import load_cv_config
    from walsnb.config.schema import PriorSpec
    from walsnb.cv import ingest_csv, learning_curve_from_config, write_learning_curve
    from walsnb.types import Metric

    settings = _resolve(threads=threads, prior=prior, truncation=truncation)
    _setup_logging(verbose, settings.log_level)

    base = load_cv_config(config_path)
    updates: dict[str, Any] = {"threads": threads if threads is not None else max(settings.threads, base.threads)}
    if grid:
        try:
            updates["grid"] = [int(t) for t in grid.split(",") if t.strip()]
        except ValueError as e:
            raise click.BadParameter(f"--grid must list integers: {grid}") from e
    if folds is not None:
        updates["folds"] = folds
    if seed is not None:
        updates["seed"] = seed
    if settings.truncation is not None:
        updates["truncation"] = settings.truncation
    if settings.prior is not None:
        updates["prior"] = PriorSpec.default(settings.prior)
    config = type(base).model_validate({**base.model_dump(by_alias=True), **updates})

    source = data_path or config.data
    if not source:
        raise click.UsageError("no data file: pass --data or set 'data' in the config")
    path = Path(source)
    if not path.is_absolute() and data_path is None:
        path = Path(config_path).parent / path

    table = ingest_csv(path, config.data_schema)
    curve = learning_curve_from_config(table, config)

    embedded = config.model_dump(mode="json", by_alias=True, exclude={"threads"})
    write_learning_curve(curve, output_dir, version=__version__, seed=config.seed, config=embedded)

    means = curve.means_table(Metric.RMSE)
    out = Table(title=f"{config.name}: {config.folds}-fold CV RMSE", show_header=True)
    out.add_column("t", style="cyan")
    for proc in means.columns:
        out.add_column(str(proc), justify="right")
    for t, row in means.iterrows():
        out.add_row(str(t), *("NA" if pd.isna(v) else f"{v:.4f}" for v in row))
    console.print(out)

    n_failed = int(curve.failure_counts().sum())
    if n_failed:
        console.print(f"[yellow]{n_failed} fold fits failed; see curve_failures.csv[/yellow]")
    if not curve.converged.any():
        raise EstimationError("every cross-validation cell failed")


# ── score ──


@cli.command()
@click.argument("predictions", type=click.Path())
@click.option("-R", "--truncation", type=int, default=None, help="Truncation (default: max y).")
@click.option("-o", "--output", type=click.Path(), help="Output YAML path (default: stdout).")
@click.option("-v", "--verbose", count=True, help="Increase verbosity (-v info, -vv debug).")
def score(predictions: str, truncation: int | None, output: str | None, verbose: int) -> None:
    """Score a CSV of predictions with columns y, mu, rho."""
    from walsnb.scoring import score_predictions

    config = _resolve(truncation=truncation)
    _setup_logging(verbose, config.log_level)

    path = Path(predictions)
    if not path.exists():
        raise FileNotFoundError(f"Predictions file not found: {path}")
    frame = pd.read_csv(path, comment="#")
    missing = [c for c in ("y", "mu", "rho") if c not in frame.columns]
    if missing:
        raise DataError(f"{path} lacks columns {missing}", column=missing[0])
    for col in ("y", "mu", "rho"):
        values = pd.to_numeric(frame[col], errors="coerce")
        if values.isna().any():
            row = int(np.flatnonzero(values.isna().to_numpy())[0]) + 1
            raise DataError(f"row {row}, column {col}: not a number", row=row, column=col)
        frame[col] = values

    y = frame["y"].to_numpy(dtype=np.float64)
    R = config.truncation if config.truncation is not None else int(np.max(y))
    report = score_predictions(frame["mu"].to_numpy(), frame["rho"].to_numpy(), y, R)

    table = Table(title="Scores", show_header=True)
    table.add_column("Metric", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("RMSE", f"{report.rmse:.6g}")
    table.add_row("Log score", f"{report.log_score:.6g}")
    table.add_row("Brier score", f"{report.brier_score:.6g}")
    table.add_row("Spherical score", f"{report.spherical_score:.6g}")
    table.add_row("Truncation R", str(report.truncation))
    table.add_row("n", str(report.n))
    error_console.print(table)

    _dump_yaml(
        {
            "meta": {"walsnb": __version__, "seed": config.seed, "source": str(path), "truncation": R},
            "config": {**config.to_dict(), "truncation": R},
            "report": report.model_dump(),
        },
        output,
    )


# ── presets ──


@cli.command("presets")
@click.option("--custom-dir", type=click.Path(), default=None, help="Directory with user presets.")
def list_presets(custom_dir: str | None) -> None:
    """List available simulation presets."""
    from walsnb.presets import PresetRegistry

    registry = PresetRegistry(user_dirs=[Path(custom_dir)] if custom_dir else None)

    table = Table(title="Available Presets", show_header=True)
    table.add_column("Name", style="cyan")
    table.add_column("Version")
    table.add_column("Description")
    table.add_column("Scenarios")
    table.add_column("Runs")

    for info in sorted(registry.list_presets(), key=lambda p: p.name):
        table.add_row(
            info.name,
            info.version,
            info.description or "-",
            str(info.scenario_count),
            str(info.runs),
        )

    console.print(table)


def main() -> None:
    """Entry point for the CLI."""
    cli()
