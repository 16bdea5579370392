"""Pydantic models for estimator options, experiments and design specifications."""

from __future__ import annotations

import itertools
import math
import re
from walsnb._compat import StrEnum
from typing import Annotated, Any

from pydantic import BaseModel, Field, field_validator, model_validator

from walsnb.config import defaults
from walsnb.types import SIMULATION_PROCEDURES, Estimator, PriorFamily, Procedure

# ── Estimator options ──


class MlOptions(BaseModel):
    max_outer_iter: int = Field(default=defaults.DEFAULT_MAX_ITER, ge=1)
    max_irls_iter: int = Field(default=defaults.DEFAULT_MAX_ITER, ge=1)
    tol: float = Field(default=defaults.DEFAULT_TOL, gt=0.0)
    max_rho_iter: int = Field(default=defaults.DEFAULT_MAX_RHO_ITER, ge=1)
    max_halvings: int = Field(default=defaults.DEFAULT_MAX_HALVINGS, ge=0)
    rho_start_bounds: tuple[float, float] = defaults.DEFAULT_RHO_START_BOUNDS

    @field_validator("rho_start_bounds")
    @classmethod
    def _ordered_bounds(cls, v: tuple[float, float]) -> tuple[float, float]:
        lo, hi = v
        if not 0 < lo < hi:
            raise ValueError(f"rho_start_bounds must satisfy 0 < lo < hi, got {v}")
        return v


_REQUIRED_HYPERPARAMETERS: dict[PriorFamily, tuple[str, ...]] = {
    PriorFamily.LAPLACE: ("c",),
    PriorFamily.WEIBULL: ("q", "c"),
    PriorFamily.IDENTITY: (),
}


class PriorSpec(BaseModel):
    """Symmetric unimodal prior on the transformed auxiliary location d_h."""

    family: PriorFamily
    hyperparameters: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_hyperparameters(self) -> PriorSpec:
        required = _REQUIRED_HYPERPARAMETERS[self.family]
        missing = [k for k in required if k not in self.hyperparameters]
        if missing:
            raise ValueError(f"{self.family} prior is missing hyperparameters {missing}")
        for key, value in self.hyperparameters.items():
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"hyperparameter {key} must be positive and finite, got {value}")
        return self

    @classmethod
    def default(cls, family: PriorFamily | str) -> PriorSpec:
        """Prior with the shipped minimax-regret hyperparameters."""
        from walsnb.config.loader import load_prior_constants

        family = PriorFamily(family)
        return cls(family=family, hyperparameters=load_prior_constants()[family])


# ── Simulation ──


class Scenario(BaseModel):
    n: int = Field(ge=2)
    k1: int = Field(ge=1, le=10)
    k2: int = Field(ge=1, le=100)
    rho: float = Field(gt=0.0)
    b: float = Field(ge=0.0, lt=1.0)
    n_eval: int = Field(default=defaults.DEFAULT_N_EVAL, ge=1)
    runs: int = Field(default=defaults.DEFAULT_RUNS, ge=1)
    seed: int = defaults.DEFAULT_SEED

    @model_validator(mode="after")
    def _enough_observations(self) -> Scenario:
        # intercept + k1 + k2 coefficients and the dispersion
        if self.n < self.k1 + self.k2 + 2:
            raise ValueError(f"n={self.n} is too small for k1={self.k1}, k2={self.k2}")
        return self


class ScenarioGrid(BaseModel):
    """Cartesian product of scenario parameters."""

    n: list[Annotated[int, Field(ge=2)]] = Field(min_length=1)
    k1: list[Annotated[int, Field(ge=1, le=10)]] = Field(min_length=1)
    k2: list[Annotated[int, Field(ge=1, le=100)]] = Field(min_length=1)
    rho: list[Annotated[float, Field(gt=0.0)]] = Field(min_length=1)
    b: list[Annotated[float, Field(ge=0.0, lt=1.0)]] = Field(min_length=1)

    def expand(self, runs: int, seed: int, n_eval: int) -> list[Scenario]:
        return [
            Scenario(n=n, k1=k1, k2=k2, rho=rho, b=b, runs=runs, seed=seed, n_eval=n_eval)
            for n, k1, k2, rho, b in itertools.product(self.n, self.k1, self.k2, self.rho, self.b)
        ]

    def __len__(self) -> int:
        return len(self.n) * len(self.k1) * len(self.k2) * len(self.rho) * len(self.b)


class ExperimentConfig(BaseModel):
    name: str = "experiment"
    version: str = "1.0"
    description: str = ""
    seed: int = defaults.DEFAULT_SEED
    runs: int = Field(default=defaults.DEFAULT_RUNS, ge=1)
    n_eval: int = Field(default=defaults.DEFAULT_N_EVAL, ge=1)
    truncation: int = Field(default=defaults.DEFAULT_SIM_TRUNCATION, ge=0)
    grid: ScenarioGrid
    procedures: list[Procedure] = Field(default_factory=lambda: list(SIMULATION_PROCEDURES))
    prior: PriorSpec = Field(default_factory=lambda: PriorSpec.default(defaults.DEFAULT_SIM_PRIOR))
    ml: MlOptions = Field(default_factory=MlOptions)
    threads: int = Field(default=defaults.DEFAULT_THREADS, ge=1)
    record_timings: bool = defaults.DEFAULT_RECORD_TIMINGS

    @field_validator("procedures")
    @classmethod
    def _simulation_roster_only(cls, v: list[Procedure]) -> list[Procedure]:
        unknown = [p for p in v if p not in SIMULATION_PROCEDURES]
        if unknown:
            raise ValueError(f"not a simulation procedure: {[str(p) for p in unknown]}")
        if not v:
            raise ValueError("at least one procedure is required")
        return v

    def scenarios(self) -> list[Scenario]:
        return self.grid.expand(runs=self.runs, seed=self.seed, n_eval=self.n_eval)


# ── Data and designs ──


class ColumnType(StrEnum):
    INT = "int"
    FLOAT = "float"
    BINARY = "binary"


class ColumnSchema(BaseModel):
    name: str
    type: ColumnType = ColumnType.FLOAT
    levels: list[str] | None = None  # binary: [level coded 0, level coded 1]

    @model_validator(mode="after")
    def _binary_levels(self) -> ColumnSchema:
        if self.levels is not None and len(self.levels) != 2:
            raise ValueError(f"binary column {self.name} needs exactly two levels")
        return self


class DataSchema(BaseModel):
    columns: list[ColumnSchema]
    allow_missing: bool = False

    def column(self, name: str) -> ColumnSchema | None:
        for col in self.columns:
            if col.name == name:
                return col
        return None


INTERCEPT = "(Intercept)"
_POWER_RE = re.compile(r"^(?P<base>[^:^]+)\^(?P<power>\d+)$")


class DesignSpec(BaseModel):
    """Which derived columns enter as focus and which as auxiliary regressors.

    Terms are written as ``name``, ``a:b`` (interaction) or ``a^2`` (power);
    ``(Intercept)`` places the constant.
    """

    name: str
    response: str
    focus: list[str] = Field(default_factory=lambda: [INTERCEPT])
    auxiliary: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_terms(self) -> DesignSpec:
        if not self.focus:
            raise ValueError(f"design {self.name}: focus set may not be empty")
        seen: set[str] = set()
        for term in self.focus + self.auxiliary:
            if term in seen:
                raise ValueError(f"design {self.name}: term {term} listed twice")
            seen.add(term)
            parse_term(term)
        return self

    @property
    def intercept(self) -> bool:
        return INTERCEPT in self.focus or INTERCEPT in self.auxiliary

    @property
    def base_columns(self) -> list[str]:
        out: list[str] = []
        for term in self.focus + self.auxiliary:
            for col in parse_term(term)[1]:
                if col not in out:
                    out.append(col)
        return out

    @property
    def interactions(self) -> list[tuple[str, str]]:
        return [
            (cols[0], cols[1])
            for kind, cols, _ in map(parse_term, self.focus + self.auxiliary)
            if kind == "interaction"
        ]

    @property
    def powers(self) -> list[tuple[str, int]]:
        return [
            (cols[0], p)
            for kind, cols, p in map(parse_term, self.focus + self.auxiliary)
            if kind == "power"
        ]


def parse_term(term: str) -> tuple[str, list[str], int]:
    """Split a term into (kind, parent columns, power)."""
    term = term.strip()
    if term == INTERCEPT:
        return "intercept", [], 0
    if ":" in term:
        parts = [p.strip() for p in term.split(":")]
        if len(parts) != 2 or not all(parts):
            raise ValueError(f"interaction term must join two columns: {term!r}")
        return "interaction", parts, 1
    match = _POWER_RE.match(term)
    if match:
        power = int(match.group("power"))
        if power < 2:
            raise ValueError(f"power term needs an exponent >= 2: {term!r}")
        return "power", [match.group("base").strip()], power
    if not term or "^" in term:
        raise ValueError(f"cannot parse design term {term!r}")
    return "main", [term], 1


# ── Cross-validation ──


class CvProcedure(BaseModel):
    name: str
    estimator: Estimator
    design: str

    @field_validator("estimator")
    @classmethod
    def _fittable(cls, v: Estimator) -> Estimator:
        if v is Estimator.ORACLE:
            raise ValueError("the oracle procedure only exists in simulations")
        return v


class CvConfig(BaseModel):
    name: str = "cv"
    version: str = "1.0"
    data: str | None = None
    data_schema: DataSchema = Field(alias="schema")
    designs: list[DesignSpec]
    procedures: list[CvProcedure]
    grid: list[int] = Field(default_factory=list)
    folds: int = Field(default=defaults.DEFAULT_FOLDS, ge=2)
    seed: int = defaults.DEFAULT_SEED
    prior: PriorSpec = Field(default_factory=lambda: PriorSpec.default(defaults.DEFAULT_CV_PRIOR))
    ml: MlOptions = Field(default_factory=MlOptions)
    truncation: int | None = Field(default=None, ge=0)
    threads: int = Field(default=defaults.DEFAULT_THREADS, ge=1)

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _designs_resolve(self) -> CvConfig:
        names = {d.name for d in self.designs}
        for proc in self.procedures:
            if proc.design not in names:
                raise ValueError(f"procedure {proc.name} references unknown design {proc.design}")
        if any(t < 1 for t in self.grid):
            raise ValueError("training sizes must be positive")
        return self

    def design(self, name: str) -> DesignSpec:
        for d in self.designs:
            if d.name == name:
                return d
        raise KeyError(f"Design '{name}' not found")


# ── CLI ──


class CliConfig(BaseModel):
    """Resolved settings shared by every subcommand; embedded in outputs."""

    seed: int = defaults.DEFAULT_SEED
    threads: int = Field(default=defaults.DEFAULT_THREADS, ge=1)
    prior: PriorFamily | None = None
    max_iter: int = Field(default=defaults.DEFAULT_MAX_ITER, ge=1)
    tol: float = Field(default=defaults.DEFAULT_TOL, gt=0.0)
    truncation: int | None = Field(default=None, ge=0)
    folds: int = Field(default=defaults.DEFAULT_FOLDS, ge=2)
    record_timings: bool = defaults.DEFAULT_RECORD_TIMINGS
    log_level: str = defaults.DEFAULT_LOG_LEVEL

    model_config = {"extra": "ignore"}

    def ml_options(self) -> MlOptions:
        return MlOptions(max_outer_iter=self.max_iter, max_irls_iter=self.max_iter, tol=self.tol)

    def prior_spec(self, fallback: str) -> PriorSpec:
        return PriorSpec.default(self.prior or fallback)

    def to_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json")
