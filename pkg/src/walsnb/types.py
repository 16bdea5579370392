"""Shared models for walsnb — enums, numeric containers and result records."""

from __future__ import annotations

import math
from dataclasses import dataclass
from walsnb._compat import StrEnum
from typing import TYPE_CHECKING, Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, model_validator

from walsnb.errors import DimensionMismatch, DomainError

if TYPE_CHECKING:
    from walsnb.config.schema import PriorSpec

FloatArray = NDArray[np.float64]

# ── Enums ──


class PriorFamily(StrEnum):
    LAPLACE = "laplace"
    WEIBULL = "weibull"
    IDENTITY = "identity"


class Estimator(StrEnum):
    ML = "ml"
    WALS = "wals"
    ORACLE = "oracle"
    EXTERNAL = "external"


class Metric(StrEnum):
    RMSE = "rmse"
    LOG = "log"
    BRIER = "brier"
    SPHERICAL = "spherical"


class Procedure(StrEnum):
    # Monte-Carlo roster
    WALS_DGP = "walsNB-dgp"
    WALS_AUX = "walsNB-aux"
    ML_U = "ML-U"
    ML_FOCUS = "ML-focus"
    ML_AC = "ML-AC"
    ORACLE = "oracle"
    # Cross-validation roster
    WALS_MAIN = "walsNB-main"
    WALS_MAIN_FOCUS = "walsNB-main-focus"
    WALS_INT = "walsNB-int"
    ML_MAIN = "ML-main"
    ML_INT = "ML-int"
    LASSO_INT = "lasso-int"

    @property
    def estimator(self) -> Estimator:
        if self is Procedure.ORACLE:
            return Estimator.ORACLE
        if self is Procedure.LASSO_INT:
            return Estimator.EXTERNAL
        return Estimator.WALS if self.value.startswith("walsNB") else Estimator.ML


SIMULATION_PROCEDURES: tuple[Procedure, ...] = (
    Procedure.WALS_DGP,
    Procedure.WALS_AUX,
    Procedure.ML_U,
    Procedure.ML_FOCUS,
    Procedure.ML_AC,
    Procedure.ORACLE,
)

CV_PROCEDURES: tuple[Procedure, ...] = (
    Procedure.WALS_MAIN,
    Procedure.WALS_MAIN_FOCUS,
    Procedure.WALS_INT,
    Procedure.ML_MAIN,
    Procedure.ML_INT,
)


# ── Model parameters and data ──


@dataclass(frozen=True, eq=False)
class Nb2Params:
    """Regression coefficients and log-dispersion; rho is always exp(alpha)."""

    beta: FloatArray
    alpha: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha):
            raise DomainError(f"alpha must be finite, got {self.alpha}")
        rho = math.exp(self.alpha)
        if not (rho > 0 and math.isfinite(rho)):
            raise DomainError(f"rho = exp({self.alpha}) is not a positive finite number")

    @classmethod
    def from_rho(cls, beta: FloatArray | list[float], rho: float) -> Nb2Params:
        if not rho > 0:
            raise DomainError(f"rho must be positive, got {rho}")
        return cls(beta=np.asarray(beta, dtype=np.float64), alpha=math.log(rho))

    @property
    def rho(self) -> float:
        return math.exp(self.alpha)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Counts with a caller-declared focus / auxiliary split of the regressors."""

    y: FloatArray
    X1: FloatArray
    X2: FloatArray
    names1: tuple[str, ...] = ()
    names2: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=np.float64).reshape(-1)
        n = y.shape[0]
        X1 = _as_matrix(self.X1, n, "X1")
        X2 = _as_matrix(self.X2, n, "X2")
        if not np.all(np.isfinite(y)) or np.any(y < 0) or np.any(y != np.floor(y)):
            raise DomainError("y must hold finite nonnegative integer counts")
        if not (np.all(np.isfinite(X1)) and np.all(np.isfinite(X2))):
            raise DomainError("design matrices contain non-finite entries")
        if X1.shape[1] < 1:
            raise DimensionMismatch("at least one focus regressor is required")
        if n < X1.shape[1] + X2.shape[1] + 1:
            raise DimensionMismatch(
                f"n={n} too small for k1={X1.shape[1]}, k2={X2.shape[1]}",
                expected=X1.shape[1] + X2.shape[1] + 1,
                actual=n,
            )
        names1 = self.names1 or tuple(f"x1_{j + 1}" for j in range(X1.shape[1]))
        names2 = self.names2 or tuple(f"x2_{j + 1}" for j in range(X2.shape[1]))
        if len(names1) != X1.shape[1] or len(names2) != X2.shape[1]:
            raise DimensionMismatch("column names do not match design widths")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X1", X1)
        object.__setattr__(self, "X2", X2)
        object.__setattr__(self, "names1", tuple(names1))
        object.__setattr__(self, "names2", tuple(names2))

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def k1(self) -> int:
        return int(self.X1.shape[1])

    @property
    def k2(self) -> int:
        return int(self.X2.shape[1])

    @property
    def X(self) -> FloatArray:
        return np.hstack([self.X1, self.X2])

    @property
    def names(self) -> tuple[str, ...]:
        return self.names1 + self.names2

    def subset(self, rows: NDArray[np.intp]) -> Dataset:
        return Dataset(
            y=self.y[rows],
            X1=self.X1[rows],
            X2=self.X2[rows],
            names1=self.names1,
            names2=self.names2,
        )

    def as_unrestricted(self) -> Dataset:
        """All regressors as focus — the design the ML start is fitted on."""
        return Dataset(y=self.y, X1=self.X, X2=np.empty((self.n, 0)), names1=self.names)


def _as_matrix(a: Any, n: int, label: str) -> FloatArray:
    m = np.asarray(a, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(-1, 1) if m.size else np.empty((n, 0))
    if m.ndim != 2 or m.shape[0] != n:
        raise DimensionMismatch(
            f"{label} has {m.shape[0] if m.ndim else 0} rows, response has {n}",
            expected=n,
            actual=m.shape,
        )
    return m


@dataclass(frozen=True)
class RestrictionMatrix:
    """Auxiliary columns constrained to zero in one submodel."""

    excluded: frozenset[int]
    k2: int

    def __post_init__(self) -> None:
        bad = [h for h in self.excluded if not 0 <= h < self.k2]
        if bad:
            raise DomainError(f"excluded indices {bad} outside 0..{self.k2 - 1}")

    @property
    def rank(self) -> int:
        return len(self.excluded)

    @property
    def keep(self) -> FloatArray:
        """Diagonal of W_j: one for included columns, zero for excluded."""
        w = np.ones(self.k2)
        w[list(self.excluded)] = 0.0
        return w

    def W(self) -> FloatArray:
        return np.diag(self.keep)

    def P(self) -> FloatArray:
        return np.eye(self.k2) - self.W()

    def R(self) -> FloatArray:
        """k2 × r selector with R^T R = I."""
        cols = sorted(self.excluded)
        R = np.zeros((self.k2, len(cols)))
        for j, h in enumerate(cols):
            R[h, j] = 1.0
        return R


# ── Kernel and estimator state ──


@dataclass(frozen=True, eq=False)
class KernelValues:
    """Per-observation building blocks of the NB2 score and Hessian (log link)."""

    theta: FloatArray
    mu: FloatArray
    sigma2: FloatArray
    v: FloatArray
    omega: FloatArray
    psi: FloatArray
    c: FloatArray
    kappa: FloatArray
    k: FloatArray
    g: float
    varrho: float


@dataclass(frozen=True, eq=False)
class MlFit:
    params: Nb2Params
    loglik: float
    converged: bool
    outer_iterations: int
    inner_iterations: int
    deviance: float = float("nan")
    failure_reason: str | None = None
    loglik_trace: tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class BarQuantities:
    """Everything evaluated at the starting values (beta_bar, alpha_bar)."""

    eta_bar: FloatArray
    mu_bar: FloatArray
    psi_bar: FloatArray
    v_bar: FloatArray
    c_bar: FloatArray
    u_bar: FloatArray
    y_bar: FloatArray
    y0_bar: FloatArray
    kappa_bar: FloatArray
    k_bar: FloatArray
    g_bar: float
    varrho_bar: float
    t_bar: float
    eps_bar: float
    q_bar: FloatArray
    denom: float
    alpha_bar: float
    X1_bar: FloatArray
    X2_bar: FloatArray

    @property
    def n(self) -> int:
        return int(self.mu_bar.shape[0])

    @property
    def sqrt_psi(self) -> FloatArray:
        return np.sqrt(self.psi_bar)

    @property
    def r(self) -> FloatArray:
        """Psi^{-1/2} q — direction of the rank-1 perturbation."""
        return self.q_bar / self.sqrt_psi

    @property
    def a(self) -> float:
        """Rank-1 coefficient g·eps."""
        return self.g_bar * self.eps_bar

    @property
    def w(self) -> FloatArray:
        """Working response y0 − t·eps·r shared by every one-step solution."""
        return self.y0_bar - self.t_bar * self.eps_bar * self.r


@dataclass(frozen=True, eq=False)
class TransformState:
    Delta1: FloatArray
    Delta2: FloatArray
    Xi: FloatArray
    Xi_half: FloatArray
    Xi_neg_half: FloatArray
    Z1: FloatArray
    Z2: FloatArray
    Z1_bar: FloatArray
    Z2_bar: FloatArray
    D_bar: FloatArray


@dataclass(frozen=True, eq=False)
class OneStepSolution:
    """Transformed-space one-step estimators of one submodel."""

    gamma1: FloatArray
    gamma2: FloatArray
    alpha: float


@dataclass(frozen=True, eq=False)
class UnrestrictedSolution:
    gamma1_tilde_u: FloatArray
    gamma2_tilde_u: FloatArray
    gamma1_tilde_r: FloatArray
    alpha_tilde_u: float


@dataclass(frozen=True, eq=False)
class WalsFit:
    gamma1_hat: FloatArray
    gamma2_hat: FloatArray
    w_diag: FloatArray
    gamma2_tilde_u: FloatArray
    gamma1_tilde_r: FloatArray
    alpha_hat: float
    beta1_hat: FloatArray
    beta2_hat: FloatArray
    prior: PriorSpec
    start: MlFit
    transforms: TransformState
    n: int
    names1: tuple[str, ...] = ()
    names2: tuple[str, ...] = ()
    start_override: bool = False

    @property
    def rho_hat(self) -> float:
        return math.exp(self.alpha_hat)

    @property
    def beta_hat(self) -> FloatArray:
        return np.concatenate([self.beta1_hat, self.beta2_hat])


@dataclass(frozen=True)
class PredictiveDistribution:
    mu: float
    rho: float

    def __post_init__(self) -> None:
        if not (self.mu > 0 and self.rho > 0):
            raise DomainError(f"predictive NB2 needs mu > 0 and rho > 0, got {self.mu}, {self.rho}")


# ── Reports ──


class ScoreReport(BaseModel):
    """Average scores over an evaluation set.

    Brier and spherical scores are bounded below by -1 only when the truncation
    covers every observed count; below that they are reported as computed.
    """

    rmse: float = Field(ge=0.0)
    log_score: float
    brier_score: float
    spherical_score: float = Field(lt=0.0)
    truncation: int = Field(ge=0)
    max_count: int = Field(default=0, ge=0)
    n: int = 0

    @model_validator(mode="after")
    def _bounded_when_covered(self) -> ScoreReport:
        if self.truncation >= self.max_count:
            floor = -1.0 - 1e-12
            if self.brier_score < floor or self.spherical_score < floor:
                raise ValueError(
                    f"scores below -1 at truncation {self.truncation} covering every count"
                )
        return self


class RunResult(BaseModel):
    scenario_id: int = 0
    run: int
    procedure: Procedure
    converged: bool
    rmse: float | None = None
    log: float | None = None
    brier: float | None = None
    spherical: float | None = None
    fit_millis: float | None = None
    failure_reason: str | None = None

    @model_validator(mode="after")
    def _metrics_iff_converged(self) -> RunResult:
        present = [getattr(self, m.value) is not None for m in Metric]
        if self.converged and not all(present):
            raise ValueError("a converged run needs every metric")
        if not self.converged and any(present):
            raise ValueError("a failed run carries no metrics")
        return self

    def metric(self, name: Metric) -> float | None:
        value: float | None = getattr(self, name.value)
        return value


__all__ = [
    "FloatArray",
    "PriorFamily",
    "Estimator",
    "Metric",
    "Procedure",
    "SIMULATION_PROCEDURES",
    "CV_PROCEDURES",
    "Nb2Params",
    "Dataset",
    "RestrictionMatrix",
    "KernelValues",
    "MlFit",
    "BarQuantities",
    "TransformState",
    "OneStepSolution",
    "UnrestrictedSolution",
    "WalsFit",
    "PredictiveDistribution",
    "ScoreReport",
    "RunResult",
]
