import numpy as np
import pandas as pd
import pytest

from walsnb.config.schema import MlOptions, PriorSpec
from walsnb.kernels import sample_nb2
from walsnb.ml import fit_ml
from walsnb.types import Dataset, PriorFamily

TRUE_BETA = np.array([0.5, 0.3, 0.1, -0.05, 0.0])
TRUE_RHO = 2.0


def make_count_table(n: int, seed: int) -> pd.DataFrame:
    """Counts y with four Gaussian regressors and one 0/1 indicator."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 4))
    g = (rng.random(n) < 0.4).astype(np.float64)
    mu = np.exp(TRUE_BETA[0] + x @ TRUE_BETA[1:] + 0.2 * g)
    y = sample_nb2(mu, TRUE_RHO, rng)
    return pd.DataFrame(
        {"y": y.astype(int), "x1": x[:, 0], "x2": x[:, 1], "x3": x[:, 2], "x4": x[:, 3], "g": g.astype(int)}
    )


@pytest.fixture(scope="session")
def count_table():
    return make_count_table(400, seed=11)


@pytest.fixture(scope="session")
def nb2_dataset(count_table):
    """Intercept and x1 as focus, x2..x4 as auxiliary."""
    n = len(count_table)
    return Dataset(
        y=count_table["y"].to_numpy(dtype=float),
        X1=np.column_stack([np.ones(n), count_table["x1"]]),
        X2=count_table[["x2", "x3", "x4"]].to_numpy(),
        names1=("(Intercept)", "x1"),
        names2=("x2", "x3", "x4"),
    )


@pytest.fixture(scope="session")
def tight_ml():
    return MlOptions(tol=1e-10)


@pytest.fixture(scope="session")
def ml_start(nb2_dataset, tight_ml):
    """Unrestricted ML fit used as the WALS starting point."""
    return fit_ml(nb2_dataset.as_unrestricted(), tight_ml)


@pytest.fixture
def laplace_prior():
    return PriorSpec.default(PriorFamily.LAPLACE)


@pytest.fixture
def weibull_prior():
    return PriorSpec.default(PriorFamily.WEIBULL)


@pytest.fixture
def count_csv(tmp_path, count_table):
    path = tmp_path / "counts.csv"
    count_table.to_csv(path, index=False)
    return path


@pytest.fixture
def design_yaml(tmp_path):
    """Write a minimal design YAML and return its path."""
    content = """
design:
  name: small
  response: y
  focus: ["(Intercept)", x1]
  auxiliary: [x2, x3, "x1:x2"]
"""
    path = tmp_path / "design.yaml"
    path.write_text(content)
    return path


@pytest.fixture
def tiny_experiment_yaml(tmp_path):
    """Write a two-run, one-scenario experiment YAML and return its path."""
    content = """
experiment:
  name: tiny
  version: "1.0"
  description: "Test experiment"
  seed: 5
  runs: 2
  n_eval: 300
  truncation: 60
  grid:
    n: [150]
    k1: [1]
    k2: [3]
    rho: [1.0]
    b: [0.0]
  procedures: [walsNB-aux, ML-U, oracle]
  prior:
    family: laplace
    hyperparameters:
      c: 0.6931471805599453
"""
    path = tmp_path / "tiny.yaml"
    path.write_text(content)
    return path


@pytest.fixture
def cv_yaml(tmp_path, count_csv):
    """Write a cross-validation YAML pointing at count_csv and return its path."""
    content = f"""
cv:
  name: small-cv
  data: {count_csv.name}
  folds: 4
  seed: 3
  grid: [100, 250]
  schema:
    columns:
      - {{name: y, type: int}}
      - {{name: x1, type: float}}
      - {{name: x2, type: float}}
      - {{name: x3, type: float}}
      - {{name: g, type: binary}}
  designs:
    - name: wals
      response: y
      focus: ["(Intercept)", x1]
      auxiliary: [x2, x3, g]
    - name: ml
      response: y
      focus: ["(Intercept)", x1, x2, x3, g]
  procedures:
    - {{name: walsNB, estimator: wals, design: wals}}
    - {{name: ML, estimator: ml, design: ml}}
"""
    path = tmp_path / "cv.yaml"
    path.write_text(content)
    return path
