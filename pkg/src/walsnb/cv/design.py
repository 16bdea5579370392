"""Assemble focus / auxiliary design matrices from a DesignSpec."""

from __future__ import annotations

import numpy as np
import pandas as pd

from walsnb.config.schema import DesignSpec, parse_term
from walsnb.errors import DataError
from walsnb.types import Dataset, FloatArray


def _column(table: pd.DataFrame, name: str) -> FloatArray:
    if name not in table.columns:
        raise DataError(f"design references unknown column {name!r}", column=name)
    return table[name].to_numpy(dtype=np.float64)


def term_values(table: pd.DataFrame, term: str) -> FloatArray:
    """Values of one derived column: constant, main effect, interaction or power."""
    kind, cols, power = parse_term(term)
    if kind == "intercept":
        return np.ones(len(table))
    if kind == "interaction":
        return _column(table, cols[0]) * _column(table, cols[1])
    return _column(table, cols[0]) ** power


def _block(table: pd.DataFrame, terms: list[str]) -> FloatArray:
    if not terms:
        return np.empty((len(table), 0))
    return np.column_stack([term_values(table, t) for t in terms])


def build_design(table: pd.DataFrame, spec: DesignSpec) -> Dataset:
    """Dataset with columns in the order the design lists its terms."""
    return Dataset(
        y=_column(table, spec.response),
        X1=_block(table, spec.focus),
        X2=_block(table, spec.auxiliary),
        names1=tuple(spec.focus),
        names2=tuple(spec.auxiliary),
    )


def unrestricted_spec(spec: DesignSpec) -> DesignSpec:
    """Same columns, all treated as focus — the ML model a WALS start comes from."""
    return DesignSpec(
        name=f"{spec.name}-unrestricted",
        response=spec.response,
        focus=spec.focus + spec.auxiliary,
        auxiliary=[],
    )
