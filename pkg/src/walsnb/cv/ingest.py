"""Typed CSV ingest with row/column error locations."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from walsnb.config.schema import ColumnSchema, ColumnType, DataSchema
from walsnb.errors import DataError

logger = logging.getLogger(__name__)

_MISSING = ["", "NA", "NaN", "nan"]


def _cell_error(series: pd.Series, bad: pd.Series, column: str, problem: str) -> DataError:
    """Error naming the first offending cell; rows are 1-based, header excluded."""
    pos = int(np.flatnonzero(bad.to_numpy())[0])
    row = int(series.index[pos]) + 1
    return DataError(
        f"row {row}, column {column}: {series.iloc[pos]!r} {problem}", row=row, column=column
    )


def _coerce(series: pd.Series, col: ColumnSchema) -> pd.Series:
    if col.type is ColumnType.BINARY:
        levels = col.levels or ["0", "1"]
        text = series.str.strip()
        bad = ~text.isin(levels)
        if bad.any():
            raise _cell_error(series, bad, col.name, f"is not one of {levels}")
        return (text == levels[1]).astype(np.float64)

    numeric = pd.to_numeric(series.str.strip(), errors="coerce")
    bad = numeric.isna()
    if bad.any():
        raise _cell_error(series, bad, col.name, f"cannot be parsed as {col.type}")
    if col.type is ColumnType.INT:
        fractional = numeric != np.floor(numeric)
        if fractional.any():
            raise _cell_error(series, fractional, col.name, "is not an integer")
    return numeric.astype(np.float64)


def ingest_csv(path: str | Path, schema: DataSchema) -> pd.DataFrame:
    """Read the declared columns of a CSV as float64.

    Binary columns are coded 0/1 through their declared levels. Missing
    cells are rejected unless ``schema.allow_missing``, in which case
    incomplete rows are dropped.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Data file not found: {path}")
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataError(f"cannot parse {path}: {e}") from e

    raw.columns = [str(c).strip() for c in raw.columns]
    missing_cols = [c.name for c in schema.columns if c.name not in raw.columns]
    if missing_cols:
        raise DataError(f"{path} lacks declared columns {missing_cols}", column=missing_cols[0])

    table = raw[[c.name for c in schema.columns]]
    blank = table.apply(lambda s: s.str.strip().isin(_MISSING))
    if blank.to_numpy().any():
        if not schema.allow_missing:
            name = str(blank.columns[blank.any(axis=0)][0])
            raise _cell_error(table[name], blank[name], name, "is missing")
        keep = ~blank.any(axis=1)
        logger.warning("Dropping %d incomplete rows from %s", int((~keep).sum()), path)
        table = table[keep]

    out = pd.DataFrame({c.name: _coerce(table[c.name], c) for c in schema.columns})
    logger.info("Read %d rows × %d columns from %s", len(out), out.shape[1], path)
    return out.reset_index(drop=True)
