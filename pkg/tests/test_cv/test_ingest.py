"""Tests for typed CSV ingest and design assembly."""

import numpy as np
import pandas as pd
import pytest

from walsnb.config.schema import ColumnSchema, ColumnType, DataSchema, DesignSpec
from walsnb.cv import build_design, ingest_csv, term_values, unrestricted_spec
from walsnb.errors import DataError

SCHEMA = DataSchema(
    columns=[
        ColumnSchema(name="visits", type=ColumnType.INT),
        ColumnSchema(name="age", type=ColumnType.FLOAT),
        ColumnSchema(name="gender", type=ColumnType.BINARY, levels=["male", "female"]),
    ]
)


def _write(tmp_path, text):
    path = tmp_path / "data.csv"
    path.write_text(text)
    return path


class TestIngest:
    def test_reads_and_codes(self, tmp_path):
        path = _write(tmp_path, "visits,age,gender,extra\n1,0.19,female,x\n0,0.57, male ,y\n")
        table = ingest_csv(path, SCHEMA)
        assert list(table.columns) == ["visits", "age", "gender"]
        assert table["gender"].tolist() == [1.0, 0.0]
        assert table["age"].tolist() == [0.19, 0.57]
        assert table.dtypes.eq(np.float64).all()

    def test_unparseable_cell_names_row_and_column(self, tmp_path):
        path = _write(tmp_path, "visits,age,gender\n1,0.19,female\n0,old,male\n")
        with pytest.raises(DataError, match="row 2, column age") as excinfo:
            ingest_csv(path, SCHEMA)
        assert excinfo.value.row == 2
        assert excinfo.value.column == "age"

    def test_non_integer_count(self, tmp_path):
        path = _write(tmp_path, "visits,age,gender\n1.5,0.19,female\n")
        with pytest.raises(DataError, match="row 1, column visits.*not an integer"):
            ingest_csv(path, SCHEMA)

    def test_unknown_level(self, tmp_path):
        path = _write(tmp_path, "visits,age,gender\n1,0.19,female\n1,0.2,other\n")
        with pytest.raises(DataError, match="row 2, column gender"):
            ingest_csv(path, SCHEMA)

    def test_missing_cell_rejected(self, tmp_path):
        path = _write(tmp_path, "visits,age,gender\n1,0.19,female\n2,,male\n3,0.4,NA\n")
        with pytest.raises(DataError, match="row 2, column age.*missing"):
            ingest_csv(path, SCHEMA)

    def test_missing_rows_dropped_when_allowed(self, tmp_path):
        path = _write(tmp_path, "visits,age,gender\n1,0.19,female\n2,,male\n3,0.4,male\n")
        schema = SCHEMA.model_copy(update={"allow_missing": True})
        table = ingest_csv(path, schema)
        assert table["visits"].tolist() == [1.0, 3.0]

    def test_missing_column(self, tmp_path):
        path = _write(tmp_path, "visits,age\n1,0.19\n")
        with pytest.raises(DataError, match="gender") as excinfo:
            ingest_csv(path, SCHEMA)
        assert excinfo.value.column == "gender"

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ingest_csv(tmp_path / "nope.csv", SCHEMA)

    def test_empty_file(self, tmp_path):
        path = _write(tmp_path, "")
        with pytest.raises(DataError, match="cannot parse"):
            ingest_csv(path, SCHEMA)


class TestBuildDesign:
    @pytest.fixture
    def table(self):
        return pd.DataFrame(
            {"y": [0.0, 1.0, 4.0, 2.0, 3.0], "a": [1.0, 2.0, 3.0, 4.0, 5.0], "b": [0.0, 1.0, 0.0, 1.0, 1.0]}
        )

    def test_terms(self, table):
        np.testing.assert_array_equal(term_values(table, "(Intercept)"), np.ones(5))
        np.testing.assert_array_equal(term_values(table, "a:b"), [0.0, 2.0, 0.0, 4.0, 5.0])
        np.testing.assert_array_equal(term_values(table, "a^2"), [1.0, 4.0, 9.0, 16.0, 25.0])

    def test_blocks_follow_term_order(self, table):
        spec = DesignSpec(name="d", response="y", focus=["(Intercept)", "a"], auxiliary=["a^2", "a:b"])
        data = build_design(table, spec)
        assert data.names1 == ("(Intercept)", "a")
        assert data.names2 == ("a^2", "a:b")
        np.testing.assert_array_equal(data.X2[:, 0], table["a"] ** 2)
        np.testing.assert_array_equal(data.y, table["y"])

    def test_no_auxiliary(self, table):
        data = build_design(table, DesignSpec(name="d", response="y", focus=["(Intercept)", "b"]))
        assert data.k2 == 0

    def test_unknown_column(self, table):
        spec = DesignSpec(name="d", response="y", focus=["(Intercept)"], auxiliary=["c"])
        with pytest.raises(DataError, match="'c'"):
            build_design(table, spec)

    def test_unrestricted_spec(self):
        spec = DesignSpec(name="d", response="y", focus=["(Intercept)"], auxiliary=["a", "b"])
        full = unrestricted_spec(spec)
        assert full.focus == ["(Intercept)", "a", "b"]
        assert full.auxiliary == []
