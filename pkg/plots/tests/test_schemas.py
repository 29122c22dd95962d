import pytest

from pauliplots.schemas import SCHEMAS, SchemaError, read_csv


class TestReadCsv:
    def test_histogram_rows_typed(self, histogram_csv):
        rows = read_csv(histogram_csv, SCHEMAS["histogram"])
        assert rows[0] == {"kind": "weight", "bin": 1, "count": 2, "surviving": 1}

    def test_nullable_bound(self, sweep_csv):
        rows = read_csv(sweep_csv, SCHEMAS["sweep"])
        assert any(r["bound"] is None for r in rows)
        assert any(isinstance(r["bound"], float) for r in rows)

    def test_missing_column_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("kind,bin,count\nweight,1,2\n")  # 'surviving' dropped
        with pytest.raises(SchemaError, match="surviving"):
            read_csv(path, SCHEMAS["histogram"])

    def test_wrong_type_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("kind,bin,count,surviving\nweight,one,2,1\n")
        with pytest.raises(SchemaError, match="bin"):
            read_csv(path, SCHEMAS["histogram"])

    def test_empty_required_cell_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("step,energy,grad_norm\n1,,0.5\n")
        with pytest.raises(SchemaError, match="energy"):
            read_csv(path, SCHEMAS["trace"])

    def test_no_rows_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("step,energy,grad_norm\n")
        with pytest.raises(SchemaError, match="no data rows"):
            read_csv(path, SCHEMAS["trace"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="no such"):
            read_csv(tmp_path / "nope.csv", SCHEMAS["trace"])

    def test_extra_columns_tolerated(self, tmp_path):
        # the primary CLI may append columns; readers only require their own
        path = tmp_path / "extra.csv"
        path.write_text("step,energy,grad_norm,wall\n1,-2.0,0.5,0.01\n")
        rows = read_csv(path, SCHEMAS["trace"])
        assert rows[0]["energy"] == -2.0
