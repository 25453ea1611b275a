"""
Unit tests for file access: coordinate JSON, dense and dataset CSV,
inline vectors and atomic writes.
"""

import numpy as np
import orjson
import pytest

from ubmat.core.errors import InputFormatError
from ubmat.repo import (
    atomic_write_text,
    dump_json,
    format_dense_csv,
    parse_dataset,
    parse_dense_csv,
    parse_labels,
    parse_vector,
    read_coordinates,
    read_dataset,
    read_dense,
    read_dense_as_ub,
    write_coordinates,
    write_dense,
)
from ubmat.service.ub_matrix import (
    NonSymmetricInputError,
    PartitionVector,
    StructureViolationError,
    ub_expand,
)
from ubmat.tests.conftest import EXAMPLES_DIR


class TestCoordinateFiles:
    """Tests for coordinate JSON."""

    def test_round_trip(self, tmp_path, worked_instance):
        """Test that coordinates survive a write and a read."""
        path = tmp_path / "x.json"
        write_coordinates(path, worked_instance)
        assert read_coordinates(path) == worked_instance

    def test_shipped_example(self, worked_instance):
        """Test the worked instance shipped with the repository."""
        assert read_coordinates(EXAMPLES_DIR / "worked_instance.json") == worked_instance

    def test_invalid_json(self, tmp_path):
        """Test that malformed JSON reports the file."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(InputFormatError) as excinfo:
            read_coordinates(path)
        assert excinfo.value.path == str(path)

    def test_shape_mismatch(self, tmp_path):
        """Test that a and the partition must agree."""
        path = tmp_path / "bad.json"
        path.write_bytes(orjson.dumps({"partition": [2, 3], "a": [1.0], "b": [[0.0, 0.0], [0.0, 0.0]]}))
        with pytest.raises(InputFormatError):
            read_coordinates(path)

    def test_asymmetric_b(self, tmp_path):
        """Test that an asymmetric b is rejected for symmetric coordinates."""
        path = tmp_path / "asym.json"
        path.write_bytes(orjson.dumps({"partition": [2, 2], "a": [1.0, 1.0], "b": [[0.0, 0.5], [0.1, 0.0]]}))
        with pytest.raises(NonSymmetricInputError):
            read_coordinates(path)

    def test_missing_file(self, tmp_path):
        """Test that a missing file is an input error."""
        with pytest.raises(InputFormatError):
            read_coordinates(tmp_path / "nope.json")


class TestDenseFiles:
    """Tests for dense CSV."""

    def test_round_trip_is_exact(self, tmp_path, sigma3):
        """Test that repr floats round-trip bit for bit."""
        dense = ub_expand(sigma3)
        path = tmp_path / "dense.csv"
        write_dense(path, dense)
        np.testing.assert_array_equal(read_dense(path), dense)

    def test_compress_on_read(self, tmp_path, sigma3):
        """Test reading a dense UB matrix straight into coordinates."""
        path = tmp_path / "dense.csv"
        write_dense(path, ub_expand(sigma3))
        x = read_dense_as_ub(path, sigma3.partition)
        np.testing.assert_allclose(x.a, sigma3.a, atol=1e-12)

    def test_structure_violation_on_read(self, tmp_path):
        """Test that a non-UB dense matrix is rejected."""
        path = tmp_path / "dense.csv"
        write_dense(path, np.array([[2.0, 0.5, 0.1], [0.5, 2.0, 0.1], [0.1, 0.1, 1.0]]) + np.diag([0.0, 0.3, 0.0]))
        with pytest.raises(StructureViolationError):
            read_dense_as_ub(path, PartitionVector((3,)))

    def test_bad_cell_position(self):
        """Test that a bad number reports line and column."""
        with pytest.raises(InputFormatError) as excinfo:
            parse_dense_csv("1,2\n3,x\n", "m.csv")
        assert (excinfo.value.line, excinfo.value.column) == (2, 2)
        assert "m.csv:2:2" in str(excinfo.value)

    def test_width_error_uses_source_line(self):
        """Test that skipped blank lines do not shift the reported line."""
        with pytest.raises(InputFormatError) as excinfo:
            parse_dense_csv("1,2\n\n3\n", "m.csv")
        assert excinfo.value.line == 3
        assert "m.csv:3" in str(excinfo.value)

    def test_not_square(self):
        """Test that a non-square matrix is rejected."""
        with pytest.raises(InputFormatError):
            parse_dense_csv("1,2\n3,4\n5,6\n")

    def test_format(self):
        """Test the CSV layout."""
        assert format_dense_csv(np.array([[1.0, 0.5], [0.5, 1.0]])) == "1.0,0.5\n0.5,1.0\n"


class TestDatasets:
    """Tests for dataset CSV and labels."""

    def test_plain_rows(self):
        """Test rows without header or labels."""
        rows, labels = parse_dataset("1,2,3,4\n5,6,7,8\n", PartitionVector((2, 2)))
        assert rows.shape == (2, 4)
        assert labels is None

    def test_header_and_named_label_column(self):
        """Test a named label column after a header row."""
        text = "x1,x2,group,x3,x4\n1,2,a,3,4\n5,6,b,7,8\n"
        rows, labels = parse_dataset(text, PartitionVector((2, 2)), header=True, label_column="group")
        np.testing.assert_array_equal(rows, [[1, 2, 3, 4], [5, 6, 7, 8]])
        assert labels.tolist() == ["a", "b"]

    def test_numbered_label_column(self):
        """Test a 1-based label column without a header."""
        rows, labels = parse_dataset("1,2,3,4,g1\n5,6,7,8,g2\n", PartitionVector((2, 2)), label_column="5")
        assert labels.tolist() == ["g1", "g2"]
        assert rows[1, 3] == 8.0

    def test_wrong_width(self):
        """Test that a short row reports its line."""
        with pytest.raises(InputFormatError) as excinfo:
            parse_dataset("1,2,3,4\n5,6,7\n", PartitionVector((2, 2)))
        assert excinfo.value.line == 2

    def test_labels_file(self, tmp_path):
        """Test a separate labels file."""
        data = tmp_path / "d.csv"
        data.write_text("1,2,3,4\n5,6,7,8\n9,1,2,3\n")
        labels = tmp_path / "l.csv"
        labels.write_text("a\nb\na\n")
        d = read_dataset(data, PartitionVector((2, 2)), labels_path=labels)
        assert d.group_sizes == (2, 1)

    def test_label_count_checked(self, tmp_path):
        """Test that labels must match the row count."""
        data = tmp_path / "d.csv"
        data.write_text("1,2,3,4\n5,6,7,8\n")
        labels = tmp_path / "l.csv"
        labels.write_text("a\n")
        with pytest.raises(InputFormatError):
            read_dataset(data, PartitionVector((2, 2)), labels_path=labels)

    def test_labels_one_column(self):
        """Test that a label file has a single column."""
        with pytest.raises(InputFormatError):
            parse_labels("a,b\n")


class TestVectors:
    """Tests for inline and file vectors."""

    def test_inline(self):
        """Test an inline list."""
        np.testing.assert_array_equal(parse_vector("0,0.5,1", 3), [0.0, 0.5, 1.0])

    def test_scalar_repeats(self):
        """Test that one number fills the vector."""
        np.testing.assert_array_equal(parse_vector("2", 4), [2.0, 2.0, 2.0, 2.0])

    def test_file(self, tmp_path):
        """Test a one-row CSV file."""
        path = tmp_path / "v.csv"
        path.write_text("1,2,3\n")
        np.testing.assert_array_equal(parse_vector(str(path), 3), [1.0, 2.0, 3.0])

    def test_wrong_length(self):
        """Test that a wrong length is rejected."""
        with pytest.raises(InputFormatError):
            parse_vector("1,2", 3)


class TestJson:
    """Tests for deterministic JSON and atomic writes."""

    def test_sorted_keys_and_newline(self):
        """Test that key order does not depend on insertion order."""
        assert dump_json({"b": 1, "a": 2}) == dump_json({"a": 2, "b": 1})
        assert dump_json({"a": 1}).endswith(b"\n")

    def test_numpy_values(self):
        """Test that numpy arrays serialize."""
        assert orjson.loads(dump_json({"v": np.arange(3.0)})) == {"v": [0.0, 1.0, 2.0]}

    def test_atomic_write_leaves_no_temp_files(self, tmp_path):
        """Test that only the target file remains."""
        target = tmp_path / "out" / "result.txt"
        atomic_write_text(target, "hello\n")
        atomic_write_text(target, "again\n")
        assert target.read_text() == "again\n"
        assert [p.name for p in target.parent.iterdir()] == ["result.txt"]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
