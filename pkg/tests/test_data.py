"""Dataset containers, the LIT text format, and the CSV/IDX loaders."""

import gzip
import struct

import numpy as np
import pytest

from ethereal_tm import (LiteralMatrix, RawDataset, append_complements,
                         load_csv, load_idx, read_lit, write_lit)
from support import make_literal_matrix


class TestContainers:
    def test_raw_dataset_infers_classes(self):
        raw = RawDataset(np.zeros((3, 2)), np.array([0, 2, 1]))
        assert raw.n_classes == 3
        assert raw.n_samples == 3
        assert raw.n_features == 2

    def test_raw_dataset_rejects_bad_labels(self):
        with pytest.raises(ValueError):
            RawDataset(np.zeros((2, 2)), np.array([0, 3]), n_classes=2)
        with pytest.raises(ValueError):
            RawDataset(np.zeros((2, 2)), np.array([0, -1]))

    def test_raw_dataset_rejects_misshapen(self):
        with pytest.raises(ValueError):
            RawDataset(np.zeros(4), np.array([0]))
        with pytest.raises(ValueError):
            RawDataset(np.zeros((2, 2)), np.array([0, 1, 0]))

    def test_append_complements(self):
        bits = np.array([[1, 0], [0, 0]], dtype=np.uint8)
        full = append_complements(bits)
        assert full.tolist() == [[1, 0, 0, 1], [0, 0, 1, 1]]

    def test_literal_matrix_validates_pairing(self, rng):
        matrix = make_literal_matrix(rng, 10, 5, 3)
        matrix.validate()
        matrix.bits[0, 7] ^= 1
        with pytest.raises(ValueError, match="complement"):
            matrix.validate()

    def test_literal_matrix_rejects_odd_width(self):
        with pytest.raises(ValueError, match="even"):
            LiteralMatrix(np.zeros((2, 3), dtype=np.uint8), np.zeros(2, dtype=np.int64))


class TestLitFormat:
    def test_roundtrip(self, rng, tmp_path):
        matrix = make_literal_matrix(rng, 17, 6, 4)
        path = tmp_path / "m.lit"
        write_lit(matrix, path)
        back = read_lit(path)
        assert np.array_equal(back.bits, matrix.bits)
        assert np.array_equal(back.labels, matrix.labels)
        assert back.n_classes == matrix.n_classes

    def test_header_contents(self, rng, tmp_path):
        matrix = make_literal_matrix(rng, 5, 3, 2)
        path = tmp_path / "m.lit"
        write_lit(matrix, path)
        assert path.read_text().splitlines()[0] == "LITv1 5 6 2"

    def test_write_is_deterministic(self, rng, tmp_path):
        matrix = make_literal_matrix(rng, 8, 4, 2)
        a, b = tmp_path / "a.lit", tmp_path / "b.lit"
        write_lit(matrix, a)
        write_lit(matrix, b)
        assert a.read_bytes() == b.read_bytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.lit"
        path.write_text("NOPE 1 2 1\n01 0\n")
        with pytest.raises(ValueError, match="not a LITv1"):
            read_lit(path)

    def test_truncated(self, rng, tmp_path):
        matrix = make_literal_matrix(rng, 4, 3, 2)
        path = tmp_path / "m.lit"
        write_lit(matrix, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(ValueError, match="truncated"):
            read_lit(path)

    def test_bad_characters(self, tmp_path):
        path = tmp_path / "bad.lit"
        path.write_text("LITv1 1 2 1\n0x 0\n")
        with pytest.raises(ValueError, match="other than 0/1"):
            read_lit(path)

    def test_wrong_row_width(self, tmp_path):
        path = tmp_path / "bad.lit"
        path.write_text("LITv1 1 4 1\n01 0\n")
        with pytest.raises(ValueError, match="expected 4"):
            read_lit(path)

    def test_reader_checks_complements(self, tmp_path):
        path = tmp_path / "bad.lit"
        path.write_text("LITv1 1 2 1\n00 0\n")
        with pytest.raises(ValueError, match="complement"):
            read_lit(path)


class TestCsvLoader:
    def test_loads_features_and_labels(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1.5,2.0,0\n-3.25,4.0,1\n")
        raw = load_csv(path)
        np.testing.assert_allclose(raw.samples, [[1.5, 2.0], [-3.25, 4.0]])
        assert raw.labels.tolist() == [0, 1]

    def test_header_skipped_on_flag(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b,label\n1,2,0\n")
        raw = load_csv(path, has_header=True)
        assert raw.n_samples == 1
        with pytest.raises(ValueError, match=":1:"):
            load_csv(path)

    def test_reports_line_number(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1,2,0\n1,oops,1\n")
        with pytest.raises(ValueError, match=":2:"):
            load_csv(path)

    def test_inconsistent_columns(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1,2,0\n1,2,3,1\n")
        with pytest.raises(ValueError, match="inconsistent"):
            load_csv(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="no data rows"):
            load_csv(path)


def _idx_image_bytes(pixels):
    n, rows, cols = pixels.shape
    return struct.pack(">IIII", 0x803, n, rows, cols) + pixels.astype(np.uint8).tobytes()


def _idx_label_bytes(labels):
    return struct.pack(">II", 0x801, len(labels)) + bytes(labels)


class TestIdxLoader:
    def test_plain_and_gzipped(self, tmp_path):
        pixels = np.arange(2 * 2 * 3, dtype=np.uint8).reshape(2, 2, 3)
        labels = [7, 1]
        plain_img = tmp_path / "img-idx3-ubyte"
        plain_img.write_bytes(_idx_image_bytes(pixels))
        gz_lab = tmp_path / "lab-idx1-ubyte.gz"
        gz_lab.write_bytes(gzip.compress(_idx_label_bytes(labels)))
        raw = load_idx(plain_img, gz_lab)
        assert raw.samples.shape == (2, 6)
        np.testing.assert_allclose(raw.samples[0], np.arange(6, dtype=np.float64))
        assert raw.labels.tolist() == labels

    def test_gzip_detected_without_suffix(self, tmp_path):
        pixels = np.zeros((1, 2, 2), dtype=np.uint8)
        img = tmp_path / "img-idx3-ubyte"
        img.write_bytes(gzip.compress(_idx_image_bytes(pixels)))
        lab = tmp_path / "lab-idx1-ubyte"
        lab.write_bytes(_idx_label_bytes([3]))
        raw = load_idx(img, lab)
        assert raw.samples.shape == (1, 4)

    def test_bad_magic(self, tmp_path):
        img = tmp_path / "img"
        img.write_bytes(struct.pack(">IIII", 0x999, 1, 1, 1) + b"\x00")
        lab = tmp_path / "lab"
        lab.write_bytes(_idx_label_bytes([0]))
        with pytest.raises(ValueError, match="magic"):
            load_idx(img, lab)

    def test_truncated_payload(self, tmp_path):
        img = tmp_path / "img"
        img.write_bytes(struct.pack(">IIII", 0x803, 2, 2, 2) + b"\x00" * 7)
        lab = tmp_path / "lab"
        lab.write_bytes(_idx_label_bytes([0, 1]))
        with pytest.raises(ValueError, match="truncated"):
            load_idx(img, lab)

    def test_count_mismatch(self, tmp_path):
        img = tmp_path / "img"
        img.write_bytes(_idx_image_bytes(np.zeros((2, 1, 1), dtype=np.uint8)))
        lab = tmp_path / "lab"
        lab.write_bytes(_idx_label_bytes([0]))
        with pytest.raises(ValueError, match="counts differ"):
            load_idx(img, lab)
