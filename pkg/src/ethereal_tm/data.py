"""Dataset containers and file formats: raw CSV/IDX ingestion and the LIT literal-matrix format."""
from __future__ import annotations

import csv
import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class RawDataset:
    """Real-valued samples with integer class labels.

    samples: (n_samples, n_features) float64
    labels:  (n_samples,) int64, values in [0, n_classes)
    """

    samples: np.ndarray
    labels: np.ndarray
    n_classes: int = 0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.samples.ndim != 2:
            raise ValueError(f"samples must be 2-D, got shape {self.samples.shape}")
        if self.labels.ndim != 1 or self.labels.shape[0] != self.samples.shape[0]:
            raise ValueError("labels must be 1-D and aligned with samples")
        if self.n_classes == 0:
            self.n_classes = int(self.labels.max()) + 1 if self.labels.size else 0
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ValueError("labels must lie in [0, n_classes)")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_features(self) -> int:
        return self.samples.shape[1]


@dataclass
class LiteralMatrix:
    """Boolean literal rows: original feature bits followed by their complements.

    bits:   (n_samples, 2F) uint8 where column k+F is the complement of column k
    labels: (n_samples,) int64
    """

    bits: np.ndarray
    labels: np.ndarray
    n_classes: int = 0

    def __post_init__(self):
        self.bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.bits.ndim != 2:
            raise ValueError(f"bits must be 2-D, got shape {self.bits.shape}")
        if self.bits.shape[1] % 2 != 0:
            raise ValueError("literal count must be even (feature bits plus complements)")
        if self.labels.shape != (self.bits.shape[0],):
            raise ValueError("labels must be 1-D and aligned with bits")
        if self.n_classes == 0:
            self.n_classes = int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def n_samples(self) -> int:
        return self.bits.shape[0]

    @property
    def n_literals(self) -> int:
        return self.bits.shape[1]

    def validate(self) -> None:
        """Check the complement-pairing invariant over every row."""
        half = self.n_literals // 2
        if not np.array_equal(self.bits[:, half:], 1 - self.bits[:, :half]):
            raise ValueError("complement pairing violated: bit[k+F] != NOT bit[k]")
        if np.any((self.bits != 0) & (self.bits != 1)):
            raise ValueError("literal bits must be 0 or 1")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ValueError("labels must lie in [0, n_classes)")


def append_complements(feature_bits: np.ndarray) -> np.ndarray:
    """Append the negated copy of each feature column, doubling the width."""
    feature_bits = np.asarray(feature_bits, dtype=np.uint8)
    return np.concatenate([feature_bits, 1 - feature_bits], axis=1)


# ---------------------------------------------------------------------------
# LIT file format: "LITv1 <n_samples> <n_literals> <n_classes>" header line,
# then one line per sample of 0/1 characters, a space, and the label.
# ---------------------------------------------------------------------------

LIT_MAGIC = "LITv1"


def write_lit(matrix: LiteralMatrix, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{LIT_MAGIC} {matrix.n_samples} {matrix.n_literals} {matrix.n_classes}\n")
        ascii_rows = (matrix.bits + ord("0")).astype(np.uint8)
        for row, label in zip(ascii_rows, matrix.labels):
            fh.write(row.tobytes().decode("ascii"))
            fh.write(f" {label}\n")


def read_lit(path: str | Path) -> LiteralMatrix:
    path = Path(path)
    with path.open("r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != LIT_MAGIC:
            raise ValueError(f"{path}: not a {LIT_MAGIC} file")
        try:
            n_samples, n_literals, n_classes = (int(v) for v in header[1:])
        except ValueError:
            raise ValueError(f"{path}: malformed {LIT_MAGIC} header") from None
        bits = np.empty((n_samples, n_literals), dtype=np.uint8)
        labels = np.empty(n_samples, dtype=np.int64)
        for i in range(n_samples):
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: truncated after {i} of {n_samples} samples")
            try:
                row, label = line.split()
            except ValueError:
                raise ValueError(f"{path}: sample line {i} malformed") from None
            if len(row) != n_literals:
                raise ValueError(f"{path}: sample {i} has {len(row)} literals, expected {n_literals}")
            arr = np.frombuffer(row.encode("ascii"), dtype=np.uint8) - ord("0")
            if np.any(arr > 1):
                raise ValueError(f"{path}: sample {i} contains characters other than 0/1")
            bits[i] = arr
            labels[i] = int(label)
    matrix = LiteralMatrix(bits, labels, n_classes=n_classes)
    matrix.validate()
    return matrix


# ---------------------------------------------------------------------------
# Raw inputs: CSV with the label in the last column, and IDX image archives.
# ---------------------------------------------------------------------------


def load_csv(path: str | Path, has_header: bool = False) -> RawDataset:
    """Load a CSV where the last column is an integer label and the rest are real features."""
    path = Path(path)
    rows: list[list[float]] = []
    labels: list[int] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, record in enumerate(reader, start=1):
            if has_header and lineno == 1:
                continue
            if not record:
                continue
            try:
                values = [float(v) for v in record[:-1]]
                label = int(record[-1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value") from None
            if rows and len(values) != len(rows[0]):
                raise ValueError(f"{path}:{lineno}: inconsistent column count")
            rows.append(values)
            labels.append(label)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return RawDataset(np.array(rows), np.array(labels))


_IDX_IMAGE_MAGIC = 0x00000803
_IDX_LABEL_MAGIC = 0x00000801


def _idx_open(path: Path):
    raw = path.open("rb")
    if path.suffix == ".gz":
        return gzip.open(raw)
    head = raw.read(2)
    raw.seek(0)
    if head == b"\x1f\x8b":
        return gzip.open(raw)
    return raw


def load_idx_images(path: str | Path) -> np.ndarray:
    """Read an IDX image archive (gzipped or plain) as (n, rows*cols) float64 in [0, 255]."""
    path = Path(path)
    with _idx_open(path) as fh:
        magic, count, rows, cols = struct.unpack(">IIII", fh.read(16))
        if magic != _IDX_IMAGE_MAGIC:
            raise ValueError(f"{path}: bad IDX image magic 0x{magic:08x}")
        data = fh.read(count * rows * cols)
    if len(data) != count * rows * cols:
        raise ValueError(f"{path}: truncated IDX image payload")
    pixels = np.frombuffer(data, dtype=np.uint8).reshape(count, rows * cols)
    return pixels.astype(np.float64)


def load_idx_labels(path: str | Path) -> np.ndarray:
    path = Path(path)
    with _idx_open(path) as fh:
        magic, count = struct.unpack(">II", fh.read(8))
        if magic != _IDX_LABEL_MAGIC:
            raise ValueError(f"{path}: bad IDX label magic 0x{magic:08x}")
        data = fh.read(count)
    if len(data) != count:
        raise ValueError(f"{path}: truncated IDX label payload")
    return np.frombuffer(data, dtype=np.uint8).astype(np.int64)


def load_idx(images_path: str | Path, labels_path: str | Path) -> RawDataset:
    images = load_idx_images(images_path)
    labels = load_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise ValueError("IDX image/label sample counts differ")
    return RawDataset(images, labels)
