"""Shared builders for the test suite: random banks, synthetic datasets, and
locators for the optional real-data reproductions."""

from pathlib import Path

import numpy as np

from ethereal_tm import ClauseBank, LiteralMatrix, RawDataset

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def make_random_bank(rng, n_classes, clauses_per_class, n_literals, n_states):
    """Bank with states uniform over the full [1, 2N] range."""
    states = rng.integers(1, 2 * n_states + 1,
                          size=(n_classes, clauses_per_class, n_literals))
    return ClauseBank(states.astype(np.int16), n_states)


def make_bank_from_states(states, n_states):
    return ClauseBank(np.asarray(states, dtype=np.int16), n_states)


def random_literals(rng, n_literals):
    return rng.integers(0, 2, size=n_literals).astype(np.uint8)


def make_blobs(seed, n_per_class=150, n_features=4, n_classes=2, centers_gap=2.0):
    """Gaussian blobs, one center per class, shuffled."""
    rng = np.random.default_rng(seed)
    samples = []
    labels = []
    for c in range(n_classes):
        center = c * centers_gap
        samples.append(rng.normal(center, 1.0, size=(n_per_class, n_features)))
        labels.append(np.full(n_per_class, c, dtype=np.int64))
    x = np.concatenate(samples)
    y = np.concatenate(labels)
    order = rng.permutation(x.shape[0])
    return RawDataset(x[order], y[order])


def make_literal_blobs(seed, n_bins=4, **kwargs):
    """Blobs booleanized with thermometer bins fit on the train split, 80/20."""
    from ethereal_tm import booleanize, fit_quantile_bins

    raw = make_blobs(seed, **kwargs)
    cut = int(0.8 * raw.n_samples)
    train_raw = RawDataset(raw.samples[:cut], raw.labels[:cut], raw.n_classes)
    test_raw = RawDataset(raw.samples[cut:], raw.labels[cut:], raw.n_classes)
    spec = fit_quantile_bins(train_raw, n_bins)
    return booleanize(train_raw, spec), booleanize(test_raw, spec)


def make_literal_matrix(rng, n_samples, n_feature_bits, n_classes):
    """Random complement-paired literal matrix."""
    feature_bits = rng.integers(0, 2, size=(n_samples, n_feature_bits)).astype(np.uint8)
    bits = np.concatenate([feature_bits, 1 - feature_bits], axis=1)
    labels = rng.integers(0, n_classes, size=n_samples).astype(np.int64)
    return LiteralMatrix(bits=bits, labels=labels, n_classes=n_classes)


def write_blob_csv(path, seed, **kwargs):
    """Raw blob dataset as a label-last CSV for the booleanize command."""
    raw = make_blobs(seed, **kwargs)
    lines = []
    for row, label in zip(raw.samples, raw.labels):
        lines.append(",".join(repr(float(v)) for v in row) + f",{label}")
    Path(path).write_text("\n".join(lines) + "\n")
    return raw


def _first_existing(*candidates):
    for path in candidates:
        if path.exists():
            return path
    return None


def mnist_paths():
    """The four MNIST IDX files under data/mnist, gzipped or plain; None if
    any is missing."""
    base = DATA_DIR / "mnist"
    names = ("train-images-idx3-ubyte", "train-labels-idx1-ubyte",
             "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte")
    found = [_first_existing(base / f"{n}.gz", base / n) for n in names]
    return None if any(p is None for p in found) else found


def mammographic_path():
    """The UCI mammographic-mass data file; None if missing."""
    return _first_existing(DATA_DIR / "mammographic_masses.data",
                           DATA_DIR / "mammographic" / "mammographic_masses.data")


def load_mammographic(path, seed=313):
    """Rows with missing fields dropped; deterministic stratified 80/20 split.

    Returns (train RawDataset, test RawDataset) over the five integer
    attributes with the severity column as the label.
    """
    rows = []
    for line in Path(path).read_text().splitlines():
        parts = line.strip().split(",")
        if len(parts) != 6 or "?" in parts:
            continue
        rows.append([int(v) for v in parts])
    arr = np.array(rows, dtype=np.float64)
    x, y = arr[:, :5], arr[:, 5].astype(np.int64)
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for c in np.unique(y):
        idx = np.nonzero(y == c)[0]
        rng.shuffle(idx)
        cut = int(round(0.8 * idx.size))
        train_idx.append(idx[:cut])
        test_idx.append(idx[cut:])
    train_idx = np.concatenate(train_idx)
    test_idx = np.concatenate(test_idx)
    return (RawDataset(x[train_idx], y[train_idx], 2),
            RawDataset(x[test_idx], y[test_idx], 2))
