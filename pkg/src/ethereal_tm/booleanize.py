"""Booleanization: quantile binning with one-hot or thermometer encoding, and grayscale thresholding."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import LiteralMatrix, RawDataset, append_complements

ONE_HOT = "onehot"
THERMOMETER = "thermometer"
_ENCODINGS = (ONE_HOT, THERMOMETER)


@dataclass(frozen=True)
class BinningSpec:
    """Per-feature quantile thresholds plus the encoding used to emit bits.

    Thresholds are strictly increasing within a feature. A constant feature
    collapses to an empty threshold tuple and emits no literals.
    """

    thresholds: tuple[tuple[float, ...], ...]
    encoding: str
    n_bins: int

    def __post_init__(self):
        if self.encoding not in _ENCODINGS:
            raise ValueError(f"unknown encoding {self.encoding!r}, expected one of {_ENCODINGS}")
        for feat, ts in enumerate(self.thresholds):
            if any(b <= a for a, b in zip(ts, ts[1:])):
                raise ValueError(f"feature {feat}: thresholds must be strictly increasing")

    @property
    def n_features(self) -> int:
        return len(self.thresholds)

    def bits_per_feature(self) -> list[int]:
        """Emitted feature-bit count per raw feature (before complements)."""
        if self.encoding == THERMOMETER:
            return [len(ts) for ts in self.thresholds]
        # one-hot: one bit per bin; a feature with no thresholds emits nothing
        return [len(ts) + 1 if ts else 0 for ts in self.thresholds]


def fit_quantile_bins(raw: RawDataset, n_bins: int, encoding: str = THERMOMETER) -> BinningSpec:
    """Fit per-feature thresholds at the k/n_bins quantiles, k = 1..n_bins-1.

    Quantiles use linear interpolation over the sorted training values.
    Duplicate thresholds are collapsed, so constant features yield none.
    """
    if n_bins < 2:
        raise ValueError(f"n_bins must be >= 2, got {n_bins}")
    if raw.n_samples == 0:
        raise ValueError("cannot fit bins on an empty dataset")
    if encoding not in _ENCODINGS:
        raise ValueError(f"unknown encoding {encoding!r}, expected one of {_ENCODINGS}")
    qs = np.arange(1, n_bins) / n_bins
    per_feature: list[tuple[float, ...]] = []
    for f in range(raw.n_features):
        col = raw.samples[:, f]
        if np.all(col == col[0]):
            per_feature.append(())
            continue
        cuts = np.quantile(col, qs, method="linear")
        per_feature.append(tuple(float(t) for t in np.unique(cuts)))
    return BinningSpec(tuple(per_feature), encoding, n_bins)


def _encode_feature(values: np.ndarray, thresholds: tuple[float, ...], encoding: str) -> np.ndarray:
    if not thresholds:
        return np.zeros((values.shape[0], 0), dtype=np.uint8)
    ts = np.asarray(thresholds)
    ge = (values[:, None] >= ts[None, :]).astype(np.uint8)
    if encoding == THERMOMETER:
        return ge
    # one-hot over bins (-inf, t1), [t1, t2), ..., [t_last, inf):
    # bin index = number of thresholds the value meets or exceeds
    idx = ge.sum(axis=1)
    out = np.zeros((values.shape[0], len(thresholds) + 1), dtype=np.uint8)
    out[np.arange(values.shape[0]), idx] = 1
    return out


def booleanize(raw: RawDataset, spec: BinningSpec) -> LiteralMatrix:
    """Encode raw features through a fitted BinningSpec and append complement literals."""
    if raw.n_features != spec.n_features:
        raise ValueError(
            f"dataset has {raw.n_features} features but spec was fitted on {spec.n_features}"
        )
    groups = [
        _encode_feature(raw.samples[:, f], spec.thresholds[f], spec.encoding)
        for f in range(raw.n_features)
    ]
    feature_bits = (
        np.concatenate(groups, axis=1)
        if groups
        else np.zeros((raw.n_samples, 0), dtype=np.uint8)
    )
    return LiteralMatrix(append_complements(feature_bits), raw.labels, n_classes=raw.n_classes)


def write_binning_spec(spec: BinningSpec, path: str | Path) -> None:
    """Persist a fitted spec so other splits can be encoded identically."""
    payload = {
        "encoding": spec.encoding,
        "n_bins": spec.n_bins,
        "thresholds": [list(ts) for ts in spec.thresholds],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                          encoding="ascii")


def read_binning_spec(path: str | Path) -> BinningSpec:
    payload = json.loads(Path(path).read_text(encoding="ascii"))
    try:
        thresholds = tuple(tuple(float(t) for t in ts) for ts in payload["thresholds"])
        return BinningSpec(thresholds, payload["encoding"], int(payload["n_bins"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: malformed binning spec ({exc})") from None


def booleanize_grayscale(images: RawDataset, threshold: float) -> LiteralMatrix:
    """Threshold pixel intensities: bit = (pixel >= threshold), complements appended."""
    if np.any(images.samples < 0) or np.any(images.samples > 255):
        raise ValueError("grayscale pixel values must lie in [0, 255]")
    feature_bits = (images.samples >= threshold).astype(np.uint8)
    return LiteralMatrix(append_complements(feature_bits), images.labels, n_classes=images.n_classes)
