"""Accuracy evaluation, include heatmaps, and accuracy/size trade-off
emission; all read-only over banks, models, and traces."""

import csv
from typing import Union

import numpy as np

from .data import LiteralMatrix
from .sparse import SparseModel, sparse_predict_batch
from .tm import ClauseBank, predict_batch

HEATMAP_COLUMNS = ("literal_index", "positive_count", "negative_count")
TRADEOFF_COLUMNS = ("includes_per_clause", "accuracy", "phase")


def predictions(model_or_bank: Union[ClauseBank, SparseModel],
                data: LiteralMatrix) -> np.ndarray:
    """Predicted labels for every sample, dense or sparse engine."""
    if isinstance(model_or_bank, ClauseBank):
        predicted, _ = predict_batch(model_or_bank, data.bits)
        n_classes = model_or_bank.n_classes
    elif isinstance(model_or_bank, SparseModel):
        predicted, _ = sparse_predict_batch(model_or_bank, data.bits)
        n_classes = model_or_bank.n_classes
    else:
        raise TypeError(f"expected ClauseBank or SparseModel, got {type(model_or_bank)!r}")
    if data.n_samples and int(data.labels.max()) >= n_classes:
        raise ValueError(f"data labels exceed the model's {n_classes} classes")
    return predicted


def accuracy(model_or_bank: Union[ClauseBank, SparseModel],
             data: LiteralMatrix) -> float:
    """Fraction of samples whose prediction equals the label."""
    if data.n_samples == 0:
        raise ValueError("cannot score an empty dataset")
    predicted = predictions(model_or_bank, data)
    return float(np.mean(predicted == data.labels))


def include_heatmap(bank: ClauseBank, class_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-literal include counts over the class's positive and negative
    clauses; each count is bounded by clauses_per_class / 2."""
    if not 0 <= class_index < bank.n_classes:
        raise ValueError(f"class {class_index} out of range")
    included = bank.includes()[class_index]
    half = bank.clauses_per_class // 2
    positive = included[:half].sum(axis=0).astype(np.int64)
    negative = included[half:].sum(axis=0).astype(np.int64)
    return positive, negative


def write_heatmap_csv(bank: ClauseBank, class_index: int, path: str) -> None:
    """One row per literal: literal_index,positive_count,negative_count."""
    positive, negative = include_heatmap(bank, class_index)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEATMAP_COLUMNS)
        for k in range(bank.n_literals):
            writer.writerow([k, int(positive[k]), int(negative[k])])


def tradeoff_trace(trace) -> list:
    """(includes_per_clause, accuracy, phase) per trace record, in order."""
    if not trace.records:
        raise ValueError("trace has no records")
    return [(rec.includes_per_clause, rec.test_accuracy, rec.phase)
            for rec in trace.records]


def write_tradeoff_csv(trace, path: str) -> None:
    """One row per record: includes_per_clause,accuracy,phase."""
    rows = tradeoff_trace(trace)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRADEOFF_COLUMNS)
        for includes, acc, phase in rows:
            writer.writerow([repr(includes), repr(acc), phase])
