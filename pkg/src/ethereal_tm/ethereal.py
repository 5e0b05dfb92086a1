"""Exclusion-augmented training.

A literal included in at least one positive and at least one negative clause
of the same class cancels itself in that class's vote; subtracting N from its
state in every clause that includes it turns strong includes into weak
excludes.  Training interleaves these exclusion sweeps with standard epochs
that let wrongly removed literals climb back.
"""

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import LiteralMatrix
from .sparse import SparseModel, compress
from .tm import ClauseBank, Hyperparams, init_bank, predict_batch, train_epoch

PHASE_TRAIN = "after-training"
PHASE_EXCLUDE = "after-exclusion"

TRACE_COLUMNS = ("epoch", "phase", "test_accuracy", "includes_per_clause")


@dataclass(frozen=True)
class ExclusionSchedule:
    """warmup standard epochs, then repeat [exclude; k epochs] to the total."""

    warmup_epochs: int
    epochs_between_exclusions: int
    total_epochs: int

    def __post_init__(self) -> None:
        if self.total_epochs < 1:
            raise ValueError("total_epochs must be >= 1")
        if not 0 <= self.warmup_epochs <= self.total_epochs:
            raise ValueError("warmup_epochs must be in [0, total_epochs]")
        if self.epochs_between_exclusions < 1:
            raise ValueError("epochs_between_exclusions must be >= 1")

    @classmethod
    def vanilla(cls, total_epochs: int) -> "ExclusionSchedule":
        """Degenerate schedule: all warmup, no exclusion sweeps."""
        return cls(total_epochs, 1, total_epochs)

    @property
    def excludes(self) -> bool:
        return self.warmup_epochs < self.total_epochs


@dataclass(frozen=True)
class TraceRecord:
    epoch: int
    phase: str
    test_accuracy: float
    includes_per_clause: float


@dataclass
class TrainingTrace:
    """Per-epoch and per-exclusion records plus the best after-training
    snapshot (accuracy, includes_per_clause, compressed model)."""

    records: list
    best_snapshot: Optional[tuple] = None

    @property
    def best_accuracy(self) -> float:
        if self.best_snapshot is None:
            raise ValueError("trace has no after-training records")
        return self.best_snapshot[0]

    @property
    def best_model(self) -> SparseModel:
        if self.best_snapshot is None:
            raise ValueError("trace has no after-training records")
        return self.best_snapshot[2]


def shared_literals(bank: ClauseBank, class_index: int) -> set:
    """Literals included in >= 1 positive and >= 1 negative clause of the
    class."""
    included = bank.includes()[class_index]
    half = bank.clauses_per_class // 2
    both = included[:half].any(axis=0) & included[half:].any(axis=0)
    return {int(k) for k in np.nonzero(both)[0]}


def exclude_shared(bank: ClauseBank) -> np.ndarray:
    """Force-exclude every class's shared literals by subtracting N from
    their states in each clause that includes them; returns the number of
    literals excluded per class."""
    included = bank.includes()
    half = bank.clauses_per_class // 2
    counts = np.zeros(bank.n_classes, dtype=np.int64)
    for c in range(bank.n_classes):
        both = included[c, :half].any(axis=0) & included[c, half:].any(axis=0)
        counts[c] = int(both.sum())
        hit = included[c] & both[np.newaxis, :]
        bank.states[c][hit] -= bank.n_states
    return counts


def _test_accuracy(bank: ClauseBank, data: LiteralMatrix) -> float:
    predicted, _ = predict_batch(bank, data.bits)
    return float(np.mean(predicted == data.labels))


def ethereal_train(data: LiteralMatrix, hyper: Hyperparams,
                   schedule: ExclusionSchedule, rng: np.random.Generator,
                   eval_data: Optional[LiteralMatrix] = None
                   ) -> tuple[ClauseBank, TrainingTrace]:
    """Train with interleaved exclusion sweeps per the schedule.

    Records a trace entry after every epoch and every exclusion, measuring
    accuracy on eval_data (the training data when not given).  The best
    snapshot considers after-training entries only: a just-excluded bank has
    not yet restored wrongly removed literals.
    """
    if eval_data is None:
        eval_data = data
    if eval_data.n_literals != data.n_literals:
        raise ValueError("eval data literal count differs from training data")
    bank = init_bank(hyper, data.n_literals, rng)
    trace = TrainingTrace(records=[])

    def record(epoch: int, phase: str) -> None:
        entry = TraceRecord(epoch, phase, _test_accuracy(bank, eval_data),
                            bank.includes_per_clause())
        trace.records.append(entry)
        if phase == PHASE_TRAIN and (trace.best_snapshot is None
                                     or entry.test_accuracy > trace.best_snapshot[0]):
            trace.best_snapshot = (entry.test_accuracy, entry.includes_per_clause,
                                   compress(bank))

    done = 0
    for _ in range(schedule.warmup_epochs):
        train_epoch(bank, data, hyper, rng, compute_accuracy=False)
        done += 1
        record(done, PHASE_TRAIN)
    while done < schedule.total_epochs:
        exclude_shared(bank)
        record(done, PHASE_EXCLUDE)
        remaining = schedule.total_epochs - done
        for _ in range(min(schedule.epochs_between_exclusions, remaining)):
            train_epoch(bank, data, hyper, rng, compute_accuracy=False)
            done += 1
            record(done, PHASE_TRAIN)
    return bank, trace


def vanilla_train(data: LiteralMatrix, hyper: Hyperparams, rng: np.random.Generator,
                  eval_data: Optional[LiteralMatrix] = None
                  ) -> tuple[ClauseBank, TrainingTrace]:
    """Standard training for hyper.total_epochs; identical to ethereal_train
    under the degenerate all-warmup schedule."""
    return ethereal_train(data, hyper, ExclusionSchedule.vanilla(hyper.total_epochs),
                          rng, eval_data)


def write_trace_csv(trace: TrainingTrace, path: str) -> None:
    """One row per record: epoch,phase,test_accuracy,includes_per_clause.
    Floats use repr so equal runs produce byte-identical files."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for rec in trace.records:
            writer.writerow([rec.epoch, rec.phase, repr(rec.test_accuracy),
                             repr(rec.includes_per_clause)])


def read_trace_csv(path: str) -> TrainingTrace:
    """Rebuild the records of a written trace (best snapshot is not stored)."""
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(TRACE_COLUMNS):
            raise ValueError(f"unexpected trace header {header!r}")
        records = [TraceRecord(int(row[0]), row[1], float(row[2]), float(row[3]))
                   for row in reader]
    return TrainingTrace(records=records)
