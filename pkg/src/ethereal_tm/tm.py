"""Dense Tsetlin Machine core.

A bank holds one team of clauses per class.  Each clause owns one two-action
automaton per literal; states 1..N mean exclude, N+1..2N mean include.  The
first half of every class's clauses votes positive, the second half negative.

The module exposes slow, transparent reference operations (clause_output,
apply_type_i, ...) plus a jitted fast path (train_epoch, predict_batch).
Both consume the same np.random.Generator draw sequence, so reference and
fast path are interchangeable bit for bit under a fixed seed.
"""

import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .data import LiteralMatrix

BANK_MAGIC = b"ETHB"
BANK_VERSION = 1

# Keeps 2N inside int16 and the serialized u16 state field.
MAX_N_STATES = 16383

_PREDICT_CHUNK = 4096


@dataclass(frozen=True)
class Hyperparams:
    """Run configuration for one training job.

    threshold is the vote clamp T, specificity the Type I strength s, and
    n_states the per-action depth N (each automaton has 2N states).
    """

    n_classes: int
    clauses_per_class: int
    threshold: int
    specificity: float
    n_states: int = 128
    seed: int = 0
    total_epochs: int = 1

    def __post_init__(self) -> None:
        if self.n_classes < 1:
            raise ValueError("n_classes must be >= 1")
        if self.clauses_per_class < 2 or self.clauses_per_class % 2 != 0:
            raise ValueError("clauses_per_class must be even and >= 2")
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if not self.specificity > 1.0:
            raise ValueError("specificity must be > 1")
        if not 1 <= self.n_states <= MAX_N_STATES:
            raise ValueError(f"n_states must be in [1, {MAX_N_STATES}]")
        if self.total_epochs < 1:
            raise ValueError("total_epochs must be >= 1")


@dataclass
class ClauseBank:
    """TA states indexed (class, clause, literal), each in [1, 2N]."""

    states: np.ndarray
    n_states: int

    @property
    def n_classes(self) -> int:
        return self.states.shape[0]

    @property
    def clauses_per_class(self) -> int:
        return self.states.shape[1]

    @property
    def n_literals(self) -> int:
        return self.states.shape[2]

    def includes(self) -> np.ndarray:
        """Boolean (class, clause, literal) mask of included literals."""
        return self.states > self.n_states

    def includes_per_clause(self) -> float:
        return float(self.includes().sum()) / (self.n_classes * self.clauses_per_class)

    def copy(self) -> "ClauseBank":
        return ClauseBank(self.states.copy(), self.n_states)

    def validate(self) -> None:
        if self.states.ndim != 3:
            raise ValueError("states must be (class, clause, literal)")
        if self.states.dtype != np.int16:
            raise ValueError("states must be int16")
        if self.clauses_per_class < 2 or self.clauses_per_class % 2 != 0:
            raise ValueError("clause count must be even and >= 2")
        if self.states.min() < 1 or self.states.max() > 2 * self.n_states:
            raise ValueError("state out of [1, 2N]")


@dataclass(frozen=True)
class Prediction:
    """Per-class votes (unclipped at inference) and the winning class."""

    class_sums: np.ndarray
    predicted: int


def polarities(clauses_per_class: int) -> np.ndarray:
    """+1 for the first half of the clause indices, -1 for the second half."""
    half = clauses_per_class // 2
    return np.concatenate([np.ones(half, dtype=np.int64), -np.ones(half, dtype=np.int64)])


def init_bank(hyper: Hyperparams, n_literals: int, rng: np.random.Generator) -> ClauseBank:
    """Fresh bank with every state drawn uniformly from {N, N+1}."""
    if n_literals < 2 or n_literals % 2 != 0:
        raise ValueError("n_literals must be even and >= 2 (features plus complements)")
    shape = (hyper.n_classes, hyper.clauses_per_class, n_literals)
    states = hyper.n_states + rng.integers(0, 2, size=shape)
    return ClauseBank(states.astype(np.int16), hyper.n_states)


def _check_literals(bank: ClauseBank, literals: np.ndarray) -> np.ndarray:
    literals = np.asarray(literals, dtype=np.uint8)
    if literals.shape != (bank.n_literals,):
        raise ValueError(f"expected {bank.n_literals} literals, got shape {literals.shape}")
    return literals


def _check_mode(mode: str) -> bool:
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    return mode == "train"


def clause_output(bank: ClauseBank, class_index: int, clause_index: int,
                  literals: np.ndarray, mode: str = "infer") -> int:
    """AND over the clause's included literals; empty clause is 1 in train
    mode, 0 in infer mode."""
    train = _check_mode(mode)
    literals = _check_literals(bank, literals)
    included = bank.states[class_index, clause_index] > bank.n_states
    if not included.any():
        return 1 if train else 0
    return int(np.all(literals[included] == 1))


def class_sum(bank: ClauseBank, class_index: int, literals: np.ndarray,
              mode: str = "infer") -> int:
    """Polarity-weighted vote of one class's clauses on a literal vector."""
    train = _check_mode(mode)
    literals = _check_literals(bank, literals)
    included = bank.states[class_index] > bank.n_states
    nonempty = included.any(axis=1)
    failed = (included & (literals == 0)).any(axis=1)
    outputs = ~failed if train else (~failed & nonempty)
    return int((outputs.astype(np.int64) * polarities(bank.clauses_per_class)).sum())


def feedback_probability(class_sum_value: int, y: int, threshold: int) -> float:
    """Gate probability (T + (-1)^y * clip(sum, -T, T)) / 2T."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    if y not in (0, 1):
        raise ValueError("y must be 0 or 1")
    clipped = min(max(class_sum_value, -threshold), threshold)
    if y == 1:
        return (threshold - clipped) / (2 * threshold)
    return (threshold + clipped) / (2 * threshold)


def apply_type_i(bank: ClauseBank, class_index: int, clause_index: int,
                 literals: np.ndarray, specificity: float,
                 rng: np.random.Generator) -> None:
    """Recognition feedback on one clause.

    Clause output 1: one-literals climb toward include w.p. (s-1)/s,
    zero-literals fall toward exclude w.p. 1/s.  Clause output 0: every state
    falls w.p. 1/s.  Saturates at [1, 2N].  Consumes exactly one uniform per
    literal regardless of saturation.
    """
    literals = _check_literals(bank, literals)
    row = bank.states[class_index, clause_index]
    output = clause_output(bank, class_index, clause_index, literals, mode="train")
    ceiling = 2 * bank.n_states
    demote = 1.0 / specificity
    promote = (specificity - 1.0) / specificity
    if output == 1:
        for k in range(row.size):
            u = rng.random()
            if literals[k] == 1:
                if u < promote and row[k] < ceiling:
                    row[k] += 1
            else:
                if u < demote and row[k] > 1:
                    row[k] -= 1
    else:
        for k in range(row.size):
            if rng.random() < demote and row[k] > 1:
                row[k] -= 1


def apply_type_ii(bank: ClauseBank, class_index: int, clause_index: int,
                  literals: np.ndarray) -> None:
    """Rejection feedback: on clause output 1, every zero-literal state climbs
    one step (deterministic, saturating); on output 0, no change."""
    literals = _check_literals(bank, literals)
    if clause_output(bank, class_index, clause_index, literals, mode="train") == 0:
        return
    row = bank.states[class_index, clause_index]
    mask = (literals == 0) & (row < 2 * bank.n_states)
    row[mask] += 1


def _update_class_reference(bank: ClauseBank, class_index: int, literals: np.ndarray,
                            y: int, hyper: Hyperparams, rng: np.random.Generator) -> None:
    # Mirrors _kernels.update_class draw for draw.
    half = bank.clauses_per_class // 2
    total = class_sum(bank, class_index, literals, mode="train")
    prob = feedback_probability(total, y, hyper.threshold)
    selected = [rng.random() < prob for _ in range(bank.clauses_per_class)]
    for j in range(bank.clauses_per_class):
        if not selected[j]:
            continue
        if (y == 1) == (j < half):
            apply_type_i(bank, class_index, j, literals, hyper.specificity, rng)
        else:
            apply_type_ii(bank, class_index, j, literals)


def train_datapoint(bank: ClauseBank, literals: np.ndarray, label: int,
                    hyper: Hyperparams, rng: np.random.Generator) -> None:
    """One stochastic update: Type I toward the labeled class, Type II against
    one uniformly sampled other class.

    Reference implementation; consumes the same draws as the jitted path (one
    class-sampling draw first, even when n_classes == 2 forces the outcome).
    """
    literals = _check_literals(bank, literals)
    if not 0 <= label < bank.n_classes:
        raise ValueError(f"label {label} out of range for {bank.n_classes} classes")
    other = 0
    if bank.n_classes > 1:
        other = int(rng.integers(0, bank.n_classes - 1))
        if other >= label:
            other += 1
    _update_class_reference(bank, label, literals, 1, hyper, rng)
    if bank.n_classes > 1:
        _update_class_reference(bank, other, literals, 0, hyper, rng)


@dataclass(frozen=True)
class EpochStats:
    includes_per_clause: float
    train_accuracy: float


def _check_data(bank: ClauseBank, data: LiteralMatrix) -> None:
    if data.n_literals != bank.n_literals:
        raise ValueError(f"bank expects {bank.n_literals} literals, data has {data.n_literals}")
    if data.n_classes > bank.n_classes:
        raise ValueError(f"data has {data.n_classes} classes, bank only {bank.n_classes}")


def train_epoch(bank: ClauseBank, data: LiteralMatrix, hyper: Hyperparams,
                rng: np.random.Generator, compute_accuracy: bool = True) -> EpochStats:
    """Shuffle the sample order, run train_datapoint over every sample, and
    report includes per clause plus (optionally) post-epoch training accuracy."""
    if data.n_samples == 0:
        raise ValueError("cannot train on an empty dataset")
    _check_data(bank, data)
    if (hyper.n_classes, hyper.clauses_per_class) != (bank.n_classes, bank.clauses_per_class):
        raise ValueError("hyperparams do not match bank shape")
    if hyper.n_states != bank.n_states:
        raise ValueError("hyperparams n_states does not match bank")
    order = rng.permutation(data.n_samples)
    _kernels.train_pass(bank.states, data.bits, data.labels, order,
                        bank.n_states, hyper.threshold, float(hyper.specificity), rng)
    train_accuracy = float("nan")
    if compute_accuracy:
        predicted, _ = predict_batch(bank, data.bits)
        train_accuracy = float(np.mean(predicted == data.labels))
    return EpochStats(bank.includes_per_clause(), train_accuracy)


def predict(bank: ClauseBank, literals: np.ndarray) -> Prediction:
    """Infer-mode class sums over all classes; argmax, ties to the lowest
    class index."""
    literals = _check_literals(bank, literals)
    _, sums = predict_batch(bank, literals[np.newaxis, :])
    return Prediction(sums[0], int(np.argmax(sums[0])))


def batch_class_sums(include_mask: np.ndarray, bits: np.ndarray,
                     n_classes: int, clauses_per_class: int) -> np.ndarray:
    """Infer-mode class sums for many samples at once.

    include_mask: boolean (n_classes * clauses_per_class, n_literals);
    bits: uint8 (n_samples, n_literals).  A clause fires iff it has at least
    one include and no included literal is 0, counted via one matmul.
    """
    inc = include_mask.astype(np.float32)
    nonempty = include_mask.any(axis=1)
    half = clauses_per_class // 2
    sums = np.empty((bits.shape[0], n_classes), dtype=np.int64)
    for start in range(0, bits.shape[0], _PREDICT_CHUNK):
        chunk = bits[start:start + _PREDICT_CHUNK]
        # Counts of included-but-zero literals; exact in float32 (< 2**24).
        misses = (1.0 - chunk.astype(np.float32)) @ inc.T
        fired = ((misses == 0) & nonempty).reshape(chunk.shape[0], n_classes,
                                                   clauses_per_class)
        sums[start:start + chunk.shape[0]] = (fired[:, :, :half].sum(axis=2, dtype=np.int64)
                                              - fired[:, :, half:].sum(axis=2, dtype=np.int64))
    return sums


def predict_batch(bank: ClauseBank, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized predict over rows of bits; returns (labels, class_sums)."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.ndim != 2 or bits.shape[1] != bank.n_literals:
        raise ValueError(f"expected (n, {bank.n_literals}) literal matrix")
    mask = bank.includes().reshape(bank.n_classes * bank.clauses_per_class, bank.n_literals)
    sums = batch_class_sums(mask, bits, bank.n_classes, bank.clauses_per_class)
    return np.argmax(sums, axis=1), sums


def write_bank(bank: ClauseBank, path: str) -> None:
    """Dump raw TA states (little-endian) for later heatmap inspection."""
    bank.validate()
    header = BANK_MAGIC + struct.pack("<BHHIH", BANK_VERSION, bank.n_classes,
                                      bank.clauses_per_class, bank.n_literals,
                                      bank.n_states)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(bank.states, dtype="<i2").tobytes())


def read_bank(path: str) -> ClauseBank:
    with open(path, "rb") as fh:
        blob = fh.read()
    head = struct.calcsize("<BHHIH") + len(BANK_MAGIC)
    if len(blob) < head:
        raise ValueError("bank dump truncated")
    if blob[:4] != BANK_MAGIC:
        raise ValueError("not a bank dump (bad magic)")
    version, n_classes, clauses, n_literals, n_states = struct.unpack_from("<BHHIH", blob, 4)
    if version != BANK_VERSION:
        raise ValueError(f"unsupported bank dump version {version}")
    expected = head + 2 * n_classes * clauses * n_literals
    if len(blob) != expected:
        raise ValueError("bank dump has wrong payload length")
    states = np.frombuffer(blob, dtype="<i2", offset=head).reshape(n_classes, clauses, n_literals)
    bank = ClauseBank(states.astype(np.int16), n_states)
    bank.validate()
    return bank
