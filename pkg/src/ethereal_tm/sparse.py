"""Include-only compressed model: representation, bit-exact serialization,
and a sparse inference engine matching the dense predictor's contract."""

import struct
from dataclasses import dataclass

import numpy as np

from .tm import ClauseBank, Prediction, batch_class_sums

MAGIC = b"ETHL"
FORMAT_VERSION = 1
FILE_EXTENSION = ".ethl"

_HEADER = "<HHI"
_HEADER_SIZE = len(MAGIC) + 1 + struct.calcsize(_HEADER)


class ModelFormatError(ValueError):
    """Base class for model decode failures."""


class BadMagicError(ModelFormatError):
    pass


class BadVersionError(ModelFormatError):
    pass


class TruncatedPayloadError(ModelFormatError):
    pass


class TrailingDataError(ModelFormatError):
    pass


class HeaderFieldError(ModelFormatError):
    pass


class IndexOrderError(ModelFormatError):
    pass


class IndexRangeError(ModelFormatError):
    pass


@dataclass(frozen=True)
class SparseModel:
    """Per class, per clause: ascending tuple of included literal indices.

    Polarity is positional (first half of each class's clauses positive), so
    only the include lists are stored.  Equality is structural, and the
    canonical byte form round-trips exactly.
    """

    n_classes: int
    clauses_per_class: int
    n_literals: int
    includes: tuple

    def __post_init__(self) -> None:
        if self.n_classes < 1 or self.n_classes > 0xFFFF:
            raise ValueError("n_classes out of range")
        if (self.clauses_per_class < 2 or self.clauses_per_class % 2 != 0
                or self.clauses_per_class > 0xFFFF):
            raise ValueError("clauses_per_class must be even, >= 2, and fit u16")
        if self.n_literals < 1 or self.n_literals > 0xFFFFFFFF:
            raise ValueError("n_literals out of range")
        if len(self.includes) != self.n_classes:
            raise ValueError("includes must have one entry per class")
        for clauses in self.includes:
            if len(clauses) != self.clauses_per_class:
                raise ValueError("every class needs clauses_per_class include lists")
            for idx in clauses:
                if len(idx) > 0xFFFF:
                    raise ValueError("include count does not fit u16")
                last = -1
                for value in idx:
                    if not last < value:
                        raise ValueError("include indices must be strictly ascending")
                    if not 0 <= value < self.n_literals:
                        raise ValueError("include index out of range")
                    last = value

    def total_includes(self) -> int:
        return sum(len(idx) for clauses in self.includes for idx in clauses)

    def include_matrix(self) -> np.ndarray:
        """Boolean (n_classes * clauses_per_class, n_literals) mask."""
        mask = np.zeros((self.n_classes * self.clauses_per_class, self.n_literals),
                        dtype=bool)
        row = 0
        for clauses in self.includes:
            for idx in clauses:
                if idx:
                    mask[row, list(idx)] = True
                row += 1
        return mask


def compress(bank: ClauseBank) -> SparseModel:
    """Keep only the included-literal indices of every clause."""
    included = bank.includes()
    includes = tuple(
        tuple(tuple(int(k) for k in np.nonzero(included[c, j])[0])
              for j in range(bank.clauses_per_class))
        for c in range(bank.n_classes)
    )
    return SparseModel(bank.n_classes, bank.clauses_per_class, bank.n_literals, includes)


def serialize(model: SparseModel) -> bytes:
    """Canonical little-endian byte form.

    Layout: magic 'ETHL', version u8, n_classes u16, clauses_per_class u16,
    n_literals u32, then per clause an include-count u16 followed by that many
    ascending u32 literal indices.
    """
    parts = [MAGIC, bytes([FORMAT_VERSION]),
             struct.pack(_HEADER, model.n_classes, model.clauses_per_class,
                         model.n_literals)]
    for clauses in model.includes:
        for idx in clauses:
            parts.append(struct.pack("<H", len(idx)))
            parts.append(np.asarray(idx, dtype="<u4").tobytes())
    return b"".join(parts)


def deserialize(blob: bytes) -> SparseModel:
    """Inverse of serialize; refuses malformed input with a distinct error
    per failure mode, never a silent partial read."""
    if len(blob) < len(MAGIC):
        raise TruncatedPayloadError("too short for magic")
    if blob[:4] != MAGIC:
        raise BadMagicError(f"bad magic {blob[:4]!r}")
    if len(blob) < _HEADER_SIZE:
        raise TruncatedPayloadError("truncated header")
    version = blob[4]
    if version != FORMAT_VERSION:
        raise BadVersionError(f"unsupported version {version}")
    n_classes, clauses_per_class, n_literals = struct.unpack_from(_HEADER, blob, 5)
    if n_classes < 1:
        raise HeaderFieldError("n_classes must be >= 1")
    if clauses_per_class < 2 or clauses_per_class % 2 != 0:
        raise HeaderFieldError("clauses_per_class must be even and >= 2")
    if n_literals < 1:
        raise HeaderFieldError("n_literals must be >= 1")
    offset = _HEADER_SIZE
    classes = []
    for _ in range(n_classes):
        clauses = []
        for _ in range(clauses_per_class):
            if offset + 2 > len(blob):
                raise TruncatedPayloadError("truncated include count")
            (count,) = struct.unpack_from("<H", blob, offset)
            offset += 2
            if offset + 4 * count > len(blob):
                raise TruncatedPayloadError("truncated include list")
            idx = np.frombuffer(blob, dtype="<u4", count=count, offset=offset)
            offset += 4 * count
            if count > 1 and not np.all(np.diff(idx.astype(np.int64)) > 0):
                raise IndexOrderError("include indices not strictly ascending")
            if count > 0 and int(idx[-1]) >= n_literals:
                raise IndexRangeError("include index past n_literals")
            clauses.append(tuple(int(v) for v in idx))
        classes.append(tuple(clauses))
    if offset != len(blob):
        raise TrailingDataError(f"{len(blob) - offset} unread trailing bytes")
    return SparseModel(n_classes, clauses_per_class, n_literals, tuple(classes))


def write_model(model: SparseModel, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(model))


def read_model(path: str) -> SparseModel:
    with open(path, "rb") as fh:
        return deserialize(fh.read())


def sparse_infer(model: SparseModel, literals: np.ndarray) -> Prediction:
    """Predict one sample by walking only the include lists; identical
    contract to the dense predictor (empty clause 0, ties to lowest class)."""
    literals = np.asarray(literals, dtype=np.uint8)
    if literals.shape != (model.n_literals,):
        raise ValueError(f"expected {model.n_literals} literals, got shape {literals.shape}")
    half = model.clauses_per_class // 2
    sums = np.zeros(model.n_classes, dtype=np.int64)
    for c, clauses in enumerate(model.includes):
        total = 0
        for j, idx in enumerate(clauses):
            if not idx:
                continue
            fired = True
            for k in idx:
                if literals[k] == 0:
                    fired = False
                    break
            if fired:
                total += 1 if j < half else -1
        sums[c] = total
    return Prediction(sums, int(np.argmax(sums)))


def sparse_predict_batch(model: SparseModel, bits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sparse inference; returns (labels, class_sums)."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.ndim != 2 or bits.shape[1] != model.n_literals:
        raise ValueError(f"expected (n, {model.n_literals}) literal matrix")
    sums = batch_class_sums(model.include_matrix(), bits,
                            model.n_classes, model.clauses_per_class)
    return np.argmax(sums, axis=1), sums


def model_metrics(model: SparseModel) -> dict:
    """Size and inference-cost accounting for a compressed model."""
    total = model.total_includes()
    return {
        "includes_per_clause": total / (model.n_classes * model.clauses_per_class),
        "size_bytes": len(serialize(model)),
        "literal_reads": total,
    }
