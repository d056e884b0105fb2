"""Coalesced Tsetlin machine autoencoder.

One shared pool of conjunctive clauses serves every output word through an
integer weight matrix. Each clause keeps a graded per-variable memory; a
variable belongs to the clause's conjunction only while its memory position
sits in the upper (memorized) half. Training is masked self-supervision:
the output word's own input bit is replaced by 1 during evaluation and its
memory position is frozen during feedback.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

FORMAT_VERSION = 1

# graded positions are tiny; a narrow dtype keeps the per-update memory scan
# cheap at large vocabulary sizes
MEMORY_DTYPE = np.int16

_MODEL_MAGIC = b"TMAE"


@dataclass
class TMConfig:
    """Hyperparameters of the autoencoder.

    n_clauses        size of the shared clause pool
    margin           target magnitude for the weighted clause sum; the
                     per-clause update probability is error / (2 * margin)
    specificity      forgetting probability is 1 / specificity, so larger
                     values yield more specific clauses
    memory_depth     memory positions per side; positions 1..memory_depth are
                     forgotten, memory_depth+1..2*memory_depth memorized
    boost_true_positive
                     promote present variables with probability 1.0 during
                     recognize feedback instead of (specificity-1)/specificity
    seed             seed for the single generator all randomness flows from
    """

    n_clauses: int
    margin: int
    specificity: float
    memory_depth: int = 2
    boost_true_positive: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_clauses < 1:
            raise ValueError("n_clauses must be >= 1")
        if self.margin < 1:
            raise ValueError("margin must be a positive integer")
        if not self.specificity > 1.0:
            raise ValueError("specificity must be > 1")
        if self.memory_depth < 1:
            raise ValueError("memory_depth must be >= 1")
        if self.memory_depth > 10_000:
            raise ValueError("memory_depth must fit the int16 position range")


@dataclass
class ClauseMemory:
    """Graded memory of a single clause.

    ``positions[i]`` is an integer in [1, 2*depth]. Variable ``i`` is part of
    the clause's conjunction (memorized) iff ``positions[i] > depth``.
    """

    positions: np.ndarray
    depth: int

    def __post_init__(self):
        # keep integer arrays as-is so views into a machine's memory write
        # through; anything else is copied into the native dtype
        positions = np.asarray(self.positions)
        if positions.dtype.kind != "i":
            positions = positions.astype(MEMORY_DTYPE)
        self.positions = positions
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.positions.ndim != 1:
            raise ValueError("positions must be one-dimensional")
        if ((self.positions < 1) | (self.positions > 2 * self.depth)).any():
            raise ValueError("positions must lie in [1, 2*depth]")

    def memorized_mask(self) -> np.ndarray:
        return self.positions > self.depth

    def memorized_indices(self) -> np.ndarray:
        return np.flatnonzero(self.positions > self.depth)


def margin_error(clause_sum: int, target: int, margin: int) -> int:
    """Summation error against the margin, in [0, 2*margin].

    For target 1 the weighted clause sum should reach +margin, for target 0
    it should reach -margin; the sum is clipped to [-margin, margin] first.
    """
    if target not in (0, 1):
        raise ValueError("target must be 0 or 1")
    clipped = min(max(int(clause_sum), -margin), margin)
    return margin - clipped if target == 1 else margin + clipped


def _as_input(x, num_vars: int) -> np.ndarray:
    x = np.asarray(x, dtype=bool)
    if x.shape != (num_vars,):
        raise ValueError(f"input vector must have length {num_vars}, got shape {x.shape}")
    return x


# Feedback kernels. Each operates in place on a (rows, num_vars) slice of
# memory positions; freezing of the masked variable is the caller's job.
# Every cell consumes one uniform draw so the stream layout does not depend
# on the boost flag.

def _recognize(rows: np.ndarray, x: np.ndarray, depth: int, specificity: float,
               boost: bool, rng: np.random.Generator) -> None:
    draws = rng.random(rows.shape, dtype=np.float32)
    promote_p = 1.0 if boost else (specificity - 1.0) / specificity
    rows += x & (draws < promote_p)
    rows -= ~x & (draws < 1.0 / specificity)
    np.clip(rows, 1, 2 * depth, out=rows)


def _erase(rows: np.ndarray, specificity: float, rng: np.random.Generator) -> None:
    rows -= rng.random(rows.shape, dtype=np.float32) < 1.0 / specificity
    np.clip(rows, 1, None, out=rows)


def _reject(rows: np.ndarray, x: np.ndarray, depth: int) -> None:
    rows += ~x & (rows <= depth)


def clause_eval(clause: ClauseMemory, x, masked: int, training: bool = False) -> int:
    """Evaluate one clause on input ``x`` with variable ``masked`` forced to 1.

    The conjunction runs over the memorized variables only. A clause with no
    memorized variable is vacuously true; it counts as firing during training
    (so it can receive recognize feedback and bootstrap) but outputs 0 during
    inference (so it never votes).
    """
    x = _as_input(x, len(clause.positions))
    if not 0 <= masked < len(clause.positions):
        raise ValueError("masked index out of range")
    memorized = clause.memorized_mask()
    if not memorized.any():
        return 1 if training else 0
    x_eff = x.copy()
    x_eff[masked] = True
    return int(x_eff[memorized].all())


def type_ia_feedback(clause: ClauseMemory, x, masked: int, specificity: float,
                     rng: np.random.Generator, boost_true_positive: bool = True) -> None:
    """Recognize feedback: mimic the input more closely.

    Present (1-valued) variables move one step up in memory; absent ones move
    one step down with probability 1/specificity. The masked variable stays
    frozen.
    """
    x = _as_input(x, len(clause.positions))
    frozen = clause.positions[masked]
    rows = clause.positions.reshape(1, -1)
    _recognize(rows, x, clause.depth, specificity, boost_true_positive, rng)
    clause.positions[masked] = frozen


def type_ib_feedback(clause: ClauseMemory, x, masked: int, specificity: float,
                     rng: np.random.Generator) -> None:
    """Erase feedback: every unmasked variable moves one step down with
    probability 1/specificity, emptying out a clause that failed to fire."""
    _as_input(x, len(clause.positions))
    frozen = clause.positions[masked]
    rows = clause.positions.reshape(1, -1)
    _erase(rows, specificity, rng)
    clause.positions[masked] = frozen


def type_ii_feedback(clause: ClauseMemory, x, masked: int) -> None:
    """Reject feedback: deterministically move every forgotten 0-valued
    variable one step up, injecting it towards the conjunction so the clause
    stops firing on this input. The masked variable stays frozen."""
    x = _as_input(x, len(clause.positions))
    frozen = clause.positions[masked]
    rows = clause.positions.reshape(1, -1)
    _reject(rows, x, clause.depth)
    clause.positions[masked] = frozen


class TsetlinAutoencoder:
    """Clause pool plus per-output integer weights, trained by masked
    self-supervision over word-presence vectors.

    ``memory`` has shape (n_clauses, num_outputs) and holds the graded clause
    memories; ``weights`` has shape (num_outputs, n_clauses), row k being the
    pre-clip embedding of word k. Weights start at +/-1 with equal
    probability so clauses specialize per output; memories start at the
    topmost forgotten position, so clauses begin empty.

    Updates are single-writer: at most one ``update`` may run at a time.
    Evaluation methods are pure reads.
    """

    def __init__(self, config: TMConfig, num_outputs: int):
        if num_outputs < 1:
            raise ValueError("num_outputs must be >= 1")
        self.config = config
        self.num_outputs = num_outputs
        self.rng = np.random.default_rng(config.seed)
        self.memory = np.full((config.n_clauses, num_outputs),
                              config.memory_depth, dtype=MEMORY_DTYPE)
        self.weights = self.rng.integers(
            0, 2, size=(num_outputs, config.n_clauses), dtype=np.int64) * 2 - 1

    @property
    def n_clauses(self) -> int:
        return self.config.n_clauses

    def clause(self, j: int) -> ClauseMemory:
        """View of clause j's memory; mutations write through."""
        if not 0 <= j < self.n_clauses:
            raise IndexError(f"clause index {j} out of range")
        return ClauseMemory(self.memory[j], self.config.memory_depth)

    def memorized(self) -> np.ndarray:
        """Boolean (n_clauses, num_outputs) mask of memorized variables."""
        return self.memory > self.config.memory_depth

    def clause_outputs(self, x, masked: int, training: bool = False) -> np.ndarray:
        """Outputs of all clauses on ``x`` with variable ``masked`` forced to 1."""
        x = _as_input(x, self.num_outputs)
        if not 0 <= masked < self.num_outputs:
            raise ValueError("masked index out of range")
        x_eff = x.copy()
        x_eff[masked] = True
        memorized = self.memorized()
        satisfied = ~((memorized & ~x_eff).any(axis=1))
        if training:
            return satisfied
        return satisfied & memorized.any(axis=1)

    def clause_sum(self, x, k: int) -> int:
        """Weighted vote for output k: sum of weights[k][j] over firing clauses."""
        outputs = self.clause_outputs(x, k, training=False)
        return int(self.weights[k] @ outputs)

    def predict_masked(self, x, k: int) -> int:
        """Predict the masked bit for output k: 1 iff the clause sum is >= 0."""
        return int(self.clause_sum(x, k) >= 0)

    def margin_error(self, clause_sum: int, target: int) -> int:
        return margin_error(clause_sum, target, self.config.margin)

    def update(self, k: int, x, target: int) -> int:
        """One training step for example (k, x, target); returns the margin error.

        Every clause is selected independently with probability
        error / (2*margin) and then receives exactly one feedback type chosen
        by (effective target, clause output, weight polarity). Clauses whose
        weight for output k is negative see the target flipped and their
        weight moves in the reverse direction; weight 0 counts as positive
        polarity. The clause outputs involved here are training-mode outputs,
        so empty clauses participate. Variable k's memory is never modified.
        """
        if target not in (0, 1):
            raise ValueError("target must be 0 or 1")
        x = _as_input(x, self.num_outputs)
        if not 0 <= k < self.num_outputs:
            raise ValueError("output index out of range")
        cfg = self.config
        x_eff = x.copy()
        x_eff[k] = True

        memorized = self.memorized()
        fired = ~((memorized & ~x_eff).any(axis=1))
        votes = int(self.weights[k] @ fired)
        err = margin_error(votes, target, cfg.margin)

        selected = self.rng.random(cfg.n_clauses) < err / (2.0 * cfg.margin)
        negative = self.weights[k] < 0
        effective_one = (target == 1) ^ negative

        recognize = selected & effective_one & fired
        erase = selected & effective_one & ~fired
        reject = selected & ~effective_one & fired

        frozen = self.memory[:, k].copy()
        if recognize.any():
            rows = self.memory[recognize]
            _recognize(rows, x_eff, cfg.memory_depth, cfg.specificity,
                       cfg.boost_true_positive, self.rng)
            self.memory[recognize] = rows
        if erase.any():
            rows = self.memory[erase]
            _erase(rows, cfg.specificity, self.rng)
            self.memory[erase] = rows
        if reject.any():
            rows = self.memory[reject]
            _reject(rows, x_eff, cfg.memory_depth)
            self.memory[reject] = rows
        self.memory[:, k] = frozen

        # Regardless of polarity, a selected firing clause's weight moves by
        # +1 for target 1 and -1 for target 0 (reversal is already implied).
        self.weights[k, selected & fired] += 1 if target == 1 else -1
        return err


def vocabulary_digest(words) -> str:
    """sha256 over the newline-joined token list."""
    return hashlib.sha256("\n".join(words).encode("utf-8")).hexdigest()


def dumps_model(tm: TsetlinAutoencoder, words) -> bytes:
    """Serialize a model to a deterministic byte string.

    Layout: magic, format version, length-prefixed JSON header (config,
    vocabulary and its hash), then raw little-endian int64 memory and weight
    arrays. Identical state serializes to identical bytes.
    """
    words = list(words)
    if len(words) != tm.num_outputs:
        raise ValueError("vocabulary size does not match the number of outputs")
    cfg = tm.config
    header = {
        "format_version": FORMAT_VERSION,
        "config": {
            "n_clauses": cfg.n_clauses,
            "margin": cfg.margin,
            "specificity": cfg.specificity,
            "memory_depth": cfg.memory_depth,
            "boost_true_positive": cfg.boost_true_positive,
            "seed": cfg.seed,
        },
        "num_outputs": tm.num_outputs,
        "vocabulary": words,
        "vocabulary_sha256": vocabulary_digest(words),
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")
    parts = [
        _MODEL_MAGIC,
        struct.pack("<H", FORMAT_VERSION),
        struct.pack("<I", len(blob)),
        blob,
        tm.memory.astype("<i8").tobytes(),
        tm.weights.astype("<i8").tobytes(),
    ]
    return b"".join(parts)


def loads_model(data: bytes) -> tuple[TsetlinAutoencoder, list[str]]:
    """Inverse of :func:`dumps_model`; verifies magic, version and vocabulary hash."""
    if data[:4] != _MODEL_MAGIC:
        raise ValueError("not a model file (bad magic bytes)")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {version}")
    (header_len,) = struct.unpack_from("<I", data, 6)
    header = json.loads(data[10:10 + header_len].decode("utf-8"))
    words = header["vocabulary"]
    if vocabulary_digest(words) != header["vocabulary_sha256"]:
        raise ValueError("vocabulary hash mismatch; model file is corrupted")
    cfg = TMConfig(**header["config"])
    m = header["num_outputs"]
    tm = TsetlinAutoencoder(cfg, m)
    offset = 10 + header_len
    n_mem = cfg.n_clauses * m
    memory = np.frombuffer(data, dtype="<i8", count=n_mem, offset=offset)
    offset += 8 * n_mem
    weights = np.frombuffer(data, dtype="<i8", count=n_mem, offset=offset)
    tm.memory = memory.reshape(cfg.n_clauses, m).astype(MEMORY_DTYPE)
    tm.weights = weights.reshape(m, cfg.n_clauses).astype(np.int64)
    return tm, words


def save_model(tm: TsetlinAutoencoder, words, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps_model(tm, words))


def load_model(path) -> tuple[TsetlinAutoencoder, list[str]]:
    """Load a model snapshot. The returned machine's generator is freshly
    seeded from the stored config; snapshots capture learned state, not a
    mid-training RNG position."""
    with open(path, "rb") as fh:
        return loads_model(fh.read())
