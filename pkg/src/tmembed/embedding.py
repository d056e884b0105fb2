"""Self-supervised embedding training.

Each round builds one example per vocabulary word: draw a random target bit,
pool the documents that do (target 1) or do not (target 0) contain the word,
union a small random subset of them, and feed the resulting presence vector
to the autoencoder with that word masked. Accumulating several documents
into one example raises the frequency of rare context words. After training,
row k of the clipped weight matrix is word k's weighted embedding and the
positive-weight pattern is its purely logical embedding.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import TMConfig, TsetlinAutoencoder
from .corpus import DocumentSet, Vocabulary

logger = logging.getLogger(__name__)

EXPORT_FORMAT_VERSION = 1

_EXPORT_MAGIC = b"TMEB"


@dataclass(frozen=True)
class TrainingExample:
    """Masked output index, presence vector, and the bit to reconstruct."""

    masked_index: int
    inputs: np.ndarray
    target: int


@dataclass
class EmbedConfig:
    """Training-loop parameters on top of the machine hyperparameters.

    accumulation   documents unioned into each example
    rounds         training rounds; each round visits every word once
    """

    tm: TMConfig
    accumulation: int = 25
    rounds: int = 2000

    def __post_init__(self):
        if self.accumulation < 1:
            raise ValueError("accumulation must be >= 1")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")


@dataclass
class EmbeddingMatrices:
    """weighted[k][j] = clip(weights[k][j], 0, margin); binary = weights > 0.

    ``clauses``, when present, holds each clause's literal tokens in clause
    order (the decoded conjunctions the embedding dimensions stand for).
    """

    weighted: np.ndarray
    binary: np.ndarray
    clauses: list[list[str]] | None = None


def _sample_without_replacement(rng: np.random.Generator, population: int,
                                size: int) -> np.ndarray:
    """Uniform size-subset of range(population) in O(size) memory (Floyd's
    algorithm); the pool itself is never materialized."""
    if size >= population:
        return np.arange(population, dtype=np.int64)
    chosen: set[int] = set()
    for j in range(population - size, population):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    return np.array(sorted(chosen), dtype=np.int64)


def generate_example(dset: DocumentSet, k: int, accumulation: int,
                     rng: np.random.Generator) -> TrainingExample | None:
    """Build one training example for word k, or None when the drawn target's
    document pool is empty (a word present in every document, or in none)."""
    target = int(rng.integers(0, 2))
    pool = dset.pool_size(k, contain=target == 1)
    if pool == 0:
        return None
    ranks = _sample_without_replacement(rng, pool, min(accumulation, pool))
    doc_ids = dset.select_pool(k, target == 1, ranks)
    return TrainingExample(k, dset.union_vector(doc_ids), target)


def train(dset: DocumentSet, vocab: Vocabulary, config: EmbedConfig,
          on_round: Callable[[int, float, int], None] | None = None,
          ) -> TsetlinAutoencoder:
    """Run the full training loop and return the trained machine.

    Words are visited in index order inside each round so the random stream,
    and therefore the result, is reproducible for a fixed seed. Words whose
    pool came up empty are skipped, not retried. ``on_round`` receives
    (round, mean margin error, skipped examples) after every round.
    """
    if dset.num_docs == 0:
        raise ValueError("cannot train on an empty corpus")
    if dset.num_words != len(vocab):
        raise ValueError("document set does not match the vocabulary size")
    tm = TsetlinAutoencoder(config.tm, num_outputs=len(vocab))
    for rnd in range(config.rounds):
        total_err = 0
        updates = 0
        skipped = 0
        for k in range(len(vocab)):
            example = generate_example(dset, k, config.accumulation, tm.rng)
            if example is None:
                skipped += 1
                continue
            total_err += tm.update(example.masked_index, example.inputs,
                                   example.target)
            updates += 1
        mean_err = total_err / updates if updates else 0.0
        logger.debug("round %d: mean margin error %.2f, skipped %d",
                     rnd, mean_err, skipped)
        if on_round is not None:
            on_round(rnd, mean_err, skipped)
    return tm


def extract_embeddings(tm: TsetlinAutoencoder,
                       vocab: Vocabulary | None = None) -> EmbeddingMatrices:
    """Clip negative weights away for the weighted embeddings and compare
    against zero for the purely logical ones. With a vocabulary, also decode
    every clause into its literal tokens."""
    weighted = np.clip(tm.weights, 0, tm.config.margin)
    binary = tm.weights > 0
    clauses = None
    if vocab is not None:
        from .interpret import decode_clause
        clauses = [decode_clause(tm, j, vocab).literals
                   for j in range(tm.n_clauses)]
    return EmbeddingMatrices(weighted, binary, clauses)


def save_weighted_text(emb: EmbeddingMatrices, words, path) -> None:
    """One line per word: ``word v_1 v_2 ... v_n`` (common embedding format)."""
    with open(path, "w", encoding="utf-8") as fh:
        for k, word in enumerate(words):
            fh.write(word + " " + " ".join(str(int(v)) for v in emb.weighted[k]) + "\n")


def save_binary_text(emb: EmbeddingMatrices, words, path) -> None:
    """One line per word listing the indices of its connected clauses."""
    with open(path, "w", encoding="utf-8") as fh:
        for k, word in enumerate(words):
            connected = np.flatnonzero(emb.binary[k])
            fh.write(" ".join([word] + [str(int(j)) for j in connected]) + "\n")


def save_embeddings_binary(emb: EmbeddingMatrices, words, path,
                           matrix: str = "weighted") -> None:
    """Deterministic binary export of either matrix: magic, version,
    length-prefixed JSON header, then the raw little-endian array."""
    if matrix not in ("weighted", "binary"):
        raise ValueError("matrix must be 'weighted' or 'binary'")
    data = emb.weighted if matrix == "weighted" else emb.binary
    words = list(words)
    header = {
        "format_version": EXPORT_FORMAT_VERSION,
        "matrix": matrix,
        "shape": list(data.shape),
        "dtype": "<i8" if matrix == "weighted" else "u1",
        "vocabulary": words,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")
    payload = (data.astype("<i8") if matrix == "weighted"
               else data.astype(np.uint8)).tobytes()
    with open(path, "wb") as fh:
        fh.write(_EXPORT_MAGIC)
        fh.write(struct.pack("<H", EXPORT_FORMAT_VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(payload)
