"""Intrinsic evaluation: cosine similarity over embedding rows, nearest
neighbors, and rank-correlation scoring against human-scored word pairs.

Words that are out of vocabulary or embed to an all-zero row are skipped and
counted rather than scored; zero-norm rows would otherwise inject arbitrary
ranks. The reported cosine agreement is the cosine between the vector of
predicted pair similarities and the vector of human scores.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .corpus import Vocabulary
from .embedding import EmbeddingMatrices


@dataclass
class SimilarityDataset:
    """Human-scored word pairs (word_a, word_b, score)."""

    pairs: list[tuple[str, str, float]]

    def __post_init__(self):
        for a, b, score in self.pairs:
            if not a or not b:
                raise ValueError("dataset words must be non-empty")
            if not math.isfinite(score):
                raise ValueError(f"non-finite score for pair ({a}, {b})")

    def __len__(self) -> int:
        return len(self.pairs)

    @classmethod
    def load(cls, path) -> "SimilarityDataset":
        """Whitespace/TSV rows ``word_a word_b score``; lines starting with
        '#' are headers. Words are lowercased to match the vocabulary."""
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 'word_a word_b score'")
                try:
                    score = float(parts[2])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: score {parts[2]!r} "
                                     "is not a number") from None
                pairs.append((parts[0].lower(), parts[1].lower(), score))
        return cls(pairs)


@dataclass
class EvalReport:
    spearman: float
    kendall: float
    cosine_agreement: float
    covered_pairs: int
    skipped_pairs: int

    def as_dict(self) -> dict:
        return {
            "spearman": self.spearman,
            "kendall": self.kendall,
            "cosine_agreement": self.cosine_agreement,
            "covered_pairs": self.covered_pairs,
            "skipped_pairs": self.skipped_pairs,
        }


def cosine_similarity(a, b) -> float:
    """dot(a, b) / (|a| |b|); 0.0 when either norm is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"vector length mismatch: {a.shape} vs {b.shape}")
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    if norm == 0.0:
        return 0.0
    return float(np.dot(a, b) / norm)


def rank_correlations(predicted, human) -> tuple[float, float]:
    """(Spearman, Kendall tau-b) between two score lists.

    Spearman is the Pearson correlation of average fractional ranks; Kendall
    is the tie-corrected tau-b. A constant input makes both undefined: the
    result is (nan, nan) and a RuntimeWarning is emitted.
    """
    predicted = np.asarray(predicted, dtype=np.float64)
    human = np.asarray(human, dtype=np.float64)
    if predicted.shape != human.shape or predicted.ndim != 1:
        raise ValueError("score lists must be one-dimensional and equally long")
    if len(predicted) < 2:
        raise ValueError("need at least two pairs to correlate")
    if np.all(predicted == predicted[0]) or np.all(human == human[0]):
        warnings.warn("constant score list; rank correlations are undefined",
                      RuntimeWarning, stacklevel=2)
        return float("nan"), float("nan")
    spearman, _ = stats.spearmanr(predicted, human)
    kendall, _ = stats.kendalltau(predicted, human, variant="b")
    return float(spearman), float(kendall)


def evaluate_similarity(emb: EmbeddingMatrices, vocab: Vocabulary,
                        dataset: SimilarityDataset) -> EvalReport:
    """Score every coverable pair by cosine over the weighted embedding rows
    and correlate against the human scores. Pairs with an out-of-vocabulary
    word or a zero-norm embedding row are skipped and counted."""
    norms = np.linalg.norm(emb.weighted.astype(np.float64), axis=1)
    predicted = []
    human = []
    skipped = 0
    for a, b, score in dataset.pairs:
        ia = vocab.index.get(a)
        ib = vocab.index.get(b)
        if ia is None or ib is None or norms[ia] == 0.0 or norms[ib] == 0.0:
            skipped += 1
            continue
        predicted.append(cosine_similarity(emb.weighted[ia], emb.weighted[ib]))
        human.append(score)
    if len(predicted) < 2:
        raise ValueError(
            f"only {len(predicted)} of {len(dataset)} pairs are covered by the "
            "vocabulary; need at least 2 to evaluate")
    spearman, kendall = rank_correlations(predicted, human)
    agreement = cosine_similarity(np.array(predicted), np.array(human))
    return EvalReport(spearman=spearman, kendall=kendall,
                      cosine_agreement=agreement,
                      covered_pairs=len(predicted), skipped_pairs=skipped)


def nearest_neighbors(emb: EmbeddingMatrices, vocab: Vocabulary, word: str,
                      top: int) -> list[tuple[str, float]]:
    """The ``top`` words closest to ``word`` by cosine over the weighted
    embedding rows, query excluded; ties break by word index."""
    if word not in vocab.index:
        raise KeyError(f"unknown word: {word!r}")
    if top < 0:
        raise ValueError("top must be >= 0")
    k = vocab.index[word]
    rows = emb.weighted.astype(np.float64)
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    scores = (rows / safe[:, None]) @ (rows[k] / safe[k])
    scores[norms == 0.0] = 0.0
    if norms[k] == 0.0:
        scores[:] = 0.0
    order = [i for i in np.argsort(-scores, kind="stable") if i != k]
    return [(vocab.words[i], float(scores[i])) for i in order[:top]]
