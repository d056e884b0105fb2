"""Decode learned clauses into readable conjunctions and map words to the
clauses they connect to.

A clause's literals are the tokens of its memorized variables; a word
connects to a clause when its weight for that clause is positive. Ranking
"most important" clauses for a word uses the weight magnitude, the machine's
own importance measure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .core import TsetlinAutoencoder
from .corpus import Vocabulary

if TYPE_CHECKING:
    from .embedding import EmbeddingMatrices

_CONJUNCTION = " ∧ "  # " ∧ "
_EMPTY = "⊤"          # "⊤", the vacuous conjunction


@dataclass
class ClauseExplanation:
    """One clause: its conjunction plus the words it positively supports."""

    clause_id: int
    literals: list[str]
    connected_words: list[tuple[str, int]]

    def as_dict(self) -> dict:
        return {
            "clause_id": self.clause_id,
            "literals": self.literals,
            "connected_words": [{"word": w, "weight": wt}
                                for w, wt in self.connected_words],
        }


def decode_clause(tm: TsetlinAutoencoder, j: int,
                  vocab: Vocabulary) -> ClauseExplanation:
    """Literals of clause j plus every word with a positive weight on it,
    sorted by descending weight (ties by word index)."""
    clause = tm.clause(j)  # raises IndexError when j is out of range
    literals = [vocab.words[i] for i in clause.memorized_indices()]
    column = tm.weights[:, j]
    ks = np.flatnonzero(column > 0)
    ks = ks[np.lexsort((ks, -column[ks]))]
    connected = [(vocab.words[k], int(column[k])) for k in ks]
    return ClauseExplanation(j, literals, connected)


def explain_word(tm: TsetlinAutoencoder, word: str, top: int,
                 vocab: Vocabulary) -> list[ClauseExplanation]:
    """The ``top`` clauses with the largest positive weight for ``word``,
    ties broken by clause index, each decoded into a full explanation."""
    if word not in vocab.index:
        raise KeyError(f"unknown word: {word!r}")
    if top < 0:
        raise ValueError("top must be >= 0")
    row = tm.weights[vocab.index[word]]
    js = np.flatnonzero(row > 0)
    js = js[np.lexsort((js, -row[js]))][:top]
    return [decode_clause(tm, int(j), vocab) for j in js]


@dataclass
class SparsityReport:
    """Per-word fraction of connected clauses plus summary statistics."""

    fractions: np.ndarray
    max: float
    median: float
    mean: float


def sparsity_report(emb: "EmbeddingMatrices | np.ndarray") -> SparsityReport:
    """Fraction of 1s in each word's row of the binary connection matrix."""
    binary = np.asarray(getattr(emb, "binary", emb), dtype=bool)
    fractions = binary.mean(axis=1)
    return SparsityReport(fractions=fractions,
                          max=float(fractions.max()),
                          median=float(np.median(fractions)),
                          mean=float(fractions.mean()))


def format_conjunction(literals) -> str:
    """Render literals as a conjunction string; empty clauses render as ⊤."""
    return _CONJUNCTION.join(literals) if literals else _EMPTY


def parse_conjunction(text: str) -> list[str]:
    """Inverse of :func:`format_conjunction`."""
    text = text.strip()
    if not text or text == _EMPTY:
        return []
    return [lit.strip() for lit in text.split(_CONJUNCTION.strip())]


def explanations_to_json(explanations: list[ClauseExplanation]) -> str:
    """Stable, diffable JSON rendering of clause explanations."""
    return json.dumps([e.as_dict() for e in explanations],
                      indent=2, sort_keys=True, ensure_ascii=False)
