"""Text ingestion: tokenization, vocabulary selection, set-of-words documents
and the inverted index behind training-example sampling.

A document is a *set* of word indices; duplicate occurrences collapse. The
tokenizer is deliberately minimal (lowercase, split on non-alphanumeric runs)
so results stay reproducible. Stopwords are not removed unless a stopword
set is supplied.
"""

from __future__ import annotations

import json
import re
import struct
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

CACHE_FORMAT_VERSION = 1

_CACHE_MAGIC = b"TMCC"
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs; keeps duplicates.

    Deduplication to set semantics happens at the document level.
    """
    return _TOKEN_RE.findall(text.lower())


def load_stopwords(path) -> frozenset[str]:
    """One stopword per line; blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


@dataclass
class Vocabulary:
    """Ordered list of unique lowercase tokens plus the token -> index map."""

    words: list[str]
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.words = list(self.words)
        if not self.words:
            raise ValueError("vocabulary is empty; nothing to embed")
        for w in self.words:
            if not w or w != w.lower():
                raise ValueError(f"vocabulary tokens must be non-empty and lowercase: {w!r}")
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValueError("vocabulary contains duplicate tokens")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def save(self, path) -> None:
        """One token per line; line number = index."""
        with open(path, "w", encoding="utf-8") as fh:
            for w in self.words:
                fh.write(w + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            return cls([line.rstrip("\n") for line in fh if line.rstrip("\n")])


def build_vocab(docs: Iterable[Iterable[str]], min_df: int = 1,
                max_vocab: int | None = None,
                stopwords: Iterable[str] | None = None) -> Vocabulary:
    """Select the vocabulary from a stream of token sets.

    Keeps tokens with document frequency >= min_df, truncated to the
    max_vocab most frequent; ties break lexicographically. The result is
    ordered by (descending frequency, token), so it is deterministic for a
    fixed stream.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if max_vocab is not None and max_vocab < 1:
        raise ValueError("max_vocab must be >= 1")
    stop = frozenset(stopwords) if stopwords is not None else frozenset()
    df: Counter[str] = Counter()
    for doc in docs:
        df.update(set(doc) - stop)
    kept = sorted((w for w, c in df.items() if c >= min_df),
                  key=lambda w: (-df[w], w))
    if max_vocab is not None:
        kept = kept[:max_vocab]
    if not kept:
        raise ValueError("vocabulary is empty; nothing to embed "
                         "(min_df or stopwords removed every token)")
    return Vocabulary(kept)


def vectorize(doc: Iterable[int], num_words: int) -> np.ndarray:
    """Word-index set -> presence bit vector of length num_words."""
    x = np.zeros(num_words, dtype=bool)
    idx = np.asarray(list(doc), dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= num_words:
            raise ValueError("document contains an out-of-range word index")
        x[idx] = True
    return x


class DocumentSet:
    """Documents as strictly ascending index arrays, plus an inverted index
    mapping each word to the ascending doc ids containing it."""

    def __init__(self, docs: Sequence[Iterable[int]], num_words: int):
        if num_words < 1:
            raise ValueError("num_words must be >= 1")
        self.num_words = num_words
        self.docs: list[np.ndarray] = []
        for doc in docs:
            idx = np.unique(np.asarray(list(doc), dtype=np.int64))
            if idx.size and (idx[0] < 0 or idx[-1] >= num_words):
                raise ValueError("document contains an out-of-range word index")
            self.docs.append(idx)
        by_word: list[list[int]] = [[] for _ in range(num_words)]
        for doc_id, idx in enumerate(self.docs):
            for k in idx:
                by_word[k].append(doc_id)
        self.inverted = [np.asarray(ids, dtype=np.int64) for ids in by_word]

    @classmethod
    def from_token_sets(cls, token_sets: Sequence[Iterable[str]],
                        vocab: Vocabulary) -> "DocumentSet":
        """Keep the in-vocabulary tokens of each document; out-of-vocabulary
        tokens are dropped, possibly leaving empty documents."""
        docs = [[vocab.index[t] for t in doc if t in vocab.index]
                for doc in token_sets]
        return cls(docs, len(vocab))

    @property
    def num_docs(self) -> int:
        return len(self.docs)

    def document_frequency(self, k: int) -> int:
        return len(self.inverted[k])

    def pool_size(self, k: int, contain: bool) -> int:
        size = len(self.inverted[k])
        return size if contain else self.num_docs - size

    def docs_with(self, k: int, contain: bool = True) -> Iterator[int]:
        """Doc ids containing word k, or lazily the complement."""
        if not 0 <= k < self.num_words:
            raise ValueError("word index out of range")
        if contain:
            return iter(int(i) for i in self.inverted[k])
        return self._complement_iter(k)

    def _complement_iter(self, k: int) -> Iterator[int]:
        present = self.inverted[k]
        pos = 0
        for doc_id in range(self.num_docs):
            if pos < len(present) and present[pos] == doc_id:
                pos += 1
            else:
                yield doc_id

    def select_pool(self, k: int, contain: bool, ranks: np.ndarray) -> np.ndarray:
        """Map ranks within the pool (docs with / without word k) to doc ids
        without materializing the complement."""
        ranks = np.asarray(ranks, dtype=np.int64)
        if ranks.size and (ranks.min() < 0 or ranks.max() >= self.pool_size(k, contain)):
            raise ValueError("pool rank out of range")
        present = self.inverted[k]
        if contain:
            return present[ranks]
        # rank r maps to the (r+1)-th doc id missing from `present`
        missing_before = present - np.arange(len(present))
        skipped = np.searchsorted(missing_before, ranks, side="right")
        return ranks + skipped

    def union_vector(self, doc_ids: Iterable[int]) -> np.ndarray:
        """Bitwise OR of the documents' presence vectors."""
        x = np.zeros(self.num_words, dtype=bool)
        for i in doc_ids:
            x[self.docs[i]] = True
        return x


def iter_raw_documents(path) -> Iterator[str]:
    """Raw corpus format: newline-delimited UTF-8, one document per line."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            yield line.rstrip("\n")


def load_token_sets(path, stopwords: Iterable[str] | None = None) -> list[set[str]]:
    stop = frozenset(stopwords) if stopwords is not None else frozenset()
    return [set(tokenize(line)) - stop for line in iter_raw_documents(path)]


def prepare_corpus(documents: Iterable[str], min_df: int = 1,
                   max_vocab: int | None = None,
                   stopwords: Iterable[str] | None = None,
                   ) -> tuple[Vocabulary, DocumentSet]:
    """Tokenize raw documents, build the vocabulary and the document set."""
    token_sets = [set(tokenize(text)) for text in documents]
    vocab = build_vocab(token_sets, min_df=min_df, max_vocab=max_vocab,
                        stopwords=stopwords)
    return vocab, DocumentSet.from_token_sets(token_sets, vocab)


def dumps_corpus(vocab: Vocabulary, dset: DocumentSet) -> bytes:
    """Serialize a compiled corpus (vocabulary + documents + implied inverted
    index) to a deterministic byte string."""
    if dset.num_words != len(vocab):
        raise ValueError("document set does not match the vocabulary size")
    lengths = np.array([len(d) for d in dset.docs], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(lengths)]).astype("<u8")
    flat = (np.concatenate(dset.docs) if dset.docs and offsets[-1] else
            np.empty(0, dtype=np.int64)).astype("<u4")
    header = {
        "format_version": CACHE_FORMAT_VERSION,
        "num_docs": dset.num_docs,
        "vocabulary": vocab.words,
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")
    return b"".join([
        _CACHE_MAGIC,
        struct.pack("<H", CACHE_FORMAT_VERSION),
        struct.pack("<I", len(blob)),
        blob,
        offsets.tobytes(),
        flat.tobytes(),
    ])


def loads_corpus(data: bytes) -> tuple[Vocabulary, DocumentSet]:
    if data[:4] != _CACHE_MAGIC:
        raise ValueError("not a corpus cache file (bad magic bytes)")
    (version,) = struct.unpack_from("<H", data, 4)
    if version != CACHE_FORMAT_VERSION:
        raise ValueError(f"unsupported corpus cache version {version}")
    (header_len,) = struct.unpack_from("<I", data, 6)
    header = json.loads(data[10:10 + header_len].decode("utf-8"))
    vocab = Vocabulary(header["vocabulary"])
    num_docs = header["num_docs"]
    offset = 10 + header_len
    offsets = np.frombuffer(data, dtype="<u8", count=num_docs + 1, offset=offset)
    offset += 8 * (num_docs + 1)
    flat = np.frombuffer(data, dtype="<u4", count=int(offsets[-1]), offset=offset)
    docs = [flat[offsets[i]:offsets[i + 1]].astype(np.int64)
            for i in range(num_docs)]
    return vocab, DocumentSet(docs, len(vocab))


def save_corpus_cache(vocab: Vocabulary, dset: DocumentSet, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps_corpus(vocab, dset))


def load_corpus_cache(path) -> tuple[Vocabulary, DocumentSet]:
    with open(path, "rb") as fh:
        return loads_corpus(fh.read())


def is_corpus_cache(path) -> bool:
    """Sniff the magic bytes so CLI commands accept either raw text or a
    compiled cache."""
    try:
        with open(path, "rb") as fh:
            return fh.read(4) == _CACHE_MAGIC
    except OSError:
        return False
