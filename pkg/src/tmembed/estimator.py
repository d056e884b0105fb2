"""Scikit-learn style front end: fit on raw documents, transform tokens into
their embedding rows."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import TMConfig
from .corpus import prepare_corpus
from .embedding import EmbedConfig, extract_embeddings, train


class TsetlinWordEmbedder(TransformerMixin, BaseEstimator):
    """Learn sparse logical word embeddings from raw text documents.

    Parameters
    ----------
    n_clauses : int
        Size of the shared clause pool (the embedding dimensionality).
    margin : int
        Target magnitude for the weighted clause sum.
    specificity : float
        Forgetting probability is 1/specificity; must be > 1.
    memory_depth : int
        Graded memory positions per side; 2 gives the classic four-position
        memory.
    accumulation : int
        Documents unioned into each training example.
    rounds : int
        Training rounds; each round visits every vocabulary word once.
    min_df, max_vocab, stopwords
        Vocabulary selection: document-frequency cutoff, size cap, and an
        optional collection of words to exclude.
    oov : {"error", "zero"}
        Whether transform raises on unknown tokens or embeds them as zeros.
    random_state : int or None
        Seed for the single generator all randomness flows from. None draws
        a fresh seed, giving up reproducibility.

    Attributes
    ----------
    vocabulary_ : Vocabulary
        Selected tokens in embedding-row order.
    model_ : TsetlinAutoencoder
        The trained machine (clause memories and weights).
    embeddings_ : ndarray of shape (n_words, n_clauses)
        Weighted embeddings, integer entries in [0, margin].
    binary_embeddings_ : ndarray of shape (n_words, n_clauses)
        Purely logical embeddings (positive-weight pattern).
    training_errors_ : list of float
        Mean margin error per round.
    """

    def __init__(self, n_clauses=600, margin=1200, specificity=5.0,
                 memory_depth=2, accumulation=25, rounds=2000, min_df=1,
                 max_vocab=None, stopwords=None, oov="error", random_state=0):
        self.n_clauses = n_clauses
        self.margin = margin
        self.specificity = specificity
        self.memory_depth = memory_depth
        self.accumulation = accumulation
        self.rounds = rounds
        self.min_df = min_df
        self.max_vocab = max_vocab
        self.stopwords = stopwords
        self.oov = oov
        self.random_state = random_state

    def fit(self, X, y=None):
        """Fit on an iterable of raw text documents."""
        documents = [str(doc) for doc in X]
        if self.oov not in ("error", "zero"):
            raise ValueError("oov must be 'error' or 'zero'")
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1)[0])
        config = EmbedConfig(
            tm=TMConfig(n_clauses=self.n_clauses, margin=self.margin,
                        specificity=self.specificity,
                        memory_depth=self.memory_depth, seed=seed),
            accumulation=self.accumulation, rounds=self.rounds)
        vocab, dset = prepare_corpus(documents, min_df=self.min_df,
                                     max_vocab=self.max_vocab,
                                     stopwords=self.stopwords)
        errors: list[float] = []
        tm = train(dset, vocab, config,
                   on_round=lambda rnd, err, skipped: errors.append(err))
        emb = extract_embeddings(tm)
        self.vocabulary_ = vocab
        self.model_ = tm
        self.embeddings_ = emb.weighted
        self.binary_embeddings_ = emb.binary
        self.training_errors_ = errors
        return self

    def transform(self, X):
        """Map an iterable of word tokens to their weighted embedding rows."""
        check_is_fitted(self, "embeddings_")
        tokens = [str(t) for t in X]
        out = np.zeros((len(tokens), self.embeddings_.shape[1]), dtype=np.int64)
        for row, token in enumerate(tokens):
            k = self.vocabulary_.index.get(token.lower())
            if k is None:
                if self.oov == "error":
                    raise ValueError(f"unknown token: {token!r}")
                continue
            out[row] = self.embeddings_[k]
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "embeddings_")
        return np.array([f"clause_{j}" for j in range(self.embeddings_.shape[1])])
