"""Sparse, interpretable logical word embeddings learned by a Tsetlin
machine autoencoder."""

from .core import (
    ClauseMemory,
    TMConfig,
    TsetlinAutoencoder,
    clause_eval,
    load_model,
    margin_error,
    save_model,
    type_ia_feedback,
    type_ib_feedback,
    type_ii_feedback,
)
from .corpus import (
    DocumentSet,
    Vocabulary,
    build_vocab,
    prepare_corpus,
    tokenize,
    vectorize,
)
from .embedding import (
    EmbedConfig,
    EmbeddingMatrices,
    TrainingExample,
    extract_embeddings,
    generate_example,
    train,
)
from .estimator import TsetlinWordEmbedder
from .evaluation import (
    EvalReport,
    SimilarityDataset,
    cosine_similarity,
    evaluate_similarity,
    nearest_neighbors,
    rank_correlations,
)
from .interpret import (
    ClauseExplanation,
    SparsityReport,
    decode_clause,
    explain_word,
    format_conjunction,
    parse_conjunction,
    sparsity_report,
)

__version__ = "0.1.0"

__all__ = [
    "ClauseMemory",
    "TMConfig",
    "TsetlinAutoencoder",
    "clause_eval",
    "margin_error",
    "type_ia_feedback",
    "type_ib_feedback",
    "type_ii_feedback",
    "save_model",
    "load_model",
    "Vocabulary",
    "DocumentSet",
    "tokenize",
    "build_vocab",
    "vectorize",
    "prepare_corpus",
    "TrainingExample",
    "EmbedConfig",
    "EmbeddingMatrices",
    "generate_example",
    "train",
    "extract_embeddings",
    "TsetlinWordEmbedder",
    "SimilarityDataset",
    "EvalReport",
    "cosine_similarity",
    "rank_correlations",
    "evaluate_similarity",
    "nearest_neighbors",
    "ClauseExplanation",
    "SparsityReport",
    "decode_clause",
    "explain_word",
    "sparsity_report",
    "format_conjunction",
    "parse_conjunction",
    "__version__",
]
