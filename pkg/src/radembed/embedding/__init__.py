"""word2vec training (CBOW / skip-gram with negative sampling or
hierarchical softmax), similarity queries and document vectors."""

from .model import (
    DegenerateDocumentError,
    DocumentVector,
    EmbeddingError,
    EmbeddingModel,
    OutOfVocabularyError,
    TrainConfig,
    TrainingError,
    cosine,
    embed_document,
    embed_documents,
    load_model,
    most_similar,
    parse_header,
    save_model,
    train,
)
from .vocab import (
    AliasTable,
    HuffmanTree,
    Vocabulary,
    VocabularyError,
    build_huffman,
    build_vocabulary,
    negative_sampling_table,
)

__all__ = [
    "AliasTable", "DegenerateDocumentError", "DocumentVector", "EmbeddingError", "EmbeddingModel",
    "HuffmanTree", "OutOfVocabularyError", "TrainConfig", "TrainingError", "Vocabulary",
    "VocabularyError", "build_huffman", "build_vocabulary", "cosine", "embed_document",
    "embed_documents", "load_model", "most_similar", "negative_sampling_table", "parse_header",
    "save_model", "train",
]
