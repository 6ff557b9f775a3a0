"""Condense radiology reports, normalise terms with semantic dictionaries,
learn word embeddings and classify reports by risk."""

from .condenser import CondenserConfig, condense_corpus
from .corpus import CondensedReport, Report, corpus_stats, load_condensed, load_reports
from .embedding import TrainConfig, build_vocabulary, embed_documents, most_similar, train
from .semdict import SemanticDictionary, load_common_dictionary, load_default_domain_dictionary, map_tokens

__version__ = "0.1.0"

__all__ = [
    "CondensedReport", "CondenserConfig", "Report", "SemanticDictionary", "TrainConfig",
    "build_vocabulary", "condense_corpus", "corpus_stats", "embed_documents", "load_common_dictionary",
    "load_condensed", "load_default_domain_dictionary", "load_reports", "map_tokens", "most_similar",
    "train",
]
