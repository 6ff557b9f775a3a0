"""End-to-end glue: condense, map, embed and classify a report corpus."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .classify import (
    N_CLASSES,
    UnigramVectorizer,
    evaluate,
    make_classifier,
    regroup_labels,
    train_test_split,
)
from .condenser import CondenserConfig, clean_text, condense_corpus, split_sections
from .corpus import CondensedReport, Report
from .embedding import TrainConfig, build_vocabulary, embed_documents, train
from .semdict import load_common_dictionary, load_default_domain_dictionary, map_tokens

log = logging.getLogger(__name__)

CLASSIFIERS = ("rf", "knn10", "knn5")


def default_dictionaries(domain: bool = True) -> list:
    """Common-term dictionary, followed by the hemorrhage dictionary if ``domain``."""
    dicts = [load_common_dictionary()]
    if domain:
        dicts.append(load_default_domain_dictionary())
    return dicts


def map_corpus(reports: Sequence[CondensedReport], dictionaries) -> list:
    return [CondensedReport.build(r.id, map_tokens(r.tokens, dictionaries), r.label) for r in reports]


def labeled_subset(reports: Sequence) -> tuple:
    """``(ids, token lists, RiskClass array)`` of the reports that carry a label."""
    ids, docs, y = [], [], []
    for r in reports:
        if r.label is not None:
            ids.append(r.id)
            docs.append(list(r.tokens))
            y.append(int(regroup_labels(r.label)))
    return ids, docs, np.asarray(y, dtype=np.int64)


@dataclass
class FeatureComparison:
    """Weighted metrics per feature set (``with_dictionary``,
    ``without_dictionary``, ``unigram``) and classifier name."""

    metrics: dict = field(default_factory=dict)
    n_train: int = 0
    n_test: int = 0
    timings: dict = field(default_factory=dict)

    def f1(self, features: str, classifier: str) -> float:
        return self.metrics[features][classifier].weighted_f1

    def to_rows(self) -> list:
        rows = []
        for feats, per_clf in self.metrics.items():
            for clf, m in per_clf.items():
                rows.append({"features": feats, "classifier": clf,
                             "precision": m.weighted_precision, "recall": m.weighted_recall,
                             "f1": m.weighted_f1})
        return rows


def _fit_predict(name: str, Xtr, ytr, Xte, seed: int) -> np.ndarray:
    return make_classifier(name, seed).fit(Xtr, ytr, n_classes=N_CLASSES).predict(Xte)


def _split(n: int, y: np.ndarray, fraction: float, seed: int) -> tuple:
    tr, te = train_test_split(list(range(n)), fraction, seed, labels=y.tolist())
    return np.asarray(tr), np.asarray(te)


def unigram_documents(reports: Sequence[Report], config: CondenserConfig) -> list:
    return [clean_text(split_sections(r.text).text, config) for r in reports]


def embedding_features(corpus_docs: Sequence[Sequence[str]], labeled_docs: Sequence[Sequence[str]],
                       config: TrainConfig) -> np.ndarray:
    vocab = build_vocabulary(corpus_docs, config.min_count)
    model = train(corpus_docs, vocab, config)
    X, _ = embed_documents(model, labeled_docs)
    return X


def compare_features(raw: Sequence[Report], train_config: Optional[TrainConfig] = None,
                     condenser: Optional[CondenserConfig] = None,
                     classifiers: Sequence[str] = CLASSIFIERS,
                     fraction: float = 0.8, seed: int = 7, threads: int = 1) -> FeatureComparison:
    """Score document-embedding features with and without the domain
    dictionary against a unigram-count baseline.

    Embeddings are trained on every report; classifiers see only the
    labelled ones, split ``fraction`` / ``1 - fraction``. The unigram
    baseline counts the words of the cleaned FINDINGS/IMPRESSION text, with
    no negation encoding, collocations or mapping; its vocabulary comes from
    the training split.
    """
    cfg = train_config or TrainConfig()
    out = FeatureComparison()
    t0 = time.perf_counter()
    condensed = condense_corpus(raw, condenser, threads=threads).reports
    out.timings["condense"] = time.perf_counter() - t0

    ccfg = condenser or CondenserConfig.default()
    ids, _, y = labeled_subset(condensed)
    base_docs = unigram_documents([r for r in raw if r.label is not None], ccfg)
    tr, te = _split(len(ids), y, fraction, seed)
    out.n_train, out.n_test = len(tr), len(te)

    feature_sets = {}
    for name, domain in (("with_dictionary", True), ("without_dictionary", False)):
        t0 = time.perf_counter()
        mapped = map_corpus(condensed, default_dictionaries(domain))
        _, docs, _ = labeled_subset(mapped)
        feature_sets[name] = embedding_features([r.tokens for r in mapped], docs, cfg)
        out.timings[name] = time.perf_counter() - t0

    vec = UnigramVectorizer().fit([base_docs[i] for i in tr])
    uni = vec.transform(base_docs).toarray()
    feature_sets["unigram"] = uni

    for name, X in feature_sets.items():
        out.metrics[name] = {}
        for clf in classifiers:
            pred = _fit_predict(clf, X[tr], y[tr], X[te], seed)
            out.metrics[name][clf] = evaluate(pred, y[te])
    return out
