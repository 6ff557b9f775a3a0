from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import sparse


def unigram_vocabulary(docs: Sequence[Sequence[str]]) -> list:
    """Distinct tokens of the (training) documents in first-seen order."""
    seen = {}
    for toks in docs:
        for t in toks:
            if t not in seen:
                seen[t] = len(seen)
    return list(seen)


def unigram_features(docs: Sequence[Sequence[str]], vocab: Sequence[str]) -> sparse.csr_matrix:
    """Raw term counts per document over a fixed vocabulary.

    Tokens outside ``vocab`` are ignored.
    """
    index = {w: i for i, w in enumerate(vocab)}
    rows, cols = [], []
    for r, toks in enumerate(docs):
        for t in toks:
            j = index.get(t)
            if j is not None:
                rows.append(r)
                cols.append(j)
    data = np.ones(len(rows))
    m = sparse.csr_matrix((data, (rows, cols)), shape=(len(docs), len(vocab)))
    m.sum_duplicates()
    return m


class UnigramVectorizer:
    """Vocabulary fitted on training documents only; optional TF-IDF weighting."""

    def __init__(self, tfidf: bool = False):
        self.tfidf = tfidf

    def fit(self, docs) -> "UnigramVectorizer":
        self.vocab_ = unigram_vocabulary(docs)
        if self.tfidf:
            counts = unigram_features(docs, self.vocab_)
            df = np.asarray((counts > 0).sum(axis=0)).ravel()
            self.idf_ = np.log((1.0 + len(docs)) / (1.0 + df)) + 1.0
        return self

    def transform(self, docs) -> sparse.csr_matrix:
        m = unigram_features(docs, self.vocab_)
        if self.tfidf:
            m = m @ sparse.diags(self.idf_)
            norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
            m = sparse.diags(1.0 / np.where(norms > 0, norms, 1.0)) @ m
            m = sparse.csr_matrix(m)
        return m

    def fit_transform(self, docs) -> sparse.csr_matrix:
        return self.fit(docs).transform(docs)
