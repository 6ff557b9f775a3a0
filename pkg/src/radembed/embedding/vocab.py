from __future__ import annotations

import heapq
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class VocabularyError(ValueError):
    pass


@dataclass
class Vocabulary:
    """Dense word index, most frequent word first."""

    words: list
    counts: Optional[np.ndarray]
    min_count: int
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise VocabularyError("duplicate words in vocabulary")
        if self.counts is not None:
            self.counts = np.asarray(self.counts, dtype=np.int64)
            if self.counts.shape != (len(self.words),):
                raise VocabularyError("counts must have one entry per word")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self.index

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        """Indices of in-vocabulary tokens (OOV tokens are dropped)."""
        idx = self.index
        return np.fromiter((idx[t] for t in tokens if t in idx), dtype=np.int64)


def build_vocabulary(corpus: Iterable[Sequence[str]], min_count: int = 5) -> Vocabulary:
    """Words seen at least ``min_count`` times, by descending count.

    Ties keep first-occurrence order (``Counter`` preserves insertion order
    and ``sorted`` is stable).
    """
    if min_count < 1:
        raise VocabularyError("min_count must be >= 1")
    counts = Counter()
    for toks in corpus:
        counts.update(toks)
    kept = sorted(((w, c) for w, c in counts.items() if c >= min_count), key=lambda wc: -wc[1])
    if not kept:
        raise VocabularyError(f"no word occurs at least {min_count} times")
    return Vocabulary([w for w, _ in kept], np.array([c for _, c in kept], dtype=np.int64), min_count)


@dataclass
class HuffmanTree:
    """Per-word root-to-leaf paths: inner-node rows and branch bits.

    Inner nodes are numbered ``0..V-2``; the root is ``V-2``.
    """

    points: np.ndarray   # (V, max_len) int64, padded with -1
    codes: np.ndarray    # (V, max_len) float64 0/1 bits, padded with 0
    lengths: np.ndarray  # (V,) int64

    @property
    def n_inner(self) -> int:
        return len(self.lengths) - 1

    def path(self, word: int):
        n = self.lengths[word]
        return self.points[word, :n], self.codes[word, :n]


def build_huffman(counts: Sequence[int]) -> HuffmanTree:
    counts = np.asarray(counts, dtype=np.int64)
    V = len(counts)
    if V == 0:
        raise VocabularyError("empty vocabulary")
    if V == 1:
        return HuffmanTree(np.full((1, 1), -1, dtype=np.int64), np.zeros((1, 1)), np.zeros(1, dtype=np.int64))
    tick = itertools.count()
    # nodes 0..V-1 are leaves, V..2V-2 inner; heap ties broken by creation order
    heap = [(int(c), next(tick), i) for i, c in enumerate(counts)]
    heapq.heapify(heap)
    parent = np.zeros(2 * V - 1, dtype=np.int64)
    bit = np.zeros(2 * V - 1, dtype=np.int64)
    node = V
    while len(heap) > 1:
        c1, _, a = heapq.heappop(heap)
        c2, _, b = heapq.heappop(heap)
        parent[a], bit[a] = node, 0
        parent[b], bit[b] = node, 1
        heapq.heappush(heap, (c1 + c2, next(tick), node))
        node += 1
    root = 2 * V - 2
    paths = []
    for w in range(V):
        pts, bits = [], []
        n = w
        while n != root:
            bits.append(bit[n])
            pts.append(parent[n] - V)
            n = parent[n]
        paths.append((pts[::-1], bits[::-1]))
    max_len = max(len(p) for p, _ in paths)
    points = np.full((V, max_len), -1, dtype=np.int64)
    codes = np.zeros((V, max_len))
    lengths = np.zeros(V, dtype=np.int64)
    for w, (pts, bits) in enumerate(paths):
        points[w, :len(pts)] = pts
        codes[w, :len(bits)] = bits
        lengths[w] = len(pts)
    return HuffmanTree(points, codes, lengths)


@dataclass
class AliasTable:
    """Walker/Vose alias table for O(1) draws from a discrete distribution."""

    prob: np.ndarray
    alias: np.ndarray
    p: np.ndarray

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "AliasTable":
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or len(w) == 0 or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("weights must be a non-empty non-negative vector with positive sum")
        p = w / w.sum()
        n = len(p)
        scaled = p * n
        prob = np.ones(n)
        alias = np.arange(n, dtype=np.int64)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            g = large.pop()
            prob[s] = scaled[s]
            alias[s] = g
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            (small if scaled[g] < 1.0 else large).append(g)
        # leftovers are 1 up to rounding
        return cls(prob, alias, p)


def negative_sampling_table(counts: Sequence[int], power: float = 0.75) -> AliasTable:
    return AliasTable.from_weights(np.asarray(counts, dtype=np.float64) ** power)
