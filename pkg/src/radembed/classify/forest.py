"""Random forest of CART trees (Gini impurity, sqrt(d) features per split)."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


class ConstantClassifierWarning(UserWarning):
    pass


def gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - p @ p)


@dataclass
class DecisionTree:
    n_classes: int
    max_features: int
    min_samples_leaf: int = 1
    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)

    def _new_node(self, counts) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(counts)
        return len(self.feature) - 1

    def _best_split(self, Xn: np.ndarray, yn: np.ndarray, feats: np.ndarray):
        n = len(yn)
        msl = self.min_samples_leaf
        order = np.argsort(Xn, axis=0, kind="stable")
        xs = np.take_along_axis(Xn, order, axis=0)
        ys = yn[order]
        onehot = (ys[:, :, None] == np.arange(self.n_classes)).astype(np.float64)
        left = np.cumsum(onehot, axis=0)[:-1]
        total = left[-1] + onehot[-1] if n > 1 else onehot[0]
        right = total[None] - left
        nl = np.arange(1, n, dtype=np.float64)[:, None]
        nr = n - nl
        gl = 1.0 - np.sum(left * left, axis=2) / (nl * nl)
        gr = 1.0 - np.sum(right * right, axis=2) / (nr * nr)
        score = (nl * gl + nr * gr) / n
        valid = xs[1:] > xs[:-1]
        if msl > 1:
            valid &= (nl >= msl) & (nr >= msl)
        if not valid.any():
            return None
        score = np.where(valid, score, np.inf)
        r, f = np.unravel_index(np.argmin(score), score.shape)
        lo, hi = xs[r, f], xs[r + 1, f]
        thr = lo + (hi - lo) / 2.0
        if not (lo <= thr < hi):
            thr = lo
        return int(feats[f]), float(thr)

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "DecisionTree":
        d = X.shape[1]
        root_counts = np.bincount(y, minlength=self.n_classes)
        stack = [(self._new_node(root_counts), np.arange(len(y)))]
        while stack:
            node, idx = stack.pop()
            counts = self.value[node]
            if np.count_nonzero(counts) <= 1 or len(idx) < 2 * self.min_samples_leaf:
                continue
            yn = y[idx]
            perm = rng.permutation(d)
            split = None
            # like common CART implementations, keep drawing feature batches
            # while every drawn feature is constant on this node
            for start in range(0, d, self.max_features):
                feats = perm[start:start + self.max_features]
                split = self._best_split(X[np.ix_(idx, feats)], yn, feats)
                if split is not None:
                    break
            if split is None:
                continue
            f, thr = split
            go_left = X[idx, f] <= thr
            li, ri = idx[go_left], idx[~go_left]
            self.feature[node] = f
            self.threshold[node] = thr
            lnode = self._new_node(np.bincount(y[li], minlength=self.n_classes))
            rnode = self._new_node(np.bincount(y[ri], minlength=self.n_classes))
            self.left[node], self.right[node] = lnode, rnode
            stack.append((rnode, ri))
            stack.append((lnode, li))
        self._freeze()
        return self

    def _freeze(self):
        self.feature_ = np.array(self.feature, dtype=np.int64)
        self.threshold_ = np.array(self.threshold)
        self.left_ = np.array(self.left, dtype=np.int64)
        self.right_ = np.array(self.right, dtype=np.int64)
        self.value_ = np.array(self.value, dtype=np.float64)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature_[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            nd = node[rows]
            go_left = X[rows, self.feature_[nd]] <= self.threshold_[nd]
            node[rows] = np.where(go_left, self.left_[nd], self.right_[nd])
            active = self.feature_[node] >= 0
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.value_[self.apply(X)], axis=1)


def _canonical_order(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    # sort rows by (label, features) so training order never matters
    keys = [X[:, j] for j in range(X.shape[1] - 1, -1, -1)] + [y]
    return np.lexsort(keys)


@dataclass
class ForestModel:
    trees: list
    n_classes: int
    constant: int | None = None

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.constant is not None:
            return np.full(len(X), self.constant, dtype=np.int64)
        votes = np.zeros((len(X), self.n_classes), dtype=np.int64)
        rows = np.arange(len(X))
        for t in self.trees:
            votes[rows, t.predict(X)] += 1
        return np.argmax(votes, axis=1)


def rf_train(X, y, n_trees: int = 100, seed: int = 0, max_features: int | str = "sqrt",
             n_classes: int | None = None, min_samples_leaf: int = 1) -> ForestModel:
    """Bagged CART trees grown to purity.

    Tree ``t`` draws its bootstrap sample and feature subsets from
    ``default_rng([seed, t])`` over a canonical ordering of the training set.
    Single-class data yields a constant model and a warning.
    """
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(X) == 0:
        raise ValueError("empty training set")
    n_classes = n_classes or int(y.max()) + 1
    present = np.unique(y)
    if len(present) == 1:
        warnings.warn("training data has a single class; forest is a constant classifier",
                      ConstantClassifierWarning, stacklevel=2)
        return ForestModel([], n_classes, constant=int(present[0]))
    order = _canonical_order(X, y)
    X, y = X[order], y[order]
    d = X.shape[1]
    if max_features == "sqrt":
        m = max(1, int(math.sqrt(d)))
    elif max_features is None:
        m = d
    else:
        m = max(1, min(int(max_features), d))
    n = len(y)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([seed, t])
        boot = rng.integers(0, n, size=n)
        trees.append(DecisionTree(n_classes, m, min_samples_leaf).fit(X[boot], y[boot], rng))
    return ForestModel(trees, n_classes)


def rf_predict(model: ForestModel, vector) -> int:
    return int(model.predict([vector])[0])
