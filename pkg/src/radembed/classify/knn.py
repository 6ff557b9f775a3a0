from __future__ import annotations

import numpy as np


def _distances(train_X: np.ndarray, Q: np.ndarray, metric: str) -> np.ndarray:
    if metric == "euclidean":
        # explicit differences rather than the |q|^2 + |x|^2 - 2qx expansion,
        # which loses exact ties to rounding
        diff = Q[:, None, :] - train_X[None, :, :]
        return np.sqrt(np.einsum("qnd,qnd->qn", diff, diff))
    if metric == "cosine":
        qn = np.linalg.norm(Q, axis=1, keepdims=True)
        tn = np.linalg.norm(train_X, axis=1, keepdims=True)
        sim = (Q / np.where(qn > 0, qn, 1.0)) @ (train_X / np.where(tn > 0, tn, 1.0)).T
        return 1.0 - sim
    raise ValueError(f"unknown metric {metric!r}")


def _vote(neighbour_labels: np.ndarray, n_classes: int) -> int:
    counts = np.bincount(neighbour_labels, minlength=n_classes)
    tied = np.flatnonzero(counts == counts.max())
    if len(tied) == 1:
        return int(tied[0])
    # tie: the class of the nearest neighbour among the tied classes
    for lab in neighbour_labels:
        if lab in tied:
            return int(lab)
    raise AssertionError("unreachable")


class KNNClassifier:
    """Brute-force k-nearest-neighbour majority vote.

    Neighbours are ordered by distance, then by training index.
    """

    def __init__(self, k: int = 10, metric: str = "euclidean"):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.metric = metric

    def fit(self, X, y, n_classes: int | None = None) -> "KNNClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if len(X) == 0:
            raise ValueError("empty training set")
        if self.k > len(X):
            raise ValueError(f"k={self.k} exceeds the training set size {len(X)}")
        self.X_, self.y_ = X, y
        self.n_classes_ = n_classes or int(y.max()) + 1
        return self

    def predict(self, Q) -> np.ndarray:
        Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
        out = np.empty(len(Q), dtype=np.int64)
        for start in range(0, len(Q), 32):
            D = _distances(self.X_, Q[start:start + 32], self.metric)
            for r, row in enumerate(D):
                order = np.lexsort((np.arange(len(row)), row))[: self.k]
                out[start + r] = _vote(self.y_[order], self.n_classes_)
        return out


def knn_predict(train_X, train_y, query, k: int, metric: str = "euclidean") -> int:
    """Class of a single query vector."""
    if len(train_X) == 0:
        raise ValueError("empty training set")
    return int(KNNClassifier(k, metric).fit(train_X, train_y).predict([query])[0])
