"""Cross-validated grid search over embedding window size and dimension."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ..embedding import TrainConfig, build_vocabulary, embed_documents, train
from .forest import rf_train
from .knn import KNNClassifier
from .labels import N_CLASSES
from .metrics import evaluate

log = logging.getLogger(__name__)


class RandomForest:
    def __init__(self, n_trees: int = 100, seed: int = 0):
        self.n_trees = n_trees
        self.seed = seed

    def fit(self, X, y, n_classes: int = N_CLASSES) -> "RandomForest":
        self.model_ = rf_train(X, y, self.n_trees, self.seed, n_classes=n_classes)
        return self

    def predict(self, X) -> np.ndarray:
        return self.model_.predict(X)


def make_classifier(name: str, seed: int = 0):
    """``rf`` / ``rf:<n_trees>`` or ``knn<k>`` / ``knn:<k>`` (``:cosine`` suffix allowed)."""
    key = name.lower().replace(" ", "")
    if key.startswith("rf"):
        rest = key[2:].lstrip(":")
        return RandomForest(int(rest) if rest else 100, seed)
    if key.startswith("knn"):
        parts = key[3:].lstrip(":").split(":")
        k = int(parts[0]) if parts[0] else 10
        metric = parts[1] if len(parts) > 1 else "euclidean"
        return KNNClassifier(k, metric)
    raise ValueError(f"unknown classifier {name!r}")


def kfold_indices(n: int, folds: int, seed: int) -> list:
    if folds < 2 or folds > n:
        raise ValueError(f"folds must be in 2..{n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(chunk) for chunk in np.array_split(perm, folds)]


def cross_validate(X: np.ndarray, y: np.ndarray, classifier: str, folds: int, seed: int) -> list:
    scores = []
    for k, test_idx in enumerate(kfold_indices(len(y), folds, seed)):
        mask = np.ones(len(y), dtype=bool)
        mask[test_idx] = False
        clf = make_classifier(classifier, seed + k).fit(X[mask], y[mask])
        scores.append(evaluate(clf.predict(X[test_idx]), y[test_idx]).weighted_f1)
    return scores


@dataclass
class GridSearchSpec:
    windows: list
    dims: list
    folds: int = 5
    classifier: str = "rf"
    seed: int = 7
    mode: str = "grid"            # "grid" (Cartesian) or "independent"
    base_window: Optional[int] = None
    base_dim: Optional[int] = None
    train_config: TrainConfig = field(default_factory=TrainConfig)
    threads: int = 1

    def __post_init__(self):
        if not self.windows or not self.dims:
            raise ValueError("window and dimension candidate lists must be non-empty")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.mode not in ("grid", "independent"):
            raise ValueError("mode must be 'grid' or 'independent'")

    def cells(self) -> list:
        if self.mode == "grid":
            return [(w, d) for w in self.windows for d in self.dims]
        bw = self.base_window if self.base_window is not None else self.windows[0]
        bd = self.base_dim if self.base_dim is not None else self.dims[0]
        cells = [(w, bd) for w in self.windows] + [(bw, d) for d in self.dims]
        return list(dict.fromkeys(cells))


@dataclass
class GridCell:
    window: int
    dim: int
    scores: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def mean_f1(self) -> float:
        return float(np.mean(self.scores)) if self.scores else float("nan")

    @property
    def std_f1(self) -> float:
        return float(np.std(self.scores)) if self.scores else float("nan")


@dataclass
class GridResult:
    best_window: Optional[int]
    best_dim: Optional[int]
    cells: list

    def to_tsv(self) -> str:
        lines = ["window\tdim\tmean_f1\tstd_f1"]
        for c in self.cells:
            if c.error is None:
                lines.append(f"{c.window}\t{c.dim}\t{c.mean_f1:.6f}\t{c.std_f1:.6f}")
            else:
                lines.append(f"{c.window}\t{c.dim}\tnan\tnan")
        return "\n".join(lines) + "\n"


def grid_search(corpus: Sequence[Sequence[str]], labeled_docs: Sequence[Sequence[str]],
                labels: Sequence[int], spec: GridSearchSpec) -> GridResult:
    """For each (window, dim): retrain embeddings on ``corpus``, average the
    labelled documents and score ``spec.classifier`` by k-fold weighted F1.

    A cell whose training fails is recorded with its error and skipped.
    """
    y = np.asarray(labels, dtype=np.int64)
    base = spec.train_config
    vocab = build_vocabulary(corpus, base.min_count)

    def run(cell):
        window, dim = cell
        out = GridCell(window, dim)
        try:
            cfg = replace(base, window=window, dim=dim, threads=1)
            model = train(corpus, vocab, cfg)
            X, _ = embed_documents(model, labeled_docs)
            out.scores = cross_validate(X, y, spec.classifier, spec.folds, spec.seed)
        except Exception as exc:  # noqa: BLE001 - recorded per cell
            log.warning("grid cell window=%d dim=%d failed: %s", window, dim, exc)
            out.error = f"{type(exc).__name__}: {exc}"
        return out

    cells = spec.cells()
    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            results = list(pool.map(run, cells))
    else:
        results = [run(c) for c in cells]
    ok = [c for c in results if c.error is None]
    if not ok:
        return GridResult(None, None, results)
    best = max(ok, key=lambda c: c.mean_f1)  # first maximum in grid order
    return GridResult(best.window, best.dim, results)
