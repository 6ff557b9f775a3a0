from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .labels import N_CLASSES, RiskClass


@dataclass
class Metrics:
    """Per-class and support-weighted precision/recall/F1.

    ``confusion[i, j]`` counts items of true class i predicted as j.
    ``zero_division`` lists the ``(metric, class)`` pairs that had a zero
    denominator and were set to 0.
    """

    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    confusion: np.ndarray
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    zero_division: list = field(default_factory=list)

    def to_dict(self) -> dict:
        names = [c.name for c in RiskClass][: len(self.support)]
        return {
            "per_class": {
                name: {
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                    "support": int(self.support[i]),
                }
                for i, name in enumerate(names)
            },
            "weighted": {
                "precision": self.weighted_precision,
                "recall": self.weighted_recall,
                "f1": self.weighted_f1,
            },
            "confusion_matrix": self.confusion.tolist(),
            "zero_division": [list(z) for z in self.zero_division],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def confusion_matrix(predictions: Sequence[int], truth: Sequence[int], n_classes: int = N_CLASSES) -> np.ndarray:
    p = np.asarray(predictions, dtype=np.int64)
    t = np.asarray(truth, dtype=np.int64)
    if len(p) != len(t):
        raise ValueError(f"length mismatch: {len(p)} predictions vs {len(t)} labels")
    if len(p) and (min(p.min(), t.min()) < 0 or max(p.max(), t.max()) >= n_classes):
        raise ValueError(f"labels must lie in 0..{n_classes - 1}")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (t, p), 1)
    return cm


def metrics_from_confusion(cm: np.ndarray) -> Metrics:
    cm = np.asarray(cm, dtype=np.int64)
    tp = np.diag(cm).astype(np.float64)
    support = cm.sum(axis=1)
    predicted = cm.sum(axis=0)
    flags = []

    def safe_div(num, den, name):
        out = np.zeros_like(num)
        for c in range(len(num)):
            if den[c] == 0:
                flags.append((name, c))
            else:
                out[c] = num[c] / den[c]
        return out

    precision = safe_div(tp, predicted.astype(np.float64), "precision")
    recall = safe_div(tp, support.astype(np.float64), "recall")
    f1 = safe_div(2 * precision * recall, precision + recall, "f1")
    total = support.sum()
    if total == 0:
        raise ValueError("no items to evaluate")
    w = support / total
    return Metrics(precision, recall, f1, support, cm,
                   float(w @ precision), float(w @ recall), float(w @ f1), flags)


def evaluate(predictions: Sequence[int], truth: Sequence[int], n_classes: int = N_CLASSES) -> Metrics:
    return metrics_from_confusion(confusion_matrix(predictions, truth, n_classes))
