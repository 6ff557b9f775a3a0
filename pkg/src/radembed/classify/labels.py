from __future__ import annotations

import math
import warnings
from enum import IntEnum
from typing import Sequence

import numpy as np


class RiskClass(IntEnum):
    NoRisk = 0
    MediumRisk = 1
    HighRisk = 2


N_CLASSES = len(RiskClass)


def regroup_labels(label: int) -> RiskClass:
    """1 -> NoRisk; 2, 3, 4 -> MediumRisk; 5 -> HighRisk."""
    if isinstance(label, bool) or label not in (1, 2, 3, 4, 5):
        raise ValueError(f"label must be in 1..5, got {label!r}")
    if label == 1:
        return RiskClass.NoRisk
    if label == 5:
        return RiskClass.HighRisk
    return RiskClass.MediumRisk


class SplitWarning(UserWarning):
    pass


def split_sizes(n: int, fraction: float) -> tuple:
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    # rounding first keeps e.g. 0.29 * 100 from flooring to 28
    n_train = math.floor(round(fraction * n, 9))
    if n >= 2:
        n_train = min(max(n_train, 1), n - 1)
    return n_train, n - n_train


def train_test_split(items: Sequence, fraction: float = 0.8, seed: int = 7,
                     labels: Sequence | None = None, stratified: bool = False) -> tuple:
    """Random partition into (train, test) lists.

    The train share is ``floor(fraction * N)`` (1188 -> 950 / 238). With
    ``stratified`` and ``labels``, each class is split separately with the
    same rule. Warns with :class:`SplitWarning` when a labelled class has no
    training example.
    """
    n = len(items)
    rng = np.random.default_rng(seed)
    if stratified:
        if labels is None:
            raise ValueError("stratified split needs labels")
        labels = list(labels)
        train_idx, test_idx = [], []
        for c in sorted(set(labels)):
            members = np.array([i for i, l in enumerate(labels) if l == c])
            members = members[rng.permutation(len(members))]
            k, _ = split_sizes(len(members), fraction) if len(members) >= 2 else (len(members), 0)
            train_idx.extend(members[:k].tolist())
            test_idx.extend(members[k:].tolist())
        perm_train = [train_idx[i] for i in rng.permutation(len(train_idx))]
        perm_test = [test_idx[i] for i in rng.permutation(len(test_idx))]
    else:
        n_train, _ = split_sizes(n, fraction)
        perm = rng.permutation(n)
        perm_train, perm_test = perm[:n_train].tolist(), perm[n_train:].tolist()
    if labels is not None:
        labels = list(labels)
        missing = set(labels) - {labels[i] for i in perm_train}
        if missing:
            warnings.warn(f"class(es) {sorted(missing)} absent from the training split", SplitWarning, stacklevel=2)
    return [items[i] for i in perm_train], [items[i] for i in perm_test]
