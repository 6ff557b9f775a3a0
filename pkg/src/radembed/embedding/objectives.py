"""Reference (numpy) losses and gradients for one training example.

These mirror the compiled kernels and exist so the kernels can be checked
against finite differences. Gradients are returned as dense arrays shaped
like the weight matrices.

Negative sampling, with ``h`` the hidden vector, ``u_o`` the target's
output vector and ``u_j`` the negatives' output vectors::

    E = -log s(u_o . h) - sum_j log s(-u_j . h)
    dE/du_o = (s(u_o . h) - 1) h
    dE/du_j = s(u_j . h) h
    dE/dh   = (s(u_o . h) - 1) u_o + sum_j s(u_j . h) u_j

Hierarchical softmax replaces the label set by the target's Huffman path:
bit 0 nodes act as positives and bit 1 nodes as negatives.
"""

from __future__ import annotations

import numpy as np


def sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))), np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))


def log_sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0, -np.log1p(np.exp(-np.abs(x))), x - np.log1p(np.exp(-np.abs(x))))


def _labelled_rows(objective, target, negatives, path):
    if objective == "ns":
        rows = np.concatenate([[target], np.asarray(negatives, dtype=np.int64)])
        labels = np.zeros(len(rows))
        labels[0] = 1.0
    elif objective == "hs":
        points, codes = path
        rows = np.asarray(points, dtype=np.int64)
        labels = 1.0 - np.asarray(codes, dtype=np.float64)
    else:
        raise ValueError(f"unknown objective {objective!r}")
    return rows, labels


def output_loss_grad(h, w_out, objective, target=None, negatives=(), path=None):
    """Loss at hidden vector ``h`` plus dE/dh and dE/dw_out."""
    rows, labels = _labelled_rows(objective, target, negatives, path)
    f = w_out[rows] @ h
    signs = 2.0 * labels - 1.0
    loss = -float(np.sum(log_sigmoid(signs * f)))
    g = sigmoid(f) - labels
    grad_h = g @ w_out[rows]
    grad_out = np.zeros_like(w_out)
    np.add.at(grad_out, rows, np.outer(g, h))
    return loss, grad_h, grad_out


def cbow_loss_grad(w_in, w_out, context, target, objective="ns", negatives=(), path=None):
    """CBOW example: ``h`` is the mean of the context word vectors."""
    context = np.asarray(context, dtype=np.int64)
    h = w_in[context].mean(axis=0)
    loss, grad_h, grad_out = output_loss_grad(h, w_out, objective, target, negatives, path)
    grad_in = np.zeros_like(w_in)
    np.add.at(grad_in, context, np.broadcast_to(grad_h / len(context), (len(context), len(grad_h))))
    return loss, grad_in, grad_out


def skipgram_loss_grad(w_in, w_out, center, target, objective="ns", negatives=(), path=None):
    """Skip-gram example: ``h`` is the centre word's vector, ``target`` one context word."""
    h = w_in[center]
    loss, grad_h, grad_out = output_loss_grad(h, w_out, objective, target, negatives, path)
    grad_in = np.zeros_like(w_in)
    grad_in[center] = grad_h
    return loss, grad_in, grad_out


def full_softmax_loss(h, w_out, target):
    """``-u_o . h + log sum_j exp(u_j . h)`` over all output rows."""
    f = w_out @ h
    m = f.max()
    return float(-f[target] + m + np.log(np.exp(f - m).sum()))


def hs_word_probabilities(h, w_out, tree) -> np.ndarray:
    """p(w | h) for every word under the Huffman-tree factorisation."""
    V = len(tree.lengths)
    probs = np.empty(V)
    for w in range(V):
        pts, bits = tree.path(w)
        f = w_out[pts] @ h
        probs[w] = np.exp(np.sum(log_sigmoid((1.0 - 2.0 * bits) * f)))
    return probs
