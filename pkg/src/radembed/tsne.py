"""Exact t-SNE (O(N^2) affinities and gradient) for word/document maps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

log = logging.getLogger(__name__)

MAX_BISECTION_STEPS = 200


class TSNEError(RuntimeError):
    pass


@dataclass
class ProjectionConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    initial_momentum: float = 0.5
    final_momentum: float = 0.8
    momentum_switch: int = 250
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    seed: int = 0
    pca_dims: Optional[int] = None

    def validate(self, n: int) -> None:
        if not (1.0 < self.perplexity < n - 1):
            raise ValueError(f"perplexity must lie in (1, N-1) = (1, {n - 1}); got {self.perplexity}")
        if self.iterations < 250:
            raise ValueError("iterations must be >= 250")


@dataclass
class AffinityMatrix:
    P: np.ndarray                 # joint, symmetric, sums to 1
    conditional: np.ndarray       # row i holds p_{j|i}
    betas: np.ndarray             # per-row precision 1 / (2 sigma_i^2)

    @property
    def n(self) -> int:
        return self.P.shape[0]


def _row_stats(d: np.ndarray, beta: float):
    # d holds squared distances shifted so that min(d) == 0
    p = np.exp(-d * beta)
    s = p.sum()
    h = math.log(s) + beta * float(d @ p) / s
    return p / s, h


def row_perplexity(p: np.ndarray) -> float:
    """``2 ** H(p)`` with H in bits."""
    nz = p[p > 0]
    return float(2.0 ** (-(nz * np.log2(nz)).sum()))


def _jitter_duplicates(X: np.ndarray, seed: int) -> np.ndarray:
    _, first, inverse = np.unique(X, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    dup = first[inverse] != np.arange(len(X))
    if not dup.any():
        return X
    X = X.copy()
    rng = np.random.default_rng(seed)
    X[dup] += rng.normal(scale=1e-10, size=(int(dup.sum()), X.shape[1]))
    return X


def squared_distances(X: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def conditional_affinities(X, perplexity: float = 30.0, tol: float = 1e-5, seed: int = 0) -> AffinityMatrix:
    """Gaussian affinities with a per-point bandwidth set by bisection so that
    each row's perplexity is within ``tol`` of the target; then symmetrised
    as ``(p_j|i + p_i|j) / 2N``."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 3:
        raise ValueError("need at least 3 points")
    if not (1.0 < perplexity < n - 1):
        raise ValueError(f"perplexity must lie in (1, N-1) = (1, {n - 1})")
    X = _jitter_duplicates(X, seed)
    D = squared_distances(X)
    cond = np.zeros((n, n))
    betas = np.zeros(n)
    log_target = math.log(perplexity)
    for i in range(n):
        d = np.delete(D[i], i)
        d = d - d.min()
        if not d.any():
            # all neighbours equidistant: every bandwidth gives the uniform row
            betas[i] = 1.0
            cond[i, np.arange(n) != i] = 1.0 / (n - 1)
            continue
        beta = 1.0 / max(np.median(d), 1e-300)
        lo, hi = 0.0, math.inf
        for _ in range(MAX_BISECTION_STEPS):
            p, h = _row_stats(d, beta)
            if abs(math.exp(h) - perplexity) < tol:
                break
            if h > log_target:
                lo = beta
                beta = beta * 2.0 if hi == math.inf else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (beta + lo) / 2.0
        else:
            raise TSNEError(f"perplexity bisection did not converge for row {i}")
        betas[i] = beta
        cond[i, np.arange(n) != i] = p
    P = (cond + cond.T) / (2.0 * n)
    return AffinityMatrix(P, cond, betas)


def _q_terms(Y: np.ndarray):
    num = 1.0 / (1.0 + squared_distances(Y))
    np.fill_diagonal(num, 0.0)
    return num, num.sum()


def kl_divergence(P: np.ndarray, Y: np.ndarray) -> float:
    num, z = _q_terms(Y)
    Q = np.maximum(num / z, 1e-300)
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def kl_gradient(P: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """dKL/dy_i = 4 sum_j (p_ij - q_ij)(y_i - y_j) / (1 + |y_i - y_j|^2)."""
    num, z = _q_terms(Y)
    W = (P - num / z) * num
    return 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)


@dataclass
class TSNEResult:
    coords: np.ndarray
    kl_trace: list = field(default_factory=list)
    affinities: Optional[AffinityMatrix] = None


def _pca(X: np.ndarray, k: int) -> np.ndarray:
    Xc = X - X.mean(axis=0)
    U, S, _ = np.linalg.svd(Xc, full_matrices=False)
    return U[:, :k] * S[:k]


def run_tsne(X, config: Optional[ProjectionConfig] = None) -> TSNEResult:
    """Gradient descent on KL(P || Q) with a Student-t output kernel.

    Uses momentum, early exaggeration and per-coordinate adaptive gains.
    ``kl_trace[t]`` is the (unexaggerated) KL after iteration ``t + 1``.
    """
    config = config or ProjectionConfig()
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    config.validate(n)
    if config.pca_dims and config.pca_dims < X.shape[1]:
        X = _pca(X, config.pca_dims)
    aff = conditional_affinities(X, config.perplexity, seed=config.seed)
    P = np.maximum(aff.P, 1e-300)
    rng = np.random.default_rng(config.seed)
    Y = rng.normal(scale=1e-4, size=(n, 2))
    Y -= Y.mean(axis=0)
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    trace = []
    for it in range(config.iterations):
        exag = config.early_exaggeration if it < config.exaggeration_iters else 1.0
        momentum = config.initial_momentum if it < config.momentum_switch else config.final_momentum
        grad = kl_gradient(exag * P, Y)
        same = np.sign(grad) == np.sign(update)
        gains = np.where(same, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        update = momentum * update - config.learning_rate * gains * grad
        Y = Y + update
        Y -= Y.mean(axis=0)
        if not np.isfinite(Y).all():
            raise TSNEError(f"non-finite coordinates at iteration {it + 1}")
        kl = kl_divergence(P, Y)
        if not math.isfinite(kl):
            raise TSNEError(f"non-finite KL divergence at iteration {it + 1}")
        trace.append(kl)
    return TSNEResult(Y, trace, aff)


def write_tsv(path, ids: Sequence[str], coords: np.ndarray, labels: Optional[Sequence] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, (i, (x, y)) in enumerate(zip(ids, coords)):
            row = f"{i}\t{x:.6f}\t{y:.6f}"
            if labels is not None and labels[k] is not None:
                row += f"\t{labels[k]}"
            fh.write(row + "\n")


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]


def write_svg(path, coords: np.ndarray, labels: Optional[Sequence] = None, size: int = 600,
              names: Optional[Sequence[str]] = None) -> None:
    """Scatter plot with one colour per label; optional text labels."""
    margin = 20
    lo = coords.min(axis=0)
    span = np.maximum(coords.max(axis=0) - lo, 1e-12)
    scale = (size - 2 * margin) / span.max()
    classes = sorted({str(l) for l in labels}) if labels is not None else []
    colour = {c: _PALETTE[k % len(_PALETTE)] for k, c in enumerate(classes)}
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
           '<rect width="100%" height="100%" fill="white"/>']
    for k, (x, y) in enumerate(coords):
        px = margin + (x - lo[0]) * scale
        py = size - margin - (y - lo[1]) * scale
        fill = colour[str(labels[k])] if labels is not None else "#333333"
        out.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="2.5" fill="{fill}" fill-opacity="0.8"/>')
        if names is not None:
            out.append(f'<text x="{px + 3:.2f}" y="{py - 3:.2f}" font-size="8">{_escape(names[k])}</text>')
    for k, c in enumerate(classes):
        out.append(f'<circle cx="{margin + 5}" cy="{margin + 14 * k}" r="4" fill="{colour[c]}"/>'
                   f'<text x="{margin + 14}" y="{margin + 14 * k + 4}" font-size="11">{_escape(c)}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def _escape(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
