"""Compiled inner loops for word2vec training.

Weight layout: ``w_in`` (V x d) holds the word vectors, ``w_out`` (V x d)
holds negative-sampling output vectors or, for hierarchical softmax, the
V-1 inner-node vectors in rows ``0..V-2``.

All kernels release the GIL so several can run concurrently on shared
weights (unsynchronized, Hogwild-style updates).
"""

import numpy as np
from numba import njit

ARCH_CBOW = 0
ARCH_SKIPGRAM = 1
OBJ_NS = 0
OBJ_HS = 1

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@njit(nogil=True, cache=True)
def next_uniform(state):
    """splitmix64 step on ``state[0]``; returns a float in [0, 1)."""
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return float(z >> _S11) * _INV53


@njit(nogil=True, cache=True)
def alias_draw(prob, alias, state):
    n = prob.shape[0]
    i = int(next_uniform(state) * n)
    if i >= n:
        i = n - 1
    if next_uniform(state) < prob[i]:
        return i
    return alias[i]


@njit(nogil=True, cache=True)
def draw_many(prob, alias, n, seed):
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed)
    out = np.empty(n, dtype=np.int64)
    for t in range(n):
        out[t] = alias_draw(prob, alias, state)
    return out


@njit(nogil=True, cache=True)
def log_sigmoid(x):
    if x >= 0.0:
        return -np.log1p(np.exp(-x))
    return x - np.log1p(np.exp(x))


@njit(nogil=True, cache=True)
def sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(nogil=True, cache=True)
def ns_update(h, w_out, target, negs, n_negs, lr, grad_h):
    """Negative-sampling loss at ``h``; applies the output-vector step and
    accumulates dE/dh into ``grad_h`` (not applied)."""
    d = h.shape[0]
    loss = 0.0
    for s in range(n_negs + 1):
        if s == 0:
            row = target
            label = 1.0
        else:
            row = negs[s - 1]
            label = 0.0
        f = 0.0
        for c in range(d):
            f += h[c] * w_out[row, c]
        if label > 0.0:
            loss -= log_sigmoid(f)
        else:
            loss -= log_sigmoid(-f)
        # dE/df = sigmoid(f) - label
        g = sigmoid(f) - label
        for c in range(d):
            grad_h[c] += g * w_out[row, c]
        for c in range(d):
            w_out[row, c] -= lr * g * h[c]
    return loss


@njit(nogil=True, cache=True)
def hs_update(h, w_out, points, codes, length, lr, grad_h):
    """Hierarchical-softmax loss along one Huffman path (bit 0 -> sigmoid(f),
    bit 1 -> sigmoid(-f)); same update contract as :func:`ns_update`."""
    d = h.shape[0]
    loss = 0.0
    for s in range(length):
        row = points[s]
        f = 0.0
        for c in range(d):
            f += h[c] * w_out[row, c]
        label = 1.0 - codes[s]
        if label > 0.0:
            loss -= log_sigmoid(f)
        else:
            loss -= log_sigmoid(-f)
        g = sigmoid(f) - label
        for c in range(d):
            grad_h[c] += g * w_out[row, c]
        for c in range(d):
            w_out[row, c] -= lr * g * h[c]
    return loss


@njit(nogil=True, cache=True)
def _draw_negatives(target, k, prob, alias, state, negs):
    n = 0
    for _ in range(k):
        w = alias_draw(prob, alias, state)
        if w == target:
            continue
        negs[n] = w
        n += 1
    return n


@njit(nogil=True, cache=True)
def cbow_example(w_in, w_out, ctx, n_ctx, target, objective, negs, n_negs,
                 points, codes, path_len, lr, h, grad_h):
    d = w_in.shape[1]
    for c in range(d):
        h[c] = 0.0
        grad_h[c] = 0.0
    for j in range(n_ctx):
        for c in range(d):
            h[c] += w_in[ctx[j], c]
    inv = 1.0 / n_ctx
    for c in range(d):
        h[c] *= inv
    if objective == OBJ_NS:
        loss = ns_update(h, w_out, target, negs, n_negs, lr, grad_h)
    else:
        loss = hs_update(h, w_out, points, codes, path_len, lr, grad_h)
    # h is the context mean, so each context row receives grad_h / n_ctx
    for j in range(n_ctx):
        for c in range(d):
            w_in[ctx[j], c] -= lr * grad_h[c] * inv
    return loss


@njit(nogil=True, cache=True)
def skipgram_example(w_in, w_out, center, target, objective, negs, n_negs,
                     points, codes, path_len, lr, h, grad_h):
    d = w_in.shape[1]
    for c in range(d):
        h[c] = w_in[center, c]
        grad_h[c] = 0.0
    if objective == OBJ_NS:
        loss = ns_update(h, w_out, target, negs, n_negs, lr, grad_h)
    else:
        loss = hs_update(h, w_out, points, codes, path_len, lr, grad_h)
    for c in range(d):
        w_in[center, c] -= lr * grad_h[c]
    return loss


@njit(nogil=True, cache=True)
def train_chunk(w_in, w_out, tokens, offsets, sent_lo, sent_hi, arch, objective,
                window, k, prob, alias, points, codes, code_lens, keep_prob,
                lr0, lr_min, total_words, words_before, progress_scale,
                state, stats):
    """One epoch over sentences ``sent_lo..sent_hi``.

    ``stats`` receives [loss sum, example count, words processed, bad index].
    The learning rate falls linearly from ``lr0`` to ``lr_min`` as
    ``words_before + progress_scale * processed`` approaches ``total_words``.
    Returns False if a non-finite loss was met.
    """
    d = w_in.shape[1]
    h = np.zeros(d)
    grad_h = np.zeros(d)
    negs = np.zeros(max(k, 1), dtype=np.int64)
    ctx = np.zeros(2 * window, dtype=np.int64)
    sent = np.zeros(1, dtype=np.int64)
    dummy_pts = np.zeros(1, dtype=np.int64)
    dummy_codes = np.zeros(1, dtype=np.float64)
    pts = np.zeros(points.shape[1], dtype=np.int64)
    cds = np.zeros(points.shape[1], dtype=np.float64)
    use_sample = keep_prob.shape[0] > 0
    processed = 0.0
    for s in range(sent_lo, sent_hi):
        a = offsets[s]
        b = offsets[s + 1]
        if b - a > sent.shape[0]:
            sent = np.zeros(b - a, dtype=np.int64)
        n = 0
        for p in range(a, b):
            w = tokens[p]
            if use_sample and keep_prob[w] < 1.0 and next_uniform(state) >= keep_prob[w]:
                continue
            sent[n] = w
            n += 1
        for i in range(n):
            progress = (words_before + progress_scale * processed) / total_words
            if progress > 1.0:
                progress = 1.0
            lr = lr0 - (lr0 - lr_min) * progress
            if lr < lr_min:
                lr = lr_min
            processed += 1.0
            lo = i - window
            if lo < 0:
                lo = 0
            hi = i + window + 1
            if hi > n:
                hi = n
            if arch == ARCH_CBOW:
                n_ctx = 0
                for j in range(lo, hi):
                    if j != i:
                        ctx[n_ctx] = sent[j]
                        n_ctx += 1
                if n_ctx == 0:
                    continue
                target = sent[i]
                n_negs = 0
                path_len = 0
                if objective == OBJ_NS:
                    n_negs = _draw_negatives(target, k, prob, alias, state, negs)
                    loss = cbow_example(w_in, w_out, ctx, n_ctx, target, objective, negs, n_negs,
                                        dummy_pts, dummy_codes, 0, lr, h, grad_h)
                else:
                    path_len = code_lens[target]
                    for q in range(path_len):
                        pts[q] = points[target, q]
                        cds[q] = codes[target, q]
                    loss = cbow_example(w_in, w_out, ctx, n_ctx, target, objective, negs, 0,
                                        pts, cds, path_len, lr, h, grad_h)
                if not np.isfinite(loss):
                    stats[3] = a + i
                    return False
                stats[0] += loss
                stats[1] += 1.0
            else:
                center = sent[i]
                for j in range(lo, hi):
                    if j == i:
                        continue
                    target = sent[j]
                    if objective == OBJ_NS:
                        n_negs = _draw_negatives(target, k, prob, alias, state, negs)
                        loss = skipgram_example(w_in, w_out, center, target, objective, negs, n_negs,
                                                dummy_pts, dummy_codes, 0, lr, h, grad_h)
                    else:
                        path_len = code_lens[target]
                        for q in range(path_len):
                            pts[q] = points[target, q]
                            cds[q] = codes[target, q]
                        loss = skipgram_example(w_in, w_out, center, target, objective, negs, 0,
                                                pts, cds, path_len, lr, h, grad_h)
                    if not np.isfinite(loss):
                        stats[3] = a + i
                        return False
                    stats[0] += loss
                    stats[1] += 1.0
        # subsampled-away words still count towards learning-rate progress
        processed += (b - a) - n
    stats[2] += processed
    return True
