from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .vocab import Vocabulary, build_huffman, negative_sampling_table

log = logging.getLogger(__name__)


class TrainingError(RuntimeError):
    pass


class EmbeddingError(ValueError):
    pass


class OutOfVocabularyError(KeyError):
    def __init__(self, word):
        super().__init__(word)
        self.word = word

    def __str__(self):
        return f"word {self.word!r} is not in the vocabulary"


class DegenerateDocumentError(EmbeddingError):
    pass


ARCHITECTURES = {"cbow": K.ARCH_CBOW, "skipgram": K.ARCH_SKIPGRAM}
OBJECTIVES = {"ns": K.OBJ_NS, "hs": K.OBJ_HS}


@dataclass
class TrainConfig:
    architecture: str = "cbow"
    objective: str = "ns"
    window: int = 5
    dim: int = 100
    negatives: int = 5
    epochs: int = 5
    initial_learning_rate: float = 0.025
    min_count: int = 5
    sample: float = 0.0
    seed: int = 1
    threads: int = 1

    def __post_init__(self):
        self.architecture = self.architecture.lower().replace("-", "")
        self.objective = self.objective.lower()
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"architecture must be one of {sorted(ARCHITECTURES)}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {sorted(OBJECTIVES)}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.objective == "ns" and self.negatives < 1:
            raise ValueError("negatives must be >= 1 for negative sampling")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.initial_learning_rate > 0:
            raise ValueError("initial_learning_rate must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EmbeddingModel:
    """Trained word vectors.

    ``input_vectors`` are the word vectors used for similarity and document
    averaging. ``output_vectors`` has the same shape; under hierarchical
    softmax its first V-1 rows are the Huffman inner-node vectors.
    """

    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    config: TrainConfig
    epoch_losses: list = field(default_factory=list)

    def __post_init__(self):
        V = len(self.vocab)
        if self.input_vectors.shape[0] != V or self.output_vectors.shape != self.input_vectors.shape:
            raise EmbeddingError("vector matrices must have one row per vocabulary word")

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    def __contains__(self, word) -> bool:
        return word in self.vocab

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.input_vectors[self.vocab.index[word]]
        except KeyError:
            raise OutOfVocabularyError(word) from None

    def similarity(self, a: str, b: str) -> float:
        return cosine(self.vector(a), self.vector(b))


def _flatten(corpus, vocab: Vocabulary):
    encoded = [vocab.encode(toks) for toks in corpus]
    offsets = np.zeros(len(encoded) + 1, dtype=np.int64)
    np.cumsum([len(e) for e in encoded], out=offsets[1:])
    tokens = np.concatenate(encoded) if encoded else np.zeros(0, dtype=np.int64)
    return tokens.astype(np.int64), offsets


def _keep_probabilities(counts: np.ndarray, sample: float) -> np.ndarray:
    if sample <= 0:
        return np.zeros(0)
    total = counts.sum()
    thresh = sample * total
    keep = (np.sqrt(counts / thresh) + 1.0) * thresh / counts
    return np.minimum(keep, 1.0)


def init_weights(V: int, dim: int, seed: int):
    rng = np.random.default_rng(seed)
    w_in = rng.uniform(-0.5 / dim, 0.5 / dim, size=(V, dim))
    w_out = np.zeros((V, dim))
    return w_in, w_out


def train(corpus: Sequence[Sequence[str]], vocab: Vocabulary, config: TrainConfig,
          init: Optional[tuple] = None) -> EmbeddingModel:
    """Train word vectors over ``corpus`` (one token list per report).

    Context windows never cross report boundaries. With ``threads == 1``
    the result is a pure function of (corpus, vocab, config). With more
    threads, reports are split into contiguous chunks trained concurrently
    on shared weights without locking.
    """
    if vocab.counts is None:
        raise EmbeddingError("training needs a vocabulary with counts")
    V, d = len(vocab), config.dim
    tokens, offsets = _flatten(corpus, vocab)
    n_words = len(tokens)
    if n_words == 0:
        raise EmbeddingError("corpus has no in-vocabulary tokens")
    w_in, w_out = init if init is not None else init_weights(V, d, config.seed)
    w_in = np.ascontiguousarray(w_in, dtype=np.float64)
    w_out = np.ascontiguousarray(w_out, dtype=np.float64)

    arch = ARCHITECTURES[config.architecture]
    obj = OBJECTIVES[config.objective]
    table = negative_sampling_table(vocab.counts)
    if obj == K.OBJ_HS:
        tree = build_huffman(vocab.counts)
        points, codes, lens = tree.points, tree.codes, tree.lengths
    else:
        points = np.zeros((1, 1), dtype=np.int64)
        codes = np.zeros((1, 1))
        lens = np.zeros(1, dtype=np.int64)
    keep = _keep_probabilities(vocab.counts.astype(np.float64), config.sample)

    n_sent = len(offsets) - 1
    threads = min(config.threads, max(n_sent, 1))
    bounds = np.linspace(0, n_sent, threads + 1).astype(np.int64)
    states = [np.array([np.uint64(config.seed * 1000003 + t + 1)], dtype=np.uint64) for t in range(threads)]
    lr0 = config.initial_learning_rate
    lr_min = lr0 * 1e-4
    total = float(config.epochs * n_words)
    losses = []

    for epoch in range(config.epochs):
        stats = [np.zeros(4) for _ in range(threads)]
        for s in stats:
            s[3] = -1
        before = float(epoch * n_words)

        def run(t):
            return K.train_chunk(w_in, w_out, tokens, offsets, bounds[t], bounds[t + 1], arch, obj,
                                 config.window, config.negatives, table.prob, table.alias,
                                 points, codes, lens, keep, lr0, lr_min, total, before,
                                 float(threads), states[t], stats[t])

        if threads == 1:
            ok = [run(0)]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                ok = list(pool.map(run, range(threads)))
        if not all(ok):
            bad = [int(s[3]) for s in stats if s[3] >= 0]
            raise TrainingError(
                f"non-finite loss in epoch {epoch + 1} at token offset(s) {bad}; "
                f"max |w_in| = {np.nanmax(np.abs(w_in)):.3g}, max |w_out| = {np.nanmax(np.abs(w_out)):.3g}, "
                f"learning rate {lr0}")
        if not (np.isfinite(w_in).all() and np.isfinite(w_out).all()):
            raise TrainingError(f"non-finite weights after epoch {epoch + 1}")
        loss_sum = sum(s[0] for s in stats)
        count = sum(s[1] for s in stats)
        losses.append(float(loss_sum / max(count, 1.0)))
        log.info("epoch %d/%d mean loss %.5f", epoch + 1, config.epochs, losses[-1])
    return EmbeddingModel(vocab, w_in, w_out, config, losses)


# ---------------------------------------------------------------------------
# queries

def cosine(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise EmbeddingError("cosine similarity is undefined for a zero vector")
    return max(-1.0, min(1.0, float(a @ b) / (na * nb)))


def most_similar(model: EmbeddingModel, word: str, k: int = 10) -> list:
    """Top-``k`` words by cosine similarity to ``word`` (itself excluded).

    Ties are ordered by vocabulary index.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    q = model.vocab.index.get(word)
    if q is None:
        raise OutOfVocabularyError(word)
    W = model.input_vectors
    norms = np.linalg.norm(W, axis=1)
    if norms[q] == 0:
        raise EmbeddingError(f"word {word!r} has a zero vector")
    safe = np.where(norms > 0, norms, 1.0)
    scores = (W @ W[q]) / (safe * norms[q])
    scores[norms == 0] = -np.inf
    scores[q] = -np.inf
    order = np.lexsort((np.arange(len(scores)), -scores))
    order = [i for i in order if i != q][:k]
    return [(model.vocab.words[i], float(scores[i])) for i in order]


@dataclass(frozen=True)
class DocumentVector:
    id: str
    vector: np.ndarray
    n_known: int
    n_unknown: int = 0


def embed_document(model: EmbeddingModel, tokens: Sequence[str], doc_id: str = "") -> DocumentVector:
    """Mean input vector of the in-vocabulary tokens; OOV tokens are counted and skipped."""
    idx = model.vocab.encode(tokens)
    if len(idx) == 0:
        raise DegenerateDocumentError(f"document {doc_id!r} has no in-vocabulary tokens")
    vec = model.input_vectors[idx].mean(axis=0)
    return DocumentVector(doc_id, vec, len(idx), len(tokens) - len(idx))


def embed_documents(model: EmbeddingModel, docs: Sequence[Sequence[str]]) -> tuple:
    """Stack document vectors; returns ``(matrix, ok_mask)``.

    Degenerate documents get a zero row and ``ok_mask`` False.
    """
    X = np.zeros((len(docs), model.dim))
    ok = np.zeros(len(docs), dtype=bool)
    for i, toks in enumerate(docs):
        idx = model.vocab.encode(toks)
        if len(idx):
            X[i] = model.input_vectors[idx].mean(axis=0)
            ok[i] = True
    return X, ok


# ---------------------------------------------------------------------------
# persistence

BINARY_MAGIC = b"RADEMB\x01\n"


def _format_row(word, vec) -> str:
    return word + " " + " ".join(f"{x:.6f}" for x in vec) + "\n"


def save_model(model: EmbeddingModel, path, binary: bool = False) -> None:
    """Text format: ``V d`` header then ``word v1 ... vd`` with 6 decimals.

    The binary format keeps both matrices, counts and config at full precision.
    """
    if binary:
        header = {
            "words": model.vocab.words,
            "counts": None if model.vocab.counts is None else model.vocab.counts.tolist(),
            "min_count": model.vocab.min_count,
            "config": model.config.to_dict(),
            "epoch_losses": list(model.epoch_losses),
            "shape": list(model.input_vectors.shape),
        }
        blob = json.dumps(header).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(BINARY_MAGIC)
            fh.write(len(blob).to_bytes(8, "little"))
            fh.write(blob)
            fh.write(np.ascontiguousarray(model.input_vectors, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(model.output_vectors, dtype="<f8").tobytes())
        return
    V, d = model.input_vectors.shape
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{V} {d}\n")
        for w, vec in zip(model.vocab.words, model.input_vectors):
            fh.write(_format_row(w, vec))


def parse_header(line: str) -> tuple:
    parts = line.split()
    if len(parts) != 2:
        raise EmbeddingError(f"bad model header {line.strip()!r}; expected 'V d'")
    try:
        V, d = int(parts[0]), int(parts[1])
    except ValueError:
        raise EmbeddingError(f"bad model header {line.strip()!r}") from None
    if V < 1 or d < 1:
        raise EmbeddingError(f"bad model header {line.strip()!r}")
    return V, d


def _load_binary(path) -> EmbeddingModel:
    with open(path, "rb") as fh:
        data = fh.read()
    pos = len(BINARY_MAGIC)
    if len(data) < pos + 8:
        raise EmbeddingError(f"{path}: truncated binary model")
    n = int.from_bytes(data[pos:pos + 8], "little")
    pos += 8
    try:
        header = json.loads(data[pos:pos + n].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise EmbeddingError(f"{path}: corrupt binary model header") from None
    pos += n
    V, d = header["shape"]
    size = V * d * 8
    if len(data) != pos + 2 * size:
        raise EmbeddingError(f"{path}: binary model size does not match header ({V} x {d})")
    w_in = np.frombuffer(data, dtype="<f8", count=V * d, offset=pos).reshape(V, d).copy()
    w_out = np.frombuffer(data, dtype="<f8", count=V * d, offset=pos + size).reshape(V, d).copy()
    vocab = Vocabulary(header["words"], header["counts"], header["min_count"])
    return EmbeddingModel(vocab, w_in, w_out, TrainConfig(**header["config"]), header["epoch_losses"])


def load_model(path) -> EmbeddingModel:
    """Load a text or binary model; any inconsistency raises ``EmbeddingError``.

    Text models carry only word vectors: output vectors come back as zeros
    and counts as unknown.
    """
    with open(path, "rb") as fh:
        head = fh.read(len(BINARY_MAGIC))
    if head == BINARY_MAGIC:
        return _load_binary(path)
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise EmbeddingError(f"{path}: empty model file")
        V, d = parse_header(first)
        words = []
        W = np.empty((V, d))
        for i in range(V):
            line = fh.readline()
            if not line.endswith("\n"):
                raise EmbeddingError(f"{path}: truncated at row {i + 1} of {V}")
            parts = line.rstrip("\n").split(" ")
            if len(parts) != d + 1:
                raise EmbeddingError(f"{path}: row {i + 1} has {len(parts) - 1} values, expected {d}")
            words.append(parts[0])
            try:
                W[i] = np.array(parts[1:], dtype=np.float64)
            except ValueError:
                raise EmbeddingError(f"{path}: non-numeric value in row {i + 1}") from None
        if fh.read().strip():
            raise EmbeddingError(f"{path}: more rows than header declares ({V})")
    if not np.isfinite(W).all():
        raise EmbeddingError(f"{path}: non-finite vector component")
    vocab = Vocabulary(words, None, 1)
    return EmbeddingModel(vocab, W, np.zeros_like(W), TrainConfig(dim=max(d, 2)))
