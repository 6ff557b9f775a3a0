import math

import numpy as np
import pytest
from sklearn.metrics import silhouette_score

from radembed.tsne import (
    ProjectionConfig,
    TSNEError,
    conditional_affinities,
    kl_divergence,
    kl_gradient,
    row_perplexity,
    run_tsne,
    write_svg,
    write_tsv,
)


def gaussian_clusters(n_per=20, d=50, seed=0, sep=10.0):
    rng = np.random.default_rng(seed)
    centres = rng.normal(scale=sep, size=(3, d))
    X = np.vstack([c + rng.normal(size=(n_per, d)) for c in centres])
    return X, np.repeat(np.arange(3), n_per)


def test_equidistant_points():
    X = np.eye(3)
    # any bandwidth gives the uniform row, whatever the target
    aff = conditional_affinities(X, perplexity=1.5)
    off = aff.P[~np.eye(3, dtype=bool)]
    assert np.allclose(off, off[0], atol=1e-12)
    assert off[0] == pytest.approx(1 / 6)


@pytest.mark.parametrize("perplexity", [5.0, 15.0, 30.0])
def test_row_perplexity_matches_target(perplexity):
    X, _ = gaussian_clusters(seed=1)
    aff = conditional_affinities(X, perplexity)
    for i in range(len(X)):
        row = np.delete(aff.conditional[i], i)
        assert abs(row_perplexity(row) - perplexity) <= 1e-3


def test_affinity_invariants_n10():
    X = np.random.default_rng(4).normal(size=(10, 5))
    P = conditional_affinities(X, 3.0).P
    assert np.all(P >= 0)
    assert abs(P.sum() - 1.0) <= 1e-9
    assert np.array_equal(np.diag(P), np.zeros(10))
    assert np.allclose(P, P.T, atol=1e-15)
    # independent symmetrisation from the conditional rows
    aff = conditional_affinities(X, 3.0)
    assert np.allclose(aff.P, (aff.conditional + aff.conditional.T) / 20, atol=1e-15)


def test_affinity_errors():
    with pytest.raises(ValueError):
        conditional_affinities(np.eye(2), 1.5)
    with pytest.raises(ValueError):
        conditional_affinities(np.eye(5), 4.0)
    with pytest.raises(ValueError):
        ProjectionConfig(iterations=100).validate(50)


def test_kl_gradient_finite_differences():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(15, 4))
    P = conditional_affinities(X, 4.0).P
    Y = rng.normal(size=(15, 2))
    G = kl_gradient(P, Y)
    eps = 1e-4
    for _ in range(10):
        i, k = int(rng.integers(15)), int(rng.integers(2))
        Yp, Ym = Y.copy(), Y.copy()
        Yp[i, k] += eps
        Ym[i, k] -= eps
        fd = (kl_divergence(P, Yp) - kl_divergence(P, Ym)) / (2 * eps)
        assert abs(fd - G[i, k]) <= 1e-4 * max(abs(fd), abs(G[i, k]))


@pytest.fixture(scope="module")
def clusters_run():
    X, y = gaussian_clusters()
    return X, y, run_tsne(X, ProjectionConfig(seed=3))


def test_three_clusters_separate(clusters_run):
    _, y, res = clusters_run
    assert silhouette_score(res.coords, y) >= 0.5


def test_kl_trace(clusters_run):
    _, _, res = clusters_run
    trace = np.array(res.kl_trace)
    assert len(trace) == 1000
    assert np.isfinite(trace).all() and (trace >= 0).all()
    assert trace[-1] < trace[249]


def test_output_is_centred(clusters_run):
    _, _, res = clusters_run
    assert np.abs(res.coords.mean(axis=0)).max() <= 1e-8


def test_fixed_seed_is_reproducible(clusters_run):
    X, _, res = clusters_run
    again = run_tsne(X, ProjectionConfig(seed=3))
    assert np.array_equal(again.coords, res.coords)


def test_duplicates_land_together():
    X, _ = gaussian_clusters(seed=5)
    X = np.vstack([X, X[:5]])
    # at N=65 the default rate of 200 overshoots tightly bound pairs; N/12 is stable
    res = run_tsne(X, ProjectionConfig(perplexity=10.0, learning_rate=len(X) / 12))
    Y = res.coords
    diam = math.dist(Y.min(axis=0), Y.max(axis=0))
    for k in range(5):
        assert np.linalg.norm(Y[k] - Y[60 + k]) <= 0.01 * diam


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_non_finite_coordinates_abort():
    X, _ = gaussian_clusters(n_per=10)
    with pytest.raises(TSNEError, match="iteration 1"):
        run_tsne(X, ProjectionConfig(perplexity=5.0, learning_rate=float("inf"), iterations=250))


def test_writers(tmp_path, clusters_run):
    _, y, res = clusters_run
    ids = [f"d{i}" for i in range(len(y))]
    write_tsv(tmp_path / "t.tsv", ids, res.coords, list(y))
    rows = (tmp_path / "t.tsv").read_text().splitlines()
    assert len(rows) == len(y)
    assert rows[0].split("\t")[0] == "d0" and len(rows[0].split("\t")) == 4
    write_svg(tmp_path / "t.svg", res.coords, list(y), names=ids)
    svg = (tmp_path / "t.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<circle") == len(y) + 3
