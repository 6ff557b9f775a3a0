import numpy as np
import pytest

from radembed.corpus import CondensedReport
from radembed.embedding import TrainConfig
from radembed.pipeline import (
    compare_features,
    default_dictionaries,
    labeled_subset,
    map_corpus,
)
from radembed.syncorpus import GenerationConfig, generate_corpus


def test_default_dictionaries():
    assert len(default_dictionaries()) == 2
    assert len(default_dictionaries(domain=False)) == 1


def test_map_corpus_keeps_ids_and_labels():
    docs = [CondensedReport("a", ("hematoma", "mother"), 5), CondensedReport("b", ("x",))]
    out = map_corpus(docs, default_dictionaries())
    assert [r.id for r in out] == ["a", "b"]
    assert out[0].tokens == ("hemorrhage", "FAMILY") and out[0].label == 5
    assert out[1].label is None


def test_labeled_subset_regroups():
    docs = [CondensedReport("a", ("x",), 1), CondensedReport("b", ("x",)), CondensedReport("c", ("y",), 3)]
    ids, toks, y = labeled_subset(docs)
    assert ids == ["a", "c"] and toks == [["x"], ["y"]]
    assert y.tolist() == [0, 1]


@pytest.fixture(scope="module")
def comparison():
    reports, _ = generate_corpus(config=GenerationConfig(n_reports=600, n_labeled=300, seed=4))
    return compare_features(reports, TrainConfig(dim=20, epochs=2), classifiers=("rf:20", "knn5"))


def test_comparison_shape(comparison):
    assert (comparison.n_train, comparison.n_test) == (240, 60)
    assert set(comparison.metrics) == {"with_dictionary", "without_dictionary", "unigram"}
    rows = comparison.to_rows()
    assert len(rows) == 6
    for r in rows:
        assert 0.0 <= r["f1"] <= 1.0


def test_comparison_is_reproducible(comparison):
    reports, _ = generate_corpus(config=GenerationConfig(n_reports=600, n_labeled=300, seed=4))
    again = compare_features(reports, TrainConfig(dim=20, epochs=2), classifiers=("rf:20", "knn5"))
    for r1, r2 in zip(comparison.to_rows(), again.to_rows()):
        assert r1 == r2
    assert np.isfinite([r["f1"] for r in again.to_rows()]).all()
