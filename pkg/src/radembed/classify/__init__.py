"""Risk-class labels, splitting, KNN and random-forest classifiers,
unigram baseline features, weighted metrics and grid search."""

from .features import UnigramVectorizer, unigram_features, unigram_vocabulary
from .forest import ForestModel, rf_predict, rf_train
from .grid import GridResult, GridSearchSpec, RandomForest, cross_validate, grid_search, make_classifier
from .knn import KNNClassifier, knn_predict
from .labels import N_CLASSES, RiskClass, SplitWarning, regroup_labels, split_sizes, train_test_split
from .metrics import Metrics, confusion_matrix, evaluate, metrics_from_confusion

__all__ = [
    "ForestModel", "GridResult", "GridSearchSpec", "KNNClassifier", "Metrics", "N_CLASSES",
    "RandomForest", "RiskClass", "SplitWarning", "UnigramVectorizer", "confusion_matrix",
    "cross_validate", "evaluate", "grid_search", "knn_predict", "make_classifier",
    "metrics_from_confusion", "regroup_labels", "rf_predict", "rf_train", "split_sizes",
    "train_test_split", "unigram_features", "unigram_vocabulary",
]
