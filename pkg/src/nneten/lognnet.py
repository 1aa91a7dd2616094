"""Reservoir-fed single-layer classifier and its metrics.

Each dataset input vector y is projected through the reservoir
(sh = W @ y), the projection is min-max normalized and mean-centered
per component over the training portion, and a single sigmoid output
layer (one neuron per class, bias in column 0) is trained with
per-sample squared-error backpropagation in file order.

Three classification metrics are available: plain accuracy, the mean
per-vector determination coefficient (R2E) and the mean per-vector
Pearson correlation (PE) between the output vector and the one-hot
label vector.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError, ShapeError, TrainingDivergedError
from .reservoir import P_MAX

DEFAULT_LEARNING_RATE = 0.2
DEFAULT_SEED = 42

METRIC_TYPES = ("R2E", "PE", "Acc")


@dataclass(frozen=True)
class ShStats:
    """Per-component reservoir-projection statistics.

    sh_mean is the mean of the min-max normalized component (0 for
    degenerate components), so normalized components are zero-mean over
    the statistics set.
    """

    sh_min: np.ndarray
    sh_max: np.ndarray
    sh_mean: np.ndarray


@dataclass(frozen=True)
class ClassifierWeights:
    v: np.ndarray  # (K, P_MAX + 1), bias in column 0
    epoch_count: int
    seed: int


@dataclass(frozen=True)
class MetricValue:
    metric_type: str
    value: float


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def compute_sh(reservoir, input_vector):
    """Project one input vector through the reservoir: sh = W @ y."""
    w = reservoir.w if hasattr(reservoir, "w") else np.asarray(reservoir)
    y = np.asarray(input_vector, dtype=np.float64)
    if y.shape != (w.shape[1],):
        raise ShapeError(f"input vector has length {y.shape}, reservoir expects {w.shape[1]}")
    return w @ y


def sh_matrix(reservoir, inputs):
    """Projections for a whole (n, y_dim) input matrix at once."""
    w = reservoir.w if hasattr(reservoir, "w") else np.asarray(reservoir)
    inputs = np.asarray(inputs)
    if inputs.shape[1] != w.shape[1]:
        raise ShapeError(f"inputs have {inputs.shape[1]} columns, reservoir expects {w.shape[1]}")
    return inputs @ w.T


def sh_stats_from_values(sh):
    """Statistics over an (n, P_MAX) matrix of raw projections."""
    sh = np.asarray(sh)
    sh_min = sh.min(axis=0)
    sh_max = sh.max(axis=0)
    span = sh_max - sh_min
    nz = span != 0
    mean = np.zeros(sh.shape[1])
    if nz.any():
        normalized = (sh[:, nz] - sh_min[nz]) / span[nz] - 0.5
        mean[nz] = normalized.mean(axis=0)
    return ShStats(sh_min=sh_min, sh_max=sh_max, sh_mean=mean)


def compute_sh_stats(reservoir, dataset, stats_set="train"):
    """Raw-projection min/max and normalized mean over the statistics set
    (the training portion by default)."""
    from .dataset import input_matrix

    inputs = input_matrix(dataset, "train")
    if stats_set == "all" and dataset.test_x is not dataset.train_x:
        inputs = np.vstack([inputs, input_matrix(dataset, "test")])
    return sh_stats_from_values(sh_matrix(reservoir, inputs))


def normalize_sh(sh, stats):
    """Min-max normalize then center a projection; degenerate components
    (sh_max == sh_min) pass through unchanged."""
    sh = np.asarray(sh, dtype=np.float64)
    span = stats.sh_max - stats.sh_min
    nz = span != 0
    out = sh.copy()
    out[..., nz] = (sh[..., nz] - stats.sh_min[nz]) / span[nz] - 0.5 - stats.sh_mean[nz]
    return out


def classifier_inputs(sh_normalized):
    """Prepend the constant bias column to normalized projections."""
    sh_normalized = np.atleast_2d(sh_normalized)
    x = np.empty((sh_normalized.shape[0], sh_normalized.shape[1] + 1))
    x[:, 0] = 1.0
    x[:, 1:] = sh_normalized
    return np.ascontiguousarray(x)


@njit(cache=True, nogil=True)
def _train_kernel(x, labels, v, epochs, lr):
    n, d = x.shape
    k = v.shape[0]
    for _ in range(epochs):
        for s in range(n):
            for c in range(k):
                z = 0.0
                for j in range(d):
                    z += v[c, j] * x[s, j]
                out = 1.0 / (1.0 + np.exp(-z))
                target = 1.0 if labels[s] == c else 0.0
                delta = (out - target) * out * (1.0 - out)
                for j in range(d):
                    v[c, j] -= lr * delta * x[s, j]


def init_weights(class_count, seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.5, 0.5, (class_count, P_MAX + 1))


def train_epochs(x, labels, v, epochs, learning_rate=DEFAULT_LEARNING_RATE):
    """Run per-sample gradient updates in file order, in place."""
    _train_kernel(x, labels.astype(np.int64), v, epochs, learning_rate)
    if not np.all(np.isfinite(v)):
        raise TrainingDivergedError("classifier weights became non-finite")


def train_classifier(dataset, reservoir, stats, epochs, seed=DEFAULT_SEED,
                     learning_rate=DEFAULT_LEARNING_RATE):
    """Train the output layer from scratch for a fixed number of epochs."""
    from .dataset import input_matrix

    if epochs < 1:
        raise DomainError(f"epochs must be >= 1, got {epochs}")
    inputs = input_matrix(dataset, "train")
    x = classifier_inputs(normalize_sh(sh_matrix(reservoir, inputs), stats))
    v = init_weights(dataset.class_count, seed)
    train_epochs(x, dataset.train_y, v, epochs, learning_rate)
    return ClassifierWeights(v=v, epoch_count=epochs, seed=seed)


def predict_outputs(weights, x):
    v = weights.v if hasattr(weights, "v") else np.asarray(weights)
    return sigmoid(x @ v.T)


def per_sample_loss(v, x, target):
    """Squared-error loss of one sample; the quantity backprop descends."""
    out = sigmoid(v @ x)
    return 0.5 * np.sum((out - target) ** 2)


def per_sample_gradient(v, x, target):
    """Analytic gradient of per_sample_loss with respect to v."""
    out = sigmoid(v @ x)
    delta = (out - target) * out * (1.0 - out)
    return np.outer(delta, x)


def one_hot(labels, class_count):
    eye = np.zeros((len(labels), class_count))
    eye[np.arange(len(labels)), labels] = 1.0
    return eye


def confusion_matrix(predicted, labels, class_count):
    c = np.zeros((class_count, class_count), dtype=np.int64)
    np.add.at(c, (labels, predicted), 1)
    return c


def accuracy_from_confusion(c):
    c = np.asarray(c)
    return float(np.trace(c) / c.sum())


def r2_single(label_vec, output_vec):
    """Determination coefficient between a one-hot label and an output row."""
    label_vec = np.asarray(label_vec, dtype=np.float64)
    output_vec = np.asarray(output_vec, dtype=np.float64)
    residual = np.sum((label_vec - output_vec) ** 2)
    total = np.sum((label_vec - label_vec.mean()) ** 2)
    return float(1.0 - residual / total)


def pearson_single(label_vec, output_vec):
    """Pearson correlation between label and output rows; 0 when the
    output has zero variance."""
    label_vec = np.asarray(label_vec, dtype=np.float64)
    output_vec = np.asarray(output_vec, dtype=np.float64)
    lc = label_vec - label_vec.mean()
    sc = output_vec - output_vec.mean()
    denom = np.sqrt(np.sum(lc ** 2) * np.sum(sc ** 2))
    if denom == 0:
        return 0.0
    return float(np.sum(lc * sc) / denom)


def _metric_from_outputs(metric_type, outputs, labels):
    k = outputs.shape[1]
    if metric_type == "Acc":
        return accuracy_from_confusion(confusion_matrix(outputs.argmax(axis=1), labels, k))
    targets = one_hot(labels, k)
    if metric_type == "R2E":
        residual = ((targets - outputs) ** 2).sum(axis=1)
        total = ((targets - targets.mean(axis=1, keepdims=True)) ** 2).sum(axis=1)
        return float((1.0 - residual / total).mean())
    if metric_type == "PE":
        lc = targets - targets.mean(axis=1, keepdims=True)
        sc = outputs - outputs.mean(axis=1, keepdims=True)
        denom = np.sqrt((lc ** 2).sum(axis=1) * (sc ** 2).sum(axis=1))
        safe = np.where(denom != 0, denom, 1.0)
        rho = np.where(denom != 0, (lc * sc).sum(axis=1) / safe, 0.0)
        return float(rho.mean())
    raise DomainError(f"unknown metric {metric_type!r} (expected one of {METRIC_TYPES})")


def evaluate_metric(metric_type, weights, x_test, test_labels):
    """Metric of a trained classifier over a prepared test input matrix."""
    if len(x_test) == 0:
        raise DomainError("test set is empty")
    outputs = predict_outputs(weights, x_test)
    return MetricValue(metric_type=metric_type, value=_metric_from_outputs(metric_type, outputs, test_labels))


def accuracy(weights, x_test, test_labels):
    return evaluate_metric("Acc", weights, x_test, test_labels)


def r2_efficiency(weights, x_test, test_labels):
    return evaluate_metric("R2E", weights, x_test, test_labels)


def pearson_efficiency(weights, x_test, test_labels):
    return evaluate_metric("PE", weights, x_test, test_labels)
