"""Reference-dataset loading, normalization and deterministic subsampling.

Two reference datasets drive the entropy classifier:

* D1 -- 28x28 grayscale digit images in the standard IDX binary layout
  (60000 train / 10000 test, 10 classes, pixels 0-255).
* D2 -- routine-blood-values CSV (5296 rows, 51 numeric features, binary
  label).  The whole set is used for both training and testing, so the
  train and test splits coincide.

Synthetic stand-in generators are included so the full pipeline can run
in CI without the original data files.
"""

import csv
import os
import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, ConsistencyError, DomainError, FormatError, ParseError

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801

# Per-class counts of the D1 reference data (train, test).
MNIST_TRAIN_COUNTS = (5923, 6742, 5958, 6131, 5842, 5421, 5918, 6265, 5851, 5949)
MNIST_TEST_COUNTS = (980, 1135, 1032, 1010, 982, 892, 958, 1028, 974, 1009)
RBV1_ROWS = 5296
RBV1_FEATURES = 51

DATASET_INFO = {
    "D1": {"class_count": 10, "feature_count": 784},
    "D2": {"class_count": 2, "feature_count": RBV1_FEATURES},
}

D1_FILES = (
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
)
D2_FILE = "rbv1.csv"


@dataclass(frozen=True)
class NormParams:
    """Feature normalization parameters: a scalar divisor (D1) or
    per-column min/max vectors (D2)."""

    scale: float | None = None
    col_min: np.ndarray | None = None
    col_max: np.ndarray | None = None


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable labeled feature set, safe to share across evaluations.

    Feature rows are stored raw (uint8 pixels for D1, float64 blood
    values for D2); normalization happens in :func:`normalize_input`.
    For D2 the train and test arrays are the same objects.
    """

    kind: str
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    mu: float
    norm_params: NormParams

    @property
    def class_count(self):
        return DATASET_INFO[self.kind]["class_count"]

    @property
    def feature_count(self):
        return DATASET_INFO[self.kind]["feature_count"]

    def class_counts(self, split="train"):
        y = self.train_y if split == "train" else self.test_y
        return np.bincount(y, minlength=self.class_count)


def _read_idx_images(path):
    with open(path, "rb") as f:
        header = f.read(16)
        if len(header) < 16:
            raise FormatError(f"{path}: truncated IDX header")
        magic, count, rows, cols = struct.unpack(">IIII", header)
        if magic != IDX_IMAGES_MAGIC:
            raise FormatError(f"{path}: bad magic number 0x{magic:08x} (expected images)")
        data = np.frombuffer(f.read(), dtype=np.uint8)
    if data.size != count * rows * cols:
        raise ConsistencyError(f"{path}: payload holds {data.size} bytes, header promises {count * rows * cols}")
    return data.reshape(count, rows * cols)


def _read_idx_labels(path):
    with open(path, "rb") as f:
        header = f.read(8)
        if len(header) < 8:
            raise FormatError(f"{path}: truncated IDX header")
        magic, count = struct.unpack(">II", header)
        if magic != IDX_LABELS_MAGIC:
            raise FormatError(f"{path}: bad magic number 0x{magic:08x} (expected labels)")
        data = np.frombuffer(f.read(), dtype=np.uint8)
    if data.size != count:
        raise ConsistencyError(f"{path}: {data.size} labels, header promises {count}")
    return data.astype(np.int64)


def load_mnist(images_path, labels_path, images_test_path, labels_test_path):
    """Load the D1 dataset from the four IDX files."""
    train_x = _read_idx_images(images_path)
    train_y = _read_idx_labels(labels_path)
    test_x = _read_idx_images(images_test_path)
    test_y = _read_idx_labels(labels_test_path)
    if len(train_x) != len(train_y):
        raise ConsistencyError(f"{len(train_x)} training images but {len(train_y)} labels")
    if len(test_x) != len(test_y):
        raise ConsistencyError(f"{len(test_x)} test images but {len(test_y)} labels")
    for name, labels in (("training", train_y), ("test", test_y)):
        if labels.size and labels.max() > 9:
            raise FormatError(f"{name} labels exceed class range 0..9")
    return LabeledDataset(
        kind="D1",
        train_x=train_x,
        train_y=train_y,
        test_x=test_x,
        test_y=test_y,
        mu=1.0,
        norm_params=NormParams(scale=255.0),
    )


def load_rbv1(csv_path):
    """Load the D2 dataset from CSV: 51 feature columns then a binary label.

    A header row is honored if the first row is non-numeric.  The loaded
    set serves as both the training and the test split.
    """
    rows = []
    with open(csv_path, newline="") as f:
        reader = csv.reader(f)
        for r_idx, row in enumerate(reader):
            if not row:
                continue
            if r_idx == 0:
                try:
                    float(row[0])
                except ValueError:
                    continue  # header
            if len(row) != RBV1_FEATURES + 1:
                raise FormatError(f"{csv_path}: row {r_idx + 1} has {len(row)} columns, expected {RBV1_FEATURES + 1}")
            parsed = []
            for c_idx, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{csv_path}: non-numeric cell {cell!r} at row {r_idx + 1}, column {c_idx + 1}",
                        row=r_idx + 1,
                        column=c_idx + 1,
                    ) from None
            rows.append(parsed)
    if not rows:
        raise FormatError(f"{csv_path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    features = data[:, :RBV1_FEATURES]
    labels = data[:, RBV1_FEATURES].astype(np.int64)
    if not np.all((labels == 0) | (labels == 1)):
        raise FormatError(f"{csv_path}: labels must be 0 or 1")
    features.setflags(write=False)
    labels.setflags(write=False)
    return LabeledDataset(
        kind="D2",
        train_x=features,
        train_y=labels,
        test_x=features,
        test_y=labels,
        mu=1.0,
        norm_params=NormParams(col_min=features.min(axis=0), col_max=features.max(axis=0)),
    )


def load_dataset(kind, data_dir):
    """Load D1 or D2 from `data_dir` using the conventional file names."""
    if kind == "D1":
        paths = [os.path.join(data_dir, name) for name in D1_FILES]
        return load_mnist(*paths)
    if kind == "D2":
        return load_rbv1(os.path.join(data_dir, D2_FILE))
    raise ConfigurationError(f"unknown dataset {kind!r} (expected 'D1' or 'D2')")


def _apportion(counts, mu):
    """Largest-remainder split of round(mu * total) over per-class counts.

    Plain per-class rounding cannot reproduce the reference totals
    (600/100 for D1, 53 for D2 at mu=0.01), so the per-class quotas are
    floored and the remaining samples go to the largest fractional parts.
    """
    counts = np.asarray(counts)
    target = int(round(mu * counts.sum()))
    quotas = mu * counts
    base = np.floor(quotas).astype(np.int64)
    remainder = target - int(base.sum())
    order = sorted(range(len(counts)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:remainder]:
        base[i] += 1
    return base


def _take_per_class(features, labels, class_quota):
    keep = []
    seen = np.zeros(len(class_quota), dtype=np.int64)
    for i, label in enumerate(labels):
        if seen[label] < class_quota[label]:
            keep.append(i)
            seen[label] += 1
    idx = np.asarray(keep, dtype=np.int64)
    sub_x, sub_y = features[idx], labels[idx]
    sub_x.setflags(write=False)
    sub_y.setflags(write=False)
    return sub_x, sub_y


def subsample(dataset, mu, recompute_norm=False):
    """Deterministic stratified subsample keeping the first mu-fraction of
    each class in file order.

    By default D2 keeps the normalization statistics of the set it was
    loaded from; pass recompute_norm=True to rebuild them from the
    subsample.
    """
    if not 0.01 <= mu <= 1.0:
        raise DomainError(f"mu={mu} outside [0.01, 1]")
    if mu == 1.0:
        return dataset if dataset.mu == 1.0 else replace(dataset, mu=1.0)
    k = dataset.class_count
    train_quota = _apportion(np.bincount(dataset.train_y, minlength=k), mu)
    train_x, train_y = _take_per_class(dataset.train_x, dataset.train_y, train_quota)
    if dataset.kind == "D2":
        test_x, test_y = train_x, train_y
    else:
        test_quota = _apportion(np.bincount(dataset.test_y, minlength=k), mu)
        test_x, test_y = _take_per_class(dataset.test_x, dataset.test_y, test_quota)
    norm = dataset.norm_params
    if recompute_norm and dataset.kind == "D2":
        norm = NormParams(col_min=train_x.min(axis=0), col_max=train_x.max(axis=0))
    return LabeledDataset(
        kind=dataset.kind,
        train_x=train_x,
        train_y=train_y,
        test_x=test_x,
        test_y=test_y,
        mu=mu,
        norm_params=norm,
    )


def normalize_input(raw_features, dataset):
    """Map one raw feature row to the unit-range input vector with the
    constant bias element at index 0."""
    raw = np.asarray(raw_features, dtype=np.float64)
    if raw.shape != (dataset.feature_count,):
        raise DomainError(f"expected {dataset.feature_count} features, got {raw.shape}")
    y = np.empty(dataset.feature_count + 1)
    y[0] = 1.0
    if dataset.kind == "D1":
        y[1:] = raw / dataset.norm_params.scale
    else:
        lo, hi = dataset.norm_params.col_min, dataset.norm_params.col_max
        span = hi - lo
        y[1:] = np.where(span != 0, (raw - lo) / np.where(span != 0, span, 1.0), 0.0)
    return y


def input_matrix(dataset, split="train"):
    """All input vectors of a split as one (n, feature_count + 1) matrix."""
    raw = dataset.train_x if split == "train" else dataset.test_x
    n = len(raw)
    y = np.empty((n, dataset.feature_count + 1))
    y[:, 0] = 1.0
    if dataset.kind == "D1":
        np.divide(raw, dataset.norm_params.scale, out=y[:, 1:])
    else:
        lo, hi = dataset.norm_params.col_min, dataset.norm_params.col_max
        span = hi - lo
        np.subtract(raw, lo, out=y[:, 1:])
        y[:, 1:] /= np.where(span != 0, span, 1.0)
        y[:, 1 + np.flatnonzero(span == 0)] = 0.0
    return y


def write_synthetic_mnist(directory, seed=101, scale=1.0):
    """Write a deterministic D1 stand-in as four IDX files.

    Classes are noisy variants of per-class smooth prototype images.
    `scale=1.0` reproduces the reference per-class counts exactly;
    smaller values shrink every class proportionally (min 1 sample).
    """
    os.makedirs(directory, exist_ok=True)
    rng = np.random.default_rng(seed)
    protos = []
    for _ in range(10):
        coarse = rng.uniform(0.0, 255.0, (7, 7))
        protos.append(np.kron(coarse, np.ones((4, 4))).ravel())

    def build(counts):
        counts = [max(1, int(round(c * scale))) for c in counts]
        labels = np.concatenate([np.full(c, i, dtype=np.uint8) for i, c in enumerate(counts)])
        rng.shuffle(labels)
        images = np.empty((len(labels), 784), dtype=np.uint8)
        for cls in range(10):
            idx = np.flatnonzero(labels == cls)
            pix = protos[cls] + rng.normal(0.0, 48.0, (idx.size, 784))
            images[idx] = np.clip(pix, 0.0, 255.0).astype(np.uint8)
        return images, labels

    train_x, train_y = build(MNIST_TRAIN_COUNTS)
    test_x, test_y = build(MNIST_TEST_COUNTS)
    paths = [os.path.join(directory, name) for name in D1_FILES]
    for path, images in ((paths[0], train_x), (paths[2], test_x)):
        with open(path, "wb") as f:
            f.write(struct.pack(">IIII", IDX_IMAGES_MAGIC, len(images), 28, 28))
            f.write(images.tobytes())
    for path, labels in ((paths[1], train_y), (paths[3], test_y)):
        with open(path, "wb") as f:
            f.write(struct.pack(">II", IDX_LABELS_MAGIC, len(labels)))
            f.write(labels.tobytes())
    return paths


def write_synthetic_rbv1(path, seed=7, rows_per_class=RBV1_ROWS // 2):
    """Write a deterministic D2 stand-in CSV: class-shifted noisy blood-value
    style features, balanced labels, shuffled row order."""
    rng = np.random.default_rng(seed)
    base = rng.uniform(1.0, 120.0, RBV1_FEATURES)
    spread = base * rng.uniform(0.08, 0.35, RBV1_FEATURES)
    shift = rng.normal(0.0, 0.7, RBV1_FEATURES) * spread
    blocks, labels = [], []
    for cls in (0, 1):
        center = base + cls * shift
        feats = rng.normal(center, spread, size=(rows_per_class, RBV1_FEATURES))
        blocks.append(np.clip(feats, 0.0, None))
        labels.append(np.full(rows_per_class, cls))
    features = np.vstack(blocks)
    labels = np.concatenate(labels)
    order = rng.permutation(len(labels))
    features, labels = features[order], labels[order]
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        for row, lab in zip(features, labels):
            writer.writerow([repr(float(v)) for v in row] + [int(lab)])
    return path


def write_synthetic_data(directory, mnist_scale=1.0, seed=101):
    """Write both stand-ins under `directory` with the conventional names."""
    write_synthetic_mnist(directory, seed=seed, scale=mnist_scale)
    write_synthetic_rbv1(os.path.join(directory, D2_FILE), seed=7)
    return directory
