"""Entropy evaluation pipeline: reservoir fill, projection statistics,
classifier training and metric extraction, plus the 72-way integer
settings codec and the append-only evaluation log.

The classification metric is reported verbatim as the entropy value.
Evaluations are pure functions of (series, settings, dataset bytes,
seed); dataset preparation is cached by content hash so sweeping many
settings over many series stays cheap.
"""

import hashlib
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import lognnet
from .dataset import input_matrix, load_dataset, subsample
from .errors import ConfigurationError, DomainError
from .lognnet import DEFAULT_LEARNING_RATE, DEFAULT_SEED, METRIC_TYPES
from .reservoir import fill_reservoir, method_id

EPOCH_STEPS = (1, 5, 20, 100)
_M3_BY_EPOCHS = {ep: i + 1 for i, ep in enumerate(EPOCH_STEPS)}
_LOG_LOCK = threading.Lock()


@dataclass(frozen=True)
class NNetEnSettings:
    """One full evaluation configuration."""

    dataset: str = "D1"
    mu: float = 1.0
    method: int = 3
    epochs: int = 20
    metric: str = "Acc"
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.dataset not in ("D1", "D2"):
            raise ConfigurationError(f"unknown dataset {self.dataset!r}")
        if not 0.01 <= self.mu <= 1.0:
            raise DomainError(f"mu={self.mu} outside [0.01, 1]")
        object.__setattr__(self, "method", method_id(self.method))
        if self.epochs < 1:
            raise DomainError(f"epochs must be >= 1, got {self.epochs}")
        if self.metric not in METRIC_TYPES:
            raise DomainError(f"unknown metric {self.metric!r} (expected one of {METRIC_TYPES})")


@dataclass(frozen=True)
class EntropyResult:
    value: float
    settings: NNetEnSettings
    series_length: int
    reservoir_dims: tuple
    wall_time: float
    timestamp: datetime


def nset_encode(m1, m2, m3):
    """Settings triple (metric, method, epoch step) -> integer 1..72."""
    if m1 not in (1, 2, 3) or m2 not in (1, 2, 3, 4, 5, 6) or m3 not in (1, 2, 3, 4):
        raise DomainError(f"nset components out of range: ({m1}, {m2}, {m3})")
    return (m1 - 1) * 24 + (m2 - 1) * 4 + m3


def nset_decode(n):
    """Inverse of nset_encode."""
    if not 1 <= n <= 72:
        raise DomainError(f"nset {n} outside 1..72")
    m1, rest = divmod(n - 1, 24)
    m2, m3 = divmod(rest, 4)
    return m1 + 1, m2 + 1, m3 + 1


def settings_to_nset(settings):
    if settings.epochs not in _M3_BY_EPOCHS:
        raise DomainError(f"epochs {settings.epochs} has no nset encoding (use one of {EPOCH_STEPS})")
    m1 = METRIC_TYPES.index(settings.metric) + 1
    return nset_encode(m1, settings.method, _M3_BY_EPOCHS[settings.epochs])


def nset_to_settings(n, dataset="D1", mu=1.0, seed=DEFAULT_SEED):
    m1, m2, m3 = nset_decode(n)
    return NNetEnSettings(
        dataset=dataset,
        mu=mu,
        method=m2,
        epochs=EPOCH_STEPS[m3 - 1],
        metric=METRIC_TYPES[m1 - 1],
        seed=seed,
    )


_SETTINGS_RE = re.compile(
    r"^\s*NNetEn\(\s*(D[12])\s*,\s*([0-9.]+)\s*,\s*(M[1-6])\s*,\s*Ep\s*(\d+)\s*,\s*(R2E|PE|Acc)\s*\)\s*$",
    re.IGNORECASE,
)


def parse_settings_string(text, seed=DEFAULT_SEED):
    """Parse the compact form 'NNetEn(D1,1,M1,Ep5,R2E)'."""
    m = _SETTINGS_RE.match(text)
    if not m:
        raise ConfigurationError(f"cannot parse settings string {text!r}")
    metric = {"r2e": "R2E", "pe": "PE", "acc": "Acc"}[m.group(5).lower()]
    return NNetEnSettings(
        dataset=m.group(1).upper(),
        mu=float(m.group(2)),
        method=int(m.group(3)[1]),
        epochs=int(m.group(4)),
        metric=metric,
        seed=seed,
    )


@dataclass(frozen=True)
class PreparedData:
    """Normalized input matrices of one (dataset, mu) combination."""

    kind: str
    mu: float
    class_count: int
    y_train: np.ndarray
    labels_train: np.ndarray
    y_test: np.ndarray
    labels_test: np.ndarray
    content_hash: str

    @property
    def shared_split(self):
        return self.y_test is self.y_train


class DatasetCache:
    """Loads datasets once and caches prepared matrices per (kind, mu).

    Thread-safe; immutable from the caller's point of view.  Datasets
    may come from `data_dir` (or the NNETEN_DATA_DIR environment
    variable) or be registered directly.
    """

    def __init__(self, data_dir=None):
        self.data_dir = data_dir if data_dir is not None else os.environ.get("NNETEN_DATA_DIR")
        self._full = {}
        self._prepared = {}
        self._lock = threading.Lock()

    def register(self, dataset):
        """Attach an already loaded dataset as the source for its kind."""
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(dataset.train_x).tobytes())
        digest.update(np.ascontiguousarray(dataset.train_y).tobytes())
        with self._lock:
            self._full[dataset.kind] = (digest.hexdigest(), dataset)

    def _load(self, kind):
        if kind in self._full:
            return self._full[kind]
        if not self.data_dir:
            raise ConfigurationError(
                "no dataset source: register() a dataset or set data_dir / NNETEN_DATA_DIR"
            )
        from .dataset import D1_FILES, D2_FILE

        names = D1_FILES if kind == "D1" else (D2_FILE,)
        digest = hashlib.sha256()
        for name in names:
            with open(os.path.join(self.data_dir, name), "rb") as f:
                digest.update(f.read())
        dataset = load_dataset(kind, self.data_dir)
        self._full[kind] = (digest.hexdigest(), dataset)
        return self._full[kind]

    def get(self, kind, mu):
        with self._lock:
            content_hash, full = self._load(kind)
            key = (content_hash, float(mu))
            if key not in self._prepared:
                ds = subsample(full, mu)
                y_train = input_matrix(ds, "train")
                if ds.test_x is ds.train_x:
                    y_test, labels_test = y_train, ds.train_y
                else:
                    y_test, labels_test = input_matrix(ds, "test"), ds.test_y
                self._prepared[key] = PreparedData(
                    kind=kind,
                    mu=float(mu),
                    class_count=ds.class_count,
                    y_train=y_train,
                    labels_train=ds.train_y.astype(np.int64),
                    y_test=y_test,
                    labels_test=np.asarray(labels_test, dtype=np.int64),
                    content_hash=content_hash,
                )
            return self._prepared[key]


def evaluate_settings_grid(prepared, series, methods=(1, 2, 3, 4, 5, 6),
                           epoch_grid=EPOCH_STEPS, metrics=METRIC_TYPES,
                           seed=DEFAULT_SEED, learning_rate=DEFAULT_LEARNING_RATE):
    """Metric values of one series over a (method, epochs, metric) grid.

    For each method the projections are computed once and training is
    continued incrementally through the sorted epoch grid, which is
    identical to training from scratch for each epoch count.
    """
    series = np.asarray(series, dtype=np.float64).ravel()
    epoch_grid = sorted(set(int(e) for e in epoch_grid))
    out = {}
    for method in methods:
        reservoir = fill_reservoir(series, method, prepared.kind)
        sh_train = lognnet.sh_matrix(reservoir, prepared.y_train)
        stats = lognnet.sh_stats_from_values(sh_train)
        x_train = lognnet.classifier_inputs(lognnet.normalize_sh(sh_train, stats))
        if prepared.shared_split:
            x_test = x_train
        else:
            sh_test = lognnet.sh_matrix(reservoir, prepared.y_test)
            x_test = lognnet.classifier_inputs(lognnet.normalize_sh(sh_test, stats))
        v = lognnet.init_weights(prepared.class_count, seed)
        trained = 0
        for epochs in epoch_grid:
            lognnet.train_epochs(x_train, prepared.labels_train, v, epochs - trained, learning_rate)
            trained = epochs
            outputs = lognnet.predict_outputs(v, x_test)
            for metric in metrics:
                out[(method, epochs, metric)] = lognnet._metric_from_outputs(
                    metric, outputs, prepared.labels_test
                )
    return out


def compute_nneten(series, settings, dataset_cache, learning_rate=DEFAULT_LEARNING_RATE):
    """Evaluate the entropy of one series under one settings combination."""
    series = np.asarray(series, dtype=np.float64).ravel()
    prepared = dataset_cache.get(settings.dataset, settings.mu)
    start = time.perf_counter()
    grid = evaluate_settings_grid(
        prepared,
        series,
        methods=(settings.method,),
        epoch_grid=(settings.epochs,),
        metrics=(settings.metric,),
        seed=settings.seed,
        learning_rate=learning_rate,
    )
    wall = time.perf_counter() - start
    value = grid[(settings.method, settings.epochs, settings.metric)]
    return EntropyResult(
        value=float(value),
        settings=settings,
        series_length=int(series.size),
        reservoir_dims=(25, prepared.y_train.shape[1]),
        wall_time=wall,
        timestamp=datetime.now(timezone.utc),
    )


def nset_values(prepared, series, nsets=range(1, 73), seed=DEFAULT_SEED,
                learning_rate=DEFAULT_LEARNING_RATE):
    """Entropy values of one series for a list of nset codes."""
    nsets = list(nsets)
    methods, epochs = set(), set()
    for n in nsets:
        m1, m2, m3 = nset_decode(n)
        methods.add(m2)
        epochs.add(EPOCH_STEPS[m3 - 1])
    grid = evaluate_settings_grid(
        prepared, series,
        methods=sorted(methods), epoch_grid=sorted(epochs),
        seed=seed, learning_rate=learning_rate,
    )
    out = {}
    for n in nsets:
        m1, m2, m3 = nset_decode(n)
        out[n] = grid[(m2, EPOCH_STEPS[m3 - 1], METRIC_TYPES[m1 - 1])]
    return out


def nset_values_many(prepared, series_list, nsets=range(1, 73), seed=DEFAULT_SEED,
                     learning_rate=DEFAULT_LEARNING_RATE, threads=1):
    """nset_values over many series, optionally on a thread pool.

    Results come back in input order regardless of scheduling, so the
    output is independent of the thread count.
    """
    nsets = list(nsets)
    if threads <= 1:
        return [nset_values(prepared, s, nsets, seed, learning_rate) for s in series_list]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: nset_values(prepared, s, nsets, seed, learning_rate), series_list))


def format_log_line(result):
    s = result.settings
    fields = (
        result.timestamp.isoformat(),
        repr(result.value),
        str(s.epochs),
        f"{result.reservoir_dims[0]}x{result.reservoir_dims[1]}",
        repr(s.mu),
        str(result.series_length),
    )
    return "\t".join(fields)


def write_log(result, path):
    """Append one tab-separated evaluation record; writers are serialized."""
    line = format_log_line(result) + "\n"
    with _LOG_LOCK:
        with open(path, "a", encoding="utf-8") as f:
            f.write(line)
