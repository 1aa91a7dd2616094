"""Reservoir matrix construction from a time series.

The reservoir is a fixed P_MAX x y_dim weight matrix whose cells are
taken from the analyzed series by one of six filling methods:

* M1/M4 -- cyclic duplication of the series (row-major / column-major),
* M2/M5 -- cyclic duplication with a single zero appended to the cycle,
* M3/M6 -- stretching to the full cell count by nearest-index mapping.

Stretching picks indices, never interpolates, so every cell of every
method holds either a series value or the injected zero.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, SeriesLengthError

P_MAX = 25

_METHOD_IDS = {f"M{i}": i for i in range(1, 7)}


def y_dim(dataset_kind):
    from .dataset import DATASET_INFO

    if dataset_kind not in DATASET_INFO:
        raise ConfigurationError(f"unknown dataset {dataset_kind!r}")
    return DATASET_INFO[dataset_kind]["feature_count"] + 1


def n_max(dataset_kind):
    """Largest series length the reservoir of a dataset can hold."""
    return P_MAX * y_dim(dataset_kind)


def method_id(method):
    """Normalize 'M3' / 3 to the integer 1..6."""
    if isinstance(method, str):
        m = _METHOD_IDS.get(method.upper())
    else:
        m = int(method) if method in (1, 2, 3, 4, 5, 6) else None
    if m is None:
        raise ConfigurationError(f"unknown filling method {method!r} (expected M1..M6)")
    return m


@dataclass(frozen=True)
class ReservoirMatrix:
    w: np.ndarray  # (P_MAX, y_dim)
    method: int
    dataset_kind: str

    @property
    def p_max(self):
        return self.w.shape[0]

    @property
    def y_dim(self):
        return self.w.shape[1]


def _fill_cells(series, rows, cols, method):
    """Fill rows*cols cells from the series; core shared by M1..M6."""
    n_cells = rows * cols
    n = len(series)
    if method in (1, 4):
        flat = series[np.arange(n_cells) % n]
    elif method in (2, 5):
        unit = np.append(series, 0.0)
        flat = unit[np.arange(n_cells) % (n + 1)]
    else:
        if n == 1:
            idx = np.zeros(n_cells, dtype=np.int64)
        else:
            # nearest index, halves rounded up
            idx = np.floor(np.arange(n_cells) * (n - 1) / (n_cells - 1) + 0.5).astype(np.int64)
        flat = series[idx]
    if method <= 3:
        w = flat.reshape(rows, cols)
    else:
        w = flat.reshape(cols, rows).T
    return np.ascontiguousarray(w)


def fill_reservoir(series, method, dataset_kind):
    """Build the reservoir matrix for a dataset kind from a 1-D series."""
    m = method_id(method)
    x = np.asarray(series, dtype=np.float64).ravel()
    limit = n_max(dataset_kind)
    if x.size < 1:
        raise SeriesLengthError("time series is empty")
    if x.size > limit:
        raise SeriesLengthError(f"series of length {x.size} exceeds reservoir capacity {limit} for {dataset_kind}")
    if not np.all(np.isfinite(x)):
        raise SeriesLengthError("time series contains non-finite values")
    w = _fill_cells(x, P_MAX, y_dim(dataset_kind), m)
    w.setflags(write=False)
    return ReservoirMatrix(w=w, method=m, dataset_kind=dataset_kind)
