"""Compatibility layer exposing the two-call entropy API.

    >>> from entropy import NNetEn_entropy
    >>> NNetEn = NNetEn_entropy(database='D1', mu=1)
    >>> value = NNetEn.calculation(time_series, epoch=20, method=3,
    ...                            metric='Acc', log=True)

Every number returned here is produced by the `nneten` engine; this
package only translates arguments and exceptions.  A `seed` keyword
(default 42) and a `data_dir` keyword (default: the NNETEN_DATA_DIR
environment variable) are provided as documented extensions.
"""

import numpy as np

from nneten.engine import DatasetCache, NNetEnSettings, compute_nneten, write_log
from nneten.errors import (
    ConfigurationError,
    DomainError,
    NNetEnError,
    SeriesLengthError,
    ShapeError,
)

__all__ = ["NNetEn_entropy"]

_METRICS = {"acc": "Acc", "r2e": "R2E", "pe": "PE"}


def _translate(exc):
    if isinstance(exc, (ConfigurationError, DomainError, SeriesLengthError, ShapeError)):
        return ValueError(str(exc))
    return exc


class NNetEn_entropy:
    """Handle over a loaded reference database.

    Parameters
    ----------
    database : 'D1' or 'D2'
    mu : database usage fraction, 0.01..1
    """

    def __init__(self, database='D1', mu=1, data_dir=None):
        if database not in ("D1", "D2"):
            raise ValueError(f"database must be 'D1' or 'D2', got {database!r}")
        if not 0.01 <= mu <= 1:
            raise ValueError(f"mu={mu} outside [0.01, 1]")
        self.database = database
        self.mu = float(mu)
        self._cache = DatasetCache(data_dir)
        self._cache.get(database, self.mu)  # load and normalize eagerly

    def calculation(self, time_series, epoch=20, method=3, metric='Acc', log=True,
                    seed=42, log_path="log.txt"):
        """Entropy of one time series under the given settings.

        Returns the classification-metric value of the engine verbatim;
        appends one record to `log_path` when `log` is true.
        """
        series = np.asarray(time_series, dtype=np.float64)
        if series.ndim != 1:
            raise ValueError(f"time_series must be 1-D, got shape {series.shape}")
        if not isinstance(method, (int, np.integer)) or not 1 <= int(method) <= 6:
            raise ValueError(f"method must be 1..6, got {method!r}")
        metric_name = _METRICS.get(str(metric).lower())
        if metric_name is None:
            raise ValueError(f"metric must be one of 'Acc', 'R2E', 'PE', got {metric!r}")
        if epoch < 1:
            raise ValueError(f"epoch must be >= 1, got {epoch}")
        try:
            settings = NNetEnSettings(
                dataset=self.database,
                mu=self.mu,
                method=int(method),
                epochs=int(epoch),
                metric=metric_name,
                seed=int(seed),
            )
            result = compute_nneten(series, settings, self._cache)
            if log:
                write_log(result, log_path)
        except NNetEnError as exc:
            raise _translate(exc) from None
        return result.value
