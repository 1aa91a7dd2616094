"""Classical entropy companions: Sample Entropy and SVD Entropy.

These are combined with the network entropy in feature-pair and synergy
studies, so both are implemented with fixed, test-pinned conventions:
Richman-Moorman template counting for SampEn and natural-log Shannon
entropy of normalized singular values for SVDEn.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DomainError, UndefinedEntropyError


@dataclass(frozen=True)
class SampEnParams:
    m: int = 2
    r_factor: float = 0.2

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("embedding dimension m must be >= 1")
        if self.r_factor <= 0:
            raise DomainError("r_factor must be > 0")


@dataclass(frozen=True)
class SvdEnParams:
    m: int = 2
    delay: int = 1

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("embedding dimension m must be >= 2")
        if self.delay < 1:
            raise DomainError("delay must be >= 1")


def sample_entropy(series, params=None, *, m=None, r_factor=None, tolerance=None):
    """Sample entropy -ln(A/B) of a 1-D series.

    B counts pairs of length-m templates within `tolerance` in Chebyshev
    distance, A the same for length m+1; both template sets contain the
    first N-m windows and self-matches are excluded.  The tolerance
    defaults to r_factor times the sample standard deviation, which
    makes the value invariant under affine transforms of the series.

    Raises UndefinedEntropyError when no templates match at either
    length (A == 0 or B == 0), where the logarithm is undefined.
    """
    p = params or SampEnParams(m=m if m is not None else 2,
                               r_factor=r_factor if r_factor is not None else 0.2)
    x = np.asarray(series, dtype=np.float64).ravel()
    n = x.size
    if n <= p.m + 1:
        raise DomainError(f"series of length {n} too short for m={p.m} (need > m + 1)")
    tol = tolerance if tolerance is not None else p.r_factor * x.std(ddof=1)
    count = n - p.m
    t_m = sliding_window_view(x, p.m)[:count]
    t_m1 = sliding_window_view(x, p.m + 1)
    b = a = 0
    for i in range(count - 1):
        b += int(np.count_nonzero(np.abs(t_m[i + 1:] - t_m[i]).max(axis=1) <= tol))
        a += int(np.count_nonzero(np.abs(t_m1[i + 1:] - t_m1[i]).max(axis=1) <= tol))
    if b == 0 or a == 0:
        raise UndefinedEntropyError(f"no matching templates (A={a}, B={b})")
    return float(-np.log(a / b))


def svd_entropy(series, params=None, *, m=None, delay=None, normalize=False):
    """Shannon entropy (natural log) of the normalized singular values of
    the delay-embedding matrix.

    The embedding has N - (m-1)*delay rows and m columns.  The value is
    bounded by ln(m); pass normalize=True to divide by that bound.  An
    all-zero series yields 0.0 by convention.
    """
    p = params or SvdEnParams(m=m if m is not None else 2,
                              delay=delay if delay is not None else 1)
    x = np.asarray(series, dtype=np.float64).ravel()
    rows = x.size - (p.m - 1) * p.delay
    if x.size < p.m * p.delay or rows < 1:
        raise DomainError(f"series of length {x.size} too short for m={p.m}, delay={p.delay}")
    emb = np.column_stack([x[i * p.delay:i * p.delay + rows] for i in range(p.m)])
    sigma = np.linalg.svd(emb, compute_uv=False)
    total = sigma.sum()
    if total == 0:
        return 0.0
    p_sigma = sigma / total
    nz = p_sigma > 0
    h = float(-np.sum(p_sigma[nz] * np.log(p_sigma[nz])))
    return h / np.log(p.m) if normalize else h
