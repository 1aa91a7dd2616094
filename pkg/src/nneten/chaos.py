"""Synthetic signal generation with the discrete chaotic sine map
x_{n+1} = r * sin(pi * x_n), 0.7 <= r <= 2.

Signal classes are built by iterating one long orbit past a transient
burn-in and cutting it into consecutive non-overlapping windows.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

R_MIN, R_MAX = 0.7, 2.0


@dataclass(frozen=True)
class SineMapConfig:
    r: float
    x_start: float = 0.1
    burn_in: int = 1000
    series_length: int = 300
    series_count: int = 100

    def __post_init__(self):
        if not R_MIN <= self.r <= R_MAX:
            raise DomainError(f"r={self.r} outside [{R_MIN}, {R_MAX}]")
        if self.burn_in < 0:
            raise DomainError("burn_in must be >= 0")
        if self.series_length < 1 or self.series_count < 1:
            raise DomainError("series_length and series_count must be >= 1")


def sine_map_step(r, x):
    return r * np.sin(np.pi * x)


def _orbit(r, x_start, burn_in, length):
    x = x_start
    for _ in range(burn_in):
        x = r * np.sin(np.pi * x)
    out = np.empty(length)
    for i in range(length):
        x = r * np.sin(np.pi * x)
        out[i] = x
    return out


def sine_map_series(config):
    """Generate `series_count` consecutive windows of the post-transient
    orbit, each `series_length` elements long."""
    total = config.series_count * config.series_length
    orbit = _orbit(config.r, config.x_start, config.burn_in, total)
    n = config.series_length
    return [orbit[k * n:(k + 1) * n].copy() for k in range(config.series_count)]


def bifurcation_scan(r_min, r_max, steps, samples=200, burn_in=1000, x_start=0.1):
    """Post-transient orbit samples for a range of map parameters.

    Returns (r_values, orbit_matrix) where row i holds `samples`
    consecutive orbit values at r_values[i]; suitable for plotting a
    bifurcation diagram or detecting the regime (fixed point, periodic,
    chaotic) at each r.
    """
    if not (R_MIN <= r_min <= r_max <= R_MAX):
        raise DomainError(f"scan range [{r_min}, {r_max}] outside [{R_MIN}, {R_MAX}]")
    r_values = np.linspace(r_min, r_max, steps)
    table = np.empty((steps, samples))
    for i, r in enumerate(r_values):
        table[i] = _orbit(float(r), x_start, burn_in, samples)
    return r_values, table
