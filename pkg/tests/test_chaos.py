import numpy as np
import pytest

from nneten.chaos import SineMapConfig, bifurcation_scan, sine_map_series, sine_map_step
from nneten.errors import DomainError


def iterate(r, x, steps):
    for _ in range(steps):
        x = r * np.sin(np.pi * x)
    return x


def test_single_map_step():
    # sin(0.1 * pi) = 0.30901699437494745
    assert abs(sine_map_step(1.0, 0.1) - 0.30901699437494745) < 1e-15


def test_first_iterates_pinned():
    series = sine_map_series(SineMapConfig(r=1.5, burn_in=0, series_length=4, series_count=1))[0]
    x = 0.1
    expected = []
    for _ in range(4):
        x = 1.5 * np.sin(np.pi * x)
        expected.append(x)
    np.testing.assert_allclose(series, expected, atol=1e-12)


def test_minimal_config_single_element():
    series = sine_map_series(SineMapConfig(r=1.3, burn_in=0, series_length=1, series_count=1))
    assert len(series) == 1
    assert series[0].shape == (1,)
    assert series[0][0] == 1.3 * np.sin(np.pi * 0.1)


def test_windows_are_contiguous():
    config = SineMapConfig(r=1.9, burn_in=50, series_length=25, series_count=4)
    windows = sine_map_series(config)
    # oracle: one long orbit generated independently
    x = iterate(1.9, 0.1, 50)
    orbit = []
    for _ in range(100):
        x = 1.9 * np.sin(np.pi * x)
        orbit.append(x)
    np.testing.assert_array_equal(np.concatenate(windows), orbit)
    # window k starts at global index (k-1) * N + 1
    assert windows[1][0] == orbit[25]


def test_orbit_stays_bounded():
    for r in (0.7, 1.33, 2.0):
        series = np.concatenate(sine_map_series(SineMapConfig(r=r, series_count=5)))
        assert np.max(np.abs(series)) <= r + 1e-12


def test_deterministic():
    config = SineMapConfig(r=1.7551)
    a = sine_map_series(config)
    b = sine_map_series(config)
    for s1, s2 in zip(a, b):
        np.testing.assert_array_equal(s1, s2)


def test_r_domain():
    with pytest.raises(DomainError):
        SineMapConfig(r=0.5)
    with pytest.raises(DomainError):
        SineMapConfig(r=2.1)
    with pytest.raises(DomainError):
        bifurcation_scan(0.5, 1.0, 10)


class TestRegimes:
    def samples(self, r, n=400):
        _, table = bifurcation_scan(r, r, 1, samples=n, burn_in=20000)
        return table[0]

    def test_fixed_point_at_r07(self):
        # iterating to convergence at r=0.7 settles on one value
        s = self.samples(0.7)
        assert s.max() - s.min() < 1e-6

    def test_period_two_at_r08(self):
        # r=0.8 is past the first period doubling: two alternating values
        s = self.samples(0.8)
        assert s.max() - s.min() > 0.3
        np.testing.assert_allclose(s[:-2], s[2:], atol=1e-9)
        distinct = np.unique(np.round(s, 9))
        assert len(distinct) == 2

    def test_periodic_orbit_at_pair_b_low(self):
        # small recurring set of values
        s = self.samples(1.7161)
        distinct = np.unique(np.round(s, 7))
        assert 2 <= len(distinct) <= 12
        period = len(np.unique(np.round(s, 9)))
        np.testing.assert_allclose(s[:-period], s[period:], atol=1e-7)

    def test_chaotic_at_pair_b_high(self):
        s = self.samples(1.7551, n=2000)
        # samples fill an interval: many distinct values, no short period
        assert len(np.unique(np.round(s, 6))) > 1000
        for period in range(1, 50):
            assert np.max(np.abs(s[period:] - s[:-period])) > 1e-3


def test_scan_table_shape():
    r_values, table = bifurcation_scan(0.7, 2.0, 14, samples=50, burn_in=100)
    assert r_values.shape == (14,)
    assert table.shape == (14, 50)
    assert r_values[0] == 0.7
    assert r_values[-1] == 2.0
