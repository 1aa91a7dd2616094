import os

import numpy as np
import pytest

from nneten.chaos import SineMapConfig, sine_map_series
from nneten.dataset import (
    load_dataset,
    load_rbv1,
    write_synthetic_mnist,
    write_synthetic_rbv1,
)
from nneten.engine import DatasetCache


@pytest.fixture(scope="session")
def rbv1_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("d2") / "rbv1.csv"
    write_synthetic_rbv1(str(path))
    return str(path)


@pytest.fixture(scope="session")
def d2_dataset(rbv1_path):
    return load_rbv1(rbv1_path)


@pytest.fixture(scope="session")
def mnist_small_dir(tmp_path_factory):
    """D1 stand-in at 1% scale: ~600 train / ~100 test images."""
    directory = tmp_path_factory.mktemp("d1_small")
    write_synthetic_mnist(str(directory), scale=0.01)
    return str(directory)


@pytest.fixture(scope="session")
def d1_small(mnist_small_dir):
    return load_dataset("D1", mnist_small_dir)


@pytest.fixture(scope="session")
def small_data_dir(tmp_path_factory, mnist_small_dir, rbv1_path):
    """Directory holding both stand-ins under the conventional names."""
    directory = tmp_path_factory.mktemp("data")
    for name in os.listdir(mnist_small_dir):
        os.link(os.path.join(mnist_small_dir, name), directory / name)
    os.link(rbv1_path, directory / "rbv1.csv")
    return str(directory)


@pytest.fixture(scope="session")
def d2_cache(d2_dataset):
    cache = DatasetCache()
    cache.register(d2_dataset)
    return cache


@pytest.fixture(scope="session")
def small_cache(d1_small, d2_dataset):
    cache = DatasetCache()
    cache.register(d1_small)
    cache.register(d2_dataset)
    return cache


@pytest.fixture(scope="session")
def pair_a_series():
    return {
        r: sine_map_series(SineMapConfig(r=r, series_count=20))
        for r in (1.1918, 1.2243)
    }


def chaotic_series(count=1, length=300, r=1.7551):
    return sine_map_series(SineMapConfig(r=r, series_count=count, series_length=length))
