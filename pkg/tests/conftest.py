import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kcenter.core import Instance  # noqa: E402


def random_points(rng, n, scale=100.0):
    return [tuple(p) for p in rng.uniform(0, scale, (n, 2))]


@pytest.fixture
def collinear3():
    return [(0.0, 0.0), (50.0, 0.0), (100.0, 0.0)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make(points, k):
    return Instance(tuple(points), k)
