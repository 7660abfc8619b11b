import numpy as np
import pytest

from palette_orchestra.color import PaletteSet


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_palette_set(rng, n, k):
    return PaletteSet(rng.random((n, k, 3)))


@pytest.fixture
def small_set(rng):
    return random_palette_set(rng, 8, 5)
