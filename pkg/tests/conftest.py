import numpy as np
import pytest

from hmdecode import Coord, NoiseKind, NoiseSpec, Space, encode, inject_noise
from hmdecode._backend import available_backends


def make_encoded(cx, cy, width=17, height=17, stride=1.0, sigma=2.0, normalized=False):
    return encode(Coord(cx, cy, Space.IMAGE), width, height, stride, sigma, normalized)


def ghost(amplitude=0.3, dx=2.0, dy=2.0):
    return NoiseSpec(kind=NoiseKind.GHOST_GAUSSIAN, amplitude=amplitude, offset=(dx, dy))


def white(amplitude, seed=0):
    return NoiseSpec(kind=NoiseKind.WHITE_GAUSSIAN, amplitude=amplitude, seed=seed)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


needs_compiled = pytest.mark.skipif(
    "compiled" not in available_backends(), reason="compiled backend not built"
)
