import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from atw import ImageBuffer, kernels  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    kernels.warm_up()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_image(rng, width, height, channels=3, amplitude=0.95):
    data = rng.uniform(-amplitude, amplitude, (height, width, channels))
    return ImageBuffer(data.astype(np.float32))
