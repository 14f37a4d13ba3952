import sys
from collections.abc import Callable, Iterator
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.config import get_settings  # noqa: E402
from src.smoothers import DesignSample  # noqa: E402


@pytest.fixture(autouse=True)
def _fresh_settings() -> Iterator[None]:
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def make_sample() -> Callable[..., DesignSample]:
    """Uniform design on [0, 1] with ``sin(5 pi x)`` plus Gaussian noise."""

    def factory(n: int = 50, seed: int = 0, sigma: float = 0.4) -> DesignSample:
        rng = np.random.default_rng(seed)
        x = rng.uniform(0.0, 1.0, n)
        y = np.sin(5.0 * np.pi * x) + rng.normal(0.0, sigma, n)
        return DesignSample(x, y)

    return factory


@pytest.fixture
def grid_sample() -> DesignSample:
    """Regular design where the gaussian h=0.05 smoother is well conditioned."""
    x = np.linspace(0.0, 1.0, 20)
    rng = np.random.default_rng(7)
    return DesignSample(x, np.cos(3.0 * x) + rng.normal(0.0, 0.1, x.size))

