import numpy as np
import pytest

from photonstats import sample


@pytest.fixture(scope="session")
def train_cache():
    """Memoized sampling so expensive trains are drawn once per run."""
    cache = {}

    def get(spec, pulses, seed):
        key = (spec.canonical_json(), pulses, seed)
        if key not in cache:
            cache[key] = sample(spec, pulses, seed)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
