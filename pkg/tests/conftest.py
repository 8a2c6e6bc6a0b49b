import numpy as np
import pytest

from colanet.plasticity import PlasticityParams


def weight_to_resource(w, p):
    """Inverse of the resource/weight map for w in (w_min, w_max)."""
    span = p.w_max - p.w_min
    return (w - p.w_min) * span / (p.w_max - w)


def random_counts(rng, n, high=4):
    """Random count vector with at least one zero and one non-zero entry."""
    while True:
        x = rng.integers(0, high + 1, size=n)
        z = int((x == 0).sum())
        if 0 < z < n:
            return x


def two_pattern_data(n=20, repeats=25, seed=0):
    """Disjoint-support patterns: target lights inputs 0..n/2-1, the other
    class lights n/2..n-1. Returned in alternating order."""
    half = n // 2
    a = np.zeros(n, dtype=np.int64)
    b = np.zeros(n, dtype=np.int64)
    a[:half] = 10
    b[half:] = 10
    rng = np.random.default_rng(seed)
    data = []
    for _ in range(repeats):
        pair = [(a, True), (b, False)]
        rng.shuffle(pair)
        data.extend(pair)
    return data, a, b


@pytest.fixture
def unit_params():
    return PlasticityParams(w_min=-1.0, w_max=1.0, d=0.1, n_s=0, alpha=0.1)
