import time
from types import SimpleNamespace

import numpy as np
import pytest

from fairlab import Dataset, reproduce


@pytest.fixture
def hand_dataset():
    """Six-record dataset with hand-computable metrics: group 1 has values
    {1,2,3} with outcomes (1,1,0); group 0 has {5,6,7} with (1,0,0)."""
    return Dataset(
        g=[1, 1, 1, 0, 0, 0],
        v=[1.0, 2.0, 3.0, 5.0, 6.0, 7.0],
        y=[1, 1, 0, 1, 0, 0],
        provenance="S",
    )


def random_dataset(rng, n=60, with_weights=False):
    """Small random dataset guaranteed to contain every (g, y) cell."""
    g = rng.integers(0, 2, n)
    y = rng.integers(0, 2, n)
    g[:4] = [0, 0, 1, 1]
    y[:4] = [0, 1, 0, 1]
    w = rng.uniform(0.2, 3.0, n) if with_weights else None
    return Dataset(g=g, v=rng.normal(5.0, 1.0, n), y=y, w=w)


@pytest.fixture(scope="session")
def benchmark_run(tmp_path_factory):
    """One full benchmark report at master seed 42, shared across tests;
    records its own wall time for the determinism runtime budget."""
    out = tmp_path_factory.mktemp("benchmark") / "run1"
    start = time.perf_counter()
    tables = reproduce(42, out)
    elapsed = time.perf_counter() - start
    return SimpleNamespace(out=out, tables=tables, elapsed=elapsed, seed=42)
