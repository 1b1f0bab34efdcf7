import sys

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("lorlab", max_examples=60, deadline=None)
settings.load_profile("lorlab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_samples(rng, n, ties=True, complex_values=False):
    """Heavy-tailed samples with optional repeated values and zeros."""
    v = 10.0 ** rng.uniform(-3, 3, n)
    if ties:
        pool = v[: max(1, n // 4)]
        mask = rng.uniform(size=n) < 0.3
        v[mask] = rng.choice(pool, mask.sum())
        v[rng.uniform(size=n) < 0.1] = 0.0
    if complex_values:
        v = v * np.exp(2j * np.pi * rng.uniform(size=n))
    return v


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
