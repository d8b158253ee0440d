import numpy as np
import pytest


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep a developer's .env or shell settings out of the tests."""
    for name in ("HYPERWALK_MAX_N", "HYPERWALK_LOG_LEVEL", "HYPERWALK_JOBS"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, n):
    """A normalised random (n, 2^n) amplitude array."""
    amplitudes = rng.normal(size=(n, 2 ** n)) + 1j * rng.normal(size=(n, 2 ** n))
    return amplitudes / np.linalg.norm(amplitudes)
