"""Probability distributions over hypercube vertices, plus vertex helpers.

Vertices are the integers 0..2^n-1; bit j of x is coordinate j, so moving
along direction j is ``x ^ (1 << j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from hyperwalk import settings
from hyperwalk.errors import InvalidDimensionError, NormalizationError, ResourceLimitError


def check_dimension(n, max_n=None):
    """Validate a hypercube dimension; `max_n` defaults to the state-vector cap."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise InvalidDimensionError(f"Dimension must be an integer, got {type(n).__name__}.")
    if n < settings.MIN_N:
        raise InvalidDimensionError(f"Dimension must be >= {settings.MIN_N} (got {n}).")
    limit = settings.max_state_n() if max_n is None else max_n
    if n > limit:
        raise ResourceLimitError(
            f"Dimension n={n} exceeds the supported maximum of {limit} "
            f"(HYPERWALK_MAX_N overrides the state-vector cap)."
        )
    return int(n)


def vertex_count(n):
    return 1 << n


@lru_cache(maxsize=None)
def _hamming_weights(n):
    x = np.arange(vertex_count(n), dtype=np.int64)
    weights = np.zeros_like(x)
    for j in range(n):
        weights += (x >> j) & 1
    weights.setflags(write=False)
    return weights


def hamming_weights(n) -> NDArray[np.int64]:
    """|x| for every vertex x, as a read-only array."""
    return _hamming_weights(int(n))


def parity_class(n, parity) -> NDArray[np.bool_]:
    """Boolean mask of the vertices whose Hamming weight has the given parity."""
    return (hamming_weights(n) % 2) == (parity % 2)


@dataclass(frozen=True)
class Distribution:
    """A probability vector over the 2^n vertices."""

    n: int
    probs: NDArray[np.float64]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (vertex_count(self.n),):
            raise NormalizationError(
                f"Expected {vertex_count(self.n)} probabilities for n={self.n}, got shape {probs.shape}."
            )
        lowest = probs.min()
        if lowest < -settings.NEGATIVE_CLAMP_TOL:
            raise NormalizationError(f"Negative probability {lowest:.3e} is beyond round-off.")
        if lowest < 0:
            probs = np.clip(probs, 0.0, None)
        total = probs.sum()
        if not abs(total - 1.0) <= settings.NORM_TOL:
            raise NormalizationError(f"Probabilities sum to {total!r}, not 1.")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return len(self.probs)

    def __getitem__(self, x):
        return self.probs[x]

    @classmethod
    def uniform(cls, n):
        size = vertex_count(n)
        return cls(n, np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, n, vertex=0):
        probs = np.zeros(vertex_count(n))
        probs[vertex] = 1.0
        return cls(n, probs)

    def mass_on(self, mask):
        return float(self.probs[mask].sum())
