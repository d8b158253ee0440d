"""Broken-link noise: random per-step topologies and Monte Carlo ensembles.

At every step each hypercube edge is opened (broken) independently with
probability p. A broken edge reflects amplitude back onto its vertex, so the
shift stays a permutation and every trial is a pure unitary evolution; only
the ensemble average over trials decoheres.

Trials draw from their own stream, ``SeedSequence(seed, spawn_key=(trial,))``,
so a run is reproducible no matter how trials are split across workers.
Trials are evolved in fixed-size chunks and chunk sums are reduced in chunk
order, which keeps the floating-point result bit-identical for any job count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from hyperwalk import settings
from hyperwalk.distribution import Distribution, check_dimension, vertex_count
from hyperwalk.errors import DimensionMismatchError, NormalizationError, ParameterRangeError, ResourceLimitError
from hyperwalk.metrics import (
    MixingResult,
    check_epsilon,
    check_history_budget,
    mixing_time_from_curve,
    running_averages,
)
from hyperwalk.walk import apply_shift, grover_coin, initial_state, probabilities

logger = logging.getLogger(__name__)


# --- Edge masks ---

@lru_cache(maxsize=None)
def _canonical_index(n):
    """canon[j, x]: index of edge {x, x ⊕ e_j} among the 2^{n−1} edges of direction j.

    The edge is named by its endpoint with bit j cleared; dropping that bit
    gives a dense index.
    """
    x = np.arange(vertex_count(n), dtype=np.int64)
    rows = []
    for j in range(n):
        low = x & ~(1 << j)
        rows.append(((low >> (j + 1)) << j) | (low & ((1 << j) - 1)))
    table = np.stack(rows)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class EdgeMask:
    """The set of broken links for one step.

    `broken[j, c]` covers the undirected edge of direction j with canonical
    index c, so both endpoints always agree on the link state.
    """

    n: int
    broken: NDArray[np.bool_]

    def __post_init__(self):
        broken = np.asarray(self.broken, dtype=bool)
        expected = (self.n, vertex_count(self.n) // 2)
        if broken.shape != expected:
            raise DimensionMismatchError(f"Edge mask for n={self.n} must have shape {expected}, got {broken.shape}.")
        broken.setflags(write=False)
        object.__setattr__(self, "broken", broken)

    @classmethod
    def closed(cls, n):
        return cls(n, np.zeros((n, vertex_count(n) // 2), dtype=bool))

    @classmethod
    def from_edges(cls, n, edges: Iterable[Tuple[int, int]]):
        """Build a mask from (vertex, direction) pairs; either endpoint names the edge."""
        broken = np.zeros((n, vertex_count(n) // 2), dtype=bool)
        canon = _canonical_index(n)
        for x, j in edges:
            if not 0 <= j < n or not 0 <= x < vertex_count(n):
                raise DimensionMismatchError(f"Edge ({x}, {j}) does not exist for n={n}.")
            broken[j, canon[j, x]] = True
        return cls(n, broken)

    @property
    def edge_count(self):
        return self.broken.size

    @property
    def broken_count(self):
        return int(self.broken.sum())

    def is_broken(self, x, j):
        return bool(self.broken[j, _canonical_index(self.n)[j, x]])

    def port_mask(self) -> NDArray[np.bool_]:
        """Expand to shape (n, 2^n): True where the port (j, x) is blocked."""
        return _expand(self.broken, self.n)


def _expand(broken, n):
    rows = np.arange(n)[:, None]
    return broken[..., rows, _canonical_index(n)]


def check_probability(p):
    if not 0.0 <= p <= 1.0:
        raise ParameterRangeError(f"Break probability p must lie in [0, 1], got {p}.")
    return float(p)


def _sample_bits(rng, n, p):
    return rng.random((n, vertex_count(n) // 2)) < p


def sample_mask(n, p, rng: np.random.Generator) -> EdgeMask:
    """Break each of the n·2^{n−1} edges independently with probability p."""
    n = check_dimension(n)
    p = check_probability(p)
    return EdgeMask(n, _sample_bits(rng, n, p))


# --- Random streams ---

def trial_generator(seed, trial) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def trial_generators(seed, trials) -> List[np.random.Generator]:
    return [trial_generator(seed, t) for t in range(trials)]


# --- Ensemble accumulation ---

@dataclass
class EnsembleAccumulator:
    """Running sums of P(x, t) over trials, one row per step."""

    n: int
    t_max: int
    sums: Optional[NDArray[np.float64]] = None
    trials: int = 0
    chunk_means: List[NDArray[np.float64]] = field(default_factory=list)
    keep_chunks: bool = True

    def __post_init__(self):
        if self.sums is None:
            self.sums = np.zeros((self.t_max + 1, vertex_count(self.n)))

    def add(self, chunk_sum, chunk_trials):
        if chunk_sum.shape != self.sums.shape:
            raise DimensionMismatchError(f"Chunk of shape {chunk_sum.shape} does not fit {self.sums.shape}.")
        self.sums += chunk_sum
        self.trials += chunk_trials
        if self.keep_chunks:
            self.chunk_means.append(chunk_sum / chunk_trials)

    def mean(self) -> NDArray[np.float64]:
        if self.trials == 0:
            raise ParameterRangeError("No trials have been accumulated.")
        return self.sums / self.trials

    def distribution(self, t) -> Distribution:
        return Distribution(self.n, self.mean()[t])

    def distributions(self) -> List[Distribution]:
        return [Distribution(self.n, row) for row in self.mean()]

    def tvd_curve(self, reference):
        """Cesàro TVD curve of the ensemble mean and its batch-means standard error.

        The error is NaN when fewer than two chunks were kept.
        """
        ref = reference.probs if isinstance(reference, Distribution) else np.asarray(reference)
        curve = _cesaro_curve(self.mean(), ref)
        if len(self.chunk_means) < 2:
            return curve, np.full_like(curve, np.nan)
        per_chunk = np.stack([_cesaro_curve(chunk, ref) for chunk in self.chunk_means])
        stderr = per_chunk.std(axis=0, ddof=1) / np.sqrt(len(self.chunk_means))
        return curve, stderr


def _cesaro_curve(rows, ref):
    return np.array([np.abs(avg - ref).sum() for avg in running_averages(rows)])


def _run_chunk(n, p, seed, trial_ids, t_max, initial):
    """Evolve a block of trials together; returns Σ_trials P(x, t) for t = 0..t_max."""
    rngs = [trial_generator(seed, t) for t in trial_ids]
    coin = grover_coin(n)
    start = initial_state(n, initial).amplitudes
    amplitudes = np.broadcast_to(start, (len(trial_ids),) + start.shape).copy()

    sums = np.empty((t_max + 1, vertex_count(n)))
    sums[0] = probabilities(amplitudes).sum(axis=0)
    for t in range(t_max):
        blocked = None
        if p > 0.0:
            blocked = _expand(np.stack([_sample_bits(rng, n, p) for rng in rngs]), n)
        amplitudes = apply_shift(coin.apply(amplitudes), blocked, check=False)
        sums[t + 1] = probabilities(amplitudes).sum(axis=0)

    drift = np.abs(probabilities(amplitudes).sum(axis=-1) - 1.0).max()
    if not drift <= settings.NORM_TOL:
        raise NormalizationError(f"Trial norm drifted by {drift:.3e} over {t_max} steps.")
    return sums


def _chunks(trials):
    size = settings.TRIAL_CHUNK
    return [list(range(start, min(start + size, trials))) for start in range(0, trials, size)]


def simulate_ensemble(n, p, trials, t_max, seed=settings.DEFAULT_SEED, initial="symmetric", jobs=1) -> EnsembleAccumulator:
    """Trial-averaged position distributions of the broken-link walk."""
    n = check_dimension(n)
    p = check_probability(p)
    if trials < 1:
        raise ParameterRangeError(f"trials must be >= 1, got {trials}.")
    check_history_budget(n, t_max)
    work = trials * t_max * n * vertex_count(n)
    if work > settings.WORK_BUDGET:
        raise ResourceLimitError(
            f"{trials} trials × {t_max} steps at n={n} need {work:.3g} amplitude updates, "
            f"over the budget of {settings.WORK_BUDGET:.3g}."
        )

    chunks = _chunks(trials)
    keep = len(chunks) * (t_max + 1) * vertex_count(n) <= settings.HISTORY_BUDGET
    accumulator = EnsembleAccumulator(n, t_max, keep_chunks=keep)
    logger.info("ensemble n=%d p=%g trials=%d t_max=%d in %d chunks", n, p, trials, t_max, len(chunks))

    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_chunk, n, p, seed, ids, t_max, initial) for ids in chunks]
            for ids, future in zip(chunks, futures):
                accumulator.add(future.result(), len(ids))
    else:
        for ids in chunks:
            accumulator.add(_run_chunk(n, p, seed, ids, t_max, initial), len(ids))
    return accumulator


def run_decoherent(config) -> EnsembleAccumulator:
    """Run the ensemble an ExperimentConfig describes."""
    return simulate_ensemble(
        config.n,
        config.p,
        config.trials,
        config.t_max,
        seed=config.seed,
        initial=config.initial,
        jobs=config.jobs,
    )


def decoherent_mixing_time(
    n, p, epsilon, trials=settings.DEFAULT_TRIALS, t_max=None, seed=settings.DEFAULT_SEED, jobs=1
) -> MixingResult:
    """Average mixing time of the ensemble-averaged walk to the uniform distribution."""
    epsilon = check_epsilon(epsilon)
    t_max = settings.default_t_max(n) if t_max is None else int(t_max)
    ensemble = simulate_ensemble(n, p, trials, t_max, seed=seed, jobs=jobs)
    curve, _ = ensemble.tvd_curve(Distribution.uniform(n))
    result = mixing_time_from_curve(curve, epsilon)
    logger.info("decoherent mixing time n=%d p=%g eps=%g -> %s", n, p, epsilon, result.time)
    return result
