"""Distances, time averages and mixing times.

Curve convention used throughout: ``curve[t]`` compares the distribution
built from steps 0..t. For the average mixing time that is the running mean
of P(·,0..t); the mixing time M is the first t after which the curve never
again exceeds ε within the horizon, i.e. (last exceedance) + 1, or 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from hyperwalk import settings
from hyperwalk.distribution import Distribution, check_dimension, parity_class, vertex_count
from hyperwalk.errors import DimensionMismatchError, ParameterRangeError, ResourceLimitError
from hyperwalk.spectral import omega, stationary_pi_closed
from hyperwalk.walk import (
    WalkerState,
    evolve,
    grover_coin,
    initial_state_symmetric,
    position_distribution,
    probabilities,
)

logger = logging.getLogger(__name__)

REFERENCE_KINDS = ("stationary", "uniform")


@dataclass(frozen=True)
class MixingResult:
    """Outcome of a mixing-time search.

    `time` is None when the threshold was not met within `t_max` steps; the
    result is only certified up to that horizon.
    """

    epsilon: float
    time: Optional[int]
    tvd_curve: NDArray[np.float64]
    t_max: int

    @property
    def found(self):
        return self.time is not None


# --- Validation ---

def check_epsilon(epsilon):
    if not 0.0 < epsilon <= 2.0:
        raise ParameterRangeError(f"epsilon must lie in (0, 2], got {epsilon}.")
    return float(epsilon)


def check_history_budget(n, t_max):
    if t_max < 1:
        raise ParameterRangeError(f"t_max must be >= 1, got {t_max}.")
    cells = (t_max + 1) * vertex_count(n)
    if cells > settings.HISTORY_BUDGET:
        raise ResourceLimitError(
            f"A history of {t_max + 1} steps over 2^{n} vertices needs {cells} cells, "
            f"over the budget of {settings.HISTORY_BUDGET}."
        )


def _probs(dist):
    return dist.probs if isinstance(dist, Distribution) else np.asarray(dist, dtype=np.float64)


# --- Distances and averages ---

def tvd(a, b) -> float:
    """Σ_x |a(x) − b(x)|, in [0, 2]."""
    pa, pb = _probs(a), _probs(b)
    if pa.shape != pb.shape:
        raise DimensionMismatchError(f"Cannot compare distributions of shapes {pa.shape} and {pb.shape}.")
    return float(np.abs(pa - pb).sum())


def time_averaged(history: Sequence[Distribution], T: int) -> Distribution:
    """Cesàro mean of the first T distributions in `history`."""
    if T < 1 or T > len(history):
        raise ParameterRangeError(f"T={T} must lie in [1, {len(history)}].")
    stacked = np.stack([_probs(d) for d in history[:T]])
    return Distribution(history[0].n, stacked.mean(axis=0))


def running_averages(prob_iter: Iterable[NDArray[np.float64]]) -> Iterator[NDArray[np.float64]]:
    """Yield the running mean after each new distribution (incremental update).

    The same array is updated in place and yielded again; copy it to keep it.
    """
    average = None
    for t, probs in enumerate(prob_iter):
        if average is None:
            average = np.array(probs, dtype=np.float64)
        else:
            average += (probs - average) / (t + 1)
        yield average


def cesaro_tvd_curve(prob_iter, reference) -> NDArray[np.float64]:
    ref = _probs(reference)
    return np.array([np.abs(avg - ref).sum() for avg in running_averages(prob_iter)])


def mixing_time_from_curve(curve, epsilon) -> MixingResult:
    """Backward scan for min{T | curve[t] <= ε for all t in [T, t_max]}."""
    epsilon = check_epsilon(epsilon)
    curve = np.asarray(curve, dtype=np.float64)
    t_max = len(curve) - 1
    exceed = np.flatnonzero(curve > epsilon)
    if exceed.size == 0:
        time = 0
    elif exceed[-1] == t_max:
        time = None
    else:
        time = int(exceed[-1]) + 1
    return MixingResult(epsilon, time, curve, t_max)


# --- Coherent walk helpers ---

def coherent_probabilities(n, t_max, initial: Optional[WalkerState] = None) -> Iterator[NDArray[np.float64]]:
    """P(·, t) for t = 0..t_max of the Grover walk, as raw arrays."""
    state = initial if initial is not None else initial_state_symmetric(n)
    for current in evolve(state, grover_coin(n), t_max):
        yield probabilities(current.amplitudes)


def coherent_history(n, t_max, initial: Optional[WalkerState] = None) -> list:
    n = check_dimension(n)
    check_history_budget(n, t_max)
    state = initial if initial is not None else initial_state_symmetric(n)
    return [position_distribution(s) for s in evolve(state, grover_coin(n), t_max)]


def parity_adjusted(reference: Distribution, parity) -> Distribution:
    """The reference conditioned on one Hamming-parity class, renormalised."""
    mask = parity_class(reference.n, parity)
    restricted = np.where(mask, reference.probs, 0.0)
    mass = restricted.sum()
    if mass <= 0.0:
        raise ParameterRangeError(f"Reference puts no mass on parity class {parity}.")
    return Distribution(reference.n, restricted / mass)


def reference_distribution(n, kind) -> Distribution:
    if kind == "stationary":
        return stationary_pi_closed(n)
    if kind == "uniform":
        return Distribution.uniform(n)
    raise ParameterRangeError(f"Unknown reference '{kind}'; expected one of {', '.join(REFERENCE_KINDS)}.")


# --- Mixing times ---

def average_mixing_time(n, epsilon, reference: Optional[Distribution] = None, t_max=None) -> MixingResult:
    """M_ε of the coherent symmetric walk against `reference` (default: π)."""
    n = check_dimension(n)
    epsilon = check_epsilon(epsilon)
    t_max = settings.default_t_max(n) if t_max is None else int(t_max)
    check_history_budget(n, t_max)
    if reference is None:
        reference = stationary_pi_closed(n)
    curve = cesaro_tvd_curve(coherent_probabilities(n, t_max), reference)
    result = mixing_time_from_curve(curve, epsilon)
    logger.info("average mixing time n=%d eps=%g -> %s (horizon %d)", n, epsilon, result.time, t_max)
    return result


def instantaneous_tvd_curve(n, reference_kind="stationary", t_max=None) -> NDArray[np.float64]:
    """TVD of P(·,t) to the reference restricted to the parity reachable at t."""
    n = check_dimension(n)
    t_max = settings.default_t_max(n) if t_max is None else int(t_max)
    check_history_budget(n, t_max)
    reference = reference_distribution(n, reference_kind)
    by_parity = (parity_adjusted(reference, 0).probs, parity_adjusted(reference, 1).probs)
    return np.array(
        [np.abs(p - by_parity[t % 2]).sum() for t, p in enumerate(coherent_probabilities(n, t_max))]
    )


def instantaneous_mixing_time(n, epsilon, reference_kind="stationary", t_max=None) -> MixingResult:
    """I_ε: first t with ‖P_t − reference_t‖ <= ε, parity-adjusted."""
    epsilon = check_epsilon(epsilon)
    curve = instantaneous_tvd_curve(n, reference_kind, t_max)
    hits = np.flatnonzero(curve <= epsilon)
    time = int(hits[0]) if hits.size else None
    logger.info("instantaneous mixing time n=%d eps=%g ref=%s -> %s", n, epsilon, reference_kind, time)
    return MixingResult(epsilon, time, curve, len(curve) - 1)


def aharonov_bound(n, T):
    """(π/(TΔ))·(1 + ln(n·2^{n−1})) with Δ = 2/√n."""
    T = np.asarray(T, dtype=np.float64)
    if np.any(T < 1):
        raise ParameterRangeError("T must be >= 1.")
    log_term = 1.0 + np.log(n) + (n - 1) * np.log(2.0)
    bound = np.pi * np.sqrt(n) / (2.0 * T) * log_term
    return float(bound) if bound.ndim == 0 else bound


def spectral_gap(n) -> float:
    """min over 1 <= |k| <= n−1 of |e^{iω_k} − 1|, measured numerically."""
    return min(abs(np.exp(1j * omega(n, h)) - 1.0) for h in range(1, n))


# --- Scaling fits ---

def linear_fit(xs, ys):
    """Least squares y = slope·x + intercept; returns (slope, intercept, r²)."""
    fit = stats.linregress(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2)


def power_law_exponent(xs, ys):
    """Exponent a of y ∝ x^a from a log-log fit; returns (a, r²)."""
    slope, _, r_squared = linear_fit(np.log(xs), np.log(ys))
    return slope, r_squared
