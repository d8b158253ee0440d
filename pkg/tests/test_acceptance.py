"""Long reproduction runs: scaling laws and the decoherence optimum.

Run with ``pytest -m slow``; each test takes from seconds to several minutes.
"""

import numpy as np
import pytest

from hyperwalk.decoherence import decoherent_mixing_time, sample_mask, simulate_ensemble
from hyperwalk.distribution import Distribution
from hyperwalk.metrics import (
    aharonov_bound,
    average_mixing_time,
    cesaro_tvd_curve,
    coherent_probabilities,
    instantaneous_mixing_time,
    linear_fit,
    power_law_exponent,
)
from hyperwalk.spectral import stationary_pi_closed
from hyperwalk.walk import evolve, grover_coin, initial_state_symmetric

pytestmark = pytest.mark.slow

SEED = 12345


@pytest.mark.parametrize("n", range(3, 11))
def test_gap_bound_holds_up_to_ten_thousand_steps(n):
    T_max = 10_000
    curve = cesaro_tvd_curve(coherent_probabilities(n, T_max - 1), stationary_pi_closed(n))
    assert np.all(curve <= aharonov_bound(n, np.arange(1, T_max + 1)))


def test_mixing_time_grows_linearly_in_n():
    dims = list(range(4, 11))
    times = [average_mixing_time(n, 0.2).time for n in dims]
    assert None not in times
    slope, _, r_squared = linear_fit(dims, times)
    assert slope > 0
    assert r_squared > 0.95


def test_mixing_time_grows_linearly_in_one_over_epsilon():
    epsilons = [0.4, 0.3, 0.2, 0.15, 0.1]
    times = [average_mixing_time(8, eps, t_max=4000).time for eps in epsilons]
    assert None not in times
    _, _, r_squared = linear_fit([1 / eps for eps in epsilons], times)
    assert r_squared > 0.95


def test_instantaneous_uniform_mixing_slope():
    dims = list(range(4, 13))
    times = [instantaneous_mixing_time(n, 0.3, reference_kind="uniform").time for n in dims]
    assert None not in times
    slope, _, _ = linear_fit(dims, times)
    assert slope == pytest.approx(np.pi / 4, rel=0.15)


def test_unitarity_under_ten_thousand_random_masks():
    n = 6
    rng = np.random.default_rng(SEED)
    for state in evolve(initial_state_symmetric(n), grover_coin(n), 10_000, masks=lambda t: sample_mask(n, 0.2, rng)):
        pass
    assert abs(state.norm_squared - 1.0) < 1e-10


@pytest.mark.parametrize("p", [0.02, 0.05])
def test_uniformization_time_is_of_order_one_over_p(p):
    t_max = int(6 / p)
    ensemble = simulate_ensemble(8, p, trials=200, t_max=t_max, seed=SEED)
    curve, _ = ensemble.tvd_curve(Distribution.uniform(8))
    crossing = int(np.flatnonzero(curve < 0.5)[0])
    assert 1 / (3 * p) <= crossing <= 3 / p
    assert curve[-1] < curve[crossing]


def test_uniformization_time_has_a_floor_at_high_break_rates():
    crossings = []
    for p in (0.1, 0.2, 0.3):
        curve, _ = simulate_ensemble(8, p, trials=200, t_max=200, seed=SEED).tvd_curve(Distribution.uniform(8))
        crossings.append(int(np.flatnonzero(curve < 0.5)[0]))
    assert all(25 <= crossing <= 50 for crossing in crossings)
    assert crossings[2] >= crossings[0]


@pytest.mark.parametrize("initial", ["symmetric", "pair"])
def test_decoherent_limit_is_uniform_for_either_start(initial):
    ensemble = simulate_ensemble(8, 0.05, trials=200, t_max=2000, seed=SEED, initial=initial)
    curve, _ = ensemble.tvd_curve(Distribution.uniform(8))
    assert curve[-1] < 0.1
    assert curve[-1] < curve[500]


def test_localized_start_keeps_a_frozen_component():
    ensemble = simulate_ensemble(8, 0.05, trials=200, t_max=2000, seed=SEED, initial="localized")
    curve, _ = ensemble.tvd_curve(Distribution.uniform(8))
    assert curve[-1] > 0.3


def test_mixing_time_is_smallest_near_the_critical_rate():
    grid = [0.02, 0.05, 0.1, 0.2, 0.3, 0.4]
    times = [decoherent_mixing_time(8, p, 0.4, trials=200, seed=SEED, jobs=4).time for p in grid]
    assert None not in times
    best = grid[int(np.argmin(times))]
    assert best in (0.1, 0.2)
    assert times[2] < times[0]
    assert times[2] < times[-1]
    assert abs(times[2] - times[3]) <= 0.1 * times[2]


def test_decoherent_mixing_is_slower_and_superquadratic():
    dims = list(range(4, 10))
    decoherent = []
    for n in dims:
        deco = decoherent_mixing_time(n, 0.1, 0.2, trials=200, seed=SEED, jobs=4).time
        coherent = average_mixing_time(n, 0.2).time
        assert deco is not None and coherent is not None
        assert deco > coherent
        decoherent.append(deco)
    exponent, _ = power_law_exponent(dims, decoherent)
    assert 2.0 <= exponent <= 2.7
