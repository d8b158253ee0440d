import numpy as np
import pytest

from hyperwalk.distribution import Distribution, parity_class
from hyperwalk.errors import DimensionMismatchError, ParameterRangeError, ResourceLimitError
from hyperwalk.metrics import (
    aharonov_bound,
    average_mixing_time,
    cesaro_tvd_curve,
    check_history_budget,
    coherent_history,
    coherent_probabilities,
    instantaneous_mixing_time,
    instantaneous_tvd_curve,
    linear_fit,
    mixing_time_from_curve,
    parity_adjusted,
    power_law_exponent,
    reference_distribution,
    running_averages,
    spectral_gap,
    time_averaged,
    tvd,
)
from hyperwalk.spectral import stationary_pi_closed


# --- Distances and averages ---

def test_tvd_bounds():
    assert tvd(Distribution.uniform(3), Distribution.uniform(3)) == 0.0
    assert tvd(Distribution.point_mass(3, 0), Distribution.point_mass(3, 7)) == pytest.approx(2.0)
    with pytest.raises(DimensionMismatchError):
        tvd(Distribution.uniform(3), Distribution.uniform(4))


def test_running_averages_match_cumulative_means(rng):
    rows = rng.random((20, 8))
    rows /= rows.sum(axis=1, keepdims=True)
    averages = [avg.copy() for avg in running_averages(rows)]
    expected = np.cumsum(rows, axis=0) / np.arange(1, 21)[:, None]
    np.testing.assert_allclose(averages, expected, atol=1e-14)


def test_time_averaged_uses_the_first_T_steps():
    history = coherent_history(3, 10)
    averaged = time_averaged(history, 2)
    np.testing.assert_allclose(averaged.probs, (history[0].probs + history[1].probs) / 2)
    with pytest.raises(ParameterRangeError):
        time_averaged(history, 0)
    with pytest.raises(ParameterRangeError):
        time_averaged(history, 12)


def test_cesaro_curve_agrees_with_explicit_averages():
    n = 4
    history = coherent_history(n, 30)
    pi = stationary_pi_closed(n)
    curve = cesaro_tvd_curve(coherent_probabilities(n, 30), pi)
    for T in (1, 7, 31):
        assert curve[T - 1] == pytest.approx(tvd(time_averaged(history, T), pi), abs=1e-12)


# --- Mixing-time scan ---

def test_mixing_time_is_one_past_the_last_exceedance():
    curve = [1.0, 0.5, 0.1, 0.3, 0.05, 0.01]
    result = mixing_time_from_curve(curve, 0.2)
    assert result.time == 4
    assert result.found
    assert result.t_max == 5


def test_mixing_time_zero_when_never_exceeded():
    assert mixing_time_from_curve([0.1, 0.05], 0.2).time == 0


def test_mixing_time_not_found_when_the_horizon_still_exceeds():
    result = mixing_time_from_curve([0.1, 0.3], 0.2)
    assert result.time is None
    assert not result.found


@pytest.mark.parametrize("epsilon", [0.0, -0.1, 2.5])
def test_epsilon_range(epsilon):
    with pytest.raises(ParameterRangeError):
        mixing_time_from_curve([0.1], epsilon)


def test_history_budget(monkeypatch):
    with pytest.raises(ParameterRangeError):
        check_history_budget(4, 0)
    monkeypatch.setattr("hyperwalk.settings.HISTORY_BUDGET", 1000)
    with pytest.raises(ResourceLimitError):
        check_history_budget(8, 100)


def test_average_mixing_time_holds_from_M_on():
    result = average_mixing_time(4, 0.2)
    assert result.found
    assert np.all(result.tvd_curve[result.time:] <= 0.2)
    assert result.tvd_curve[result.time - 1] > 0.2


def test_smaller_threshold_takes_longer():
    assert average_mixing_time(5, 0.1).time > average_mixing_time(5, 0.3).time


def test_average_mixing_time_against_uniform_is_not_reached():
    # π stays far from uniform, so the Cesàro average never gets within 0.1 of it
    result = average_mixing_time(8, 0.1, reference=Distribution.uniform(8), t_max=400)
    assert result.time is None


def test_coherent_average_converges_to_pi_for_eight_dimensions():
    curve = cesaro_tvd_curve(coherent_probabilities(8, 10_000), stationary_pi_closed(8))
    assert curve[-1] < 0.02


# --- Bound and gap ---

@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_cesaro_distance_stays_under_the_gap_bound(n):
    T_max = 2000
    curve = cesaro_tvd_curve(coherent_probabilities(n, T_max - 1), stationary_pi_closed(n))
    bound = aharonov_bound(n, np.arange(1, T_max + 1))
    assert np.all(curve <= bound)


def test_bound_accepts_scalars_and_arrays():
    assert isinstance(aharonov_bound(4, 10), float)
    assert aharonov_bound(4, [10, 20])[1] == pytest.approx(aharonov_bound(4, 10) / 2)
    with pytest.raises(ParameterRangeError):
        aharonov_bound(4, 0)


@pytest.mark.parametrize("n", [2, 5, 9, 16])
def test_spectral_gap_is_two_over_root_n(n):
    assert spectral_gap(n) == pytest.approx(2 / np.sqrt(n), abs=1e-12)


# --- Instantaneous mixing ---

def test_parity_adjusted_reference():
    adjusted = parity_adjusted(Distribution.uniform(4), 1)
    assert adjusted.mass_on(parity_class(4, 1)) == pytest.approx(1.0)
    assert adjusted.probs[0] == 0.0
    assert adjusted.probs[1] == pytest.approx(1 / 8)


def test_parity_adjusted_needs_mass_on_the_class():
    with pytest.raises(ParameterRangeError):
        parity_adjusted(Distribution.point_mass(3, 0), 1)


def test_unknown_reference_kind():
    with pytest.raises(ParameterRangeError):
        reference_distribution(4, "binomial")


def test_instantaneous_curve_starts_at_the_point_mass_distance():
    curve = instantaneous_tvd_curve(4, "uniform", t_max=10)
    # the even class has 8 vertices; a point mass is 2 − 2/8 away from uniform on it
    assert curve[0] == pytest.approx(2 - 2 / 8)
    assert len(curve) == 11


def test_instantaneous_uniform_mixing_is_found():
    result = instantaneous_mixing_time(6, 0.3, reference_kind="uniform")
    assert result.found
    assert result.tvd_curve[result.time] <= 0.3
    assert np.all(result.tvd_curve[: result.time] > 0.3)


def test_no_instantaneous_mixing_to_pi_over_fourteen_n_steps():
    result = instantaneous_mixing_time(8, 0.2, reference_kind="stationary", t_max=14 * 8)
    assert result.time is None
    assert result.tvd_curve[6:].min() > 0.4


def test_instantaneous_distance_to_pi_dips_late():
    # the per-step distance first drops below 0.2 somewhere past t = 14n
    result = instantaneous_mixing_time(8, 0.2, reference_kind="stationary")
    assert result.t_max == 1600
    assert 112 < result.time < 140
    assert result.tvd_curve.min() < 0.05


# --- Fits ---

def test_linear_fit_recovers_a_line():
    slope, intercept, r_squared = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
    assert slope == pytest.approx(2.0)
    assert intercept == pytest.approx(1.0)
    assert r_squared == pytest.approx(1.0)


def test_power_law_exponent():
    xs = np.array([2.0, 4.0, 8.0, 16.0])
    exponent, r_squared = power_law_exponent(xs, 3.0 * xs ** (7 / 3))
    assert exponent == pytest.approx(7 / 3)
    assert r_squared == pytest.approx(1.0)


def test_tvd_is_a_metric(rng):
    a, b, c = (Distribution(3, row / row.sum()) for row in rng.random((3, 8)))
    assert tvd(a, b) == pytest.approx(tvd(b, a))
    assert tvd(a, c) <= tvd(a, b) + tvd(b, c) + 1e-15
    assert tvd(a, a) == 0.0


def test_largest_threshold_is_met_immediately():
    assert average_mixing_time(4, 2.0, t_max=50).time == 0
    assert instantaneous_mixing_time(4, 2.0, reference_kind="uniform", t_max=50).time == 0
