"""Data builders for each figure id, and run_figure which writes them out.

Column sets are fixed per figure; docs/plotting.md shows how to plot them.
Mixing times that are not reached within the horizon are left empty.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from math import comb
from pathlib import Path
from typing import Callable, Dict, List, Sequence

import numpy as np
from tqdm import tqdm

from hyperwalk.config import ExperimentConfig
from hyperwalk.decoherence import simulate_ensemble
from hyperwalk.distribution import Distribution, hamming_weights, vertex_count
from hyperwalk.metrics import (
    aharonov_bound,
    cesaro_tvd_curve,
    coherent_probabilities,
    instantaneous_tvd_curve,
    mixing_time_from_curve,
)
from hyperwalk.output import FigureTable, write_result
from hyperwalk.spectral import hamming_profile_closed, stationary_pi_closed

logger = logging.getLogger(__name__)

COLUMNS = {
    "pi_x": ["x", "hamming_weight", "pi", "uniform"],
    "hamming_profile": ["hamming_weight", "profile", "binomial"],
    "tvd_coherent": ["t", "tvd_stationary", "tvd_uniform", "aharonov_bound"],
    "tvd_instantaneous": ["t", "t_over_n", "tvd_stationary", "tvd_uniform"],
    "mixing_vs_n": ["n", "epsilon", "mixing_time", "t_max"],
    "instant_mixing_vs_n": ["n", "epsilon", "reference", "mixing_time", "t_max"],
    "tvd_decoherent": ["p", "t", "tvd_uniform", "tvd_uniform_stderr", "tvd_stationary"],
    "mixing_vs_p": ["p", "epsilon", "mixing_time", "t_max"],
    "mixing_vs_n_deco": ["n", "p", "epsilon", "mixing_time", "coherent_mixing_time", "t_max"],
}


# --- Sweep points (module level so worker processes can pickle them) ---

def _coherent_curves(n, t_max):
    """Cesàro TVD curves of the coherent walk against π and uniform."""
    pi = stationary_pi_closed(n)
    uniform = Distribution.uniform(n)
    running = np.zeros(vertex_count(n))
    to_pi = np.empty(t_max + 1)
    to_uniform = np.empty(t_max + 1)
    for t, probs in enumerate(coherent_probabilities(n, t_max)):
        running += (probs - running) / (t + 1)
        to_pi[t] = np.abs(running - pi.probs).sum()
        to_uniform[t] = np.abs(running - uniform.probs).sum()
    return to_pi, to_uniform


def _stationary_curve(n, t_max):
    return cesaro_tvd_curve(coherent_probabilities(n, t_max), stationary_pi_closed(n))


def _map_points(func: Callable, points: Sequence[tuple], jobs, progress, desc) -> List:
    """Evaluate func(*point) for each point, in order, on up to `jobs` processes."""
    bar = tqdm(total=len(points), desc=desc, disable=not progress, leave=False)
    results = []
    try:
        if jobs > 1 and len(points) > 1:
            with ProcessPoolExecutor(max_workers=min(jobs, len(points))) as pool:
                futures = [pool.submit(func, *point) for point in points]
                for future in futures:
                    results.append(future.result())
                    bar.update()
        else:
            for point in points:
                results.append(func(*point))
                bar.update()
    finally:
        bar.close()
    return results


# --- Builders ---

def _pi_x(config: ExperimentConfig, progress) -> FigureTable:
    table = FigureTable("pi_x", COLUMNS["pi_x"])
    pi = stationary_pi_closed(config.n)
    weights = hamming_weights(config.n)
    uniform = 1.0 / vertex_count(config.n)
    for x in range(vertex_count(config.n)):
        table.add(x=x, hamming_weight=int(weights[x]), pi=float(pi.probs[x]), uniform=uniform)
    return table


def _hamming_profile(config, progress) -> FigureTable:
    table = FigureTable("hamming_profile", COLUMNS["hamming_profile"])
    profile = hamming_profile_closed(config.n)
    scale = 2.0 ** config.n
    for h, value in enumerate(profile):
        table.add(hamming_weight=h, profile=float(value), binomial=comb(config.n, h) / scale)
    return table


def _tvd_coherent(config, progress) -> FigureTable:
    table = FigureTable("tvd_coherent", COLUMNS["tvd_coherent"])
    t_max = config.horizon()
    to_pi, to_uniform = _coherent_curves(config.n, t_max)
    # row t holds the average over steps 0..t, i.e. T = t + 1 terms
    bound = aharonov_bound(config.n, np.arange(1, t_max + 2))
    for t in range(t_max + 1):
        table.add(t=t, tvd_stationary=to_pi[t], tvd_uniform=to_uniform[t], aharonov_bound=bound[t])
    return table


def _tvd_instantaneous(config, progress) -> FigureTable:
    table = FigureTable("tvd_instantaneous", COLUMNS["tvd_instantaneous"])
    t_max = config.horizon()
    to_pi = instantaneous_tvd_curve(config.n, "stationary", t_max)
    to_uniform = instantaneous_tvd_curve(config.n, "uniform", t_max)
    for t in range(t_max + 1):
        table.add(t=t, t_over_n=t / config.n, tvd_stationary=to_pi[t], tvd_uniform=to_uniform[t])
    return table


def _mixing_vs_n(config, progress) -> FigureTable:
    table = FigureTable("mixing_vs_n", COLUMNS["mixing_vs_n"])
    dims = config.sweep_n_values()
    points = [(n, config.horizon(n)) for n in dims]
    curves = _map_points(_stationary_curve, points, config.jobs, progress, "mixing_vs_n")
    for (n, t_max), curve in zip(points, curves):
        for epsilon in config.epsilons:
            result = mixing_time_from_curve(curve, epsilon)
            table.add(n=n, epsilon=epsilon, mixing_time=result.time, t_max=t_max)
    return table


def _instant_mixing_vs_n(config, progress) -> FigureTable:
    table = FigureTable("instant_mixing_vs_n", COLUMNS["instant_mixing_vs_n"])
    kinds = config.reference_kinds()
    points = [(n, kind, config.horizon(n)) for n in config.sweep_n_values() for kind in kinds]
    curves = _map_points(instantaneous_tvd_curve, points, config.jobs, progress, "instant_mixing_vs_n")
    for (n, kind, t_max), curve in zip(points, curves):
        for epsilon in config.epsilons:
            hits = np.flatnonzero(curve <= epsilon)
            time_ = int(hits[0]) if hits.size else None
            table.add(n=n, epsilon=epsilon, reference=kind, mixing_time=time_, t_max=t_max)
    return table


def _tvd_decoherent(config, progress) -> FigureTable:
    table = FigureTable("tvd_decoherent", COLUMNS["tvd_decoherent"])
    t_max = config.horizon()
    pi = stationary_pi_closed(config.n)
    uniform = Distribution.uniform(config.n)
    for p in tqdm(config.sweep_p_values(), desc="tvd_decoherent", disable=not progress, leave=False):
        ensemble = simulate_ensemble(
            config.n, p, config.trials, t_max, seed=config.seed, initial=config.initial, jobs=config.jobs
        )
        curve, stderr = ensemble.tvd_curve(uniform)
        to_pi, _ = ensemble.tvd_curve(pi)
        for t in range(t_max + 1):
            table.add(p=p, t=t, tvd_uniform=curve[t], tvd_uniform_stderr=stderr[t], tvd_stationary=to_pi[t])
    return table


def _mixing_vs_p(config, progress) -> FigureTable:
    table = FigureTable("mixing_vs_p", COLUMNS["mixing_vs_p"])
    t_max = config.horizon()
    uniform = Distribution.uniform(config.n)
    for p in tqdm(config.sweep_p_values(), desc="mixing_vs_p", disable=not progress, leave=False):
        ensemble = simulate_ensemble(
            config.n, p, config.trials, t_max, seed=config.seed, initial=config.initial, jobs=config.jobs
        )
        curve, _ = ensemble.tvd_curve(uniform)
        for epsilon in config.epsilons:
            table.add(p=p, epsilon=epsilon, mixing_time=mixing_time_from_curve(curve, epsilon).time, t_max=t_max)
    return table


def _mixing_vs_n_deco(config, progress) -> FigureTable:
    table = FigureTable("mixing_vs_n_deco", COLUMNS["mixing_vs_n_deco"])
    rates = config.sweep_p_values()
    for n in tqdm(config.sweep_n_values(), desc="mixing_vs_n_deco", disable=not progress, leave=False):
        t_max = config.horizon(n)
        coherent = _stationary_curve(n, t_max)
        for p in rates:
            ensemble = simulate_ensemble(
                n, p, config.trials, t_max, seed=config.seed, initial=config.initial, jobs=config.jobs
            )
            curve, _ = ensemble.tvd_curve(Distribution.uniform(n))
            for epsilon in config.epsilons:
                table.add(
                    n=n,
                    p=p,
                    epsilon=epsilon,
                    mixing_time=mixing_time_from_curve(curve, epsilon).time,
                    coherent_mixing_time=mixing_time_from_curve(coherent, epsilon).time,
                    t_max=t_max,
                )
    return table


BUILDERS: Dict[str, Callable[[ExperimentConfig, bool], FigureTable]] = {
    "pi_x": _pi_x,
    "hamming_profile": _hamming_profile,
    "tvd_coherent": _tvd_coherent,
    "tvd_instantaneous": _tvd_instantaneous,
    "mixing_vs_n": _mixing_vs_n,
    "instant_mixing_vs_n": _instant_mixing_vs_n,
    "tvd_decoherent": _tvd_decoherent,
    "mixing_vs_p": _mixing_vs_p,
    "mixing_vs_n_deco": _mixing_vs_n_deco,
}


def build_table(figure_id, config: ExperimentConfig, progress=False) -> FigureTable:
    logger.info("building %s (mode=%s, n=%d)", figure_id, config.mode, config.n)
    return BUILDERS[figure_id](config, progress)


def run_figure(figure_id, config: ExperimentConfig, progress=False):
    """Compute a figure's data and write its result file(s); returns (paths, table)."""
    started = time.perf_counter()
    table = build_table(figure_id, config, progress)
    paths: List[Path] = write_result(table, config, time.perf_counter() - started)
    return paths, table
