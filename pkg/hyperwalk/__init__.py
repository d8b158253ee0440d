"""Coined quantum walks on the n-dimensional hypercube."""

__version__ = "0.1.0"

from hyperwalk.distribution import Distribution
from hyperwalk.errors import HyperwalkError
from hyperwalk.walk import (
    CoinMatrix,
    WalkerState,
    evolve,
    grover_coin,
    initial_state_symmetric,
    initial_state_uniform_full,
    position_distribution,
    step,
)
from hyperwalk.spectral import (
    analytic_distribution,
    hamming_profile,
    stationary_pi_closed,
    stationary_pi_spectral,
)
from hyperwalk.metrics import (
    MixingResult,
    average_mixing_time,
    instantaneous_mixing_time,
    time_averaged,
    tvd,
)
from hyperwalk.decoherence import (
    EdgeMask,
    EnsembleAccumulator,
    decoherent_mixing_time,
    run_decoherent,
    sample_mask,
)
from hyperwalk.config import ExperimentConfig, validate_config
from hyperwalk.figures import run_figure
