"""Coined quantum walk on the n-dimensional hypercube.

The walker lives in coin ⊗ position space. Amplitudes are stored coin-major
as an array of shape (n, 2^n): ``amplitudes[j, x]`` is ψ_{j,x}. One step is
the coin pass (a mix of the n coin amplitudes at every vertex) followed by
the shift pass (a bit-flip permutation of each coin row).

Both passes accept extra leading axes, so an ensemble of trials with shape
(trials, n, 2^n) evolves in a single call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Callable, Iterator, Optional

import numpy as np
from numpy.typing import NDArray

from hyperwalk import settings
from hyperwalk.distribution import Distribution, check_dimension, vertex_count
from hyperwalk.errors import DimensionMismatchError, InvalidDimensionError, NormalizationError

if TYPE_CHECKING:
    from hyperwalk.decoherence import EdgeMask

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-12


# --- Coin ---

@dataclass(frozen=True)
class CoinMatrix:
    """An n×n unitary acting on the coin register at every vertex.

    `grover` marks C = 2/n·J − I, which is applied in closed form:
    C·v = (2/n)·Σv − v, O(n) per vertex instead of a dense product.
    """

    n: int
    entries: NDArray[np.complex128]
    grover: bool = False

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.shape != (self.n, self.n):
            raise DimensionMismatchError(
                f"Coin for n={self.n} must be {self.n}x{self.n}, got {entries.shape}."
            )
        gram = entries @ entries.conj().T
        if not np.allclose(gram, np.eye(self.n), rtol=0.0, atol=UNITARY_TOL):
            raise NormalizationError("Coin matrix is not unitary.")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def apply(self, amplitudes):
        """Mix the coin axis (second to last) of `amplitudes`."""
        if amplitudes.shape[-2] != self.n:
            raise DimensionMismatchError(
                f"Coin has dimension {self.n} but state has {amplitudes.shape[-2]} coin states."
            )
        if self.grover:
            total = amplitudes.sum(axis=-2, keepdims=True)
            return (2.0 / self.n) * total - amplitudes
        return np.einsum("ij,...jx->...ix", self.entries, amplitudes)


def grover_coin(n) -> CoinMatrix:
    """C_ij = 2/n − δ_ij, the coin that respects the hypercube's permutation symmetry."""
    n = check_dimension(n)
    entries = np.full((n, n), 2.0 / n) - np.eye(n)
    return CoinMatrix(n, entries, grover=True)


# --- Walker state ---

@dataclass(frozen=True)
class WalkerState:
    n: int
    amplitudes: NDArray[np.complex128]

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        expected = (self.n, vertex_count(self.n))
        if amplitudes.shape != expected:
            raise DimensionMismatchError(
                f"State for n={self.n} must have shape {expected}, got {amplitudes.shape}."
            )
        norm = self._norm_squared(amplitudes)
        if not abs(norm - 1.0) <= settings.NORM_TOL:
            raise NormalizationError(f"State norm² is {norm!r}, drifted beyond {settings.NORM_TOL}.")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @staticmethod
    def _norm_squared(amplitudes):
        return float(np.vdot(amplitudes, amplitudes).real)

    @property
    def norm_squared(self):
        return self._norm_squared(self.amplitudes)


def initial_state_symmetric(n) -> WalkerState:
    """Walker on vertex 0 in the uniform superposition of coin states."""
    n = check_dimension(n)
    amplitudes = np.zeros((n, vertex_count(n)), dtype=np.complex128)
    amplitudes[:, 0] = 1.0 / np.sqrt(n)
    return WalkerState(n, amplitudes)


def initial_state_uniform_full(n) -> WalkerState:
    """Uniform superposition over coin and position; an eigenstate of U with eigenvalue 1."""
    n = check_dimension(n)
    size = n * vertex_count(n)
    amplitudes = np.full((n, vertex_count(n)), 1.0 / np.sqrt(size), dtype=np.complex128)
    return WalkerState(n, amplitudes)


def initial_state_localized(n, vertex=0, coin=0) -> WalkerState:
    n = check_dimension(n)
    if not 0 <= coin < n or not 0 <= vertex < vertex_count(n):
        raise InvalidDimensionError(f"Basis state |{coin},{vertex}> does not exist for n={n}.")
    amplitudes = np.zeros((n, vertex_count(n)), dtype=np.complex128)
    amplitudes[coin, vertex] = 1.0
    return WalkerState(n, amplitudes)


def initial_state_pair(n, vertex=None) -> WalkerState:
    """Uniform coin on vertex 0 and on `vertex` (default 5, or 3 for n = 2), equal weights.

    Like the symmetric state it has no overlap with the edge-alternating
    modes that every broken-link step maps to minus themselves, so its
    broken-link ensemble still flattens out.
    """
    n = check_dimension(n)
    if vertex is None:
        vertex = min(5, vertex_count(n) - 1)
    if not 0 < vertex < vertex_count(n):
        raise InvalidDimensionError(f"Vertex {vertex} is not a second vertex of the {n}-cube.")
    amplitudes = np.zeros((n, vertex_count(n)), dtype=np.complex128)
    amplitudes[:, [0, vertex]] = 1.0 / np.sqrt(2 * n)
    return WalkerState(n, amplitudes)


# --- Shift ---

@lru_cache(maxsize=None)
def _flip_table(n):
    x = np.arange(vertex_count(n), dtype=np.int64)
    table = np.stack([x ^ (1 << j) for j in range(n)])
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _stay_table(n):
    table = np.broadcast_to(np.arange(vertex_count(n), dtype=np.int64), (n, vertex_count(n)))
    return table


def check_port_mask(broken_ports, n):
    """Both ports of an edge must agree: blocked[j, x] == blocked[j, x ⊕ e_j]."""
    ports = np.asarray(broken_ports, dtype=bool)
    if ports.ndim < 2 or ports.shape[-2:] != (n, vertex_count(n)):
        raise DimensionMismatchError(
            f"Port mask for n={n} must end in shape {(n, vertex_count(n))}, got {ports.shape}."
        )
    partner = np.take_along_axis(ports, np.broadcast_to(_flip_table(n), ports.shape), axis=-1)
    if not np.array_equal(ports, partner):
        raise DimensionMismatchError("Port mask breaks one end of an edge but not the other.")
    return ports


def apply_shift(amplitudes, broken_ports=None, check=True):
    """ψ'_{i,x} = φ_{i, x ⊕ e'_i(x)}.

    `broken_ports` is a boolean array of shape (..., n, 2^n); where it is True
    the link is open and the amplitude stays on its vertex. Pass check=False
    for masks already expanded from an EdgeMask.
    """
    n = amplitudes.shape[-2]
    source = _flip_table(n)
    if broken_ports is not None:
        if check:
            broken_ports = check_port_mask(broken_ports, n)
        source = np.where(broken_ports, _stay_table(n), source)
    if source.ndim < amplitudes.ndim:
        source = source.reshape((1,) * (amplitudes.ndim - source.ndim) + source.shape)
    return np.take_along_axis(amplitudes, source, axis=-1)


def probabilities(amplitudes) -> NDArray[np.float64]:
    """Σ_j |ψ_{j,x}|² over the coin axis, keeping any leading axes."""
    return (amplitudes.real ** 2 + amplitudes.imag ** 2).sum(axis=-2)


# --- Evolution ---

def step(state: WalkerState, coin: CoinMatrix, mask: Optional[EdgeMask] = None) -> WalkerState:
    """One step U = S'·(C ⊗ I): coin first, then the (possibly broken) shift."""
    if coin.n != state.n:
        raise DimensionMismatchError(f"Coin dimension {coin.n} does not match state dimension {state.n}.")
    broken = None
    if mask is not None:
        if mask.n != state.n:
            raise DimensionMismatchError(f"Mask dimension {mask.n} does not match state dimension {state.n}.")
        broken = mask.port_mask()
    mixed = coin.apply(state.amplitudes)
    return WalkerState(state.n, apply_shift(mixed, broken, check=False))


def position_distribution(state: WalkerState) -> Distribution:
    """P(x) = Σ_j |ψ_{j,x}|²."""
    return Distribution(state.n, probabilities(state.amplitudes))


def evolve(
    state: WalkerState,
    coin: CoinMatrix,
    t_max: int,
    masks: Optional[Callable[[int], Optional[EdgeMask]]] = None,
) -> Iterator[WalkerState]:
    """Yield the states at t = 0, 1, ..., t_max.

    `masks(t)` supplies the topology used for the step t → t+1; leave it out
    for the coherent walk.
    """
    yield state
    for t in range(t_max):
        state = step(state, coin, masks(t) if masks is not None else None)
        yield state
    logger.debug("evolved n=%d for %d steps, final norm² %.15f", state.n, t_max, state.norm_squared)


INITIAL_STATES = {
    "symmetric": initial_state_symmetric,
    "localized": initial_state_localized,
    "pair": initial_state_pair,
    "uniform_full": initial_state_uniform_full,
}


def initial_state(n, kind="symmetric") -> WalkerState:
    try:
        factory = INITIAL_STATES[kind]
    except KeyError:
        raise InvalidDimensionError(
            f"Unknown initial state '{kind}'. Valid options are: {', '.join(sorted(INITIAL_STATES))}."
        )
    return factory(n)
