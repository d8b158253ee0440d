"""Fourier-space eigensystem of the Grover walk and its stationary distribution.

The shift is diagonal in the Walsh–Hadamard basis |k>, so the walk splits
into n×n blocks U_k(i,j) = (-1)^{k_i} C_ij. Their spectrum only depends on
the Hamming weight |k|, and for the symmetric initial state only the pair
e^{±iω_k} is populated. That gives the limiting distribution π(x) in closed
form, which the simulations are checked against.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict

import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaln

from hyperwalk import settings
from hyperwalk.distribution import Distribution, check_dimension, hamming_weights, vertex_count
from hyperwalk.errors import (
    DegenerateWeightError,
    DimensionMismatchError,
    InvalidDimensionError,
    NotHammingSymmetricError,
)
from hyperwalk.walk import grover_coin, probabilities

logger = logging.getLogger(__name__)


def _bits(n, k):
    return np.array([(k >> j) & 1 for j in range(n)], dtype=np.int64)


def _weight(k):
    return bin(int(k)).count("1")


def _check_label(n, k):
    if not 0 <= k < vertex_count(n):
        raise InvalidDimensionError(f"Label k={k} is outside [0, 2^{n}).")


# --- Eigenvalues and eigenvectors of U_k ---

def omega(n, hk) -> float:
    """Phase ω with cos ω = 1 − 2|k|/n, in [0, π]."""
    if not 0 <= hk <= n:
        raise InvalidDimensionError(f"Hamming weight {hk} is outside [0, {n}].")
    return float(np.arccos(np.clip(1.0 - 2.0 * hk / n, -1.0, 1.0)))


def alpha(n, k, j) -> complex:
    """Component j of the e^{iω_k} eigenvector of U_k."""
    return complex(alpha_vector(n, k)[j])


def alpha_vector(n, k) -> NDArray[np.complex128]:
    """α(k) = (k_j/√|k| − i(1−k_j)/√(n−|k|))/√2 for every coin index j."""
    _check_label(n, k)
    hk = _weight(k)
    if hk == 0 or hk == n:
        raise DegenerateWeightError(
            f"|k|={hk}: the e^(±iω) pair only exists for 1 <= |k| <= n-1."
        )
    bits = _bits(n, k)
    return (bits / np.sqrt(hk) - 1j * (1 - bits) / np.sqrt(n - hk)) / np.sqrt(2.0)


def fourier_block(n, k) -> NDArray[np.complex128]:
    """U_k(i, j) = (−1)^{k_i} C_ij for the Grover coin."""
    _check_label(n, k)
    signs = 1 - 2 * _bits(n, k)
    return signs[:, None] * grover_coin(n).entries


def eigensystem(n, k):
    """All n eigenpairs of U_k as (eigenvalues, eigenvectors-as-columns).

    Degenerate vectors are built from the actual coordinates of k: with
    z_0 < z_1 < ... the coordinates where k_j = 0, the span of e_{z_0} − e_{z_i}
    has eigenvalue −1; likewise the coordinates where k_j = 1 give eigenvalue
    +1. Each span is orthonormalised with a QR pass. The remaining pair is
    α(k), α*(k) for 0 < |k| < n, or the uniform vector (eigenvalue +1 at
    |k| = 0, −1 at |k| = n). The columns form an orthonormal basis.
    """
    _check_label(n, k)
    bits = _bits(n, k)
    hk = int(bits.sum())
    values = []
    vectors = []

    for coords, value in ((np.flatnonzero(bits == 0), -1.0), (np.flatnonzero(bits == 1), 1.0)):
        if coords.size < 2:
            continue
        span = np.zeros((n, coords.size - 1), dtype=np.complex128)
        span[coords[0]] = 1.0
        span[coords[1:], np.arange(coords.size - 1)] = -1.0
        basis, _ = np.linalg.qr(span)
        values.extend([value] * basis.shape[1])
        vectors.extend(basis.T)

    if hk == 0 or hk == n:
        values.append(1.0 if hk == 0 else -1.0)
        vectors.append(np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128))
    else:
        phase = np.exp(1j * omega(n, hk))
        vec = alpha_vector(n, k)
        values.extend([phase, np.conj(phase)])
        vectors.extend([vec, vec.conj()])

    return np.array(values, dtype=np.complex128), np.stack(vectors, axis=1)


@dataclass(frozen=True)
class SpectralData:
    """Phases per Hamming weight and the α(k) eigenvector coefficients."""

    n: int
    omega: Dict[int, float] = field(default_factory=dict)

    def alpha(self, k, j) -> complex:
        return alpha(self.n, k, j)


def spectral_data(n) -> SpectralData:
    n = check_dimension(n, max_n=settings.CLOSED_FORM_MAX_N)
    return SpectralData(n, {h: omega(n, h) for h in range(n + 1)})


# --- Walsh–Hadamard transform ---

def walsh_hadamard(values) -> NDArray[np.complex128]:
    """Normalised Fourier transform on Z_2^n along the last axis (self-inverse)."""
    out = np.array(values, dtype=np.complex128)
    size = out.shape[-1]
    if size < 1 or size & (size - 1):
        raise DimensionMismatchError(f"Length {size} is not a power of two.")
    lead = out.shape[:-1]
    half = 1
    while half < size:
        blocks = out.reshape(lead + (-1, 2, half))
        low = blocks[..., 0, :]
        high = blocks[..., 1, :]
        out = np.stack((low + high, low - high), axis=-2).reshape(lead + (size,))
        half *= 2
    return out / np.sqrt(size)


# --- Time evolution from the spectrum ---

def analytic_distribution(n, t) -> Distribution:
    """P(x, t) of the symmetric walk, built from the e^{±iω_k} pair alone."""
    n = check_dimension(n)
    size = vertex_count(n)
    hk = hamming_weights(n)
    ks = np.arange(size)
    bits = (ks[None, :] >> np.arange(n)[:, None]) & 1
    inner = (hk > 0) & (hk < n)

    safe_h = np.sqrt(np.where(inner, hk, 1))
    safe_rest = np.sqrt(np.where(inner, n - hk, 1))
    alphas = (bits / safe_h - 1j * (1 - bits) / safe_rest) / np.sqrt(2.0)
    coeff = (np.sqrt(hk) + 1j * np.sqrt(n - hk)) / np.sqrt(n * 2.0 ** (n + 1))
    phases = np.exp(1j * np.arccos(np.clip(1.0 - 2.0 * hk / n, -1.0, 1.0)) * t)

    spectral = 2.0 * np.real(coeff * phases * alphas)
    uniform = np.full(n, 1.0 / np.sqrt(n * size))
    spectral[:, hk == 0] = uniform[:, None]
    spectral[:, hk == n] = ((-1.0) ** t) * uniform[:, None]

    amplitudes = walsh_hadamard(spectral)
    return Distribution(n, probabilities(amplitudes))


# --- Stationary distribution ---

def stationary_pi_spectral(n) -> Distribution:
    """π(x) from the double sum over equal-weight label pairs k, k'.

    Cost is O(4^n·n); meant as an independent oracle for small n.
    """
    n = check_dimension(n, max_n=settings.SPECTRAL_SUM_MAX_N)
    size = vertex_count(n)
    weights = hamming_weights(n)
    x = np.arange(size)
    total = np.full(size, 2.0)

    for h in range(1, n):
        ks = np.flatnonzero(weights == h)
        bits = (ks[:, None] >> np.arange(n)[None, :]) & 1
        overlap = (n * (bits @ bits.T) + h * (n - 2 * h)) / (2.0 * h * (n - h))
        signs = 1.0 - 2.0 * (weights[ks[:, None] & x[None, :]] % 2)
        total += (signs * (overlap @ signs)).sum(axis=0)

    return Distribution(n, total / 4.0 ** n)


def _binom(top, bottom):
    if top < 0 or bottom < 0:
        return 0
    return comb(top, bottom)


def _pi_exact(n, w) -> Fraction:
    """4^n·π(x) for |x| = w, from the five-fold binomial sum, in exact arithmetic."""
    total = Fraction(2)
    for i in range(1, n):
        acc = 0
        for m in range(min(w, i) + 1):
            outer = _binom(n - w, i - m) * comb(w, m)
            if not outer:
                continue
            rest = n - w - i + m
            # alternating sum over the l index, tabulated by d = i − j
            conv = [
                sum((-1) ** r * comb(w - m, r) * _binom(rest, d - r) for r in range(min(w - m, d) + 1))
                for d in range(i + 1)
            ]
            for j in range(i + 1):
                if not conv[i - j]:
                    continue
                inner = sum(
                    (-1) ** (m - p) * comb(m, p) * _binom(i - m, j - p) for p in range(min(m, j) + 1)
                )
                acc += (i * (n - 2 * i) + n * j) * outer * inner * conv[i - j]
        total += Fraction(acc, 2 * i * (n - i))
    return total


@lru_cache(maxsize=None)
def _pi_by_weight_exact(n):
    logger.debug("evaluating closed-form π for n=%d", n)
    half = [_pi_exact(n, w) / 4 ** n for w in range(n // 2 + 1)]
    # π(x) = π(2^n − 1 − x): weights w and n − w share a value
    return tuple(half[min(w, n - w)] for w in range(n + 1))


def stationary_pi_by_weight(n) -> NDArray[np.float64]:
    """π(x) for each Hamming weight |x| = 0..n; valid up to n = 64."""
    n = check_dimension(n, max_n=settings.CLOSED_FORM_MAX_N)
    return np.array([float(v) for v in _pi_by_weight_exact(n)])


def stationary_pi_closed(n) -> Distribution:
    """π(x) over all 2^n vertices, broadcast from the per-weight closed form."""
    n = check_dimension(n)
    return Distribution(n, stationary_pi_by_weight(n)[hamming_weights(n)])


def pi_at_origin(n) -> float:
    """π(0) = 1/4^n + Γ(n+1/2) / (2√π·n·Γ(n))."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < settings.MIN_N:
        raise InvalidDimensionError(f"Dimension must be an integer >= {settings.MIN_N} (got {n}).")
    return float(0.25 ** n + np.exp(gammaln(n + 0.5) - gammaln(n)) / (2.0 * np.sqrt(np.pi) * n))


def hamming_profile(pi: Distribution) -> NDArray[np.float64]:
    """p(h) = C(n,h)·π(x) with |x| = h; `pi` must depend on |x| only."""
    weights = hamming_weights(pi.n)
    profile = np.zeros(pi.n + 1)
    for h in range(pi.n + 1):
        values = pi.probs[weights == h]
        if values.max() - values.min() > settings.SYMMETRY_TOL:
            raise NotHammingSymmetricError(
                f"Distribution varies by {values.max() - values.min():.3e} within Hamming weight {h}."
            )
        profile[h] = values.sum()
    return profile


def hamming_profile_closed(n) -> NDArray[np.float64]:
    """Same as hamming_profile(stationary π) without enumerating vertices."""
    n = check_dimension(n, max_n=settings.CLOSED_FORM_MAX_N)
    return np.array([float(comb(n, h) * v) for h, v in enumerate(_pi_by_weight_exact(n))])
