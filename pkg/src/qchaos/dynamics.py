"""Exact propagation in the eigenbasis (hbar = 1).

Starting from a basis state ``i0`` the projection probabilities
``F[i](t) = |<psi_i|chi(t)>|^2`` give the survival probability ``F[i0](t)``
and the entropy ``S(t) = -sum_i F[i] log2 F[i]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NoDecayError
from .spectra import SpectralData


@dataclass(frozen=True, eq=False)
class EvolutionRecord:
    times: np.ndarray
    survival: np.ndarray
    entropy: np.ndarray
    initial: tuple[int, ...]

    @property
    def n_initial_states(self) -> int:
        return len(self.initial)


def _check_times(times):
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or len(t) == 0 or t[0] < 0 or np.any(np.diff(t) < 0):
        raise InvalidParameterError("times must be a non-empty ascending grid starting at t >= 0")
    return t


def evolve(spectral: SpectralData, psi0, times, *, tol: float = 1e-9) -> np.ndarray:
    """States ``psi(t)`` as rows of a ``(len(times), dim)`` complex array."""
    psi0 = np.asarray(psi0)
    if abs(np.vdot(psi0, psi0).real - 1.0) > tol:
        raise InvalidParameterError("initial state is not normalized")
    t = _check_times(times)
    V = spectral.eigenvectors
    coeff = V.T @ psi0
    phases = np.exp(-1j * np.outer(t, spectral.eigenvalues))
    return (phases * coeff) @ V.T


def entropy_rows(F):
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(F > 0, F * np.log2(np.where(F > 0, F, 1.0)), 0.0)
    return np.maximum(-terms.sum(axis=1), 0.0)


def projection_probabilities(spectral: SpectralData, i0: int, t: np.ndarray) -> np.ndarray:
    V = spectral.eigenvectors
    amp = (np.exp(-1j * np.outer(t, spectral.eigenvalues)) * V[i0]) @ V.T
    F = amp.real**2 + amp.imag**2
    # at t = 0 the state is the basis vector itself; avoid round-off there
    F[t == 0] = 0.0
    F[t == 0, i0] = 1.0
    return F


def survival_and_entropy(spectral: SpectralData, i0: int, times) -> EvolutionRecord:
    """Survival probability and entropy of the basis state ``i0``."""
    if not 0 <= i0 < spectral.dim:
        raise IndexError(f"basis index {i0} outside [0, {spectral.dim})")
    t = _check_times(times)
    F = projection_probabilities(spectral, i0, t)
    return EvolutionRecord(t, F[:, i0], entropy_rows(F), (int(i0),))


def average_evolution(spectral: SpectralData, initial, times) -> EvolutionRecord:
    """Survival and entropy averaged over several initial basis states."""
    t = _check_times(times)
    initial = [int(i) for i in initial]
    if not initial:
        raise InvalidParameterError("need at least one initial state")
    surv = np.zeros((len(initial), len(t)))
    ent = np.zeros((len(initial), len(t)))
    for r, i0 in enumerate(initial):
        F = projection_probabilities(spectral, i0, t)
        surv[r], ent[r] = F[:, i0], entropy_rows(F)
    # math.fsum per time point keeps the mean independent of accumulation order
    mean = lambda a: np.array([math.fsum(col) for col in a.T]) / len(initial)
    return EvolutionRecord(t, mean(surv), mean(ent), tuple(initial))


def mean_survival(spectral: SpectralData, initial, times) -> np.ndarray:
    """Survival probability averaged over initial basis states.

    Uses ``F[i0](t) = |sum_m W[i0, m] exp(-i E_m t)|**2`` directly, which is
    much cheaper than the full projection when the entropy is not needed.
    """
    t = _check_times(times)
    initial = np.asarray(initial, dtype=int)
    if len(initial) == 0:
        raise InvalidParameterError("need at least one initial state")
    W = spectral.eigenvectors[initial, :] ** 2
    amp = W @ np.exp(-1j * np.outer(spectral.eigenvalues, t))
    F = amp.real**2 + amp.imag**2
    return np.array([math.fsum(col) for col in F.T]) / len(initial)


def log_time_grid(gamma: float, per_decade: int = 64, decades=(-2, 2), include_zero=True) -> np.ndarray:
    """Logarithmic grid over ``[10**lo / gamma, 10**hi / gamma]``."""
    lo, hi = decades
    t = np.logspace(lo, hi, per_decade * (hi - lo) + 1) / gamma
    return np.concatenate([[0.0], t]) if include_zero else t


def extract_tau_chi(record: EvolutionRecord, threshold: float = 1 / math.e) -> float:
    """First time the survival probability drops below ``threshold``."""
    F, t = record.survival, record.times
    below = np.flatnonzero(F < threshold)
    if len(below) == 0:
        raise NoDecayError(f"survival stays above {threshold:.3f} up to t={t[-1]:.3g}")
    j = below[0]
    if j == 0:
        return float(t[0])
    return float(t[j - 1] + (t[j] - t[j - 1]) * (F[j - 1] - threshold) / (F[j - 1] - F[j]))
