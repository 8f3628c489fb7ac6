"""Kicked rotator: the Chirikov standard map and its quantum counterpart.

Classical map (one kick period, symmetrized)::

    n' = n + k sin(theta + T n / 2)
    theta' = theta + T (n + n') / 2

Quantum step (hbar = 1), a palindromic product of diagonal phases::

    psi' = exp(-i T n^2 / 4) exp(-i k cos theta) exp(-i T n^2 / 4) psi

Both are exactly time-reversible: the classical map under ``n -> -n`` and the
quantum step under ``psi -> conj(psi)``.  Only the quantum one stays
reversible in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NumericFailure, TruncationError

TWO_PI = 2 * math.pi


# ---------------------------------------------------------------------------
# classical
# ---------------------------------------------------------------------------

def standard_map_step(n, theta, k, T, sin=np.sin):
    """One unwrapped iteration; ``sin`` is injectable for exact arithmetic."""
    n_new = n + k * sin(theta + T * n / 2)
    return n_new, theta + T * (n + n_new) / 2


@dataclass(frozen=True, eq=False)
class ClassicalEnsemble:
    n: np.ndarray
    theta: np.ndarray
    k: float
    T: float

    @property
    def K(self) -> float:
        return self.k * self.T

    @property
    def energy(self) -> float:
        return float(np.mean(self.n**2) / 2)

    @classmethod
    def line(cls, size=1000, k=20.0, T=0.25, seed=0):
        """Orbits at ``n = 0`` with phases uniform on ``[0, 2 pi)``."""
        rng = np.random.default_rng(seed)
        return cls(np.zeros(size), rng.uniform(0.0, TWO_PI, size), k, T)


def classical_step(ens: ClassicalEnsemble) -> ClassicalEnsemble:
    n, theta = standard_map_step(ens.n, ens.theta, ens.k, ens.T)
    return replace(ens, n=n, theta=np.mod(theta, TWO_PI))


def classical_energy_trace(ens: ClassicalEnsemble, steps: int) -> np.ndarray:
    """``E(t) = <n^2/2>`` for ``t = 0..steps``."""
    out = [ens.energy]
    for _ in range(steps):
        ens = classical_step(ens)
        out.append(ens.energy)
    return np.array(out)


def angle_distance(a, b):
    d = np.mod(np.asarray(a) - np.asarray(b), TWO_PI)
    return np.minimum(d, TWO_PI - d)


@dataclass(frozen=True, eq=False)
class ClassicalReversal:
    energy: np.ndarray
    separation: np.ndarray
    divergence_step: int | None
    t_rev: int


def classical_reversal_experiment(K=5.0, k=20.0, t_rev=150, perturbation=1e-12,
                                  orbits=1000, seed=0) -> ClassicalReversal:
    """Run forward ``t_rev`` kicks, invert momenta with multiplicative noise
    ``1 + perturbation * u`` (``u`` uniform in ``[-1, 1]``), run ``t_rev``
    more kicks.

    ``separation[s]`` is the median angular distance after ``s`` backward
    kicks from the forward orbit at time ``t_rev - s``; ``divergence_step`` is
    the first ``s`` where it exceeds 1.
    """
    T = K / k
    ens = ClassicalEnsemble.line(orbits, k, T, seed)
    history = [ens.theta]
    energy = [ens.energy]
    for _ in range(t_rev):
        ens = classical_step(ens)
        history.append(ens.theta)
        energy.append(ens.energy)

    rng = np.random.default_rng([seed, 1])
    noise = 1.0 + perturbation * rng.uniform(-1.0, 1.0, orbits)
    ens = replace(ens, n=-ens.n * noise)
    separation = [0.0]
    for s in range(1, t_rev + 1):
        ens = classical_step(ens)
        energy.append(ens.energy)
        separation.append(float(np.median(angle_distance(ens.theta, history[t_rev - s]))))
    separation = np.array(separation)
    above = np.flatnonzero(separation > 1.0)
    step = int(above[0]) if len(above) else None
    return ClassicalReversal(np.array(energy), separation, step, t_rev)


# ---------------------------------------------------------------------------
# quantum
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantumRotorState:
    """Amplitudes on momenta ``-N/2 .. N/2 - 1`` with ``N = 2**p``."""

    amplitudes: np.ndarray
    k: float
    T: float

    @property
    def size(self) -> int:
        return len(self.amplitudes)

    @property
    def momenta(self) -> np.ndarray:
        return np.arange(self.size) - self.size // 2

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def energy(self) -> float:
        p = np.abs(self.amplitudes) ** 2
        return float(np.sum(p * self.momenta**2) / 2)

    def edge_probability(self, width: int = 10) -> float:
        p = np.abs(self.amplitudes) ** 2
        return float(p[:width].sum() + p[-width:].sum())

    def conjugate(self) -> "QuantumRotorState":
        return replace(self, amplitudes=np.conj(self.amplitudes))

    @classmethod
    def delta(cls, k=20.0, T=0.25, p=12):
        amps = np.zeros(2**p, dtype=complex)
        amps[2 ** (p - 1)] = 1.0
        return cls(amps, k, T)


def _phases(size, k, T):
    n = np.arange(size) - size // 2
    theta = TWO_PI * np.arange(size) / size
    return np.exp(-1j * T * n.astype(float) ** 2 / 4), np.exp(-1j * k * np.cos(theta))


def quantum_step(state: QuantumRotorState, *, tol: float = 1e-9) -> QuantumRotorState:
    """Half free rotation, kick in the angle representation, half rotation."""
    free, kick = _phases(state.size, state.k, state.T)
    psi = free * state.amplitudes
    psi = np.fft.ifft(np.fft.ifftshift(psi), norm="ortho")
    psi = np.fft.fftshift(np.fft.fft(kick * psi, norm="ortho"))
    out = replace(state, amplitudes=free * psi)
    if not abs(out.norm - state.norm) <= tol:
        raise NumericFailure(f"norm drifted by {abs(out.norm - state.norm):.3e}")
    return out


@dataclass(frozen=True, eq=False)
class QuantumReversal:
    energy: np.ndarray
    norm: np.ndarray
    fidelity: float
    max_norm_drift: float
    max_edge_probability: float
    t_rev: int


def quantum_reversal_experiment(k=20.0, T=0.25, t_rev=150, p=12, edge_tol=1e-8) -> QuantumReversal:
    """Forward ``t_rev`` kicks from ``n = 0``, conjugate, forward ``t_rev`` kicks.

    The fidelity is ``|<psi0|conj(psi_final)>|^2``.  Raises
    :class:`TruncationError` if more than ``edge_tol`` probability reaches the
    ten outermost momenta on either side.
    """
    state = QuantumRotorState.delta(k, T, p)
    psi0 = state.amplitudes.copy()
    energy, norm = [state.energy], [state.norm]
    edge = 0.0
    for step in range(2 * t_rev):
        if step == t_rev:
            state = state.conjugate()
        state = quantum_step(state)
        energy.append(state.energy)
        norm.append(state.norm)
        edge = max(edge, state.edge_probability())
        if edge > edge_tol:
            raise TruncationError(f"edge probability {edge:.2e} at step {step + 1}; increase p")
    fidelity = abs(np.vdot(psi0, np.conj(state.amplitudes))) ** 2
    norm = np.array(norm)
    return QuantumReversal(np.array(energy), norm, float(fidelity),
                           float(np.max(np.abs(np.diff(norm)))) if len(norm) > 1 else 0.0,
                           edge, t_rev)


def quantum_energy_trace(state: QuantumRotorState, steps: int) -> np.ndarray:
    out = [state.energy]
    for _ in range(steps):
        state = quantum_step(state)
        out.append(state.energy)
    return np.array(out)
