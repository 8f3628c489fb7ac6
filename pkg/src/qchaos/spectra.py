"""Exact diagonalization and nearest-neighbour level-spacing statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (DegenerateSpectrumError, InsufficientSampleError,
                     InvalidParameterError, NoCrossingError, SolverError)
from .models import Hamiltonian

#: crossing point of exp(-s) and (pi s / 2) exp(-pi s^2 / 4)
S0 = 0.4729
ETA_C = 0.3


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Ascending eigenvalues; column ``m`` of ``eigenvectors`` is eigenstate ``m``
    expressed in the basis ``labels`` of the source Hamiltonian."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    labels: np.ndarray | None = None
    sector: str | None = None

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def diagonalize(H, *, verify: bool = False, tol: float = 1e-9) -> SpectralData:
    """Full spectrum and eigenbasis of a real symmetric matrix.

    Accepts a :class:`Hamiltonian` or any dense/sparse square array.  A
    diagonal matrix short-circuits to its sorted diagonal with an exact
    permutation matrix as eigenbasis.  With ``verify=True`` the residual
    ``|H v - E v| <= tol * max|E|`` and orthonormality are checked.
    """
    labels = sector = None
    if isinstance(H, Hamiltonian):
        labels, sector, M = H.labels, H.sector, H.matrix
    else:
        M = H
    dense = M.toarray() if hasattr(M, "toarray") else np.asarray(M, dtype=float)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1] or dense.shape[0] < 1:
        raise InvalidParameterError("need a non-empty square matrix")

    diag = np.diag(dense)
    if not np.any(dense - np.diag(diag)):
        order = np.argsort(diag, kind="stable")
        vecs = np.zeros_like(dense)
        vecs[order, np.arange(len(order))] = 1.0
        return SpectralData(diag[order].copy(), vecs, labels, sector)

    try:
        w, v = scipy.linalg.eigh(dense, driver="evd")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"eigh failed for dim {dense.shape[0]}: {exc}") from exc
    out = SpectralData(w, v, labels, sector)
    if verify:
        check_spectral(dense, out, tol)
    return out


def check_spectral(dense, spectral: SpectralData, tol: float = 1e-9) -> None:
    w, v = spectral.eigenvalues, spectral.eigenvectors
    scale = max(np.max(np.abs(w)), 1.0)
    resid = np.max(np.linalg.norm(dense @ v - v * w, axis=0))
    if resid > tol * scale:
        raise SolverError(f"eigen-residual {resid:.3e} exceeds {tol:.1e} * {scale:.3e}")
    ortho = np.max(np.abs(v.T @ v - np.eye(len(w))))
    if ortho > tol:
        raise SolverError(f"eigenvectors off orthonormal by {ortho:.3e}")


# ---------------------------------------------------------------------------
# unfolding and P(s)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpacingSample:
    spacings: np.ndarray
    window: tuple[int, int]
    count: int

    @classmethod
    def from_spacings(cls, spacings) -> "SpacingSample":
        s = np.asarray(spacings, dtype=float)
        return cls(s, (0, len(s) + 1), len(s))

    @classmethod
    def pooled(cls, samples) -> "SpacingSample":
        samples = list(samples)
        s = np.concatenate([x.spacings for x in samples]) if samples else np.zeros(0)
        return cls(s, (0, 0), len(s))


def window_indices(n_levels: int, window_fraction: float) -> tuple[int, int]:
    """Level index range ``[lo, hi)`` of the central ``window_fraction`` of a
    sorted spectrum, symmetric about the median."""
    if not 0 < window_fraction <= 1:
        raise InvalidParameterError("window_fraction must lie in (0, 1]")
    keep = max(int(round(window_fraction * n_levels)), 1)
    lo = (n_levels - keep) // 2
    return lo, lo + keep


def auto_halfwidth(n_window: int, cap: int = 10) -> int:
    """Smoothing halfwidth for a window of ``n_window`` levels.

    Small windows get a narrow average so the curvature of the level density
    does not leak into P(s); large windows use ``cap``.
    """
    return min(cap, max(1, int(n_window) // 8))


def unfold(eigenvalues, window_fraction: float = 0.5, smoothing_halfwidth: int = 10) -> SpacingSample:
    """Locally normalized nearest-neighbour spacings from the central window.

    Each raw spacing is divided by the mean of the ``2h+1`` raw spacings
    centred on it (the full spectrum is used for the average, so the window
    edges are not biased; the average is clipped at the spectrum ends).
    """
    E = np.sort(np.asarray(eigenvalues, dtype=float))
    h = int(smoothing_halfwidth)
    if h < 0:
        raise InvalidParameterError("smoothing_halfwidth must be >= 0")
    lo, hi = window_indices(len(E), window_fraction)
    if hi - lo < 2 * h + 2:
        raise InsufficientSampleError(f"{hi - lo} levels in window, need {2 * h + 2}")
    raw = np.diff(E)
    if not np.any(raw[lo:hi - 1] > 0):
        raise DegenerateSpectrumError("all levels in the window coincide")

    csum = np.concatenate([[0.0], np.cumsum(raw)])
    j = np.arange(lo, hi - 1)
    a = np.clip(j - h, 0, len(raw))
    b = np.clip(j + h + 1, 0, len(raw))
    local = (csum[b] - csum[a]) / (b - a)
    if np.any(local <= 0):
        raise DegenerateSpectrumError("zero local mean spacing inside the window")
    return SpacingSample(raw[j] / local, (lo, hi), len(j))


def wigner_cdf(s):
    return 1.0 - np.exp(-np.pi * np.asarray(s) ** 2 / 4)


def poisson_cdf(s):
    return 1.0 - np.exp(-np.asarray(s))


@dataclass(frozen=True)
class EtaResult:
    eta: float
    count: int
    s0: float = S0


def eta_from_fraction(fraction_below: float, s0: float = S0) -> float:
    """Ratio of the integrals of ``P - P_W`` and ``P_P - P_W`` over ``[0, s0]``."""
    return (fraction_below - wigner_cdf(s0)) / (poisson_cdf(s0) - wigner_cdf(s0))


def eta(sample, *, min_count: int = 100) -> EtaResult:
    """Poisson-to-Wigner crossover statistic: 1 for Poisson, 0 for Wigner.

    Uses the empirical CDF at ``s0``, i.e. the integral of the empirical
    distribution over ``[0, s0]`` with no binning.
    """
    s = sample.spacings if isinstance(sample, SpacingSample) else np.asarray(sample, dtype=float)
    if len(s) < min_count:
        raise InsufficientSampleError(f"eta needs >= {min_count} spacings, got {len(s)}")
    return EtaResult(float(eta_from_fraction(np.mean(s <= S0))), len(s))


@dataclass(frozen=True, eq=False)
class Histogram:
    centers: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    edges: np.ndarray


def spacing_histogram(sample, bins: int = 50, s_max: float | None = None) -> Histogram:
    """Normalized P(s) histogram on ``[0, s_max]`` (default: largest spacing)."""
    s = sample.spacings if isinstance(sample, SpacingSample) else np.asarray(sample, dtype=float)
    if bins < 2 or len(s) == 0:
        raise InvalidParameterError("need bins >= 2 and a non-empty sample")
    top = float(np.max(s)) if s_max is None else float(s_max)
    if top <= 0:
        top = 1.0
    s = s[s <= top]
    counts, edges = np.histogram(s, bins=bins, range=(0.0, top))
    density = counts / (len(s) * np.diff(edges))
    return Histogram(0.5 * (edges[1:] + edges[:-1]), density, counts, edges)


def wigner_pdf(s):
    s = np.asarray(s)
    return np.pi * s / 2 * np.exp(-np.pi * s**2 / 4)


def find_critical_coupling(couplings, etas, eta_c: float = ETA_C) -> float:
    """Coupling at the first downward crossing of ``eta_c``, linearly
    interpolated between the bracketing grid points."""
    x = np.asarray(couplings, dtype=float)
    y = np.asarray(etas, dtype=float)
    if len(x) < 2 or len(x) != len(y):
        raise InvalidParameterError("need at least two (coupling, eta) points")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    for i in range(len(x) - 1):
        if y[i] == eta_c:
            return float(x[i])
        if y[i] > eta_c >= y[i + 1]:
            if y[i + 1] == eta_c:
                return float(x[i + 1])
            return float(x[i] + (x[i + 1] - x[i]) * (y[i] - eta_c) / (y[i] - y[i + 1]))
    raise NoCrossingError(f"eta never drops through {eta_c} on [{x[0]}, {x[-1]}]")


def sample_poisson_spacings(rng, size):
    return rng.exponential(1.0, size)


def sample_wigner_spacings(rng, size):
    # inverse CDF of the Wigner surmise
    return np.sqrt(-4.0 / math.pi * np.log1p(-rng.random(size)))
