"""Eigenstate complexity in the unperturbed basis.

``W[i, m] = |<psi_i|phi_m>|^2`` is the weight of basis state ``i`` in eigenstate
``m``.  From each column we get the inverse participation ratio
``xi = 1 / sum_i W^2`` and the Shannon entropy in bits
``S_q = -sum_i W log2 W``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from .errors import DataIntegrityError, FitError, NoCrossingError, QChaosError
from .models import (SGQCParams, build_sgqc, central_band, parity_sectors,
                     popcount, register_energies)
from .spectra import SpectralData, diagonalize, window_indices


def overlaps(spectral: SpectralData, m: int) -> np.ndarray:
    """Weights of every basis state in eigenstate ``m``."""
    if not 0 <= m < spectral.dim:
        raise IndexError(f"eigenstate {m} outside [0, {spectral.dim})")
    return spectral.eigenvectors[:, m] ** 2


def _check_row(w, tol):
    w = np.asarray(w, dtype=float)
    if np.any(w < -tol) or abs(w.sum() - 1.0) > tol:
        raise DataIntegrityError(f"probability row sums to {w.sum():.12g}")
    return np.clip(w, 0.0, None)


def ipr(w, tol: float = 1e-6) -> float:
    w = _check_row(w, tol)
    return float(1.0 / np.sum(w * w))


def entropy_sq(w, tol: float = 1e-6) -> float:
    w = _check_row(w, tol)
    nz = w[w > 0]
    return float(max(-np.sum(nz * np.log2(nz)), 0.0))


def ipr_columns(vectors: np.ndarray) -> np.ndarray:
    w = vectors**2
    return 1.0 / np.sum(w * w, axis=0)


def entropy_columns(vectors: np.ndarray) -> np.ndarray:
    w = vectors**2
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, w * np.log2(np.where(w > 0, w, 1.0)), 0.0)
    return np.maximum(-terms.sum(axis=0), 0.0)


@dataclass(frozen=True, eq=False)
class StateAnalysis:
    energies: np.ndarray
    ipr: np.ndarray
    entropy: np.ndarray

    def select(self, mask) -> "StateAnalysis":
        return StateAnalysis(self.energies[mask], self.ipr[mask], self.entropy[mask])


def analyze_states(spectral: SpectralData) -> StateAnalysis:
    v = spectral.eigenvectors
    return StateAnalysis(spectral.eigenvalues.copy(), ipr_columns(v), entropy_columns(v))


# ---------------------------------------------------------------------------
# central-band selections for the qubit model
# ---------------------------------------------------------------------------

def central_band_window(gammas, fraction: float = 0.5) -> tuple[float, float]:
    """Central ``fraction`` of the unperturbed energy span of the central band."""
    gammas = np.asarray(gammas, dtype=float)
    n = len(gammas)
    k = central_band(n)
    e0 = register_energies(gammas)[popcount(np.arange(2**n)) == k]
    lo, hi = float(e0.min()), float(e0.max())
    mid, half = 0.5 * (lo + hi), 0.5 * fraction * (hi - lo)
    return mid - half, mid + half


def central_band_mask(energies, gammas, fraction: float = 0.5) -> np.ndarray:
    lo, hi = central_band_window(gammas, fraction)
    energies = np.asarray(energies)
    return (energies >= lo) & (energies <= hi)


# ---------------------------------------------------------------------------
# melting map and entropy border
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MeltingMap:
    J: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray
    failures: list = field(default_factory=list)

    def column(self, J):
        sel = self.J == J
        return self.energy[sel], self.entropy[sel]


def sgqc_spectrum(params: SGQCParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvalues, entropies and IPRs of every eigenstate, both parity sectors.

    Each sector is diagonalized on its own; the eigenvectors live on disjoint
    register states, so these are exactly the full-space quantities.
    """
    H = build_sgqc(params)
    E, S, X = [], [], []
    for block in parity_sectors(H):
        spec = diagonalize(block)
        E.append(spec.eigenvalues)
        S.append(entropy_columns(spec.eigenvectors))
        X.append(ipr_columns(spec.eigenvectors))
    E, S, X = map(np.concatenate, (E, S, X))
    order = np.argsort(E, kind="stable")
    return E[order], S[order], X[order]


def melting_map(params: SGQCParams, couplings) -> MeltingMap:
    """Entropy of every eigenstate of one disorder realization over a J grid.

    The seed is held fixed, so the splittings are identical on every row and
    the coupling pattern is rescaled with ``J``.
    """
    Js, Es, Ss, failures = [], [], [], []
    for J in couplings:
        try:
            E, S, _ = sgqc_spectrum(params.with_coupling(float(J)))
        except QChaosError as exc:
            failures.append((float(J), str(exc)))
            continue
        Js.append(np.full(len(E), float(J)))
        Es.append(E)
        Ss.append(S)
    if not Js:
        return MeltingMap(np.zeros(0), np.zeros(0), np.zeros(0), failures)
    return MeltingMap(np.concatenate(Js), np.concatenate(Es), np.concatenate(Ss), failures)


def critical_coupling_entropy(couplings, mean_entropy, target: float = 1.0) -> float:
    """Coupling where the mean entropy first rises through ``target`` bits."""
    x = np.asarray(couplings, dtype=float)
    y = np.asarray(mean_entropy, dtype=float)
    if len(x) < 2 or len(x) != len(y):
        raise ValueError("need at least two (coupling, entropy) points")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    for i in range(len(x) - 1):
        if y[i] == target:
            return float(x[i])
        if y[i] < target <= y[i + 1]:
            if y[i + 1] == target:
                return float(x[i + 1])
            return float(x[i] + (x[i + 1] - x[i]) * (target - y[i]) / (y[i + 1] - y[i]))
    raise NoCrossingError(f"entropy never rises through {target} on [{x[0]}, {x[-1]}]")


# ---------------------------------------------------------------------------
# local density of states
# ---------------------------------------------------------------------------

def lorentzian(E, amplitude, center, width):
    return amplitude / ((E - center) ** 2 + width**2 / 4)


@dataclass(frozen=True, eq=False)
class LdosFit:
    centers: np.ndarray
    density: np.ndarray
    fit_density: np.ndarray
    width: float
    center: float
    residual: float


def _weighted_quantiles(x, w, qs):
    order = np.argsort(x)
    x, w = x[order], w[order]
    cw = np.cumsum(w)
    cw /= cw[-1]
    return np.interp(qs, cw, x)


def _binned(offsets, weights, center, halfwidth, bins):
    edges = np.linspace(center - halfwidth, center + halfwidth, bins + 1)
    hist, _ = np.histogram(offsets, bins=edges, weights=weights)
    total = hist.sum()
    if total <= 0:
        raise FitError("no weight inside the fit range")
    density = hist / (total * np.diff(edges))
    return 0.5 * (edges[1:] + edges[:-1]), density


def fit_lorentzian(offsets, weights=None, bins: int = 101, span: float = 5.0,
                   refinements: int = 1) -> LdosFit:
    """Breit-Wigner fit of a weighted sample of energy offsets.

    The width is seeded by the weighted interquartile range (equal to the
    FWHM for an exact Lorentzian), the data are binned over ``+-span`` widths
    and refit after each refinement on the new width.
    """
    x = np.asarray(offsets, dtype=float)
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    q1, med, q3 = _weighted_quantiles(x, w, [0.25, 0.5, 0.75])
    width = q3 - q1
    scale = max(np.max(np.abs(x)), 1.0)
    if not width > 1e-9 * scale:
        raise FitError("delta-like distribution: no measurable width")
    center = med
    for _ in range(refinements + 1):
        centers, density = _binned(x, w, center, span * width, bins)
        p0 = (density.max() * width**2 / 4, center, width)
        try:
            popt, _ = curve_fit(lorentzian, centers, density, p0=p0, maxfev=10000)
        except (RuntimeError, ValueError) as exc:
            raise FitError(f"Lorentzian fit failed: {exc}", data=(centers, density)) from exc
        new_width = abs(popt[2])
        if not np.isfinite(new_width) or new_width <= 0 or new_width > 100 * width:
            raise FitError("Lorentzian fit diverged", data=(centers, density))
        width, center = new_width, popt[1]
        amplitude = popt[0]
    centers, density = _binned(x, w, center, span * width, bins)
    fit = lorentzian(centers, amplitude, center, width)
    residual = float(np.sqrt(np.mean((density - fit) ** 2)) / density.max())
    return LdosFit(centers, density, fit, float(width), float(center), residual)


def ldos_fit(spectral: SpectralData, reference, unperturbed_energies, **kwargs) -> LdosFit:
    """Aggregate ``W[i, m]`` against ``E_m - E0_i`` over reference basis states
    ``i`` and fit a Breit-Wigner profile.

    ``unperturbed_energies`` is indexed like the basis of ``spectral``.
    """
    reference = np.asarray(reference, dtype=int)
    e0 = np.asarray(unperturbed_energies, dtype=float)
    w = spectral.eigenvectors[reference, :] ** 2
    offsets = spectral.eigenvalues[None, :] - e0[reference][:, None]
    return fit_lorentzian(offsets.ravel(), w.ravel() / len(reference), **kwargs)


def level_density(eigenvalues, window_fraction: float = 0.5) -> float:
    """``(count - 1) / (E_max - E_min)`` over the central window."""
    E = np.sort(np.asarray(eigenvalues, dtype=float))
    lo, hi = window_indices(len(E), window_fraction)
    span = E[hi - 1] - E[lo]
    if span <= 0:
        raise DataIntegrityError("zero-width window")
    return (hi - lo - 1) / span
