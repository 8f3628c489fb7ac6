"""Multi-realization experiments shared by the CLI, figure recipes and tests.

All disorder seeds come from :func:`realization_seed` with the grid index of
the coupling value, the same rule :func:`run_sweep` uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dynamics import (EvolutionRecord, average_evolution, entropy_rows, extract_tau_chi,
                        mean_survival, projection_probabilities)
from ..eigenstates import (LdosFit, central_band_mask, central_band_window, entropy_columns,
                           fit_lorentzian, ipr_columns, level_density, sgqc_spectrum)
from ..models import (SGQCParams, TBRIMParams, build_sgqc, build_tbrim, central_band, parity_sectors,
                      popcount, project_band)
from ..spectra import diagonalize, window_indices
from ..theory import predict_gamma, rho_c_tbrim
from .seeding import mix64, realization_seed

#: word mixed into the seed that picks initial states
INITIAL_STATE_TAG = 0x1417


# ---------------------------------------------------------------------------
# fermion model: participation numbers and local density of states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IprPoint:
    U: float
    rho_c: float
    rho_n: float
    mean_ipr: float
    realizations: int

    @property
    def x(self) -> float:
        """``U**2 rho_c rho_n``, the argument of the participation law."""
        return self.U**2 * self.rho_c * self.rho_n


def ipr_point(m, n, U, realizations=6, master_seed=0, grid_index=0, window_fraction=0.5,
              Delta=1.0, keep_states=False):
    """Mean IPR over the central ``window_fraction`` of eigenstates and the
    level density ``rho_n`` there, averaged over realizations."""
    xi, rho, states = [], [], []
    for r in range(realizations):
        seed = realization_seed(master_seed, r, grid_index)
        spec = diagonalize(build_tbrim(TBRIMParams(m, n, Delta, U, seed)))
        lo, hi = window_indices(spec.dim, window_fraction)
        X = ipr_columns(spec.eigenvectors)
        xi.append(X[lo:hi].mean())
        rho.append(level_density(spec.eigenvalues, window_fraction))
        if keep_states:
            states.append((spec.eigenvalues, X, entropy_columns(spec.eigenvectors)))
    point = IprPoint(float(U), rho_c_tbrim(m, n, Delta), float(np.mean(rho)), float(np.mean(xi)), realizations)
    return (point, states) if keep_states else point


def ipr_coefficient(points) -> tuple[float, float]:
    """Slope and intercept of the mean IPR against ``U**2 rho_c rho_n``.

    The intercept is free because the participation number tends to 1, not
    0, as the interaction vanishes.
    """
    x = np.array([p.x for p in points])
    y = np.array([p.mean_ipr for p in points])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def tbrim_ldos(m, n, U, realizations=6, master_seed=0, window_fraction=0.5, Delta=1.0) -> tuple[LdosFit, float]:
    """Breit-Wigner fit of the local density of states and the golden-rule width.

    Reference states are basis determinants whose diagonal energy lies inside
    the central eigenvalue window; offsets are measured from that diagonal
    energy.
    """
    offsets, weights = [], []
    for r in range(realizations):
        H = build_tbrim(TBRIMParams(m, n, Delta, U, realization_seed(master_seed, r, 0)))
        spec = diagonalize(H)
        lo, hi = window_indices(spec.dim, window_fraction)
        E, d = spec.eigenvalues, H.diagonal
        ref = np.flatnonzero((d >= E[lo]) & (d <= E[hi - 1]))
        W = spec.eigenvectors[ref, :] ** 2
        offsets.append((E[None, :] - d[ref][:, None]).ravel())
        weights.append(W.ravel() / (len(ref) * realizations))
    fit = fit_lorentzian(np.concatenate(offsets), np.concatenate(weights))
    return fit, predict_gamma(U, rho_c_tbrim(m, n, Delta)).value


# ---------------------------------------------------------------------------
# qubit register: time evolution
# ---------------------------------------------------------------------------

def register_block(params: SGQCParams, sector: str = "band"):
    """Central band (``band``) or the parity sector that contains it
    (``parity``), with the disorder draw used to build it."""
    H = build_sgqc(params)
    k = central_band(params.n)
    block = project_band(H, k) if sector == "band" else parity_sectors(H)[k % 2]
    return H, block, k


def central_initial_states(block, k, gammas, count, seed, band_fraction=0.5) -> np.ndarray:
    """Up to ``count`` register states of band ``k`` whose unperturbed energy
    lies in the central ``band_fraction`` of the band, chosen at random."""
    lo, hi = central_band_window(gammas, band_fraction)
    d = block.diagonal
    candidates = np.flatnonzero((popcount(block.labels) == k) & (d >= lo) & (d <= hi))
    rng = np.random.default_rng(mix64(seed, INITIAL_STATE_TAG))
    if len(candidates) > count:
        candidates = np.sort(rng.choice(candidates, count, replace=False))
    return candidates


@dataclass(frozen=True, eq=False)
class EvolutionRun:
    record: EvolutionRecord
    dim: int
    per_state: tuple | None = None

    @property
    def entropy_bound(self) -> float:
        return math.log2(self.dim)


def register_evolution(params: SGQCParams, times, n_initial=50, sector="band",
                       band_fraction=0.5, per_state=False) -> EvolutionRun:
    """Survival and entropy averaged over initial register states in the
    centre of the central band."""
    H, block, k = register_block(params, sector)
    spec = diagonalize(block)
    init = central_initial_states(block, k, H.meta["gammas"], n_initial, params.seed, band_fraction)
    rec = average_evolution(spec, init, times)
    extra = None
    if per_state:
        extra = []
        for i0 in init:
            F = projection_probabilities(spec, int(i0), rec.times)
            extra.append((int(block.labels[i0]), F[:, i0], entropy_rows(F)))
        extra = tuple(extra)
    return EvolutionRun(rec, block.dim, extra)


def tau_chi_scan(n, couplings, realizations=8, master_seed=0, delta=1.0, delta0=1.0,
                 sector="parity", band_fraction=0.5, decades=(-2, 3.5)):
    """Time of the 1/e crossing of the realization-averaged survival
    probability at each coupling.  Every register state in the centre of the
    central band is used as an initial state."""
    t = np.concatenate([[0.0], np.logspace(decades[0], decades[1], 400)])
    taus = []
    for g, J in enumerate(couplings):
        F = []
        for r in range(realizations):
            params = SGQCParams.square(n, delta0, delta, J, realization_seed(master_seed, r, g))
            H, block, k = register_block(params, sector)
            init = central_initial_states(block, k, H.meta["gammas"], block.dim, params.seed, band_fraction)
            F.append(mean_survival(diagonalize(block), init, t))
        rec = EvolutionRecord(t, np.mean(F, axis=0), np.zeros_like(t), ())
        taus.append(extract_tau_chi(rec))
    return np.array(taus)


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# ---------------------------------------------------------------------------
# qubit register: melting map
# ---------------------------------------------------------------------------

def central_band_max_entropy(params: SGQCParams, band_fraction=0.5) -> tuple[float, int]:
    E, S, _ = sgqc_spectrum(params)
    gammas = build_sgqc(params).meta["gammas"]
    mask = central_band_mask(E, gammas, band_fraction)
    return float(S[mask].max()), int(2**params.n)
