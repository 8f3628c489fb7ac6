"""Disorder-averaged sweeps over a coupling grid.

Each (grid point, realization) pair is an independent task whose disorder
seed is ``realization_seed(master, realization, grid_index)``.  Tasks may run
in any order on any number of processes; results are merged in
``(grid_index, realization)`` order, so the output does not depend on
scheduling.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..eigenstates import central_band_mask, critical_coupling_entropy, entropy_columns, ipr_columns
from ..errors import NoCrossingError, PartialSweepError, QChaosError
from ..models import build_sgqc, build_tbrim, central_band, parity_sectors, project_band
from ..spectra import (S0, auto_halfwidth, diagonalize, eta_from_fraction, find_critical_coupling,
                       spacing_histogram, unfold, window_indices)
from .config import ConfigError, SweepConfig
from .io import write_columns, write_csv, write_json
from .seeding import mix64, realization_seed

log = logging.getLogger(__name__)

#: fraction of failed grid points above which the sweep as a whole fails
MAX_FAILED_FRACTION = 0.2
#: word mixed into the bootstrap seed so it never collides with a disorder seed
BOOTSTRAP_TAG = 0xB007


@dataclass(frozen=True, eq=False)
class TaskResult:
    grid_index: int
    realization: int
    seed: int
    spacings: np.ndarray | None = None
    entropy: np.ndarray | None = None
    ipr: np.ndarray | None = None
    error: str | None = None


@dataclass(frozen=True)
class SweepRow:
    coupling: float
    eta: float
    stderr: float
    mean_entropy: float
    mean_ipr: float
    n_spacings: int
    n_realizations: int
    n_states: int
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True, eq=False)
class SweepResult:
    config: SweepConfig
    rows: list
    J_c: float | None = None
    J_c_bracket: tuple | None = None
    J_cs: float | None = None
    J_cs_bracket: tuple | None = None
    histograms: dict = field(default_factory=dict)
    wall_time: float = 0.0
    files: list = field(default_factory=list)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([r.coupling for r in self.rows])

    @property
    def etas(self) -> np.ndarray:
        return np.array([r.eta for r in self.rows])

    @property
    def mean_entropy(self) -> np.ndarray:
        return np.array([r.mean_entropy for r in self.rows])

    @property
    def failed(self) -> list:
        return [r for r in self.rows if not r.ok]


def qubit_cap(cfg: SweepConfig) -> int:
    if cfg.cap_dim is None:
        return 20
    return max(int(math.floor(math.log2(cfg.cap_dim))), 1)


def check_capacity(cfg: SweepConfig) -> None:
    """Reject a sweep whose model exceeds the dimension cap before any work."""
    m = cfg.model
    if m.is_qubit and m.n > qubit_cap(cfg):
        raise ConfigError(f"n={m.n} exceeds the qubit cap {qubit_cap(cfg)}")
    if m.model == "tbrim" and math.comb(m.m, m.n) > (20000 if cfg.cap_dim is None else cfg.cap_dim):
        raise ConfigError(f"dimension {math.comb(m.m, m.n)} exceeds the cap")


def smoothing_for(cfg: SweepConfig) -> int:
    if cfg.smoothing_halfwidth is not None:
        return cfg.smoothing_halfwidth
    lo, hi = window_indices(cfg.analysed_dim(), cfg.window_fraction)
    return auto_halfwidth(hi - lo)


def analysed_spectrum(cfg: SweepConfig, coupling: float, seed: int):
    """Diagonalize the analysed block of one realization.

    Returns the spectral data and a mask of the eigenstates averaged over:
    for qubits, those inside the central part of the central band's
    unperturbed span; for fermions, the central ``band_fraction`` of levels.
    """
    m = cfg.model
    if m.is_qubit:
        H = build_sgqc(m.sgqc_params(coupling, seed), cap=qubit_cap(cfg))
        k = central_band(m.n)
        block = project_band(H, k) if cfg.sector == "band" else parity_sectors(H)[k % 2]
        spec = diagonalize(block)
        mask = central_band_mask(spec.eigenvalues, H.meta["gammas"], cfg.band_fraction)
        return spec, mask
    if m.model == "tbrim":
        cap = 20000 if cfg.cap_dim is None else cfg.cap_dim
        spec = diagonalize(build_tbrim(m.tbrim_params(coupling, seed), cap=cap))
        lo, hi = window_indices(spec.dim, cfg.band_fraction)
        mask = np.zeros(spec.dim, dtype=bool)
        mask[lo:hi] = True
        return spec, mask
    raise ConfigError(f"model {m.model!r} has no spectrum to sweep")


def run_task(cfg: SweepConfig, grid_index: int, realization: int) -> TaskResult:
    seed = realization_seed(cfg.seed, realization, grid_index)
    coupling = cfg.couplings[grid_index]
    try:
        spec, mask = analysed_spectrum(cfg, coupling, seed)
        sample = unfold(spec.eigenvalues, cfg.window_fraction, smoothing_for(cfg))
        V = spec.eigenvectors[:, mask]
        return TaskResult(grid_index, realization, seed, sample.spacings,
                          entropy_columns(V), ipr_columns(V))
    except QChaosError as exc:
        if isinstance(exc, ConfigError):
            raise
        return TaskResult(grid_index, realization, seed, error=f"{type(exc).__name__}: {exc}")


def _run_star(args):
    return run_task(*args)


def bootstrap_eta(below, counts, resamples: int, seed: int) -> float:
    """Standard deviation of eta over resamplings of whole realizations."""
    below = np.asarray(below, dtype=float)
    counts = np.asarray(counts, dtype=float)
    R = len(counts)
    if R < 2 or resamples < 2:
        return float("nan")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, R, size=(resamples, R))
    frac = below[idx].sum(axis=1) / counts[idx].sum(axis=1)
    return float(np.std(eta_from_fraction(frac), ddof=1))


def aggregate_point(cfg: SweepConfig, grid_index: int, tasks) -> tuple[SweepRow, np.ndarray | None]:
    coupling = cfg.couplings[grid_index]
    errors = [t.error for t in tasks if t.error]
    if errors:
        log.warning("grid point %d (coupling %.6g) failed: %s", grid_index, coupling, errors[0])
        nan = float("nan")
        return SweepRow(coupling, nan, nan, nan, nan, 0, len(tasks), 0, errors[0]), None
    spacings = np.concatenate([t.spacings for t in tasks])
    below = [int(np.count_nonzero(t.spacings <= S0)) for t in tasks]
    counts = [len(t.spacings) for t in tasks]
    eta_value = float(eta_from_fraction(sum(below) / sum(counts)))
    if sum(counts) < 100:
        log.warning("grid point %d: only %d spacings", grid_index, sum(counts))
    stderr = bootstrap_eta(below, counts, cfg.bootstrap, mix64(cfg.seed, grid_index, BOOTSTRAP_TAG))
    S = [x for t in tasks for x in t.entropy]
    X = [x for t in tasks for x in t.ipr]
    mean_S = math.fsum(S) / len(S) if S else float("nan")
    mean_X = math.fsum(X) / len(X) if X else float("nan")
    row = SweepRow(coupling, eta_value, stderr, mean_S, mean_X, int(sum(counts)), len(tasks), len(S))
    return row, spacings


def _bracket(x, value):
    i = int(np.searchsorted(x, value, side="left"))
    if i < len(x) and x[i] == value:
        return (float(value), float(value))
    return (float(x[max(i - 1, 0)]), float(x[min(i, len(x) - 1)]))


def extract_borders(cfg: SweepConfig, rows) -> dict:
    good = [r for r in rows if r.ok]
    x = np.array([r.coupling for r in good])
    out = dict(J_c=None, J_c_bracket=None, J_cs=None, J_cs_bracket=None)
    if len(good) < 2:
        return out
    try:
        jc = find_critical_coupling(x, [r.eta for r in good], cfg.eta_c)
        out.update(J_c=jc, J_c_bracket=_bracket(x, jc))
    except NoCrossingError as exc:
        log.info("no eta crossing: %s", exc)
    S = np.array([r.mean_entropy for r in good])
    fin = np.isfinite(S)
    if fin.sum() >= 2:
        try:
            jcs = critical_coupling_entropy(x[fin], S[fin], 1.0)
            out.update(J_cs=jcs, J_cs_bracket=_bracket(x[fin], jcs))
        except NoCrossingError as exc:
            log.info("no entropy crossing: %s", exc)
    return out


def run_tasks(cfg: SweepConfig, n_real: int) -> list:
    jobs = [(cfg, g, r) for g in range(len(cfg.couplings)) for r in range(n_real)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_star, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        results = [run_task(*j) for j in jobs]
    return sorted(results, key=lambda t: (t.grid_index, t.realization))


def run_sweep(cfg: SweepConfig, *, write: bool = True, hist_bins: int = 50) -> SweepResult:
    """Run every (grid point, realization) task, aggregate, extract borders.

    Writes ``eta_curve.csv``, ``sweep.csv``, one ``ps_hist_gNNN.csv`` per
    grid point, ``summary.json`` and ``manifest.json`` when ``write`` is set
    and ``cfg.out_dir`` is given.  Raises :class:`PartialSweepError` (after
    writing) when more than 20% of the grid points failed.
    """
    if not cfg.couplings:
        raise ConfigError("sweep needs a non-empty coupling grid")
    check_capacity(cfg)
    start = time.perf_counter()
    n_real = cfg.realizations_needed()
    results = run_tasks(cfg, n_real)

    rows, hists = [], {}
    for g in range(len(cfg.couplings)):
        row, spacings = aggregate_point(cfg, g, results[g * n_real:(g + 1) * n_real])
        rows.append(row)
        if spacings is not None and len(spacings):
            hists[g] = spacing_histogram(spacings, bins=hist_bins, s_max=4.0)
    borders = extract_borders(cfg, rows)
    result = SweepResult(cfg, rows, histograms=hists, wall_time=time.perf_counter() - start, **borders)
    if write and cfg.out_dir:
        result = write_sweep(result)
    n_failed = len(result.failed)
    if n_failed > MAX_FAILED_FRACTION * len(rows):
        raise PartialSweepError(f"{n_failed} of {len(rows)} grid points failed")
    return result


def write_sweep(result: SweepResult) -> SweepResult:
    cfg = result.config
    out = Path(cfg.out_dir)
    rows = result.rows
    files = [write_csv(out / "eta_curve.csv",
                       ["coupling", "eta", "n_spacings", "n_realizations", "stderr"],
                       [(r.coupling, r.eta, r.n_spacings, r.n_realizations, r.stderr) for r in rows])]
    files.append(write_csv(out / "sweep.csv",
                           ["coupling", "eta", "stderr", "mean_S_q", "mean_xi", "n_spacings",
                            "n_realizations", "n_states", "status"],
                           [(r.coupling, r.eta, r.stderr, r.mean_entropy, r.mean_ipr, r.n_spacings,
                             r.n_realizations, r.n_states, "ok" if r.ok else "failed") for r in rows]))
    for g, h in sorted(result.histograms.items()):
        files.append(write_columns(out / f"ps_hist_g{g:03d}.csv",
                                   {"s_center": h.centers, "density": h.density, "count": h.counts}))
    summary = dict(J_c=result.J_c, J_c_bracket=result.J_c_bracket, J_cs=result.J_cs,
                   J_cs_bracket=result.J_cs_bracket, eta_c=cfg.eta_c,
                   failed=[dict(coupling=r.coupling, error=r.error) for r in result.failed],
                   smoothing_halfwidth=smoothing_for(cfg), realizations=cfg.realizations_needed())
    files.append(write_json(out / "summary.json", summary))
    files.append(write_manifest(out, cfg, [f.name for f in files], result.wall_time, "sweep"))
    return SweepResult(cfg, rows, result.J_c, result.J_c_bracket, result.J_cs, result.J_cs_bracket,
                       result.histograms, result.wall_time, files)


def write_manifest(out_dir, cfg: SweepConfig | None, files, wall_time: float, command: str, **extra) -> Path:
    """Record everything needed to regenerate ``files``."""
    from .. import __version__

    data = dict(command=command, version=__version__, files=sorted(files), wall_time_s=wall_time,
                seed_rule="realization_seed(master, realization, grid_index) = mix64(master, realization, grid_index)")
    if cfg is not None:
        data.update(config=cfg.as_dict(), config_ini=cfg.to_ini(), master_seed=cfg.seed,
                    realizations=cfg.realizations_needed() if cfg.couplings else cfg.realizations,
                    cap_dim=cfg.cap_dim)
    data.update(extra)
    return write_json(Path(out_dir) / "manifest.json", data)
