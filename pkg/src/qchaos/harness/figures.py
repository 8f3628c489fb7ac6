"""Desk-scale figure recipes.

Each recipe writes the CSV files needed to re-plot one figure plus a
``manifest.json`` with the parameters, seeds and wall time.  ``quick=True``
shrinks the statistics so a recipe finishes in seconds (used by tests).

========  ==============================================================
fig2      eta(U) for fermions (m, n) in {(10,3), (12,3), (12,4)}; U_c/B vs K
fig3      mean IPR against U^2 rho_c rho_n for m=14, n=3; LDOS at one point
fig4      eta(J) for qubits n in {6, 9, 12}; J_cs against delta for n=6
fig5      band-projected eta(J) for n in {6, 8, 10, 12}, delta = 0.2
fig6      melting map S_q(E, J) for n=10, one realization, J in [0, 0.5]
fig7      entropy growth S(t) at J = 0.4 delta, n in {6, 9, 12}
fig8      classical rotor energy with momentum reversal at t=150
fig9      quantum rotor energy and norm with conjugation at t=150
========  ==============================================================
"""

from __future__ import annotations

import time
from pathlib import Path

import numpy as np

from ..dynamics import log_time_grid
from ..eigenstates import melting_map
from ..errors import InvalidParameterError
from ..models import SGQCParams, count_directly_coupled
from ..rotor import classical_reversal_experiment, quantum_reversal_experiment
from ..theory import (multiqubit_spacing, predict_jc_sgqc, predict_jcs_sgqc, predict_uc_tbrim,
                      two_body_interval)
from .config import ModelConfig, SweepConfig
from .experiments import ipr_coefficient, ipr_point, register_evolution, tbrim_ldos
from .io import write_columns, write_csv
from .sweep import run_sweep, write_manifest

#: multiples of delta / n used for the qubit coupling grids
QUBIT_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 8.0)
#: multiples of the predicted U_c used for the fermion grids
FERMION_GRID = (0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 4.0)


def qubit_sweep_config(n, delta=1.0, *, sector="parity", seed=0, workers=1, target_spacings=None,
                       grid=QUBIT_GRID, out_dir=None) -> SweepConfig:
    """Sweep over ``J = x delta / n`` with the desk-scale spacing targets:
    1e4 spacings for ``n <= 9`` and 3e3 above."""
    if target_spacings is None:
        target_spacings = 10_000 if n <= 9 else 3_000
    model = ModelConfig("sgqc", n=n, delta0=1.0, delta=delta)
    return SweepConfig(model, couplings=tuple(x * delta / n for x in grid), target_spacings=target_spacings,
                       sector=sector, seed=seed, workers=workers, out_dir=out_dir)


def fermion_sweep_config(m, n, *, seed=0, workers=1, target_spacings=10_000, grid=FERMION_GRID,
                         out_dir=None) -> SweepConfig:
    uc = predict_uc_tbrim(m, n).value
    model = ModelConfig("tbrim", n=n, m=m, Delta=1.0)
    return SweepConfig(model, couplings=tuple(x * uc for x in grid), target_spacings=target_spacings,
                       seed=seed, workers=workers, out_dir=out_dir)


def fig2(out: Path, quick=False, seed=0, workers=1) -> dict:
    pairs = [(10, 3)] if quick else [(10, 3), (12, 3), (12, 4)]
    rows, configs = [], {}
    for m, n in pairs:
        cfg = fermion_sweep_config(m, n, seed=seed, workers=workers,
                                   target_spacings=1_000 if quick else 10_000)
        res = run_sweep(cfg, write=False)
        write_csv(out / f"eta_curve_m{m}_n{n}.csv", ["coupling", "eta", "n_spacings", "n_realizations", "stderr"],
                  [(r.coupling, r.eta, r.n_spacings, r.n_realizations, r.stderr) for r in res.rows])
        K, B = count_directly_coupled(m, n), two_body_interval(m)
        uc = res.J_c if res.J_c is not None else float("nan")
        rows.append((m, n, K, B, uc, uc / B, predict_uc_tbrim(m, n).value))
        configs[f"m{m}_n{n}"] = cfg.to_ini()
    write_csv(out / "uc_summary.csv", ["m", "n", "K", "B", "U_c", "U_c_over_B", "U_c_predicted"], rows)
    return dict(configs=configs)


def fig3(out: Path, quick=False, seed=0, workers=1) -> dict:
    m, n = (10, 3) if quick else (14, 3)
    reals = 2 if quick else 6
    uc = predict_uc_tbrim(m, n).value
    factors = (1.5, 3.0) if quick else (1.5, 2.0, 2.5, 3.0, 4.0)
    points, states = [], []
    for g, f in enumerate(factors):
        p, st = ipr_point(m, n, f * uc, reals, seed, g, keep_states=True)
        points.append(p)
        for E, X, S in st:
            states.append((p.U, E, X, S))
    slope, intercept = ipr_coefficient(points)
    write_csv(out / "ipr_summary.csv", ["U", "rho_c", "rho_n", "x", "mean_xi", "xi_over_U2"],
              [(p.U, p.rho_c, p.rho_n, p.x, p.mean_ipr, p.mean_ipr / p.U**2) for p in points])
    write_csv(out / "state_analysis.csv", ["J", "m", "E", "xi", "S_q"],
              [(U, i, e, x, s) for U, E, X, S in states for i, (e, x, s) in enumerate(zip(E, X, S))])
    fit, golden = tbrim_ldos(m, n, 2.0 * uc, reals, seed)
    write_columns(out / "ldos.csv", {"E_offset": fit.centers, "density": fit.density,
                                     "fit_density": fit.fit_density})
    return dict(m=m, n=n, realizations=reals, U_factors=factors, ipr_slope=slope, ipr_intercept=intercept,
                ldos_U=2.0 * uc, ldos_width=fit.width, golden_rule_width=golden,
                note="state_analysis.csv: column J holds the interaction U")


def fig4(out: Path, quick=False, seed=0, workers=1) -> dict:
    ns = (6,) if quick else (6, 9, 12)
    summary, configs = [], {}
    for n in ns:
        cfg = qubit_sweep_config(n, seed=seed, workers=workers, target_spacings=1_000 if quick else None,
                                 out_dir=str(out / f"n{n}"))
        res = run_sweep(cfg)
        configs[f"n{n}"] = cfg.to_ini()
        summary.append((n, res.J_c, res.J_cs, predict_jc_sgqc(1.0, n).value, predict_jcs_sgqc(1.0, n).value,
                        multiqubit_spacing(n).value))
    write_csv(out / "border_summary.csv", ["n", "J_c", "J_cs", "J_c_predicted", "J_cs_predicted", "Delta_n"],
              [tuple(float("nan") if v is None else v for v in row) for row in summary])
    scan = []
    for delta in (0.25, 0.5, 1.0):
        cfg = qubit_sweep_config(6, delta, seed=seed, workers=workers, target_spacings=1_000 if quick else None)
        res = run_sweep(cfg, write=False)
        scan.append((6, delta, float("nan") if res.J_cs is None else res.J_cs))
    write_csv(out / "delta_scan.csv", ["n", "delta", "J_cs"], scan)
    return dict(configs=configs)


def fig5(out: Path, quick=False, seed=0, workers=1) -> dict:
    delta = 0.2
    ns = (6,) if quick else (6, 8, 10, 12)
    summary, configs = [], {}
    for n in ns:
        cfg = qubit_sweep_config(n, delta, sector="band", seed=seed, workers=workers,
                                 target_spacings=1_000 if quick else 3_000, out_dir=str(out / f"n{n}"))
        res = run_sweep(cfg)
        configs[f"n{n}"] = cfg.to_ini()
        nan = float("nan")
        summary.append((n, nan if res.J_c is None else res.J_c / delta,
                        nan if res.J_cs is None else res.J_cs / delta,
                        predict_jc_sgqc(delta, n, 3.3).value / delta, predict_jcs_sgqc(delta, n).value / delta,
                        multiqubit_spacing(n).value / delta))
    write_csv(out / "border_summary.csv",
              ["n", "J_c_over_delta", "J_cs_over_delta", "J_c_predicted", "J_cs_predicted", "Delta_n_over_delta"],
              summary)
    return dict(delta=delta, configs=configs)


def fig6(out: Path, quick=False, seed=0, workers=1) -> dict:
    n = 6 if quick else 10
    Js = np.round(np.linspace(0.0, 0.5, 6 if quick else 21), 12)
    params = SGQCParams.square(n, 1.0, 1.0, 0.0, seed)
    mm = melting_map(params, Js)
    write_columns(out / "melting_map.csv", {"J": mm.J, "E": mm.energy, "S_q": mm.entropy})
    return dict(n=n, delta0=1.0, delta=1.0, seed=seed, couplings=Js, realizations=1, failures=mm.failures)


def fig7(out: Path, quick=False, seed=0, workers=1) -> dict:
    ns = (6,) if quick else (6, 9, 12)
    ratio, n_initial = 0.4, 20 if quick else 50
    bounds = {}
    for n in ns:
        params = SGQCParams.square(n, 1.0, 1.0, ratio * 1.0, seed)
        times = log_time_grid(params.J**2 * n / params.delta, 32 if quick else 64, (-2, 2))
        run = register_evolution(params, times, n_initial, "band")
        rec = run.record
        write_columns(out / f"evolution_n{n}.csv",
                      {"t": rec.times, "F_mean": rec.survival, "S_mean": rec.entropy,
                       "n_initial_states": np.full(len(rec.times), rec.n_initial_states)})
        bounds[n] = run.entropy_bound
    return dict(J_over_delta=ratio, delta=1.0, delta0=1.0, seed=seed, n_initial=n_initial, sector="band",
                log2_band_dim=bounds)


def fig8(out: Path, quick=False, seed=0, workers=1) -> dict:
    res = classical_reversal_experiment(K=5.0, k=20.0, t_rev=150, perturbation=1e-12,
                                        orbits=200 if quick else 1000, seed=seed)
    write_columns(out / "rotor_classical.csv", {"t": np.arange(len(res.energy)), "E": res.energy})
    return dict(K=5.0, k=20.0, t_rev=150, perturbation=1e-12, orbits=200 if quick else 1000, seed=seed,
                divergence_step=res.divergence_step)


def fig9(out: Path, quick=False, seed=0, workers=1) -> dict:
    res = quantum_reversal_experiment(k=20.0, T=0.25, t_rev=150, p=12)
    write_columns(out / "rotor_quantum.csv", {"t": np.arange(len(res.energy)), "E": res.energy, "norm": res.norm})
    return dict(k=20.0, T=0.25, t_rev=150, p=12, fidelity=res.fidelity, max_norm_drift=res.max_norm_drift)


RECIPES = {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6,
           "fig7": fig7, "fig8": fig8, "fig9": fig9}


def run_figure(name: str, out_dir, *, quick=False, seed=0, workers=1) -> list[Path]:
    """Run recipe ``name`` into ``out_dir``; returns the files written."""
    if name not in RECIPES:
        raise InvalidParameterError(f"unknown recipe {name!r}; choose from {sorted(RECIPES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    params = RECIPES[name](out, quick=quick, seed=seed, workers=workers)
    files = sorted(str(p.relative_to(out)) for p in out.rglob("*.csv"))
    write_manifest(out, None, files, time.perf_counter() - start, f"figure {name}",
                   recipe=name, quick=quick, master_seed=seed, parameters=params)
    return [out / f for f in files] + [out / "manifest.json"]
