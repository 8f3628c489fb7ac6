"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 partial-sweep failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..errors import CapacityError, InvalidParameterError, PartialSweepError, QChaosError
from ..dynamics import log_time_grid
from ..models import (build_sgqc, build_tbrim, central_band, effective_three_particle_coupling,
                      parity_sectors, project_band)
from ..rotor import classical_reversal_experiment, quantum_reversal_experiment
from ..theory import (multiqubit_spacing, predict_gamma, predict_jc_sgqc, predict_jcs_sgqc,
                      predict_uc_tbrim, rho_c_tbrim, thermalization_border)
from .config import ConfigError, ModelConfig, SweepConfig, load_config
from .experiments import register_evolution
from .figures import RECIPES, run_figure
from .io import write_columns, write_csv, write_json
from .sweep import run_sweep, write_manifest

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PARTIAL = 0, 2, 3, 4

log = logging.getLogger("qchaos")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file")
    common.add_argument("--seed", type=int, help="override the master seed")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--out-dir", help="output directory")
    common.add_argument("--cap-dim", type=int, help="largest matrix dimension to build")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="qchaos", description="Quantum chaos border toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="build a Hamiltonian and report its structure")
    sub.add_parser("sweep", parents=[common], help="disorder-averaged sweep over the coupling grid")
    ev = sub.add_parser("evolve", parents=[common], help="survival probability and entropy growth")
    ev.add_argument("--initial-states", type=int, default=50)
    ev.add_argument("--decades", type=int, nargs=2, default=(-2, 2), metavar=("LO", "HI"))
    ev.add_argument("--per-state", action="store_true", help="also write one trace per initial state")
    ro = sub.add_parser("rotor", parents=[common], help="classical and quantum reversal experiments")
    ro.add_argument("--K", type=float, default=5.0)
    ro.add_argument("--k", type=float, default=20.0)
    ro.add_argument("--t-rev", type=int, default=150)
    ro.add_argument("--orbits", type=int, default=1000)
    ro.add_argument("--perturbation", type=float, default=1e-12)
    ro.add_argument("--log2-size", type=int, default=12)
    sub.add_parser("predict", parents=[common], help="closed-form predictions for the config's model")
    fig = sub.add_parser("figure", parents=[common], help="run a figure recipe")
    fig.add_argument("name", help=", ".join(sorted(RECIPES)))
    fig.add_argument("--quick", action="store_true", help="reduced statistics")
    return p


def _config(args) -> SweepConfig | None:
    if not args.config:
        return None
    cfg = load_config(args.config)
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.workers is not None:
        kw["workers"] = args.workers
    if args.out_dir is not None:
        kw["out_dir"] = args.out_dir
    if args.cap_dim is not None:
        kw["cap_dim"] = args.cap_dim
    return replace(cfg, **kw) if kw else cfg


def _require(cfg, command):
    if cfg is None:
        raise ConfigError(f"{command} needs --config")
    return cfg


def _out(cfg, args, default) -> Path:
    out = Path(args.out_dir or (cfg.out_dir if cfg and cfg.out_dir else default))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_build(args) -> int:
    cfg = _require(_config(args), "build")
    m = cfg.model
    info = dict(model=m.model)
    if m.is_qubit:
        cap = 20 if cfg.cap_dim is None else max(int(np.log2(cfg.cap_dim)), 1)
        H = build_sgqc(m.sgqc_params(), cap=cap)
        even, odd = parity_sectors(H)
        k = central_band(m.n)
        info.update(n=m.n, dim=H.dim, nnz=H.matrix.nnz, edges=len(m.lattice().edges),
                    even_dim=even.dim, odd_dim=odd.dim, central_band=k,
                    central_band_dim=project_band(H, k).dim,
                    symmetric=bool((H.matrix != H.matrix.T).nnz == 0))
    elif m.model == "tbrim":
        H = build_tbrim(m.tbrim_params(), cap=20000 if cfg.cap_dim is None else cfg.cap_dim)
        rows = np.diff(H.matrix.indptr)
        info.update(m=m.m, n=m.n, dim=H.dim, nnz=H.matrix.nnz, max_row_nnz=int(rows.max()),
                    symmetric=bool((H.matrix != H.matrix.T).nnz == 0))
    else:
        c = effective_three_particle_coupling(m.m, m.Delta, m.U, m.seed, (0, 0, 0), (1, 1, 1))
        info.update(m=m.m, U3=c.value, n_terms=c.n_terms, excluded=c.excluded,
                    state_in=(0, 0, 0), state_out=(1, 1, 1))
    for key, value in info.items():
        print(f"{key:18s} {value}")
    if args.out_dir or cfg.out_dir:
        out = _out(cfg, args, ".")
        write_json(out / "build.json", info)
        write_manifest(out, cfg, ["build.json"], 0.0, "build")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _require(_config(args), "sweep")
    if not cfg.out_dir:
        cfg = replace(cfg, out_dir="sweep_out")
    res = run_sweep(cfg)
    print(f"{'coupling':>12s} {'eta':>9s} {'stderr':>9s} {'S_q':>8s} {'xi':>9s} {'N_S':>7s}")
    for r in res.rows:
        print(f"{r.coupling:12.6g} {r.eta:9.4f} {r.stderr:9.4f} {r.mean_entropy:8.3f} {r.mean_ipr:9.3f} {r.n_spacings:7d}")
    print(f"J_c  = {res.J_c}  bracket {res.J_c_bracket}")
    print(f"J_cs = {res.J_cs}  bracket {res.J_cs_bracket}")
    print(f"wrote {len(res.files)} files to {cfg.out_dir}")
    if res.failed:
        log.warning("%d grid points failed", len(res.failed))
    return EXIT_OK


def cmd_evolve(args) -> int:
    cfg = _require(_config(args), "evolve")
    m = cfg.model
    if not m.is_qubit:
        raise ConfigError("evolve supports the qubit models only")
    params = m.sgqc_params(seed=args.seed if args.seed is not None else m.seed)
    if params.J <= 0:
        raise ConfigError("evolve needs J > 0")
    gamma = predict_gamma(params.J, params.delta, params.n, "sgqc_weak").value
    times = log_time_grid(gamma, 64, tuple(args.decades))
    start = time.perf_counter()
    run = register_evolution(params, times, args.initial_states, cfg.sector, cfg.band_fraction, args.per_state)
    rec = run.record
    out = _out(cfg, args, "evolve_out")
    files = [write_columns(out / "evolution.csv", {"t": rec.times, "F_mean": rec.survival, "S_mean": rec.entropy,
                                                   "n_initial_states": np.full(len(rec.times), rec.n_initial_states)})]
    if args.per_state:
        files.append(write_csv(out / "evolution_states.csv", ["register_state", "t", "F", "S"],
                               [(label, t, f, s) for label, F, S in run.per_state
                                for t, f, s in zip(rec.times, F, S)]))
    write_manifest(out, cfg, [f.name for f in files], time.perf_counter() - start, "evolve",
                   initial_states=args.initial_states, decades=list(args.decades), gamma_scale=gamma,
                   entropy_bound=run.entropy_bound)
    print(f"{rec.n_initial_states} initial states, dim {run.dim}; final S = {rec.entropy[-1]:.4f} "
          f"(bound {run.entropy_bound:.4f}); final F = {rec.survival[-1]:.4g}")
    return EXIT_OK


def cmd_rotor(args) -> int:
    cfg = _config(args)
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
    T = args.K / args.k
    start = time.perf_counter()
    cl = classical_reversal_experiment(args.K, args.k, args.t_rev, args.perturbation, args.orbits, seed)
    qu = quantum_reversal_experiment(args.k, T, args.t_rev, args.log2_size)
    out = _out(cfg, args, "rotor_out")
    files = [write_columns(out / "rotor_classical.csv", {"t": np.arange(len(cl.energy)), "E": cl.energy}),
             write_columns(out / "rotor_quantum.csv",
                           {"t": np.arange(len(qu.energy)), "E": qu.energy, "norm": qu.norm})]
    report = dict(K=args.K, k=args.k, T=T, t_rev=args.t_rev, seed=seed, orbits=args.orbits,
                  perturbation=args.perturbation, divergence_step=cl.divergence_step,
                  fidelity=qu.fidelity, max_norm_drift=qu.max_norm_drift,
                  max_edge_probability=qu.max_edge_probability)
    write_json(out / "rotor_report.json", report)
    write_manifest(out, None, [f.name for f in files] + ["rotor_report.json"], time.perf_counter() - start,
                   "rotor", parameters=report)
    for key, value in report.items():
        print(f"{key:22s} {value}")
    return EXIT_OK


def prediction_table(model: ModelConfig) -> list:
    preds = []
    if model.is_qubit:
        delta = 2 * model.delta0 if model.model == "shard" else model.delta
        preds += [predict_jc_sgqc(delta, model.n), predict_jcs_sgqc(delta, model.n),
                  multiqubit_spacing(model.n, model.delta0)]
        if model.J > 0:
            preds += [predict_gamma(model.J, delta, model.n, "sgqc_weak"),
                      predict_gamma(model.J, delta, model.n, "sgqc_strong")]
    elif model.model == "tbrim":
        preds.append(predict_uc_tbrim(model.m, model.n, model.Delta))
        if model.U > 0:
            rho_c = rho_c_tbrim(model.m, model.n, model.Delta)
            preds.append(predict_gamma(model.U, rho_c))
            preds += list(thermalization_border(model.Delta, model.U))
    else:
        if model.U > 0:
            preds += list(thermalization_border(model.Delta, model.U))
    return preds


def cmd_predict(args) -> int:
    cfg = _require(_config(args), "predict")
    preds = prediction_table(cfg.model)
    print(f"{'formula':20s} {'value':>14s}  {'order_of_magnitude':18s} inputs")
    for p in preds:
        inputs = ", ".join(f"{k}={v}" for k, v in p.inputs.items() if v is not None)
        print(f"{p.formula:20s} {p.value:14.6g}  {str(p.order_of_magnitude):18s} {inputs}")
        if p.warning:
            print(f"{'':20s} warning: {p.warning}")
    if args.out_dir:
        out = _out(cfg, args, ".")
        write_csv(out / "predictions.csv", ["formula", "value", "order_of_magnitude", "inputs"],
                  [(p.formula, p.value, p.order_of_magnitude,
                    ";".join(f"{k}={v}" for k, v in p.inputs.items())) for p in preds])
    return EXIT_OK


def cmd_figure(args) -> int:
    seed = args.seed if args.seed is not None else 0
    out = Path(args.out_dir or f"figure_{args.name}")
    if args.name not in RECIPES:
        raise ConfigError(f"unknown recipe {args.name!r}; choose from {sorted(RECIPES)}")
    files = run_figure(args.name, out, quick=args.quick, seed=seed, workers=args.workers or 1)
    for f in files:
        print(f)
    return EXIT_OK


COMMANDS = {"build": cmd_build, "sweep": cmd_sweep, "evolve": cmd_evolve, "rotor": cmd_rotor,
            "predict": cmd_predict, "figure": cmd_figure}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidParameterError, CapacityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PartialSweepError as exc:
        print(f"partial sweep failure: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    except QChaosError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
