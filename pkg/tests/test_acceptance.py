"""End-to-end acceptance criteria at desk scale.

Each test records a PASS/FAIL line (printed in the pytest terminal summary)
before asserting.  The long sweeps are shared through module fixtures.
"""

import itertools
import math
import time

import numpy as np
import pytest

from acceptance_report import report
from qchaos.dynamics import log_time_grid
from qchaos.eigenstates import entropy_columns, ipr_columns, melting_map
from qchaos.harness.experiments import (central_band_max_entropy, ipr_coefficient, ipr_point,
                                        loglog_slope, register_evolution, tau_chi_scan, tbrim_ldos)
from qchaos.harness.figures import fermion_sweep_config, qubit_sweep_config
from qchaos.harness.sweep import run_sweep
from qchaos.models import (SGQCParams, TBRIMParams, build_sgqc, build_tbrim, count_directly_coupled,
                           fermion_basis, parity_sectors, project_band)
from qchaos.rotor import (ClassicalEnsemble, classical_energy_trace, classical_reversal_experiment,
                          quantum_reversal_experiment)
from qchaos.spectra import diagonalize, eta, sample_poisson_spacings, sample_wigner_spacings, unfold
from qchaos.theory import predict_jc_sgqc, predict_jcs_sgqc, predict_uc_tbrim

SEED = 0


@pytest.fixture(scope="module")
def qubit_sweeps():
    out = {}
    for n in (6, 9, 12):
        start = time.perf_counter()
        res = run_sweep(qubit_sweep_config(n, seed=SEED), write=False)
        out[n] = (res, time.perf_counter() - start)
    return out


def test_criterion_01_eta_calibration():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    p = eta(sample_poisson_spacings(rng, 100_000)).eta
    w = eta(sample_wigner_spacings(rng, 100_000)).eta
    elapsed = time.perf_counter() - start
    ok = abs(p - 1) <= 0.05 and abs(w) <= 0.05 and elapsed < 60
    report(1, "eta calibration", ok, f"Poisson {p:.4f}, Wigner {w:.4f}, {elapsed:.1f}s")
    assert ok


def test_criterion_02_random_matrix_limit():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    A = rng.normal(size=(1000, 1000))
    E = np.linalg.eigvalsh((A + A.T) / 2)
    value = eta(unfold(E, 0.5, 10)).eta
    elapsed = time.perf_counter() - start
    ok = abs(value) <= 0.07 and elapsed < 120
    report(2, "GOE matrix eta", ok, f"eta {value:.4f}, {elapsed:.1f}s")
    assert ok


def test_criterion_03_qubit_border_scaling(qubit_sweeps):
    jc = {n: res.J_c for n, (res, _) in qubit_sweeps.items()}
    pred = {n: predict_jc_sgqc(1.0, n).value for n in jc}
    within = all(j is not None and abs(j / pred[n] - 1) <= 0.35 for n, j in jc.items())
    decreasing = within and jc[6] > jc[9] > jc[12]
    spacings = {n: min(r.n_spacings for r in res.rows) for n, (res, _) in qubit_sweeps.items()}
    enough = all(spacings[n] >= (10_000 if n <= 9 else 3_000) for n in spacings)
    total = sum(t for _, t in qubit_sweeps.values())
    ok = within and decreasing and enough and total <= 3600
    detail = ", ".join(f"n={n}: {jc[n]:.4f} vs {pred[n]:.4f}" for n in jc) + f", {total:.0f}s"
    report(3, "qubit border J_c ~ 3.16/n", ok, detail)
    assert ok


def test_criterion_04_entropy_border(qubit_sweeps):
    parts, ok = [], True
    for n, (res, _) in qubit_sweeps.items():
        pred = predict_jcs_sgqc(1.0, n).value
        ratio = res.J_cs / res.J_c
        ok &= 0.5 <= res.J_cs / pred <= 2 and 0.065 <= ratio <= 0.26
        parts.append(f"n={n}: J_cs {res.J_cs:.4f} vs {pred:.4f}, J_cs/J_c {ratio:.3f}")
    report(4, "entropy border J_cs ~ 0.41/n", ok, "; ".join(parts))
    assert ok


def test_criterion_05_entropy_border_delta_scaling():
    deltas = (0.25, 0.5, 1.0)
    jcs = [run_sweep(qubit_sweep_config(6, d, seed=SEED), write=False).J_cs for d in deltas]
    slope = loglog_slope(deltas, jcs)
    ok = abs(slope - 1) <= 0.25
    report(5, "J_cs proportional to delta", ok, f"slope {slope:.3f}, J_cs {np.round(jcs, 4).tolist()}")
    assert ok


def test_criterion_06_fermion_border():
    parts, ok = [], True
    start = time.perf_counter()
    for m, n in ((10, 3), (12, 3), (12, 4)):
        res = run_sweep(fermion_sweep_config(m, n, seed=SEED), write=False)
        pred = predict_uc_tbrim(m, n).value
        ok &= res.J_c is not None and 0.5 <= res.J_c / pred <= 2
        parts.append(f"({m},{n}): {res.J_c:.4f} vs {pred:.4f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed <= 1800
    report(6, "fermion border U_c = 0.58 B/K", ok, "; ".join(parts) + f", {elapsed:.0f}s")
    assert ok


def test_criterion_07_participation_law():
    m, n = 14, 3
    uc = predict_uc_tbrim(m, n).value
    points = [ipr_point(m, n, f * uc, 6, SEED, g) for g, f in enumerate((1.5, 2.0, 2.5, 3.0, 4.0))]
    slope, intercept = ipr_coefficient(points)
    ok = 1 <= slope <= 4
    report(7, "xi vs U^2 rho_c rho_n coefficient", ok, f"slope {slope:.3f}, intercept {intercept:.2f}")
    assert ok


def test_criterion_08_breit_wigner_width():
    m, n = 14, 3
    fit, golden = tbrim_ldos(m, n, 2.0 * predict_uc_tbrim(m, n).value, 6, SEED)
    ratio = fit.width / golden
    ok = 0.5 <= ratio <= 2
    report(8, "LDOS width vs 2 pi U^2 rho_c / 3", ok, f"fit {fit.width:.4f}, formula {golden:.4f}")
    assert ok


def test_criterion_09_chaotic_time_scale():
    couplings = (0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    taus = tau_chi_scan(9, couplings, realizations=8, master_seed=SEED)
    slope = loglog_slope(couplings, taus)
    ok = abs(slope + 2) <= 0.3
    report(9, "tau_chi ~ J^-2", ok, f"slope {slope:.3f} over J in [0.4, 0.9]")
    assert ok


def test_criterion_10_entropy_growth():
    sat, parts, ok = {}, [], True
    for n in (9, 12):
        params = SGQCParams.square(n, 1.0, 1.0, 0.4, SEED)
        times = log_time_grid(params.J**2 * n / params.delta, 64, (-2, 3))
        run = register_evolution(params, times, 50, "band")
        S = run.record.entropy
        tail = S[times >= times[-1] / 10]
        sat[n] = float(tail.mean())
        saturated = np.ptp(tail) <= 0.05 * sat[n]
        ok &= S[0] == 0.0 and saturated and bool(np.all(S <= run.entropy_bound + 1e-9))
        parts.append(f"n={n}: S_sat {sat[n]:.3f} (spread {np.ptp(tail):.3f}), bound {run.entropy_bound:.3f}")
    ok &= sat[12] > sat[9]
    report(10, "entropy growth and saturation", ok, "; ".join(parts))
    assert ok


def test_criterion_11_melting_map():
    params = SGQCParams.square(12, 1.0, 1.0, 0.5, SEED)
    smax, dim = central_band_max_entropy(params)
    zero = melting_map(params.with_coupling(0.0), [0.0])
    ok = 9 <= smax <= 12 and smax <= math.log2(dim) and bool(np.all(zero.entropy == 0.0))
    report(11, "melting map at n=12", ok, f"max central-band S_q {smax:.3f}, J=0 column max {zero.entropy.max()}")
    assert ok


def test_criterion_12_classical_diffusion():
    start = time.perf_counter()
    E = classical_energy_trace(ClassicalEnsemble.line(1000, 20.0, 0.25, seed=SEED), 150)
    t = np.arange(50, 151)
    rate = float(np.mean(E[50:151] / (100 * t)))
    elapsed = time.perf_counter() - start
    ok = 0.8 <= rate <= 1.2 and elapsed < 60
    report(12, "classical diffusion E = k^2 t / 4", ok, f"E/(100 t) {rate:.3f}, {elapsed:.1f}s")
    assert ok


def test_criterion_13_classical_irreversibility():
    res = classical_reversal_experiment(5.0, 20.0, 150, 1e-12, 1000, seed=SEED)
    ok = res.divergence_step is not None and 15 <= res.divergence_step <= 35
    report(13, "classical reversal breaks down", ok, f"divergence after {res.divergence_step} steps")
    assert ok


def test_criterion_14_quantum_reversibility():
    res = quantum_reversal_experiment(20.0, 0.25, 150, 12)
    ok = res.fidelity > 1 - 1e-8 and res.max_norm_drift < 1e-13
    report(14, "quantum reversal", ok, f"1 - fidelity {1 - res.fidelity:.2e}, norm drift {res.max_norm_drift:.2e}")
    assert ok


def test_criterion_15_property_suite(tmp_path):
    failures = []

    def check(name, cond):
        if not cond:
            failures.append(name)

    for n, J in itertools.product((4, 6, 9), (0.0, 0.3, 1.0)):
        H = build_sgqc(SGQCParams.square(n, 1.0, 1.0, J, seed=n))
        check("qubit symmetry", abs(H.matrix - H.matrix.T).max() == 0)
        even, odd = parity_sectors(H)
        check("parity dims", even.dim + odd.dim == 2**n)
        check("band dims", sum(project_band(H, k).dim for k in range(n + 1)) == 2**n)
        for block in (even, odd):
            V = diagonalize(block).eigenvectors
            w = V**2
            check("overlap normalization", np.allclose(w.sum(axis=0), 1, atol=1e-9)
                  and np.allclose(w.sum(axis=1), 1, atol=1e-9))
            S, X = entropy_columns(V), ipr_columns(V)
            d = block.dim
            check("S_q bounds", np.all(S >= -1e-12) and np.all(S <= math.log2(d) + 1e-9))
            check("xi bounds", np.all(X >= 1 - 1e-9) and np.all(X <= d + 1e-9))
            check("xi <= 2^S_q", np.all(X <= 2**S * (1 + 1e-9)))
    for m, n in ((6, 2), (7, 3), (8, 4)):
        H = build_tbrim(TBRIMParams(m, n, 1.0, 0.2, seed=m))
        check("fermion symmetry", abs(H.matrix - H.matrix.T).max() == 0)
        check("fermion dim", H.dim == math.comb(m, n))
    for m in range(2, 9):
        for n in range(1, m):
            basis = fermion_basis(m, n)
            ref = int(basis[0]) if len(basis) else 0
            brute = sum(1 for b in basis if bin(int(b) ^ ref).count("1") <= 4)
            check(f"K({m},{n})", count_directly_coupled(m, n) == brute)
    a = run_sweep(qubit_sweep_config(6, seed=SEED, target_spacings=500, grid=(0.5, 2.0, 5.0), workers=1),
                  write=False)
    b = run_sweep(qubit_sweep_config(6, seed=SEED, target_spacings=500, grid=(0.5, 2.0, 5.0), workers=2),
                  write=False)
    check("scheduling independence", [r.eta for r in a.rows] == [r.eta for r in b.rows]
          and [r.mean_entropy for r in a.rows] == [r.mean_entropy for r in b.rows])
    ok = not failures
    report(15, "property suite", ok, "all properties hold" if ok else "failed: " + ", ".join(sorted(set(failures))))
    assert ok
