"""Interacting fermions: chaos border, participation numbers and the LDOS.

Three particles on twelve orbitals with random two-body matrix elements.
"""

# %%
from qchaos.harness.experiments import ipr_coefficient, ipr_point, tbrim_ldos
from qchaos.harness.figures import fermion_sweep_config
from qchaos.harness.sweep import run_sweep
from qchaos.models import count_directly_coupled
from qchaos.theory import predict_uc_tbrim, two_body_interval

m, n = 12, 3
uc = predict_uc_tbrim(m, n).value
print(f"m={m}, n={n}: K={count_directly_coupled(m, n)} directly coupled states, "
      f"B={two_body_interval(m)}, estimated U_c={uc:.4f}")

res = run_sweep(fermion_sweep_config(m, n, target_spacings=3000), write=False)
print("measured U_c = %.4f" % res.J_c)

# %% participation numbers in the chaotic regime
points = [ipr_point(m, n, f * uc, 4, 0, g) for g, f in enumerate((1.5, 2.0, 3.0, 4.0))]
for p in points:
    print(f"U={p.U:.3f}  U^2 rho_c rho_n={p.x:7.2f}  <xi>={p.mean_ipr:7.2f}")
slope, intercept = ipr_coefficient(points)
print(f"<xi> ~ {slope:.2f} U^2 rho_c rho_n + {intercept:.2f}")

# %% local density of states
fit, golden = tbrim_ldos(m, n, 2 * uc, 4)
print(f"\nLorentzian width {fit.width:.4f}, golden rule {golden:.4f}")
