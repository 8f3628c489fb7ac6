"""Disorder-averaged sweep for a 6-qubit register.

Runs the sweep engine on the standard coupling grid with reduced statistics
and compares the two measured borders with their closed-form estimates.
"""

# %%
from qchaos.harness.figures import qubit_sweep_config
from qchaos.harness.sweep import run_sweep
from qchaos.theory import predict_jc_sgqc, predict_jcs_sgqc

n = 6
cfg = qubit_sweep_config(n, target_spacings=3000, seed=0)
res = run_sweep(cfg, write=False)

print("    J      eta   stderr   <S_q>   <xi>")
for r in res.rows:
    print(f"{r.coupling:6.3f}  {r.eta:6.3f}  {r.stderr:6.3f}  {r.mean_entropy:6.3f}  {r.mean_ipr:6.2f}")

# %%
print(f"\nchaos border   J_c  = {res.J_c:.4f}   (estimate {predict_jc_sgqc(1.0, n).value:.4f})")
print(f"entropy border J_cs = {res.J_cs:.4f}   (estimate {predict_jcs_sgqc(1.0, n).value:.4f})")
print(f"{res.rows[0].n_realizations} realizations per point, {res.wall_time:.1f} s")
