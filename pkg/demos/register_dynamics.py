"""Time evolution from register basis states in the central band.

The survival probability decays on the chaotic time scale and the entropy
of the evolving state grows until it saturates below log2 of the band size.
"""

# %%
import numpy as np

from qchaos import SGQCParams
from qchaos.dynamics import extract_tau_chi, log_time_grid
from qchaos.harness.experiments import register_evolution

n, J = 9, 0.4
params = SGQCParams.square(n, 1.0, 1.0, J, seed=0)
gamma = J**2 * n
run = register_evolution(params, log_time_grid(gamma, 8, (-2, 3)), n_initial=30)
rec = run.record

print("      t      F(t)    S(t)")
for i in range(0, len(rec.times), 4):
    print(f"{rec.times[i]:8.3f}  {rec.survival[i]:6.3f}  {rec.entropy[i]:6.3f}")
print(f"\ntau_chi = {extract_tau_chi(rec):.3f},  1/(J^2 n) = {1 / gamma:.3f}")
print(f"late-time entropy {np.mean(rec.entropy[-8:]):.2f}, bound log2(band dim) = {run.entropy_bound:.2f}")
