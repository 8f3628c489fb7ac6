"""Level-spacing statistics: from Poisson to Wigner-Dyson.

Calibrates the eta statistic on synthetic spacings, checks it on a Gaussian
orthogonal matrix, then watches the central levels of a 10-qubit register
move from one limit to the other as the coupling grows.
"""

# %%
import numpy as np

from qchaos import SGQCParams, build_sgqc, central_band, diagonalize, eta, parity_sectors, unfold
from qchaos.spectra import sample_poisson_spacings, sample_wigner_spacings

rng = np.random.default_rng(0)
print("Poisson spacings:  eta = %.3f" % eta(sample_poisson_spacings(rng, 100_000)).eta)
print("Wigner surmise:    eta = %.3f" % eta(sample_wigner_spacings(rng, 100_000)).eta)

# %% a single 1000 x 1000 real symmetric Gaussian matrix
A = rng.normal(size=(1000, 1000))
E = np.linalg.eigvalsh(A + A.T)
print("GOE matrix:        eta = %.3f" % eta(unfold(E, 0.5, 10)).eta)

# %% the register: one parity sector, central half of its spectrum,
# spacings pooled over eight disorder realizations
n = 10
print(f"\n{n}-qubit register, delta = Delta0 = 1")
print("   J     eta")
for J in (0.05, 0.1, 0.2, 0.3, 0.5, 0.8):
    pooled = []
    for seed in range(8):
        H = build_sgqc(SGQCParams.square(n, 1.0, 1.0, J, seed=seed))
        block = parity_sectors(H)[central_band(n) % 2]
        pooled.append(unfold(diagonalize(block).eigenvalues, 0.5, 10).spacings)
    print(f"{J:5.2f}  {eta(np.concatenate(pooled)).eta:6.3f}")
