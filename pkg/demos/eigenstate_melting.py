"""Eigenstate entropy across the spectrum as the coupling is switched on.

For each coupling the register is diagonalized and every eigenstate's
entropy in the register basis is recorded; the mean over each unperturbed
band shows the quasi-particle picture melting band by band.
"""

# %%
import numpy as np

from qchaos import SGQCParams, melting_map

n = 8
params = SGQCParams.square(n, 1.0, 1.0, 0.0, seed=0)
mm = melting_map(params, [0.0, 0.1, 0.2, 0.3, 0.5])

edges = np.arange(-n - 1, n + 2, 2.0)
print("J     " + "".join(f"{0.5 * (a + b):6.1f}" for a, b in zip(edges[:-1], edges[1:])))
for J in np.unique(mm.J):
    sel = mm.J == J
    row = []
    for a, b in zip(edges[:-1], edges[1:]):
        inside = sel & (mm.energy >= a) & (mm.energy < b)
        row.append(mm.entropy[inside].mean() if inside.any() else np.nan)
    print(f"{J:4.2f}  " + "".join(f"{v:6.2f}" for v in row))
print(f"\nlargest entropy at J=0.5: {mm.entropy[mm.J == 0.5].max():.2f} (bound {n - 1})")
