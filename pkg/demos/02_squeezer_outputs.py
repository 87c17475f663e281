"""
Squeezer outputs and their Schmidt spectra
==========================================

A Fock input ``|k>`` leaves the two-mode squeezer with the closed-form
Schmidt coefficients ``p^(k)``.  Superpositions need an SVD.  For weak
squeezing the spectrum collapses onto two terms set by the mean photon
number.
"""

import math

import numpy as np

from fockmaj import (
    FockState,
    infinitesimal_approx,
    normalize,
    output_entanglement,
    output_spectrum,
    schmidt_vector,
    tmsv_entropy,
)

# %%
r = 0.6
lam = math.tanh(r)
for k in range(4):
    svd = output_spectrum(FockState.fock(k), r).probs
    closed = schmidt_vector(k, lam).sorted().probs
    print(f"|{k}>: leading coefficients {np.round(svd[:4], 6)}  "
          f"max diff vs closed form {np.abs(svd[:closed.size] - closed).max():.1e}")

# %%
# Vacuum gives the two-mode squeezed vacuum.
print(f"E[vacuum] = {output_entanglement(FockState.fock(0), r):.12f}, "
      f"closed form {tmsv_entropy(r):.12f}")

# %%
# A superposition with mean photon number 1.6.
phi = normalize([0, math.sqrt(0.4), math.sqrt(0.6)])
print(f"E[phi] = {output_entanglement(phi, r):.6f}, E[|1>] = "
      f"{output_entanglement(FockState.fock(1), r):.6f}")

# %%
# Weak squeezing: error of the two-term form drops by ~4 per halving of r.
for k in (0, 1, 3):
    devs = [infinitesimal_approx(FockState.fock(k), x)[2] for x in (0.02, 0.01, 0.005)]
    print(f"|{k}>: deviations {['%.2e' % d for d in devs]}  "
          f"ratios {devs[0] / devs[1]:.3f}, {devs[1] / devs[2]:.3f}")
