"""
An input that is less entangling than a single photon
=====================================================

``sqrt(0.4)|1> + sqrt(0.6)|2>`` carries 1.6 photons on average, more than
``|1>``, yet past a critical squeezing it produces less entanglement.
"""

import math

from fockmaj import FockState, crossing_finder, normalize, output_entanglement

phi = normalize([0, math.sqrt(0.4), math.sqrt(0.6)])
one = FockState.fock(1)
r_star = crossing_finder(phi, one, 0.3, 1.2, tol=1e-10)
print(f"crossing at r* = {r_star:.8f}")
for r in (0.5, r_star - 0.05, r_star + 0.05, 1.0):
    d = output_entanglement(phi, r) - output_entanglement(one, r)
    print(f"r = {r:.3f}: E[phi] - E[|1>] = {d:+.6f}")
