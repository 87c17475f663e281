"""
Entanglement of Fock inputs
===========================

A plot-ready table of ``E[Psi^(k)]`` against squeezing, monotone in both
``r`` and ``k``.  Pipe the CSV into any plotting tool.
"""

import numpy as np

from fockmaj import fock_scan

scan = fock_scan(5, np.linspace(0.0, 1.5, 7))
print("r     " + "  ".join(f"k={k:<6}" for k in range(6)))
for r, row in zip(scan.r_grid, scan.table):
    print(f"{r:<5.2f} " + "  ".join(f"{e:<8.4f}" for e in row))
print("monotone in r:", scan.monotone_in_r(), " monotone in k:", scan.monotone_in_k())
