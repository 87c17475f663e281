"""
Looking for inputs that beat the vacuum
=======================================

Two empirical probes: seeded random superpositions checked for
majorization by the vacuum output, and a multi-start local search for the
least entangling input.  Neither finds anything below the vacuum.
"""

from fockmaj import ScanConfig, minimize_entropy, random_majorization_scan

# %%
report = random_majorization_scan(ScanConfig(dim=21, count=200, r=1.0, seed=1))
print({k: report[k] for k in ("samples", "checked", "violations", "worst_margin")})

# %%
chain = random_majorization_scan(ScanConfig(dim=10, count=50, r_grid=(0.25, 0.5, 1.0), seed=1))
print("r-chain mode:", {k: chain[k] for k in ("checked", "violations", "worst_margin")})

# %%
res = minimize_entropy(6, 0.8, restarts=8, seed=0)
print(f"best entropy {res.best_entropy:.12f}, vacuum {res.vacuum_entropy:.12f}, "
      f"gap {res.vacuum_gap:.2e}")
print("converged restarts:", sum(h["converged"] for h in res.per_restart_history), "/ 8")
