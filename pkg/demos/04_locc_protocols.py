"""
Deterministic LOCC conversions
==============================

Each majorization relation has a local protocol behind it.  Bob measures,
Alice shifts her photon number, and every outcome lands on the same target
state.
"""

from fockmaj import bs_attenuate, povm_reduce

# %%
# |Psi^(2)> -> |Psi^(0)> at lam = 0.5 by one POVM.
trace = povm_reduce(0, 2, 0.5)
for o in trace.outcomes[:5]:
    print(f"{o.label:>6}: probability {o.probability:.6f}, fidelity {o.fidelity:.12f}")
print(f"... {len(trace.outcomes)} outcomes, completeness residual {trace.completeness_residual:.1e}")
print(f"entanglement {trace.initial_entanglement:.6f} -> {trace.final_entanglement:.6f}")

# %%
# Beam-splitter attenuation lam = 0.6 -> lam' = 0.3, then photon-count correction.
trace = bs_attenuate(1, 0.6, 0.3)
print(f"T = {trace.checks['T']}, photocount law error {trace.checks['law_error']:.1e}")
print(f"{len(trace.outcomes)} branches, worst fidelity "
      f"{min(o.fidelity for o in trace.outcomes):.12f}")
print(f"total probability {trace.total_probability:.12f} "
      f"(+ omitted {trace.omitted_probability:.1e})")
