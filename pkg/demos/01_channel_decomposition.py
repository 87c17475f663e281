"""
Loss followed by amplification
==============================

Every phase-insensitive Gaussian channel ``(tau, n)`` that is completely
positive splits into a pure-loss stage of transmissivity ``T`` and a
quantum-limited amplifier of gain ``G``.  Its vacuum output entropy is then
fixed by the amplifier alone.
"""

import numpy as np

from fockmaj import (
    ChannelParams,
    DensityMatrix,
    FockState,
    NotCompletelyPositive,
    apply_channel,
    decompose,
    density_entropy,
    gaussian_output_entropy,
    normalize,
)

# %%
# A few channels, including the three limiting families.
for tau, n in [(2.0, 1.0), (0.5, 0.5), (1.0, 2.0), (0.5, 1.0), (2.0, 1.5)]:
    d = decompose(ChannelParams(tau, n))
    print(f"tau={tau:<4} n={n:<4} -> T={d.T:.4f}  G={d.G:.4f}  r={d.r:.4f}")

# %%
# Noise below |tau - 1| is not a physical channel.
try:
    decompose(ChannelParams(0.5, 0.2))
except NotCompletelyPositive as exc:
    print("rejected:", exc)

# %%
# Fock-space simulation against the symplectic-eigenvalue entropy.
vac = DensityMatrix.pure(FockState.fock(0))
for tau, n in [(1, 2), (0.5, 1), (2, 1.5)]:
    params = ChannelParams(tau, n)
    sim = density_entropy(apply_channel(vac, params))
    print(f"S(vacuum out) simulated {sim:.10f}  closed form {gaussian_output_entropy(params):.10f}")

# %%
# Random inputs never beat the vacuum output entropy.
rng = np.random.default_rng(0)
params = ChannelParams(1, 2)
floor = gaussian_output_entropy(params)
gaps = []
for _ in range(20):
    phi = normalize(rng.standard_normal(8) + 1j * rng.standard_normal(8))
    gaps.append(density_entropy(apply_channel(DensityMatrix.pure(phi), params)) - floor)
print(f"smallest excess entropy over 20 random inputs: {min(gaps):.4f}")
