"""
Column-stochastic witnesses
===========================

Two chains of majorization relations hold between squeezer outputs:
adding photons at fixed squeezing, and increasing squeezing at fixed
photon number.  Each comes with an explicit lower-triangular matrix.
"""

from fockmaj import build_D, build_R, majorizes, schmidt_vector, verify_transfer
from fockmaj.squeezer import auto_nmax

lam = 0.5
N = auto_nmax(2, lam)

# %%
# p^(k)(lam) -> p^(k+1)(lam)
d = build_D(1, lam, N)
rep = verify_transfer(d, schmidt_vector(0, lam, N), schmidt_vector(1, lam, N))
print("D:", {k: rep.as_dict()[k] for k in ("mapping_residual", "column_deficit", "passed")})
print("D @ D matches D^(2):", abs((d @ d).entries - build_D(2, lam, N).entries).max())

# %%
# p^(k)(lam') -> p^(k)(lam) for lam' < lam
for k in (0, 2, 5):
    N = auto_nmax(k, 0.8)
    r = build_R(k, 0.8, 0.2, N)
    rep = verify_transfer(r, schmidt_vector(k, 0.2, N), schmidt_vector(k, 0.8, N))
    print(f"R^({k}): mapping {rep.mapping_residual:.1e}  passed={rep.passed}")

# %%
# The closed-form R^(k) still maps the vectors but acquires negative
# entries once lam^2 < 1 - (1 - lam'^2)^(k+1).  The majorization itself,
# checked directly on prefix sums, is unaffected.
k, lam, lam_p = 2, 0.9, 0.7
N = auto_nmax(k, lam)
rep = verify_transfer(build_R(k, lam, lam_p, N), schmidt_vector(k, lam_p, N),
                      schmidt_vector(k, lam, N))
print(f"R^(2)(0.9, 0.7): min entry {rep.min_entry:.3e}, mapping {rep.mapping_residual:.1e}, "
      f"stochastic={rep.stochastic}")
v = majorizes(schmidt_vector(k, lam_p), schmidt_vector(k, lam))
print(f"prefix sums: holds={v.holds}, margin={v.margin:.2e}")
