"""Two-mode squeezer outputs in the Fock basis.

A Fock input ``|k>`` leaves the squeezer (environment in vacuum) as

    |Psi_k> = sum_n sqrt(p_n^(k)) |n + k>_A |n>_E,
    p_n^(k) = (1 - lam^2)^(k+1) lam^(2n) binom(n + k, n),

with ``lam = tanh(r)``.  All internals are keyed on ``lam``; ``r`` is only
accepted at the public boundary.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import InvalidParameter, PreconditionViolated, TruncationError
from .fock import (
    DEFAULT_EPS,
    BipartiteAmplitudeMatrix,
    ProbabilityVector,
    entropy,
    entropy_tail_bound,
    log_binom,
    schmidt_spectrum,
    state_moments,
)

MAX_LEVELS = 200_000


@dataclass(frozen=True)
class SqueezeParam:
    r: float

    def __post_init__(self):
        if not self.r >= 0:
            raise InvalidParameter(f"squeeze parameter must be >= 0, got {self.r!r}")

    @property
    def lam(self):
        return math.tanh(self.r)

    @property
    def gain(self):
        return math.cosh(self.r) ** 2

    @classmethod
    def from_lambda(cls, lam):
        _check_lambda(lam)
        return cls(math.atanh(lam))


def _check_lambda(lam):
    if not 0.0 <= lam < 1.0:
        raise InvalidParameter(f"lambda must lie in [0, 1), got {lam!r}")


def schmidt_probs(k, lam, n):
    """Closed-form ``p_n^(k)(lam)`` for an array of ``n`` (no validation)."""
    n = np.asarray(n)
    if lam == 0.0:
        return (n == 0).astype(float)
    logp = ((k + 1) * math.log1p(-lam * lam) + 2 * n * math.log(lam)
            + log_binom(n + k, n))
    return np.exp(logp)


def schmidt_tail(k, lam, n_max):
    """Exact mass of ``p^(k)(lam)`` beyond index ``n_max``."""
    if n_max < 0:
        return 1.0
    if lam == 0.0:
        return 0.0
    return float(betainc(n_max + 1, k + 1, lam * lam))


def auto_nmax(k, lam, eps=DEFAULT_EPS):
    """Smallest ``N`` with ``schmidt_tail(k, lam, N) < eps``."""
    _check_lambda(lam)
    if lam == 0.0:
        return 0
    lam2 = lam * lam
    # geometric jump-ahead from the mean, then exact search
    mean = (k + 1) * lam2 / (1 - lam2)
    hi = max(1, int(mean + 1))
    while schmidt_tail(k, lam, hi) >= eps:
        hi *= 2
        if hi > MAX_LEVELS:
            raise TruncationError(f"tail of p^({k}) at lambda={lam} needs more than "
                                  f"{MAX_LEVELS} levels")
    lo = -1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if schmidt_tail(k, lam, mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


def schmidt_vector(k, lam, n_max=None, eps=DEFAULT_EPS):
    """Schmidt coefficients ``p_n^(k)(lam)`` for ``n = 0..n_max``.

    When ``n_max`` is omitted it is chosen so that the exact residual mass
    is below ``eps``.  The residual is stored as ``tail_mass``.
    """
    _check_lambda(lam)
    if k < 0:
        raise InvalidParameter(f"k must be >= 0, got {k!r}")
    if n_max is None:
        n_max = auto_nmax(k, lam, eps)
    p = schmidt_probs(k, lam, np.arange(n_max + 1))
    return ProbabilityVector(p, schmidt_tail(k, lam, n_max))


def env_dim(state, lam, eps=DEFAULT_EPS):
    """Environment levels needed so the omitted joint mass is below ``eps``."""
    weights = np.abs(state.amplitudes) ** 2
    ks = np.nonzero(weights > 0)[0]
    n_max = max(auto_nmax(int(k), lam, eps) for k in ks)
    return n_max + 1


def output_state(state, r, b_dim=None, eps=DEFAULT_EPS):
    """Joint output ``U(r)(|phi> |0>)`` as an amplitude matrix.

    ``M[n + k, n] = c_k sqrt(p_n^(k)(tanh r))`` summed over ``k``.  Alice's
    dimension is ``state.dim + b_dim``.
    """
    if r < 0:
        raise InvalidParameter(f"squeeze parameter must be >= 0, got {r!r}")
    return _output_state_lam(state, math.tanh(r), b_dim, eps)


def _output_state_lam(state, lam, b_dim, eps):
    c = state.amplitudes
    if b_dim is None:
        b_dim = env_dim(state, lam, eps)
    n = np.arange(b_dim)
    m = np.zeros((state.dim + b_dim, b_dim), dtype=complex)
    omitted = 0.0
    for k in np.nonzero(c)[0]:
        k = int(k)
        m[n + k, n] += c[k] * np.sqrt(schmidt_probs(k, lam, n))
        omitted += abs(c[k]) ** 2 * schmidt_tail(k, lam, b_dim - 1)
    if omitted >= eps:
        raise TruncationError(f"environment dimension {b_dim} omits {omitted:.3g} >= {eps:g}",
                              required=env_dim(state, lam, eps))
    return BipartiteAmplitudeMatrix(m, omitted)


def output_spectrum(state, r, b_dim=None, eps=DEFAULT_EPS):
    return schmidt_spectrum(output_state(state, r, b_dim, eps))


def output_entanglement(state, r, b_dim=None, eps=DEFAULT_EPS, unit="nats"):
    """Entanglement entropy of ``U(r)(|phi> |0>)`` across the A|E cut."""
    return entropy(output_spectrum(state, r, b_dim, eps), unit)


def output_entanglement_bound(state, r, b_dim=None, eps=DEFAULT_EPS, unit="nats"):
    """``(value, tail_bound)`` for the output entanglement."""
    p = output_spectrum(state, r, b_dim, eps)
    return entropy(p, unit), entropy_tail_bound(p, unit)


def tmsv_entropy(r):
    """Entanglement of the two-mode squeezed vacuum, in nats."""
    c2 = math.cosh(r) ** 2
    s2 = math.sinh(r) ** 2
    if s2 == 0.0:
        return 0.0
    return c2 * math.log(c2) - s2 * math.log(s2)


def infinitesimal_lambda(mean_photon, r):
    """Leading Schmidt coefficient of a weakly squeezed zero-mean input."""
    return 1.0 / (1.0 + r * r * (mean_photon + 1.0) / 4.0)


def infinitesimal_approx(state, r, b_dim=None, eps=DEFAULT_EPS, zero_mean_tol=1e-10):
    """Two-term Schmidt approximation for small squeezing.

    Returns ``(lambda_phi, spectrum, deviation)`` where ``spectrum`` is
    ``(lambda_phi, 1 - lambda_phi)`` and ``deviation`` is the max-norm
    distance to the exact output spectrum at the same ``r``.
    """
    nbar, mean_a = state_moments(state)
    if abs(mean_a) > zero_mean_tol:
        raise PreconditionViolated(f"input is not zero-mean: <a> = {mean_a:.3g}")
    lam_phi = infinitesimal_lambda(nbar, r)
    approx = ProbabilityVector(np.array([lam_phi, 1.0 - lam_phi]))
    exact = output_spectrum(state, r, b_dim, eps).probs
    padded = np.zeros(max(exact.size, 2))
    padded[:2] = approx.probs
    deviation = float(np.abs(padded[:exact.size] - exact).max())
    if exact.size < 2:
        deviation = max(deviation, abs(approx.probs[1]))
    return lam_phi, approx, deviation
