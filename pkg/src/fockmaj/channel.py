"""Phase-insensitive Gaussian channels and their loss-then-amplify split.

Quadratures are scaled so that the vacuum covariance is the identity.  A
channel ``(tau, n)`` acts on first and second moments as

    mean -> sqrt(tau) * mean,    cov -> tau * cov + n * I,

and factorizes as a pure-loss channel of transmissivity ``T`` followed by a
quantum-limited amplifier of gain ``G``, with ``tau = T G`` and
``n = G (1 - T) + (G - 1)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, InvalidState, NotCompletelyPositive, TruncationError
from .fock import DEFAULT_EPS, DensityMatrix, entropy, log_binom
from .squeezer import schmidt_probs, schmidt_tail


@dataclass(frozen=True)
class ChannelParams:
    tau: float
    noise: float

    def __post_init__(self):
        if not self.tau > 0:
            raise InvalidParameter(f"tau must be positive, got {self.tau!r}")
        if not self.noise >= 0:
            raise InvalidParameter(f"noise must be nonnegative, got {self.noise!r}")

    @property
    def cp_margin(self):
        """``n - |tau - 1|``; negative values violate complete positivity."""
        return self.noise - abs(self.tau - 1.0)

    @property
    def is_cp(self):
        return self.cp_margin >= 0


@dataclass(frozen=True)
class ChannelDecomposition:
    T: float
    G: float

    @property
    def r(self):
        return math.acosh(math.sqrt(self.G))

    @property
    def lam(self):
        """``tanh r``, equivalently ``sqrt(1 - 1/G)``."""
        return math.sqrt(1.0 - 1.0 / self.G)

    @property
    def tau(self):
        return self.T * self.G

    @property
    def noise(self):
        return self.G * (1.0 - self.T) + (self.G - 1.0)


@dataclass(frozen=True)
class GaussianMoments:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if not np.allclose(cov, cov.T, atol=1e-12):
            raise InvalidState("covariance matrix must be symmetric")
        if np.linalg.det(cov) < 1.0 - 1e-12:
            raise InvalidState(f"det(cov) = {np.linalg.det(cov)!r} violates uncertainty")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def vacuum(cls):
        return cls(np.zeros(2), np.eye(2))


def decompose(params, tol=1e-12):
    """Split a CP channel into loss ``T`` followed by amplification ``G``.

    Raises
    ------
    NotCompletelyPositive
        If ``noise < |tau - 1|`` beyond ``tol``.
    """
    if not isinstance(params, ChannelParams):
        params = ChannelParams(*params)
    if params.cp_margin < -tol:
        deficit = -params.cp_margin
        raise NotCompletelyPositive(
            f"noise {params.noise} < |tau - 1| = {abs(params.tau - 1)} (deficit {deficit:.6g})",
            deficit)
    g = (params.noise + params.tau + 1.0) / 2.0
    g = max(g, 1.0)
    t = min(params.tau / g, 1.0)
    return ChannelDecomposition(T=t, G=g)


def moment_map(moments, params):
    tau, n = params.tau, params.noise
    return GaussianMoments(math.sqrt(tau) * moments.mean, tau * moments.cov + n * np.eye(2))


def loss_params(T):
    return ChannelParams(T, 1.0 - T)


def amp_params(G):
    return ChannelParams(G, G - 1.0)


def thermal_entropy(nbar):
    """Entropy ``g(x) = (x+1) ln(x+1) - x ln x`` of a thermal state."""
    if nbar <= 0:
        return 0.0
    return (nbar + 1) * math.log1p(nbar) - nbar * math.log(nbar)


def gaussian_output_entropy(params):
    """Output entropy of the channel on vacuum, from the symplectic eigenvalue."""
    nu = params.tau + params.noise
    return thermal_entropy((nu - 1.0) / 2.0)


def _as_rho(rho):
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(np.asarray(rho))


def loss_kraus(T, dim):
    """Kraus operators ``A_m`` of the pure-loss channel on ``dim`` levels."""
    if not 0.0 <= T <= 1.0:
        raise InvalidParameter(f"transmissivity must lie in [0, 1], got {T!r}")
    n = np.arange(dim)
    ops = []
    for m in range(dim):
        a = np.zeros((dim, dim))
        src = n[m:]
        amp = (np.sqrt(np.exp(log_binom(src, m))) * math.sqrt(T) ** (src - m)
               * math.sqrt(1.0 - T) ** m)
        a[src - m, src] = amp
        ops.append(a)
    return ops


def apply_loss(rho, T):
    """Pure-loss channel of transmissivity ``T`` in Kraus form."""
    rho = _as_rho(rho)
    out = np.zeros_like(rho.entries)
    for a in loss_kraus(T, rho.dim):
        out += a @ rho.entries @ a.T
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out, rho.omitted_mass)


def _amp_omitted(diag, lam, out_dim):
    return sum(float(w) * schmidt_tail(a, lam, out_dim - 1 - a)
               for a, w in enumerate(diag) if w > 0)


def amp_required_dim(rho, G, eps=DEFAULT_EPS):
    """Smallest output dimension for which :func:`apply_amp` drops < ``eps``."""
    rho = _as_rho(rho)
    lam = math.sqrt(1.0 - 1.0 / G)
    diag = np.clip(np.diag(rho.entries).real, 0.0, None)
    lo, hi = rho.dim - 1, max(rho.dim, 2)
    while _amp_omitted(diag, lam, hi) >= eps:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _amp_omitted(diag, lam, mid) < eps:
            hi = mid
        else:
            lo = mid
    return hi


def apply_amp(rho, G, out_dim=None, eps=DEFAULT_EPS):
    """Quantum-limited amplifier of gain ``G``.

    The squeezer maps ``|a>`` to ``sum_n sqrt(p_n^(a)) |a+n>|n>_E``, so
    tracing out the environment gives
    ``out[a+n, b+n] += rho[a, b] sqrt(p_n^(a) p_n^(b))`` with
    ``lam^2 = 1 - 1/G``.
    """
    rho = _as_rho(rho)
    if not G >= 1.0:
        raise InvalidParameter(f"gain must be >= 1, got {G!r}")
    d = rho.dim
    if out_dim is None:
        out_dim = amp_required_dim(rho, G, eps)
    if out_dim < d:
        raise TruncationError(f"out_dim {out_dim} smaller than input dimension {d}",
                              required=d)
    lam = math.sqrt(1.0 - 1.0 / G)
    diag = np.clip(np.diag(rho.entries).real, 0.0, None)
    omitted = _amp_omitted(diag, lam, out_dim)
    if omitted >= eps:
        raise TruncationError(
            f"out_dim {out_dim} omits trace {omitted:.3g} >= {eps:g}",
            required=amp_required_dim(rho, G, eps))
    out = np.zeros((out_dim, out_dim), dtype=complex)
    a = np.arange(d)
    for n in range(out_dim):
        w = np.sqrt(schmidt_probs(a, lam, n)) if lam > 0 else np.full(d, float(n == 0))
        keep = a + n < out_dim
        if not keep.any():
            break
        idx = a[keep] + n
        out[np.ix_(idx, idx)] += rho.entries[np.ix_(keep, keep)] * np.outer(w[keep], w[keep])
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out, rho.omitted_mass + omitted)


def apply_channel(rho, params, out_dim=None, eps=DEFAULT_EPS):
    """Phase-insensitive channel as amplification after loss."""
    dec = decompose(params)
    return apply_amp(apply_loss(rho, dec.T), dec.G, out_dim, eps)


def density_entropy(rho, unit="nats"):
    return entropy(_as_rho(rho).spectrum(), unit)
