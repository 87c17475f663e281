"""Majorization checks and explicit column-stochastic witness matrices.

``p`` majorizes ``q`` when every descending prefix sum of ``p`` dominates
the matching prefix sum of ``q``.  Equivalently ``q = D p`` for some
column-stochastic ``D``.  The families built here are the lower-triangular
witnesses for the two squeezer majorization chains:

* ``build_D(dk)`` maps ``p^(k)(lam)`` to ``p^(k+dk)(lam)``;
* ``build_R(k)`` maps ``p^(k)(lam')`` to ``p^(k)(lam)`` for ``lam' < lam``.

Every matrix is truncated to ``(N+1) x (N+1)`` and carries the exact mass
each column loses to the truncation.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc, gammaln

from .errors import InconclusiveTruncation, InvalidParameter
from .fock import ProbabilityVector, compensated_cumsum, entropy, log_binom

DEFAULT_ETA = 1e-9


@dataclass(frozen=True)
class MajorizationVerdict:
    holds: bool
    margin: float
    first_violation: int | None = None


def majorizes(p, q, eta=DEFAULT_ETA):
    """Decide ``p ≻ q`` by comparing sorted prefix sums.

    The shorter vector is zero-padded.  ``margin`` is the smallest gap
    ``prefix_p(m) - prefix_q(m)`` over all ``m``; the relation holds when
    the margin is at least ``-eta``.
    """
    p = p if isinstance(p, ProbabilityVector) else ProbabilityVector(p)
    q = q if isinstance(q, ProbabilityVector) else ProbabilityVector(q)
    if p.tail_mass >= eta or q.tail_mass >= eta:
        raise InconclusiveTruncation(
            f"tail masses ({p.tail_mass:.3g}, {q.tail_mass:.3g}) not below eta={eta:g}")
    size = max(len(p), len(q))
    a = np.zeros(size)
    b = np.zeros(size)
    a[:len(p)] = np.sort(p.probs)[::-1]
    b[:len(q)] = np.sort(q.probs)[::-1]
    gaps = compensated_cumsum(a - b)
    i = int(np.argmin(gaps))
    margin = float(gaps[i])
    bad = np.nonzero(gaps < -eta)[0]
    first = int(bad[0]) if bad.size else None
    return MajorizationVerdict(margin >= -eta, margin, first)


@dataclass(frozen=True)
class TransferMatrix:
    """Truncated column-stochastic matrix with per-column tail deficits."""

    entries: np.ndarray
    column_tail: np.ndarray
    name: str = field(default="")

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        t = np.array(self.column_tail, dtype=float).ravel()
        if m.ndim != 2 or m.shape[0] != m.shape[1] or t.size != m.shape[1]:
            raise ValueError("transfer matrix must be square with one tail per column")
        m.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "column_tail", t)

    @property
    def size(self):
        return self.entries.shape[0]

    def __matmul__(self, other):
        if isinstance(other, TransferMatrix):
            prod = self.entries @ other.entries
            # mass leaving the truncation through either factor
            tail = 1.0 - prod.sum(axis=0)
            return TransferMatrix(prod, np.clip(tail, 0.0, None))
        if isinstance(other, ProbabilityVector):
            return self.entries @ other.probs
        return self.entries @ np.asarray(other)

    def with_entry(self, i, j, value):
        """Copy with one entry replaced (used to build negative test cases)."""
        m = self.entries.copy()
        m[i, j] = value
        return TransferMatrix(m, self.column_tail, self.name)


def _offsets(n_max):
    idx = np.arange(n_max + 1)
    return idx[:, None] - idx[None, :]


def build_D(delta_k, lam, n_max):
    """Witness for ``p^(k)(lam) -> p^(k + delta_k)(lam)``.

    ``D[n, m] = (1-lam^2)^dk binom(n-m+dk-1, dk-1) lam^(2(n-m))`` for
    ``n >= m``; this is the ``dk``-th power of the ``dk = 1`` matrix.
    Column ``m`` loses the negative-binomial tail beyond offset ``N - m``.
    """
    if delta_k < 1:
        raise InvalidParameter(f"delta_k must be >= 1, got {delta_k!r}")
    if not 0.0 <= lam < 1.0:
        raise InvalidParameter(f"lambda must lie in [0, 1), got {lam!r}")
    off = _offsets(n_max)
    lower = off >= 0
    j = np.where(lower, off, 0)
    if lam == 0.0:
        entries = (off == 0).astype(float)
        tail = np.zeros(n_max + 1)
    else:
        logd = (delta_k * math.log1p(-lam * lam) + log_binom(j + delta_k - 1, delta_k - 1)
                + 2 * j * math.log(lam))
        entries = np.where(lower, np.exp(logd), 0.0)
        remaining = n_max - np.arange(n_max + 1)
        tail = betainc(remaining + 1, delta_k, lam * lam)
    return TransferMatrix(entries, tail, f"D^({delta_k})")


def incomplete_beta(z, a, b):
    """``B(z; a, b) = int_0^z x^(a-1) (1-x)^(b-1) dx`` for integer ``a, b``.

    Uses the finite binomial sum
    ``B(z;a,b) = (a-1)!(b-1)!/(a+b-1)! * sum_{j=a}^{a+b-1} C(a+b-1, j) z^j (1-z)^(a+b-1-j)``.
    For ``a = 0`` the integral diverges; the value returned is the limit of
    ``a * B(z; a, b)``, which is 1, so callers must multiply by ``a``
    only through :func:`scaled_incomplete_beta`.
    """
    if not 0.0 <= z <= 1.0:
        raise InvalidParameter(f"z must lie in [0, 1], got {z!r}")
    if a < 0 or b < 1 or int(a) != a or int(b) != b:
        raise InvalidParameter(f"need integers a >= 0, b >= 1, got a={a!r}, b={b!r}")
    a, b = int(a), int(b)
    if a == 0:
        return 1.0
    return z**a * _beta_poly(z, a, b) * math.exp(_log_beta(a, b))


def _log_beta(a, b):
    return float(gammaln(a) + gammaln(b) - gammaln(a + b))


def _beta_poly(z, a, b):
    """``z^-a * I_z(a, b)``: a positive finite sum, safe for tiny ``z``."""
    s = a + b - 1
    i = np.arange(b)
    terms = np.exp(log_binom(s, a + i)) * z**i * (1.0 - z) ** (b - 1 - i)
    return math.fsum(terms.tolist())


def scaled_incomplete_beta(z, a, b):
    """``a * z^-a * B(z; a, b)``, finite for all ``z`` and equal to 1 at ``a = 0``."""
    if a == 0:
        return 1.0
    a, b = int(a), int(b)
    return a * math.exp(_log_beta(a, b)) * _beta_poly(z, a, b)


def _column_weight(k, lam_p, n):
    """``binom(n+k, k) * n * lam'^(-2n) * B(lam'^2; n, k+1)``."""
    return math.exp(log_binom(n + k, k)) * scaled_incomplete_beta(lam_p * lam_p, n, k + 1)


def build_R(k, lam, lam_prime, n_max):
    """Witness for ``p^(k)(lam') -> p^(k)(lam)`` when ``lam' < lam``.

    Column ``n`` holds ``r_m^(k,n)`` at row ``n + m`` with

        r_m = c^(k+1) / binom(n+k, n) * (L_m^(k,n) lam^2 - L_{m-1}^(k,n+1) lam'^2) lam^(2(m-1)),
        L_m^(k,n) = binom(m+k, k) * w_n,   c = (1-lam^2)/(1-lam'^2),

    where ``w_n`` is :func:`_column_weight`.  For ``k = 0`` every column is
    ``c (lam^2 - [m>=1] lam'^2) lam^(2(m-1))``.
    """
    if not 0.0 <= lam_prime < lam < 1.0:
        raise InvalidParameter(f"need 0 <= lambda' < lambda < 1, got {lam_prime!r}, {lam!r}")
    z = lam_prime * lam_prime
    lam2 = lam * lam
    logc = (k + 1) * (math.log1p(-lam2) - math.log1p(-z))
    w = np.array([_column_weight(k, lam_prime, n) for n in range(n_max + 2)])
    size = n_max + 1
    entries = np.zeros((size, size))
    tail = np.zeros(size)
    m_all = np.arange(size)
    log_bm = log_binom(m_all + k, k)
    for n in range(size):
        m = m_all[:size - n]
        lead = np.exp(logc - log_binom(n + k, n) + log_bm[m] + 2 * (m - 1) * math.log(lam))
        prev = np.zeros(m.size)
        prev[1:] = np.exp(logc - log_binom(n + k, n) + log_bm[m[1:] - 1]
                          + 2 * (m[1:] - 1) * math.log(lam))
        entries[n + m, n] = lead * w[n] * lam2 - prev * w[n + 1] * z
        # exact remainder of the column series beyond m = n_max - n
        mm = n_max - n
        scale = math.exp(logc - log_binom(n + k, n) - (k + 1) * math.log1p(-lam2))
        upper = betainc(mm, k + 1, lam2) if mm >= 1 else 1.0
        tail[n] = scale * (w[n] * betainc(mm + 1, k + 1, lam2) - w[n + 1] * z * upper)
    return TransferMatrix(entries, tail, f"R^({k})")


def r_vector(lam, lam_prime, n_max):
    """Common column of the ``k = 0`` witness, straight from its closed form."""
    m = np.arange(n_max + 1)
    c = (1 - lam**2) / (1 - lam_prime**2)
    step = np.where(m >= 1, lam_prime**2, 0.0)
    return c * (lam**2 - step) * lam ** (2.0 * (m - 1))


@dataclass(frozen=True)
class TransferReport:
    column_deficit: float
    min_entry: float
    max_row_sum: float
    mapping_residual: float
    entropy_delta: float
    tol: float = 1e-10
    mapping_tol: float = 1e-10

    @property
    def stochastic(self):
        return (self.column_deficit <= self.tol and self.min_entry >= -self.tol
                and self.max_row_sum <= 1.0 + self.tol)

    @property
    def maps(self):
        return self.mapping_residual <= self.mapping_tol

    @property
    def entropy_nondecreasing(self):
        return self.entropy_delta >= -self.tol

    @property
    def passed(self):
        return self.stochastic and self.maps and self.entropy_nondecreasing

    def as_dict(self):
        return {
            "column_deficit": self.column_deficit,
            "min_entry": self.min_entry,
            "max_row_sum": self.max_row_sum,
            "mapping_residual": self.mapping_residual,
            "entropy_delta": self.entropy_delta,
            "stochastic": self.stochastic,
            "maps": self.maps,
            "entropy_nondecreasing": self.entropy_nondecreasing,
            "passed": self.passed,
        }


def verify_transfer(mat, p_in, p_out, tol=1e-10, mapping_tol=1e-10):
    """Check stochasticity of ``mat`` and that it carries ``p_in`` to ``p_out``."""
    m = mat.entries
    p_in = p_in.probs if isinstance(p_in, ProbabilityVector) else np.asarray(p_in, float)
    p_out = p_out.probs if isinstance(p_out, ProbabilityVector) else np.asarray(p_out, float)
    size = m.shape[0]
    x = np.zeros(size)
    y = np.zeros(size)
    x[:min(size, p_in.size)] = p_in[:size]
    y[:min(size, p_out.size)] = p_out[:size]
    deficit = float(np.abs(m.sum(axis=0) + mat.column_tail - 1.0).max())
    mapped = m @ x
    return TransferReport(
        column_deficit=deficit,
        min_entry=float(m.min()),
        max_row_sum=float(m.sum(axis=1).max()),
        mapping_residual=float(np.abs(mapped - y).max()),
        entropy_delta=entropy(np.clip(mapped, 0.0, None)) - entropy(x),
        tol=tol,
        mapping_tol=mapping_tol,
    )
