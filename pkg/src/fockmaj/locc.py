"""Exhaustive simulation of the deterministic LOCC conversions between
squeezer output states.

Two protocols are simulated on truncated Fock spaces:

``povm_reduce``
    Bob measures ``{B_m}`` and Alice undoes the photon-number offset with a
    shift; ``|Psi^(k+dk)_lam> -> |Psi^(k)_lam>`` for every outcome.
``bs_attenuate``
    Bob mixes his mode with vacuum on a beam-splitter and counts the
    reflected photons; outcome ``l`` leaves ``|Psi^(k+l)_lam'>``, which a
    ``povm_reduce`` step brings to ``|Psi^(k)_lam'>``.

Outcomes are enumerated up to a cutoff beyond which their total
probability is below ``eps``; truncation dimensions are sized so every
enumerated branch is represented to within ``eps``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

from .errors import InvalidParameter, ProtocolInconsistent
from .fock import DEFAULT_EPS, entropy, log_binom
from .squeezer import auto_nmax, schmidt_probs

FIDELITY_TOL = 1e-9


@dataclass(frozen=True)
class Outcome:
    label: str
    probability: float
    fidelity: float


@dataclass(frozen=True)
class ProtocolTrace:
    outcomes: tuple
    completeness_residual: float
    omitted_probability: float
    initial_entanglement: float
    final_entanglement: float
    checks: dict = field(default_factory=dict)

    @property
    def total_probability(self):
        return math.fsum(o.probability for o in self.outcomes)

    @property
    def deterministic(self):
        return all(o.fidelity >= 1.0 - FIDELITY_TOL for o in self.outcomes)

    @property
    def probability_residual(self):
        return abs(self.total_probability + self.omitted_probability - 1.0)

    def as_dict(self):
        return {
            "outcomes": [{"label": o.label, "probability": o.probability,
                          "fidelity": o.fidelity} for o in self.outcomes],
            "completeness_residual": self.completeness_residual,
            "omitted_probability": self.omitted_probability,
            "probability_residual": self.probability_residual,
            "deterministic": self.deterministic,
            "initial_entanglement": self.initial_entanglement,
            "final_entanglement": self.final_entanglement,
            "checks": self.checks,
        }


def psi(k, lam, b_dim):
    """``|Psi^(k)_lam>`` as an ``(b_dim + k) x b_dim`` amplitude matrix."""
    n = np.arange(b_dim)
    m = np.zeros((b_dim + k, b_dim))
    m[n + k, n] = np.sqrt(schmidt_probs(k, lam, n))
    return m


def shift_weights(delta_k, lam, m):
    """Outcome law ``(1-lam^2)^dk binom(m+dk-1, dk-1) lam^(2m)`` of the POVM."""
    m = np.asarray(m)
    if lam == 0.0:
        return (m == 0).astype(float)
    return np.exp(delta_k * math.log1p(-lam * lam) + log_binom(m + delta_k - 1, delta_k - 1)
                  + 2 * m * math.log(lam))


def _weights_cutoff(delta_k, lam, eps):
    """Smallest ``M`` with outcome mass beyond ``M`` below ``eps``."""
    if lam == 0.0:
        return 0
    return auto_nmax(delta_k - 1, lam, eps)


def povm_operators(k, delta_k, lam, b_dim, count=None):
    """Bob's measurement operators ``B_m`` for ``m = 0..count-1``.

    ``B_m = sum_l sqrt(w_m p^(k)_{l-m} / p^(k+dk)_l) |l-m><l|``.  Levels
    where ``p^(k+dk)_l`` vanishes (only at ``lam = 0``) are left out.
    """
    l = np.arange(b_dim)
    target = schmidt_probs(k + delta_k, lam, l)
    w = shift_weights(delta_k, lam, l)
    ops = []
    for m in range(b_dim if count is None else min(count, b_dim)):
        b = np.zeros((b_dim, b_dim))
        src = l[m:]
        ok = target[src] > 0
        src = src[ok]
        b[src - m, src] = np.sqrt(w[m] * schmidt_probs(k, lam, src - m) / target[src])
        ops.append(b)
    return ops


def completeness_residual(ops):
    acc = sum(b.T @ b for b in ops)
    support = np.diag(acc) > 0
    eye = np.diag(support.astype(float))
    return float(np.abs(acc - eye).max())


def _fidelity(branch, target):
    rows = max(branch.shape[0], target.shape[0])
    cols = max(branch.shape[1], target.shape[1])
    a = np.zeros((rows, cols), dtype=complex)
    b = np.zeros((rows, cols), dtype=complex)
    a[:branch.shape[0], :branch.shape[1]] = branch
    b[:target.shape[0], :target.shape[1]] = target
    na = np.vdot(a, a).real
    nb = np.vdot(b, b).real
    return float(abs(np.vdot(b, a)) ** 2 / (na * nb))


def _entanglement(m):
    s = np.linalg.svd(m, compute_uv=False) ** 2
    return entropy(s / s.sum())


def povm_reduce(k, delta_k, lam, n_max=None, eps=DEFAULT_EPS):
    """Simulate ``|Psi^(k+dk)_lam> -> |Psi^(k)_lam>`` by POVM plus shift."""
    if k < 0 or delta_k < 1:
        raise InvalidParameter(f"need k >= 0 and delta_k >= 1, got {k!r}, {delta_k!r}")
    if not 0.0 <= lam < 1.0:
        raise InvalidParameter(f"lambda must lie in [0, 1), got {lam!r}")
    m_max = _weights_cutoff(delta_k, lam, eps)
    n_target = auto_nmax(k, lam, eps)
    if n_max is None:
        n_max = max(m_max + n_target, auto_nmax(k + delta_k, lam, eps))
    b_dim = n_max + 1
    initial = psi(k + delta_k, lam, b_dim)
    target = psi(k, lam, b_dim)
    ops = povm_operators(k, delta_k, lam, b_dim)
    resid = completeness_residual(ops)
    if resid > 1e-12:
        raise ProtocolInconsistent(f"sum B_m^T B_m deviates from identity by {resid:.3g}")
    outcomes = []
    dist_err = 0.0
    final_e = 0.0
    for m in range(min(m_max, n_max) + 1):
        branch = (initial @ ops[m].T)[m + delta_k:, :]
        prob = float(np.sum(branch**2))
        if prob == 0.0:
            continue
        fid = _fidelity(branch, target)
        outcomes.append(Outcome(f"m={m}", prob, fid))
        dist_err = max(dist_err, abs(prob - float(shift_weights(delta_k, lam, m))))
        final_e = max(final_e, _entanglement(branch))
    omitted = float(betainc(m_max + 1, delta_k, lam * lam)) if lam > 0 else 0.0
    return ProtocolTrace(
        outcomes=tuple(outcomes),
        completeness_residual=resid,
        omitted_probability=omitted,
        initial_entanglement=_entanglement(initial),
        final_entanglement=final_e,
        checks={"distribution_error": dist_err, "n_max": n_max, "m_max": m_max},
    )


def beamsplitter_amplitudes(n, T):
    """``amp[n, j]`` for ``|n>|0> -> sum_j amp |n-j>|j>`` (``j`` reflected)."""
    n = np.asarray(n)
    j = np.arange(n.max() + 1)
    nn, jj = np.meshgrid(n, j, indexing="ij")
    valid = jj <= nn
    safe_j = np.where(valid, jj, 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_t = math.log(T) if T > 0 else -np.inf
        log_r = math.log1p(-T) if T < 1 else -np.inf
        tt = np.where(nn - safe_j > 0, (nn - safe_j) * log_t, 0.0)
        rr = np.where(safe_j > 0, safe_j * log_r, 0.0)
    amp = np.exp(0.5 * (log_binom(nn, safe_j) + tt + rr))
    return np.where(valid, amp, 0.0)


def attenuation_law(k, lam, T, l):
    """``P(l) = (1-T)^l lam^(2l) binom(k+l, l) N^2(k, lam) / N^2(k+l, sqrt(T) lam)``."""
    l = np.asarray(l)
    lam2 = lam * lam
    return np.exp(l * math.log1p(-T) + 2 * l * math.log(lam) + log_binom(k + l, l)
                  + (k + 1) * math.log1p(-lam2) - (k + l + 1) * math.log1p(-T * lam2))


def bs_attenuate(k, lam, lam_prime, n_max=None, eps=DEFAULT_EPS):
    """Simulate ``|Psi^(k)_lam> -> |Psi^(k)_lam'>`` for ``lam' < lam``.

    The beam-splitter action on ``B`` and a vacuum ancilla ``C`` is applied
    to the full ``A x B x C`` amplitude tensor; photocount probabilities are
    brute-force sums of squared amplitudes, compared against the closed
    form :func:`attenuation_law`.
    """
    if not 0.0 <= lam_prime < lam < 1.0:
        raise InvalidParameter(f"need 0 <= lambda' < lambda < 1, got {lam_prime!r}, {lam!r}")
    T = (lam_prime / lam) ** 2
    lam2 = lam * lam
    # photocount l is negative binomial with success lam^2 (1-T) / (1 - T lam^2)
    q = lam2 * (1 - T) / (1 - T * lam2)
    l_max = auto_nmax(k, math.sqrt(q), eps)
    n_target = auto_nmax(k, lam_prime, eps)
    if n_max is None:
        need = [auto_nmax(k, lam, eps)]
        for l in range(l_max + 1):
            need.append(l + _weights_cutoff(l, lam_prime, eps) + n_target if l else n_target)
        n_max = max(need)
    b_dim = n_max + 1
    initial = psi(k, lam, b_dim)
    # |n+k>_A |n>_B |0>_C -> sum_j amp[n, j] |n+k>_A |n-j>_B |j>_C
    amp = beamsplitter_amplitudes(np.arange(b_dim), T)
    n = np.arange(b_dim)
    tensor = np.zeros((b_dim + k, b_dim, b_dim))
    for j in range(b_dim):
        rows = n[j:]
        tensor[rows + k, rows - j, j] = initial[rows + k, rows] * amp[rows, j]
    photocounts = np.einsum("abc,abc->c", tensor, tensor)
    law = attenuation_law(k, lam, T, np.arange(l_max + 1))
    target = psi(k, lam_prime, b_dim)
    outcomes = []
    law_err = 0.0
    min_mid_fid = 1.0
    final_e = 0.0
    for l in range(l_max + 1):
        branch = tensor[:, :, l]
        p_l = float(photocounts[l])
        law_err = max(law_err, abs(p_l - float(law[l])))
        mid_fid = _fidelity(branch, psi(k + l, lam_prime, b_dim))
        min_mid_fid = min(min_mid_fid, mid_fid)
        if l == 0:
            fid = _fidelity(branch, target)
            outcomes.append(Outcome("l=0", p_l, fid))
            final_e = max(final_e, _entanglement(branch))
            continue
        # Alice's row index already carries the k offset; reduce k+l -> k
        m_max = _weights_cutoff(l, lam_prime, eps)
        ops = povm_operators(k, l, lam_prime, b_dim, count=m_max + 1)
        for m in range(len(ops)):
            final = (branch @ ops[m].T)[m + l:, :]
            prob = float(np.sum(final**2))
            if prob == 0.0:
                continue
            outcomes.append(Outcome(f"l={l},m={m}", prob, _fidelity(final, target)))
            final_e = max(final_e, _entanglement(final))
    omitted = float(betainc(l_max + 1, k + 1, q)) if q > 0 else 0.0
    total_mass = float(np.sum(initial**2))
    return ProtocolTrace(
        outcomes=tuple(outcomes),
        completeness_residual=abs(float(photocounts.sum()) - total_mass),
        omitted_probability=omitted,
        initial_entanglement=_entanglement(initial),
        final_entanglement=final_e,
        checks={"T": T, "law_error": law_err, "min_intermediate_fidelity": min_mid_fid,
                "n_max": n_max, "l_max": l_max},
    )
