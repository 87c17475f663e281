"""Numerical experiments probing the vacuum-minimizes-entanglement question.

All randomness is drawn from ``np.random.default_rng([seed, index])`` so a
sample or restart depends only on its own index.  Work items may run on a
thread pool; results are always merged in index order.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import FockMajError
from .fock import (
    DEFAULT_EPS,
    FockState,
    entropy,
    normalize,
    schmidt_spectrum,
    state_moments,
)
from .majorization import DEFAULT_ETA, majorizes
from .squeezer import env_dim, output_state, schmidt_probs, schmidt_vector


def _map(fn, items, threads):
    if threads is None or threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class FockScan:
    r_grid: np.ndarray
    table: np.ndarray  # table[i, k] = E[Psi^(k)] at r_grid[i]

    def rows(self):
        for i, r in enumerate(self.r_grid):
            for k in range(self.table.shape[1]):
                yield float(r), k, float(self.table[i, k])

    def monotone_in_r(self, tol=1e-10):
        d = np.diff(self.table, axis=0)
        return bool(np.all(d > tol))

    def monotone_in_k(self, tol=1e-10):
        rows = self.table[np.asarray(self.r_grid) > 0]
        return bool(np.all(np.diff(rows, axis=1) > tol))


def fock_scan(k_max, r_grid, eps=DEFAULT_EPS):
    """Entanglement of ``U(r)(|k> |0>)`` for ``k = 0..k_max`` over ``r_grid``.

    Fock inputs have the closed-form Schmidt spectrum ``p^(k)(tanh r)``, so
    no decomposition is needed.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r_grid) <= 0):
        raise ValueError("r_grid must be strictly increasing")
    table = np.empty((r_grid.size, k_max + 1))
    for i, r in enumerate(r_grid):
        for k in range(k_max + 1):
            table[i, k] = entropy(schmidt_vector(k, math.tanh(r), eps=eps))
    return FockScan(r_grid, table)


@dataclass(frozen=True)
class ScanConfig:
    dim: int = 21
    count: int = 1000
    r: float = 1.0
    r_grid: tuple = ()
    seed: int = 0
    eta: float = DEFAULT_ETA
    eps: float = DEFAULT_EPS
    zero_mean_mode: str = "off"
    zero_mean_tol: float = 1e-10
    threads: int = 1

    def __post_init__(self):
        if self.dim < 1 or self.count < 1:
            raise ValueError("dim and count must be >= 1")
        if self.r < 0 or any(r < 0 for r in self.r_grid):
            raise ValueError("squeeze parameters must be >= 0")
        if self.zero_mean_mode not in ("off", "filter", "penalty"):
            raise ValueError(f"unknown zero_mean_mode {self.zero_mean_mode!r}")


def random_state(dim, seed, index):
    """Haar-random pure state on ``dim`` levels for sample ``index``."""
    rng = np.random.default_rng([seed, index])
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return normalize(z)


def project_zero_mean(state, tol=1e-12):
    """Nearby zero-mean state found by minimizing ``|<a>|^2`` from ``state``."""
    d = state.dim
    if d == 1:
        return state
    x0 = np.concatenate([state.amplitudes.real, state.amplitudes.imag])

    def fun(x):
        c = x[:d] + 1j * x[d:]
        nrm2 = float(np.vdot(c, c).real)
        c = c / math.sqrt(nrm2)
        mu = state_moments(FockState(c))[1]
        g = _mean_gradient(c, mu)
        grad = 2 * _project(c, g) / math.sqrt(nrm2)
        return abs(mu) ** 2, np.concatenate([grad.real, grad.imag])

    res = minimize(fun, x0, jac=True, method="L-BFGS-B",
                   options={"ftol": 1e-30, "gtol": 1e-14, "maxiter": 2000})
    return normalize(res.x[:d] + 1j * res.x[d:])


def _sample(cfg, index):
    state = random_state(cfg.dim, cfg.seed, index)
    if cfg.zero_mean_mode == "penalty":
        state = project_zero_mean(state)
    nbar, mu = state_moments(state)
    rec = {"index": index, "mean_photon": nbar, "abs_mean": abs(mu)}
    if cfg.zero_mean_mode != "off" and abs(mu) > cfg.zero_mean_tol:
        rec["skipped"] = True
        return rec
    return rec, state


def _vacuum_mode(cfg, vac, index):
    out = _sample(cfg, index)
    if isinstance(out, dict):
        return out
    rec, state = out
    try:
        spec = schmidt_spectrum(output_state(state, cfg.r, eps=cfg.eps))
        v = majorizes(vac, spec, cfg.eta)
    except FockMajError as exc:
        rec["inconclusive"] = str(exc)
        return rec
    rec.update(holds=v.holds, margin=v.margin)
    return rec


def _chain_mode(cfg, index):
    out = _sample(cfg, index)
    if isinstance(out, dict):
        return out
    rec, state = out
    grid = sorted(cfg.r_grid)
    try:
        specs = [schmidt_spectrum(output_state(state, r, eps=cfg.eps)) for r in grid]
        margins = []
        for i in range(len(grid)):
            for j in range(i + 1, len(grid)):
                margins.append(majorizes(specs[i], specs[j], cfg.eta).margin)
    except FockMajError as exc:
        rec["inconclusive"] = str(exc)
        return rec
    margin = min(margins) if margins else 0.0
    rec.update(holds=margin >= -cfg.eta, margin=margin)
    return rec


def random_majorization_scan(cfg, keep_samples=False):
    """Count majorization violations over seeded random input states.

    With an empty ``cfg.r_grid`` each sample's output is compared against
    the two-mode squeezed vacuum at ``cfg.r``; otherwise every pair
    ``r' < r`` of the grid is checked for the same input.
    """
    if cfg.r_grid:
        fn = lambda i: _chain_mode(cfg, i)  # noqa: E731
        mode = "r-chain"
    else:
        vac = schmidt_vector(0, math.tanh(cfg.r), eps=cfg.eps)
        fn = lambda i: _vacuum_mode(cfg, vac, i)  # noqa: E731
        mode = "vacuum"
    records = _map(fn, range(cfg.count), cfg.threads)
    checked = [r for r in records if "holds" in r]
    margins = [r["margin"] for r in checked]
    report = {
        "mode": mode,
        "samples": cfg.count,
        "checked": len(checked),
        "violations": sum(1 for r in checked if not r["holds"]),
        "worst_margin": min(margins) if margins else None,
        "inconclusive": sum(1 for r in records if "inconclusive" in r),
        "skipped": sum(1 for r in records if r.get("skipped")),
        "mean_data": {
            "mean_photon": float(np.mean([r["mean_photon"] for r in records])),
            "mean_abs_lowering": float(np.mean([r["abs_mean"] for r in records])),
            "mean_margin": float(np.mean(margins)) if margins else None,
        },
    }
    if keep_samples:
        report["per_sample"] = records
    return report


def crossing_finder(state_a, state_b, r_lo, r_hi, tol=1e-6, eps=DEFAULT_EPS):
    """Locate a sign change of ``E_a(r) - E_b(r)`` by bisection.

    Both entanglements are evaluated with the same environment truncation,
    sized for ``r_hi``.  Returns ``None`` without a strict sign change.
    """
    if not r_lo < r_hi:
        raise ValueError("need r_lo < r_hi")
    lam_hi = math.tanh(r_hi)
    b_dim = max(env_dim(state_a, lam_hi, eps), env_dim(state_b, lam_hi, eps))

    def f(r):
        ea = entropy(schmidt_spectrum(output_state(state_a, r, b_dim, eps)))
        eb = entropy(schmidt_spectrum(output_state(state_b, r, b_dim, eps)))
        d = ea - eb
        if not math.isfinite(d):
            raise FloatingPointError(f"non-finite entanglement difference at r={r}")
        return d

    lo, hi = r_lo, r_hi
    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi >= 0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _ladder_blocks(dim, lam, b_dim):
    """``blocks[k, n] = sqrt(p_n^(k))``: the weight of ``c_k`` at ``M[n+k, n]``."""
    n = np.arange(b_dim)
    return np.array([np.sqrt(schmidt_probs(k, lam, n)) for k in range(dim)])


def _entropy_and_grad(c, blocks):
    """Output entanglement and its gradient with respect to ``c``.

    ``dS = Re sum_k conj(dc_k) h_k``.
    """
    dim, b_dim = blocks.shape
    n = np.arange(b_dim)
    m = np.zeros((dim + b_dim, b_dim), dtype=complex)
    for k in range(dim):
        m[n + k, n] += c[k] * blocks[k]
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    s2 = s * s
    pos = s2 > 0
    ent = -math.fsum((s2[pos] * np.log(s2[pos])).tolist())
    weight = np.zeros_like(s)
    weight[pos] = s[pos] * (np.log(s2[pos]) + 1.0)
    h_mat = -2.0 * (u * weight) @ vh
    h = np.array([np.sum(blocks[k] * h_mat[n + k, n]) for k in range(dim)])
    return ent, h


def _mean_gradient(c, mu):
    """``g`` with ``d|<a>|^2 = 2 Re sum conj(dc) g``."""
    g = np.zeros_like(c)
    root = np.sqrt(np.arange(1, c.size))
    g[:-1] += np.conj(mu) * root * c[1:]
    g[1:] += mu * root * c[:-1]
    return g


def _project(c, h):
    """Remove the radial part of a gradient at unit vector ``c``."""
    return h - c * np.real(np.vdot(c, h))


@dataclass(frozen=True)
class SearchResult:
    best_state: FockState
    best_entropy: float
    vacuum_entropy: float
    per_restart_history: tuple = field(default=())

    @property
    def vacuum_gap(self):
        return self.best_entropy - self.vacuum_entropy

    def as_dict(self):
        nbar, mu = state_moments(self.best_state)
        return {
            "best_state": [[z.real, z.imag] for z in self.best_state.amplitudes.tolist()],
            "best_entropy": self.best_entropy,
            "vacuum_entropy": self.vacuum_entropy,
            "vacuum_gap": self.vacuum_gap,
            "best_mean_photon": nbar,
            "best_abs_mean": abs(mu),
            "history": list(self.per_restart_history),
        }


def minimize_entropy(dim, r, restarts=32, seed=0, penalty_weight=10.0,
                     eps=DEFAULT_EPS, threads=1, maxiter=2000):
    """Multi-start search for the input minimizing output entanglement.

    Each restart runs L-BFGS on the real and imaginary parts of an
    unnormalized coefficient vector; the objective is the entanglement of
    the normalized state plus ``penalty_weight * |<a>|^2``.  The reference
    vacuum entanglement uses the same environment truncation.
    """
    if dim < 1 or restarts < 1:
        raise ValueError("dim and restarts must be >= 1")
    lam = math.tanh(r)
    b_dim = env_dim(FockState.fock(dim - 1), lam, eps)
    blocks = _ladder_blocks(dim, lam, b_dim)
    vac = np.zeros(dim, dtype=complex)
    vac[0] = 1.0
    vacuum_entropy = _entropy_and_grad(vac, blocks)[0]

    def objective(x):
        u = x[:dim] + 1j * x[dim:]
        nrm = math.sqrt(float(np.vdot(u, u).real))
        c = u / nrm
        ent, h = _entropy_and_grad(c, blocks)
        val = ent
        if penalty_weight:
            mu = np.sum(np.sqrt(np.arange(1, dim)) * np.conj(c[:-1]) * c[1:])
            val += penalty_weight * abs(mu) ** 2
            h = h + 2.0 * penalty_weight * _mean_gradient(c, mu)
        g = _project(c, h) / nrm
        return val, np.concatenate([g.real, g.imag])

    def run(i):
        start = random_state(dim, seed, i).amplitudes
        x0 = np.concatenate([start.real, start.imag])
        res = minimize(objective, x0, jac=True, method="L-BFGS-B",
                       options={"ftol": 1e-12, "gtol": 1e-10, "maxiter": maxiter})
        state = normalize(res.x[:dim] + 1j * res.x[dim:])
        ent = _entropy_and_grad(state.amplitudes, blocks)[0]
        return {
            "restart": i,
            "entropy": ent,
            "objective": float(res.fun),
            "converged": bool(res.success),
            "grad_norm": float(np.linalg.norm(res.jac)),
            "iterations": int(res.nit),
        }, state

    results = _map(run, range(restarts), threads)
    history = tuple(h for h, _ in results)
    best = min(range(restarts), key=lambda i: (history[i]["objective"], i))
    return SearchResult(results[best][1], history[best]["entropy"], vacuum_entropy, history)
