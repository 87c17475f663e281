"""Fock-basis states, Schmidt spectra and entropies.

Everything else in the package is built on the four value types defined
here.  They are frozen dataclasses wrapping read-only numpy arrays, so they
can be shared freely between threads.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateState, InvalidDistribution, InvalidState

NORM_TOL = 1e-12
PROB_TOL = 1e-10
DEFAULT_EPS = 1e-12
GUARD_DIM = 10**6


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def log_binom(n, k):
    """Natural log of the binomial coefficient, vectorized over arrays."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def compensated_cumsum(x):
    """Prefix sums of ``x`` using Neumaier's compensated summation."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    s = 0.0
    c = 0.0
    for i, v in enumerate(x.tolist()):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out


@dataclass(frozen=True)
class FockState:
    """Unit-norm pure state ``sum_n c_n |n>`` truncated to ``dim`` levels."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes, complex).ravel()
        if amps.size < 1:
            raise InvalidState("a Fock state needs at least one amplitude")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidState(f"state norm^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self):
        return self.amplitudes.size

    @classmethod
    def fock(cls, k, dim=None):
        """The number state ``|k>``."""
        dim = k + 1 if dim is None else dim
        amps = np.zeros(dim, dtype=complex)
        amps[k] = 1.0
        return cls(amps)

    def to_json(self):
        return json.dumps([[c.real, c.imag] for c in self.amplitudes.tolist()])

    @classmethod
    def from_json(cls, text):
        pairs = json.loads(text) if isinstance(text, str) else text
        return normalize([complex(re, im) for re, im in pairs])


@dataclass(frozen=True)
class ProbabilityVector:
    """Nonnegative probabilities plus the mass omitted by truncation."""

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        p = _frozen(self.probs, float).ravel()
        if p.size and p.min() < -PROB_TOL:
            raise InvalidDistribution(f"negative probability {p.min()!r}")
        if self.tail_mass < 0:
            raise InvalidDistribution(f"negative tail mass {self.tail_mass!r}")
        total = math.fsum(p.tolist()) + self.tail_mass
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidDistribution(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    def __len__(self):
        return self.probs.size

    def sorted(self):
        """Copy with entries in descending order (stable on ties)."""
        order = np.argsort(-self.probs, kind="stable")
        return ProbabilityVector(self.probs[order], self.tail_mass)

    def to_json(self):
        return json.dumps({"probs": self.probs.tolist(), "tail_mass": self.tail_mass})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        if isinstance(data, list):
            return cls(np.asarray(data, dtype=float), 0.0)
        return cls(np.asarray(data["probs"], dtype=float), data.get("tail_mass", 0.0))


@dataclass(frozen=True)
class BipartiteAmplitudeMatrix:
    """Amplitudes ``M[a, b]`` of ``sum |a>_A |b>_B``.

    ``omitted_mass`` records how much norm was dropped by truncating the
    matrix; it is zero for user-constructed matrices.
    """

    entries: np.ndarray
    omitted_mass: float = field(default=0.0)

    def __post_init__(self):
        m = _frozen(self.entries, complex)
        if m.ndim != 2:
            raise InvalidState("amplitude matrix must be two-dimensional")
        norm2 = float(np.sum(np.abs(m) ** 2))
        if abs(norm2 + self.omitted_mass - 1.0) > PROB_TOL:
            raise InvalidState(f"joint state norm^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "entries", m)

    @property
    def dims(self):
        return self.entries.shape


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive, unit-trace matrix in the Fock basis."""

    entries: np.ndarray
    omitted_mass: float = field(default=0.0)

    def __post_init__(self):
        rho = _frozen(self.entries, complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidState("density matrix must be square")
        if np.abs(rho - rho.conj().T).max(initial=0.0) > NORM_TOL:
            raise InvalidState("density matrix is not Hermitian")
        tr = float(np.trace(rho).real)
        if abs(tr + self.omitted_mass - 1.0) > PROB_TOL:
            raise InvalidState(f"trace = {tr!r}, expected 1")
        if np.linalg.eigvalsh(rho).min(initial=0.0) < -PROB_TOL:
            raise InvalidState("density matrix has negative eigenvalues")
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self):
        return self.entries.shape[0]

    @classmethod
    def pure(cls, state):
        c = state.amplitudes
        return cls(np.outer(c, c.conj()))

    def spectrum(self):
        """Eigenvalues as a :class:`ProbabilityVector`, clipped at zero."""
        w = np.linalg.eigvalsh(self.entries)[::-1]
        w = np.clip(w, 0.0, None)
        tail = max(0.0, 1.0 - math.fsum(w.tolist()))
        return ProbabilityVector(w, tail)

    def to_json(self):
        return json.dumps({"real": self.entries.real.tolist(),
                           "imag": self.entries.imag.tolist()})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text) if isinstance(text, str) else text
        return cls(np.asarray(data["real"]) + 1j * np.asarray(data["imag"]))


def normalize(amplitudes):
    """Scale ``amplitudes`` to unit norm.

    Phases are untouched, so the first nonzero amplitude keeps its phase.

    >>> normalize([3, 4j]).amplitudes
    array([0.6+0.j , 0. +0.8j])
    """
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.linalg.norm(amps)
    if amps.size == 0 or norm == 0.0:
        raise DegenerateState("cannot normalize an all-zero amplitude vector")
    return FockState(amps / norm)


def state_moments(state):
    """Return ``(<n>, <a>)`` for a pure Fock-basis state."""
    c = state.amplitudes
    n = np.arange(c.size)
    mean_photon = float(np.sum(n * np.abs(c) ** 2))
    mean_lowering = complex(np.sum(np.sqrt(n[1:]) * c[:-1].conj() * c[1:]))
    return mean_photon, mean_lowering


def is_zero_mean(state, tol=1e-10):
    return abs(state_moments(state)[1]) <= tol


def schmidt_spectrum(m):
    """Squared singular values of a bipartite amplitude matrix, descending."""
    if not isinstance(m, BipartiteAmplitudeMatrix):
        m = BipartiteAmplitudeMatrix(np.asarray(m))
    s = np.linalg.svd(m.entries, compute_uv=False)
    p = s**2
    order = np.argsort(-p, kind="stable")
    return ProbabilityVector(p[order], m.omitted_mass)


def entropy(p, unit="nats"):
    """Shannon entropy of a probability vector with ``0 log 0 = 0``.

    Entries within ``PROB_TOL`` below zero are treated as zero; anything
    more negative is rejected.
    """
    probs = np.asarray(p.probs if isinstance(p, ProbabilityVector) else p, dtype=float)
    if probs.size and probs.min() < -PROB_TOL:
        raise InvalidDistribution(f"negative probability {probs.min()!r}")
    q = probs[probs > 0]
    h = -math.fsum((q * np.log(q)).tolist())
    h = h if h > 0.0 else 0.0
    return _convert(h, unit)


def entropy_tail_bound(p, unit="nats", guard_dim=GUARD_DIM):
    """Upper bound on the entropy carried by the omitted tail mass.

    Mass ``t`` spread over at most ``guard_dim`` extra levels contributes at
    most ``-t log t + t log guard_dim``.
    """
    t = p.tail_mass if isinstance(p, ProbabilityVector) else float(p)
    if t <= 0:
        return 0.0
    return _convert(-t * math.log(t) + t * math.log(guard_dim), unit)


def _convert(h, unit):
    if unit == "nats":
        return h
    if unit == "bits":
        return h / math.log(2)
    raise ValueError(f"unknown entropy unit {unit!r}")
