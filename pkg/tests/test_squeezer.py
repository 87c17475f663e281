import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import comb

from fockmaj import (
    FockState,
    InvalidParameter,
    PreconditionViolated,
    SqueezeParam,
    TruncationError,
    infinitesimal_approx,
    normalize,
    output_entanglement,
    output_spectrum,
    output_state,
    schmidt_spectrum,
    schmidt_vector,
    tmsv_entropy,
)
from fockmaj.squeezer import auto_nmax, infinitesimal_lambda, schmidt_probs, schmidt_tail

lam_strategy = st.floats(0.05, 0.95)


def test_squeeze_param():
    s = SqueezeParam(0.5)
    assert s.lam == pytest.approx(math.tanh(0.5))
    assert s.gain == pytest.approx(math.cosh(0.5) ** 2)
    assert SqueezeParam.from_lambda(0.5).r == pytest.approx(math.atanh(0.5))
    with pytest.raises(InvalidParameter):
        SqueezeParam(-0.1)
    with pytest.raises(InvalidParameter):
        SqueezeParam.from_lambda(1.0)


def test_schmidt_vector_examples():
    np.testing.assert_allclose(schmidt_vector(0, 0.5, 2).probs, [0.75, 0.1875, 0.046875],
                               rtol=1e-15)
    np.testing.assert_allclose(schmidt_vector(1, 0.5, 1).probs, [0.5625, 0.28125], rtol=1e-15)
    for k in range(4):
        p = schmidt_vector(k, 0.0)
        np.testing.assert_array_equal(p.probs, [1.0])
        assert p.tail_mass == 0.0


@pytest.mark.parametrize("k", [0, 1, 3, 7])
@pytest.mark.parametrize("lam", [0.1, 0.5, 0.9])
def test_schmidt_probs_direct_formula(k, lam):
    n = np.arange(30)
    direct = (1 - lam**2) ** (k + 1) * lam ** (2 * n) * comb(n + k, n)
    np.testing.assert_allclose(schmidt_probs(k, lam, n), direct, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), lam_strategy)
def test_pascal_recurrence(k, lam):
    # p_n^(k) = lam^2 p_{n-1}^(k) + (1 - lam^2) p_n^(k-1)
    n = np.arange(1, 40)
    lhs = schmidt_probs(k, lam, n)
    rhs = lam**2 * schmidt_probs(k, lam, n - 1) + (1 - lam**2) * schmidt_probs(k - 1, lam, n)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-300)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 15), lam_strategy, st.integers(0, 60))
def test_tail_is_exact_remainder(k, lam, n_max):
    head = math.fsum(schmidt_probs(k, lam, np.arange(n_max + 1)).tolist())
    assert head + schmidt_tail(k, lam, n_max) == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("k,lam", [(0, 0.3), (4, 0.6), (8, 0.9), (2, 0.99)])
def test_auto_nmax_is_minimal(k, lam):
    n = auto_nmax(k, lam, 1e-12)
    assert schmidt_tail(k, lam, n) < 1e-12
    assert schmidt_tail(k, lam, n - 1) >= 1e-12


def test_auto_nmax_guard():
    with pytest.raises(TruncationError):
        auto_nmax(0, 0.99999999, 1e-12)


def test_vacuum_output_is_tmsv():
    r = 0.7
    lam = math.tanh(r)
    m = output_state(FockState.fock(0), r).entries
    n = np.arange(m.shape[1])
    np.testing.assert_allclose(np.diag(m[: m.shape[1]]).real,
                               np.sqrt((1 - lam**2) * lam ** (2 * n)), atol=1e-15)
    off = m.copy()
    off[n, n] = 0
    assert np.abs(off).max() == 0


@pytest.mark.parametrize("k", range(6))
def test_fock_output_spectrum_matches_closed_form(k):
    lam = 0.5
    p = output_spectrum(FockState.fock(k), math.atanh(lam))
    q = schmidt_vector(k, lam).sorted()
    np.testing.assert_allclose(p.probs[: len(q)], q.probs, atol=1e-12)
    assert np.all(p.probs[len(q):] < 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.2))
def test_ladder_identity(seed, r):
    # (a_E - lam a_A^dag) annihilates the output for any input
    rng = np.random.default_rng(seed)
    state = normalize(rng.standard_normal(5) + 1j * rng.standard_normal(5))
    lam = math.tanh(r)
    m = output_state(state, r).entries
    rows, cols = m.shape
    a = np.arange(rows)[:, None]
    mm = np.arange(cols - 1)[None, :]
    lowered_e = m[:, 1:] * np.sqrt(mm + 1)
    raised_a = np.zeros_like(lowered_e)
    raised_a[1:, :] = m[:-1, :-1] * np.sqrt(a[1:])
    np.testing.assert_allclose(lowered_e, lam * raised_a, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * math.pi))
def test_phase_rotation_invariance(seed, theta):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    s1 = normalize(c)
    s2 = normalize(c * np.exp(1j * theta * np.arange(4)))
    p1 = output_spectrum(s1, 0.6).probs
    p2 = output_spectrum(s2, 0.6).probs
    np.testing.assert_allclose(p1, p2, atol=1e-12)


def test_truncation_error_reports_required_dim():
    with pytest.raises(TruncationError) as info:
        output_state(FockState.fock(2), 1.0, b_dim=5)
    assert info.value.required > 5
    output_state(FockState.fock(2), 1.0, b_dim=info.value.required)


def test_entanglement_examples():
    for r in (0.2, 0.9, 1.5):
        assert output_entanglement(FockState.fock(0), r) == pytest.approx(tmsv_entropy(r),
                                                                          abs=1e-10)
    assert output_entanglement(normalize([0.3, 0.4j, 0.5]), 0.0) == pytest.approx(0.0, abs=1e-14)
    e = [output_entanglement(FockState.fock(k), 0.6) for k in range(6)]
    assert all(b > a for a, b in zip(e, e[1:]))


def test_superposition_less_entangled_than_single_photon():
    a = normalize([0, math.sqrt(0.4), math.sqrt(0.6)])
    assert output_entanglement(a, 0.8) < output_entanglement(FockState.fock(1), 0.8)
    assert output_entanglement(a, 0.6) > output_entanglement(FockState.fock(1), 0.6)


def test_spectrum_sums_to_one_with_tail():
    p = output_spectrum(normalize([1, 0, 1j, 0.5]), 1.1)
    assert math.fsum(p.probs.tolist()) + p.tail_mass == pytest.approx(1.0, abs=1e-12)
    assert schmidt_spectrum(output_state(normalize([1, 2]), 0.3)).tail_mass < 1e-12


def test_infinitesimal_examples():
    assert infinitesimal_lambda(0.0, 0.01) == pytest.approx(1 / (1 + 0.000025), rel=1e-15)
    lam, approx, dev = infinitesimal_approx(FockState.fock(2), 0.0)
    assert lam == 1.0 and dev == 0.0
    np.testing.assert_array_equal(approx.probs, [1.0, 0.0])
    # larger mean photon number -> smaller leading coefficient
    l1 = infinitesimal_approx(FockState.fock(1), 0.01)[0]
    l2 = infinitesimal_approx(FockState.fock(2), 0.01)[0]
    assert l1 > l2


def test_infinitesimal_requires_zero_mean():
    with pytest.raises(PreconditionViolated):
        infinitesimal_approx(normalize([1, 1]), 0.01)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_infinitesimal_deviation_is_second_order(k):
    devs = [infinitesimal_approx(FockState.fock(k), r)[2] for r in (0.02, 0.01, 0.005)]
    for big, small in zip(devs, devs[1:]):
        assert big / small == pytest.approx(4.0, abs=0.5)


@pytest.mark.parametrize("k", [0, 1, 3])
def test_infinitesimal_matched_convention_is_fourth_order(k):
    # evaluating the two-term form at 2r (squeezer written with r/2) leaves O(r^4) error
    def dev(r):
        lam_phi = infinitesimal_lambda(k, 2 * r)
        exact = output_spectrum(FockState.fock(k), r).probs
        return max(abs(exact[0] - lam_phi), abs(exact[1] - (1 - lam_phi)))

    ratios = [dev(r) / dev(r / 2) for r in (0.02, 0.01)]
    for q in ratios:
        assert q == pytest.approx(16.0, abs=1.0)
