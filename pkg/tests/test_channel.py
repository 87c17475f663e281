import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fockmaj import (
    ChannelParams,
    DensityMatrix,
    FockState,
    GaussianMoments,
    InvalidParameter,
    NotCompletelyPositive,
    TruncationError,
    apply_amp,
    apply_channel,
    apply_loss,
    decompose,
    density_entropy,
    gaussian_output_entropy,
    loss_kraus,
    moment_map,
    normalize,
    thermal_entropy,
)
from fockmaj.channel import amp_params, amp_required_dim, loss_params
from fockmaj.squeezer import schmidt_probs


def _random_rho(dim, seed, rank=3):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = x @ x.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


@pytest.mark.parametrize("tau,n,T,G", [(2, 1, 1, 2), (0.5, 0.5, 0.5, 1), (1, 2, 0.5, 2)])
def test_decompose_examples(tau, n, T, G):
    d = decompose(ChannelParams(tau, n))
    assert d.T == pytest.approx(T, abs=1e-15)
    assert d.G == pytest.approx(G, abs=1e-15)


def test_decompose_rejects_non_cp():
    with pytest.raises(NotCompletelyPositive) as info:
        decompose(ChannelParams(0.5, 0.2))
    assert info.value.deficit == pytest.approx(0.3)
    with pytest.raises(InvalidParameter):
        ChannelParams(0.0, 1.0)
    with pytest.raises(InvalidParameter):
        ChannelParams(1.0, -1.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 20), st.floats(0, 20))
def test_decomposition_identities(tau, n):
    assume(n >= abs(tau - 1))
    d = decompose(ChannelParams(tau, n))
    assert 0 <= d.T <= 1 and d.G >= 1
    assert d.T * d.G == pytest.approx(tau, rel=1e-12, abs=1e-12)
    assert d.G * (1 - d.T) + (d.G - 1) == pytest.approx(n, rel=1e-12, abs=1e-12)
    assert math.cosh(d.r) ** 2 == pytest.approx(d.G, rel=1e-12)


def test_limiting_cases():
    # pure loss, quantum-limited amplifier, additive noise
    assert decompose(loss_params(0.3)).G == pytest.approx(1.0)
    assert decompose(amp_params(3.0)).T == pytest.approx(1.0)
    d = decompose(ChannelParams(1.0, 0.8))
    assert d.tau == pytest.approx(1.0)
    assert d.noise == pytest.approx(2 * d.G - 2)


def test_moment_map_examples():
    vac = GaussianMoments.vacuum()
    out = moment_map(vac, ChannelParams(0.5, 0.5))
    np.testing.assert_allclose(out.cov, np.eye(2), atol=1e-15)
    shifted = moment_map(GaussianMoments([2.0, 0.0], np.eye(2)), ChannelParams(0.25, 0.75))
    np.testing.assert_allclose(shifted.mean, [1.0, 0.0], atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 5), st.floats(0, 5), st.floats(-3, 3), st.floats(-3, 3),
       st.floats(1, 4), st.floats(-1, 1))
def test_moment_map_composition(tau, n, mx, my, a, b):
    assume(n >= abs(tau - 1))
    cov = np.array([[a, b], [b, (1 + b * b) / a + 0.5]])
    m = GaussianMoments([mx, my], cov)
    d = decompose(ChannelParams(tau, n))
    staged = moment_map(moment_map(m, loss_params(d.T)), amp_params(d.G))
    direct = moment_map(m, ChannelParams(tau, n))
    np.testing.assert_allclose(staged.mean, direct.mean, atol=1e-12)
    np.testing.assert_allclose(staged.cov, direct.cov, atol=1e-12, rtol=1e-12)


def test_moments_reject_unphysical_cov():
    with pytest.raises(ValueError):
        GaussianMoments([0, 0], 0.5 * np.eye(2))


@pytest.mark.parametrize("T", [0.0, 0.3, 1.0])
def test_loss_kraus_completeness(T):
    ops = loss_kraus(T, 8)
    acc = sum(a.T @ a for a in ops)
    np.testing.assert_allclose(acc, np.eye(8), atol=1e-14)


def test_loss_examples():
    vac = DensityMatrix.pure(FockState.fock(0, dim=4))
    np.testing.assert_allclose(apply_loss(vac, 0.37).entries, vac.entries, atol=1e-15)
    one = DensityMatrix.pure(FockState.fock(1))
    np.testing.assert_allclose(apply_loss(one, 0.3).entries, np.diag([0.7, 0.3]), atol=1e-15)
    rho = _random_rho(5, 1)
    np.testing.assert_allclose(apply_loss(rho, 1.0).entries, rho.entries, atol=1e-15)


def test_amp_examples():
    G = 2.5
    vac = DensityMatrix.pure(FockState.fock(0))
    out = apply_amp(vac, G)
    n = np.arange(out.dim)
    np.testing.assert_allclose(np.diag(out.entries).real, (1 / G) * (1 - 1 / G) ** n,
                               atol=1e-15)
    k = 3
    out = apply_amp(DensityMatrix.pure(FockState.fock(k)), G)
    diag = np.diag(out.entries).real
    assert np.all(diag[:k] == 0)
    np.testing.assert_allclose(diag[k:], schmidt_probs(k, math.sqrt(1 - 1 / G),
                                                      np.arange(out.dim - k)), atol=1e-15)
    rho = _random_rho(4, 2)
    np.testing.assert_allclose(apply_amp(rho, 1.0).entries, rho.entries, atol=1e-15)


def test_amp_truncation():
    rho = DensityMatrix.pure(FockState.fock(2))
    need = amp_required_dim(rho, 3.0)
    with pytest.raises(TruncationError) as info:
        apply_amp(rho, 3.0, out_dim=need - 1)
    assert info.value.required == need
    assert apply_amp(rho, 3.0, out_dim=need).omitted_mass < 1e-12


@pytest.mark.parametrize("tau,n", [(1, 2), (0.5, 1), (2, 1.5), (0.5, 0.5)])
def test_vacuum_output_entropy_matches_symplectic_formula(tau, n):
    vac = DensityMatrix.pure(FockState.fock(0))
    out = apply_channel(vac, ChannelParams(tau, n))
    assert density_entropy(out) == pytest.approx(gaussian_output_entropy(ChannelParams(tau, n)),
                                                 abs=1e-9)


def test_thermal_entropy():
    assert thermal_entropy(1.0) == pytest.approx(2 * math.log(2))
    assert thermal_entropy(0.0) == 0.0
    assert gaussian_output_entropy(ChannelParams(1, 2)) == pytest.approx(2 * math.log(2))


@pytest.mark.parametrize("seed", range(5))
def test_channel_equals_staged_composition(seed):
    rho = _random_rho(4, seed)
    params = ChannelParams(1.2, 0.9)
    d = decompose(params)
    direct = apply_channel(rho, params)
    staged = apply_amp(apply_loss(rho, d.T), d.G, out_dim=direct.dim)
    np.testing.assert_allclose(direct.entries, staged.entries, atol=1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_channel_preserves_trace_and_positivity(seed):
    rho = _random_rho(6, 100 + seed)
    out = apply_channel(rho, ChannelParams(0.7, 1.1))
    assert np.trace(out.entries).real + out.omitted_mass == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(out.entries).min() > -1e-12


@pytest.mark.parametrize("tau,n", [(1, 2), (0.5, 1)])
def test_reduction_inequality_on_random_inputs(tau, n):
    params = ChannelParams(tau, n)
    floor = gaussian_output_entropy(params)
    rng = np.random.default_rng(7)
    for _ in range(25):
        phi = normalize(rng.standard_normal(12) + 1j * rng.standard_normal(12))
        out = apply_channel(DensityMatrix.pure(phi), params)
        assert density_entropy(out) >= floor - 1e-9
