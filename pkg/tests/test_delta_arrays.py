import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deltaprime.delta_arrays import (
    ArrayResolvent,
    CouplingConfig,
    DeltaArray,
    GammaMatrix,
    array_resolvent_kernel,
    cs_couplings,
    cs_couplings_perturbed,
    cs_gamma_inverse,
    cs_gamma_matrix,
    gamma_det,
    gamma_inverse,
    gamma_matrix,
    uvw,
)
from deltaprime.errors import DegenerateCoupling, SingularGamma, SingularU
from deltaprime.kernels import delta_prime_kernel, free_kernel
from deltaprime.spectra import find_bound_states

betas = st.one_of(st.floats(-3.0, -0.2), st.floats(0.2, 3.0))


def mp_gamma_inverse(couplings, centers, kappa):
    mpmath.mp.dps = 40
    k = mpmath.mpf(kappa)
    n = len(centers)
    m = mpmath.matrix(n, n)
    for i in range(n):
        for j in range(n):
            d = abs(mpmath.mpf(centers[i]) - mpmath.mpf(centers[j]))
            m[i, j] = mpmath.exp(-k * d) / (2 * k) + (1 / mpmath.mpf(couplings[i]) if i == j else 0)
    inv = m**-1
    return np.array([[float(inv[i, j]) for j in range(n)] for i in range(n)])


def test_config_validation():
    with pytest.raises(ValueError):
        CouplingConfig(0.0, 0.1)
    with pytest.raises(ValueError):
        CouplingConfig(1.0, -0.1)
    with pytest.raises(ValueError):
        CouplingConfig(1.0, 0.1, alpha=0.0)
    with pytest.raises(ValueError):
        DeltaArray((1.0, 2.0), (0.0,))
    with pytest.raises(ValueError):
        DeltaArray((1.0, 2.0), (1.0, 0.0))


def test_cs_couplings_and_degenerate_spacing():
    arr = cs_couplings(CouplingConfig(-1.0, 0.1, alpha=2.0, y=0.5))
    assert arr.centers == pytest.approx((0.4, 0.5, 0.6))
    assert arr.couplings == pytest.approx((2 * (-2 - 10), 2 * (-100), 2 * (-2 - 10)))
    with pytest.raises(DegenerateCoupling):
        cs_couplings(CouplingConfig(1.0, 0.5))
    pert = cs_couplings_perturbed(CouplingConfig(-1.0, 0.1), 0.01, 0.5)
    assert pert.couplings == pytest.approx((-11.5, -101.0, -11.5))


def test_uvw_values():
    u, v, w = uvw(-1.0, 0.1, 2.0)
    assert u == pytest.approx(2 * -1 * 2 * 0.1 / (0.2 + 1))
    assert v == pytest.approx(-2 * 2 * 0.01)
    assert w == pytest.approx(math.exp(-0.2))
    assert uvw(1.0, 0.0, 3.0) == (0.0, 0.0, 1.0)
    with pytest.raises(SingularU):
        uvw(1.0, 0.5, 1.0)


@settings(max_examples=100, deadline=None)
@given(betas, st.floats(0.001, 0.3), st.floats(0.5, 6.0), st.sampled_from([1.0, 0.5, 2.0]))
def test_gamma_matrix_two_paths(beta, a, k, alpha):
    if abs(a - beta / 2) < 1e-3:
        return
    cfg = CouplingConfig(beta, a, alpha)
    direct = gamma_matrix(cs_couplings(cfg), k).entries
    closed = cs_gamma_matrix(cfg, k).entries
    assert np.max(np.abs(direct - closed)) <= 1e-14 * np.max(np.abs(direct))


def test_identity_scaled_inverse():
    k = 1.3
    inv = gamma_inverse(GammaMatrix(np.eye(3) / (2 * k), k)).entries
    assert np.allclose(inv, 2 * k * np.eye(3), rtol=1e-15, atol=0)


def test_lu_matches_closed_form_and_mpmath_example():
    cfg = CouplingConfig(-1.0, 0.1)
    arr = cs_couplings(cfg)
    lu = gamma_inverse(gamma_matrix(arr, 2.0)).entries
    closed = cs_gamma_inverse(cfg, 2.0).entries
    oracle = mp_gamma_inverse(arr.couplings, arr.centers, 2.0)
    scale = np.max(np.abs(oracle))
    assert np.max(np.abs(lu - oracle)) <= 1e-12 * scale
    assert np.max(np.abs(closed - oracle)) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(betas, st.floats(0.001, 0.3), st.floats(0.5, 6.0), st.sampled_from([1.0, 2.0, 0.5]))
def test_closed_form_inverse_property(beta, a, k, alpha):
    if abs(a - beta / 2) < 1e-3:
        return
    cfg = CouplingConfig(beta, a, alpha)
    try:
        lu = gamma_inverse(gamma_matrix(cs_couplings(cfg), k)).entries
    except SingularGamma:
        return
    closed = cs_gamma_inverse(cfg, k).entries
    assert np.max(np.abs(lu - closed)) <= 1e-10 * np.max(np.abs(lu))


def test_singular_gamma_at_bound_state():
    cfg = CouplingConfig(-1.0, 0.01)
    (state,) = find_bound_states(cfg)
    with pytest.raises(SingularGamma):
        gamma_inverse(gamma_matrix(cs_couplings(cfg), state.kappa_star))
    assert abs(gamma_det(gamma_matrix(cs_couplings(cfg), state.kappa_star))) < 1e-9


def test_empty_array_is_free():
    arr = DeltaArray((), ())
    x = np.linspace(-2, 2, 5)
    X, XP = np.meshgrid(x, x, indexing="ij")
    assert np.array_equal(ArrayResolvent(arr, 1.5)(X, XP), free_kernel(1.5, X, XP))


@pytest.mark.parametrize("c,k", [(-0.7, 2.0), (3.0, 0.5), (1e3, 1.0)])
def test_single_delta(c, k):
    arr = DeltaArray((c,), (0.0,))
    for x, xp in [(0.3, -1.2), (1.0, 1.0), (-2.0, 0.0)]:
        expect = free_kernel(k, x, xp) - free_kernel(k, x, 0) * free_kernel(k, xp, 0) / (1 / c + 1 / (2 * k))
        assert array_resolvent_kernel(arr, k, x, xp) == pytest.approx(expect, rel=1e-13, abs=1e-16)


def test_kernel_symmetry():
    res = ArrayResolvent.cheon_shigehara(CouplingConfig(-1.0, 0.05), 3.0)
    x = np.linspace(-1, 1, 21)
    X, XP = np.meshgrid(x, x, indexing="ij")
    K = res(X, XP)
    assert np.max(np.abs(K - K.T)) <= 1e-12


@pytest.mark.parametrize("beta,k", [(-1.0, 4.0), (0.5, 2.0), (1.0, 1.0)])
def test_pointwise_convergence_to_delta_prime(beta, k):
    x = np.array([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
    X, XP = np.meshgrid(x, x, indexing="ij")
    a_vals = np.array([0.02, 0.01, 0.005, 0.0025])
    err = []
    for a in a_vals:
        K = ArrayResolvent.cheon_shigehara(CouplingConfig(beta, a), k)(X, XP)
        err.append(np.max(np.abs(K - delta_prime_kernel(beta, 0.0, k, X, XP))))
    slope = np.polyfit(np.log(a_vals), np.log(err), 1)[0]
    assert slope >= 0.8
    assert all(e1 < e0 for e0, e1 in zip(err, err[1:]))


def test_limit_kernel_correction_outside():
    beta, k = -1.0, 3.0
    c = beta / (2 * (2 + beta * k))
    x, xp = 0.8, 1.5
    prev = None
    for a in (0.01, 0.001):
        res = ArrayResolvent.cheon_shigehara(CouplingConfig(beta, a), k)
        corr = res(x, xp) - free_kernel(k, x, xp)
        rel = abs(corr / (c * math.exp(-k * (x + xp))) - 1)
        assert rel < 10 * a
        if prev is not None:
            assert rel < prev
        prev = rel
