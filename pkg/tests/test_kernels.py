import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deltaprime.errors import ResonantSpectralPoint
from deltaprime.kernels import (
    DeltaPrimeResolvent,
    DirichletResolvent,
    FreeResolvent,
    SpectralPoint,
    as_kappa,
    delta_prime_coefficient,
    delta_prime_kernel,
    dirichlet_kernel,
    free_kernel,
    signed_kernel,
)

kappas = st.floats(0.1, 8.0)
coords = st.floats(-5.0, 5.0)
betas = st.floats(-3.0, 3.0).filter(lambda b: abs(b) > 0.05)


def test_spectral_point_validation():
    assert SpectralPoint(2.0).energy == -4.0
    assert as_kappa(SpectralPoint(1.5)) == 1.5
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            SpectralPoint(bad)


def test_free_kernel_values():
    assert free_kernel(1.0, 0.0, 0.0) == 0.5
    assert free_kernel(2.0, 1.0, -1.0) == pytest.approx(math.exp(-4) / 4, rel=1e-15)
    out = free_kernel(1.0, np.array([0.0, 1.0]), 0.0)
    assert isinstance(out, np.ndarray) and out.shape == (2,)


def test_signed_kernel_zero_on_diagonal():
    assert signed_kernel(1.0, 0.3, 0.3) == 0.0
    assert signed_kernel(1.0, 1.0, 0.0) == pytest.approx(math.exp(-1) / 2)
    assert signed_kernel(1.0, 0.0, 1.0) == pytest.approx(-math.exp(-1) / 2)


def test_delta_prime_coefficient_and_resonance():
    assert delta_prime_coefficient(-1.0, 3.0) == pytest.approx(0.5)
    assert delta_prime_coefficient(1.0, 2.0) == pytest.approx(1 / 8)
    with pytest.raises(ResonantSpectralPoint):
        delta_prime_coefficient(-1.0, 2.0)
    with pytest.raises(ResonantSpectralPoint):
        delta_prime_kernel(-1.0, 0.0, 2.0, 0.5, 0.5)
    with pytest.raises(ResonantSpectralPoint):
        DeltaPrimeResolvent(-0.5, 4.0)


def test_delta_prime_same_and_opposite_side():
    # beta=-1, kappa=3: c = 1/2
    x, xp = 1.0, 2.0
    same = delta_prime_kernel(-1.0, 0.0, 3.0, x, xp)
    assert same == pytest.approx(math.exp(-3) / 6 + 0.5 * math.exp(-9), rel=1e-14)
    cross = delta_prime_kernel(-1.0, 0.0, 3.0, -x, xp)
    assert cross == pytest.approx(math.exp(-9) / 6 - 0.5 * math.exp(-9), rel=1e-14)


def test_dirichlet_examples():
    assert dirichlet_kernel(0.0, 1.0, -1.0, 2.0) == 0.0
    assert dirichlet_kernel(0.0, 1.0, 1.0, 2.0) == pytest.approx(math.sinh(1) * math.exp(-2), rel=1e-14)
    assert dirichlet_kernel(0.0, 1.0, 1.0, 1.0) == pytest.approx(math.sinh(1) * math.exp(-1), rel=1e-14)
    assert dirichlet_kernel(0.0, 1.0, 0.0, 1.0) == 0.0


@settings(max_examples=200, deadline=None)
@given(kappas, coords, coords)
def test_decomposition_identity(k, x, xp):
    rest = free_kernel(k, x, xp) - dirichlet_kernel(0.0, k, x, xp)
    assert abs(rest - math.exp(-k * (abs(x) + abs(xp))) / (2 * k)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(kappas, betas, coords, coords, coords)
def test_symmetry(k, beta, y, x, xp):
    if abs(2 + beta * k) < 1e-3:
        return
    assert free_kernel(k, x, xp) == free_kernel(k, xp, x)
    assert signed_kernel(k, x, xp) == -signed_kernel(k, xp, x)
    a = delta_prime_kernel(beta, y, k, x, xp)
    b = delta_prime_kernel(beta, y, k, xp, x)
    assert abs(a - b) <= 1e-14 * max(1.0, abs(a))
    assert abs(dirichlet_kernel(y, k, x, xp) - dirichlet_kernel(y, k, xp, x)) <= 1e-14


@settings(max_examples=100, deadline=None)
@given(kappas, betas, coords, coords, coords)
def test_translation_covariance(k, beta, y, x, xp):
    if abs(2 + beta * k) < 1e-3:
        return
    assert delta_prime_kernel(beta, y, k, x, xp) == delta_prime_kernel(beta, 0.0, k, x - y, xp - y)
    assert dirichlet_kernel(y, k, x, xp) == dirichlet_kernel(0.0, k, x - y, xp - y)


@pytest.mark.parametrize("beta,k,xp", [(-1.0, 3.0, 0.7), (0.5, 1.2, -1.3), (2.0, 0.4, 2.5), (-0.3, 9.0, 0.2)])
def test_delta_prime_boundary_conditions(beta, k, xp):
    h = 1e-5
    f = lambda x: delta_prime_kernel(beta, 0.0, k, x, xp)

    def deriv(t):
        return (f(t + h) - f(t - h)) / (2 * h)

    # one-sided derivatives at 0, linearly extrapolated from +-2h and +-4h
    dplus = 2 * deriv(2 * h) - deriv(4 * h)
    dminus = 2 * deriv(-2 * h) - deriv(-4 * h)
    assert abs(dplus - dminus) <= 1e-6
    jump = f(1e-12) - f(-1e-12)
    assert abs(jump - beta * 0.5 * (dplus + dminus)) <= 1e-6


@pytest.mark.parametrize("beta,k", [(-1.0, 3.0), (0.5, 2.0)])
def test_delta_prime_solves_equation_off_support(beta, k):
    # -psi'' + k^2 psi = 0 away from x = x' and x = y
    h = 1e-3
    f = lambda x: delta_prime_kernel(beta, 0.0, k, x, 1.0)
    for x in (-2.0, -0.5, 0.4, 2.0):
        lap = (f(x + h) - 2 * f(x) + f(x - h)) / h**2
        assert abs(-lap + k * k * f(x)) <= 1e-5 * max(1.0, abs(f(x)) * k * k)


def test_dirichlet_matches_image_construction():
    # half-line Green's function by the method of images
    k = 1.7
    for x in np.linspace(0.05, 4, 9):
        for xp in np.linspace(0.05, 4, 9):
            image = (math.exp(-k * abs(x - xp)) - math.exp(-k * (x + xp))) / (2 * k)
            assert dirichlet_kernel(0.0, k, x, xp) == pytest.approx(image, abs=1e-15)
            assert dirichlet_kernel(0.0, k, -x, -xp) == pytest.approx(image, abs=1e-15)


def test_delta_prime_far_correction_bound():
    beta, k = 0.7, 5.0
    c = abs(beta / (2 * (2 + beta * k)))
    for x, xp in [(3.0, 3.0), (-4.0, 2.5), (6.0, -6.0)]:
        corr = abs(delta_prime_kernel(beta, 0.0, k, x, xp) - free_kernel(k, x, xp))
        assert corr <= c * math.exp(-k * (abs(x) + abs(xp))) * (1 + 1e-12)


def test_models_wrap_functions():
    x = np.linspace(-2, 2, 7)
    X, XP = np.meshgrid(x, x, indexing="ij")
    assert np.array_equal(FreeResolvent(2.0)(X, XP), free_kernel(2.0, X, XP))
    m = DeltaPrimeResolvent(0.5, 2.0, 0.3)
    assert m.breakpoints == (0.3,)
    assert np.array_equal(m(X, XP), delta_prime_kernel(0.5, 0.3, 2.0, X, XP))
    d = DirichletResolvent(2.0, -0.2)
    assert d.center == -0.2
    assert np.array_equal(d(X, XP), dirichlet_kernel(-0.2, 2.0, X, XP))
