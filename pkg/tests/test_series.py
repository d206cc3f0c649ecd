import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from deltaprime.errors import DivisionByZeroSeries, UnknownExpansionId, ValuationMismatch
from deltaprime.series import (
    ExpansionId,
    Jet,
    gamma_inv_jet,
    gamma_inv_leading,
    jet_D,
    jet_N,
    jet_add,
    jet_div,
    jet_exp,
    jet_mul,
    jet_scale,
    jet_sub,
    jet_u,
    jet_v,
    jet_w,
    verify_expansion,
)

coef = st.floats(-10, 10)
jets = st.lists(coef, min_size=5, max_size=5).map(Jet)

M = 6


def close(x, y, tol=1e-13):
    scale = max([1.0] + [abs(c) for c in x.coeffs + y.coeffs])
    for k in range(min(x.valuation, y.valuation), min(x.order, y.order) + 1):
        assert abs(x.coeff(k) - y.coeff(k)) <= tol * scale


@settings(max_examples=100, deadline=None)
@given(jets, jets, jets)
def test_ring_laws(x, y, z):
    close(x * y, y * x)
    close((x * y) * z, x * (y * z), 1e-12)
    close(x * (y + z), x * y + x * z, 1e-12)
    close(x + y - y, x)


def test_wrappers_agree_with_operators():
    x, y = Jet([1.0, 2.0, 3.0]), Jet([2.0, -1.0, 0.5])
    close(jet_add(x, y), x + y)
    close(jet_sub(x, y), x - y)
    close(jet_mul(x, y), x * y)
    close(jet_div(x, y), x / y)
    close(jet_scale(x, 3.0), 3.0 * x)
    close(jet_exp(Jet([0.0, 1.0, 0.0])), Jet([0.0, 1.0, 0.0]).exp())


def test_exp_of_a():
    e = Jet.variable(5).exp()
    assert e.coeffs == pytest.approx([1 / math.factorial(k) for k in range(6)], rel=1e-15)
    e2 = Jet([1.0, 1.0, 0.0]).exp()
    assert e2.coeffs == pytest.approx([math.e, math.e, math.e / 2], rel=1e-15)
    with pytest.raises(ValuationMismatch):
        Jet([1.0, 0.0], valuation=-1).exp()


def test_division_examples():
    one_minus_a = Jet([1.0, -1.0, 0.0, 0.0, 0.0])
    geo = Jet.constant(1.0, 4) / one_minus_a
    assert geo.coeffs == pytest.approx([1.0] * 5)
    a2 = Jet([0.0, 0.0, 1.0, 0.0])
    with pytest.raises(ValuationMismatch):
        Jet.constant(1.0, 3).divide(a2)
    pole = Jet.constant(1.0, 3).divide(a2, laurent=True)
    assert pole.valuation == -2 and pole.coeffs[0] == 1.0
    with pytest.raises(DivisionByZeroSeries):
        Jet([1.0, 2.0]) / Jet([0.0, 0.0])


def test_exact_coefficients_stay_exact():
    x = Jet([Fraction(1), Fraction(1, 2), Fraction(0)])
    q = Jet.constant(Fraction(1), 2) / x
    assert q.coeffs == [Fraction(1), Fraction(-1, 2), Fraction(1, 4)]


def test_trim_and_order_errors():
    j = Jet([1e-18, 1e-20, 2.0, 1.0])
    t = j.trim(1e-10)
    assert t.valuation == 2 and t.coeffs == [2.0, 1.0]
    with pytest.raises(IndexError):
        j.coeff(4)
    assert j.coeff(-3) == 0.0
    with pytest.raises(ValueError):
        Jet([])
    with pytest.raises(ValueError):
        Jet([math.nan])


def test_building_blocks():
    k, b = 3.0, -1.0
    a = 1e-3
    u = 2 * b * k * a / (2 * a - b)
    assert jet_u(k, b, M)(a) == pytest.approx(u, rel=1e-15)
    assert jet_v(k, b, M)(a) == pytest.approx(2 * k * a * a / b, rel=1e-15)
    assert jet_w(k, M)(a) == pytest.approx(math.exp(-k * a), rel=1e-15)
    assert jet_w(k, M, power=-2)(a) == pytest.approx(math.exp(2 * k * a), rel=1e-15)


def test_parse_ids():
    assert ExpansionId.parse("DEXP") is ExpansionId.DEXP
    assert ExpansionId.parse(ExpansionId.NEXP) is ExpansionId.NEXP
    with pytest.raises(UnknownExpansionId):
        ExpansionId.parse("bogus")
    assert sorted(m.value for m in ExpansionId) == sorted(
        ["dexp", "nexp", "nexp2", "limkern", "gammainv", "dalpha", "nalpha"])


def test_spec_point_examples():
    r = verify_expansion("dexp", {"kappa": 3, "beta": -1})
    assert r.passed
    assert r.rows[-1].computed == pytest.approx(-18.0, rel=1e-9)
    r = verify_expansion("nalpha", {"kappa": 1, "beta": -1, "alpha": 2}, M=4)
    assert r.passed and r.rows[-1].order == 2
    assert r.rows[-1].computed == pytest.approx(-4.0, rel=1e-9)
    r = verify_expansion("dalpha", {"kappa": 1, "beta": -1, "alpha": 2}, M=4)
    assert r.passed and r.rows[-1].computed == pytest.approx(-2.0, rel=1e-9)
    r = verify_expansion("limkern", {"kappa": 3, "beta": -1})
    assert r.passed and r.rows[-1].computed == pytest.approx(-0.5, rel=1e-9)
    assert "PASS" in r.format()


def test_verify_preconditions():
    with pytest.raises(ValueError):
        verify_expansion("dalpha", {"kappa": 1, "beta": -1, "alpha": 1})
    with pytest.raises(ValueError):
        verify_expansion("dexp", {"kappa": 1, "beta": -1, "alpha": 2})
    with pytest.raises(ValueError):
        verify_expansion("limkern", {"kappa": 2, "beta": -1})


def test_disbalanced_leading_terms_are_quadratic_in_defect():
    # the a^2 coefficients for alpha and 2 - alpha differ; (1 - alpha)^2 would not
    for al in (0.5, 2.0, 3.0):
        d = jet_D(1.0, -1.0, al, M)
        assert d.coeff(2) == pytest.approx(-2 * (1 - al) ** 2, rel=1e-12)
        n = jet_N(1.0, -1.0, al, "outer", M)
        assert n.coeff(2) == pytest.approx(-4 * (1 - al) ** 2, rel=1e-12)


@pytest.mark.parametrize("k,b", [(3.0, -1.0), (1.0, 0.5), (4.0, 2.0)])
def test_cancellation_witness(k, b):
    n = jet_N(k, b, 1, "outer", M)
    lead = abs(n.coeff(4))
    for p in range(4):
        assert abs(n.coeff(p)) <= 1e-10 * lead


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(list(ExpansionId)), st.floats(0.5, 5.0),
       st.one_of(st.floats(-3.0, -0.3), st.floats(0.3, 3.0)), st.sampled_from([0.5, 2.0, 3.0]))
def test_all_expansions_pass(tid, k, b, al):
    if abs(2 + b * k) < 0.1:
        return
    alpha = al if tid in (ExpansionId.DALPHA, ExpansionId.NALPHA) else 1.0
    assert verify_expansion(tid, {"kappa": k, "beta": b, "alpha": alpha}).passed


# high-precision oracles ---------------------------------------------------

def _mp_gamma(k, b, al, a):
    u = al * 2 * b * k * a / (2 * a - b)
    v = al * 2 * k * a * a / b
    w = mpmath.exp(-k * a)
    return mpmath.matrix([[1 + u, w, w * w], [w, 1 + v, w], [w * w, w, 1 + u]]) / (2 * k)


def _mp_exact(tid, k, b, al, a):
    """Target quantity from a 60-digit matrix inverse and determinant."""
    g = _mp_gamma(k, b, al, a)
    gi = g**-1
    y = [-a, 0, a]
    d = -(2 * k) ** 2 * mpmath.det(g)
    outer = sum(gi[i, j] * mpmath.exp(k * (y[i] + y[j])) for i in range(3) for j in range(3)) / (4 * k * k)
    mixed = sum(gi[i, j] * mpmath.exp(k * (y[j] - y[i])) for i in range(3) for j in range(3)) / (4 * k * k)
    if tid in (ExpansionId.DEXP, ExpansionId.DALPHA):
        return d
    if tid in (ExpansionId.NEXP, ExpansionId.NALPHA):
        return outer * 4 * k * k * d
    if tid is ExpansionId.NEXP2:
        return mixed * 4 * k * k * d
    if tid is ExpansionId.LIMKERN:
        return outer
    return gi[0, 0]


def _mp_jet(tid, k, b, al):
    if tid in (ExpansionId.DEXP, ExpansionId.DALPHA):
        return jet_D(k, b, al, M)
    if tid in (ExpansionId.NEXP, ExpansionId.NALPHA):
        return jet_N(k, b, al, "outer", M)
    if tid is ExpansionId.NEXP2:
        return jet_N(k, b, al, "mixed", M)
    if tid is ExpansionId.LIMKERN:
        return jet_N(k, b, al, "outer", M).divide(jet_D(k, b, al, M), rtol=1e-40).scale(1 / (4 * k * k))
    return gamma_inv_jet(k, b, al, M, rtol=1e-40)[0][0]


@pytest.mark.parametrize("tid", list(ExpansionId))
def test_richardson_against_mpmath(tid):
    mpmath.mp.dps = 60
    k, b = mpmath.mpf(3), mpmath.mpf(-1)
    al = mpmath.mpf(2) if tid in (ExpansionId.DALPHA, ExpansionId.NALPHA) else mpmath.mpf(1)
    jet = _mp_jet(tid, k, b, al)
    top = jet.order
    scaled = []
    for a in (mpmath.mpf("1e-2"), mpmath.mpf("1e-3"), mpmath.mpf("1e-4")):
        err = abs(_mp_exact(tid, k, b, al, a) - jet(a))
        scaled.append(err / a**top)
    for s0, s1 in zip(scaled, scaled[1:]):
        assert 8 <= s0 / s1 <= 12


def test_gamma_inverse_leading_matches_mpmath():
    mpmath.mp.dps = 50
    k, b = 3.0, -1.0
    a = mpmath.mpf("1e-6")
    gi = _mp_gamma(mpmath.mpf(k), mpmath.mpf(b), 1, a) ** -1
    lead = gamma_inv_leading(k, b)
    for i in range(3):
        for j in range(3):
            assert float(gi[i, j] * a * a) == pytest.approx(lead[i][j], rel=1e-4)
    assert lead[0][0] == pytest.approx(-2 / 3)


def test_gamma_inverse_valuations():
    gi = gamma_inv_jet(3.0, -1.0, 1, M)
    assert all(gi[i][j].valuation == -2 for i in range(3) for j in range(3))
    gi2 = gamma_inv_jet(3.0, -1.0, 2.0, M)
    assert min(gi2[i][j].valuation for i in range(3) for j in range(3)) == -1
