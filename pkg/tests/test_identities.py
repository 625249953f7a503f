import math
import warnings

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dirichlet_zeros.identities import (
    A_normalization_check,
    A_value,
    H_identity_check,
    H_residue,
    H_three_term,
    H_young,
    H_zero_value,
    S_asymptotic,
    S_asymptotic_check,
    S_asymptotic_fd,
    lemma_zeta_check,
    random_H_points,
)
from dirichlet_zeros.specfun import PoleError, ShiftPair
from dirichlet_zeros.verify import run_suite

SH = ShiftPair(0.01, 0.02, math.log(1000.0))


def _rhs_sympy(q, s):
    # closed form from sympy primitives: phi*(q) = sum_{d|q} mu(d) phi(q/d)
    phistar = sum(sympy.mobius(d) * sympy.totient(q // d) for d in sympy.divisors(q))
    out = complex(phistar) * q ** (-s)
    for p in sympy.primefactors(q):
        out *= 1 - p ** (s - 1)
    return out


@pytest.mark.parametrize("q", [1, 2, 12, 30, 97, 180, 210])
@pytest.mark.parametrize("s", [0.2, 0.7, 0.5 + 1j])
def test_phi_star_divisor_identity(q, s):
    lhs, rhs = lemma_zeta_check(q, s)
    assert abs(rhs - _rhs_sympy(q, s)) <= 1e-12 * (1 + abs(rhs))
    assert abs(lhs - rhs) <= 1e-11 * (1 + abs(rhs))


def _H_mpmath(s, t, a, b, u, v, odd):
    x = a + 1j * t + s + u
    y = b - 1j * t + s + v
    g = mpmath.gamma
    hp = g(x + y) * (g(0.5 - y) / g(0.5 + x) + g(0.5 - x) / g(0.5 + y))
    hm = g(0.5 - x) * g(0.5 - y) / g(1 - x - y)
    return complex(hp - hm if odd else hp + hm)


@pytest.mark.parametrize("odd", [False, True])
def test_H_against_mpmath(odd):
    for s, t, sh, u, v in random_H_points(12, seed=5):
        ref = _H_mpmath(s, t, sh.alpha, sh.beta, u, v, odd)
        assert abs(H_three_term(s, t, sh, u, v, odd) - ref) <= 1e-10 * abs(ref)
        assert abs(H_young(s, t, sh, u, v, odd) - ref) <= 1e-9 * abs(ref)


@settings(max_examples=40, deadline=None)
@given(st.floats(-20, 20), st.floats(1, 50), st.floats(-1, 1), st.booleans())
def test_H_forms_agree_property(im_s, t, im_u, odd):
    chk = H_identity_check(complex(0.1, im_s), t, SH, complex(0.01, im_u), 0.02, odd)
    assert chk.three_term_vs_young < 1e-9
    assert chk.eqH_reflected < 1e-9


def test_eqH_literal_reading_differs():
    chk = H_identity_check(0.1 + 3j, 10.0, SH)
    assert chk.eqH_reflected < 1e-9
    assert chk.eqH_literal > 1e-3


@pytest.mark.parametrize("odd", [False, True])
def test_H_vanishes_at_line(odd):
    for off in (1e-6, 1e-7):
        z = abs(H_zero_value(10.0, SH, 0.01 + 0.3j, 0.02, odd=odd, offset=off))
        assert z < 10 * off


def test_H_residue_even():
    r = H_residue(12.0, SH, v=0.05 + 0.2j)
    # independent limit with mpmath, the pole location built at high precision
    mpmath.mp.dps = 40
    try:
        s0 = mpmath.mpf("0.5") - mpmath.mpf("0.02") + 12j - (mpmath.mpf("0.05") + mpmath.mpf("0.2") * 1j)
        h = mpmath.mpf("1e-15")
        ref = complex(h * _H_mpmath_mp(s0 + h, 12, mpmath.mpf("0.01"), mpmath.mpf("0.02"), 0, mpmath.mpf("0.05") + mpmath.mpf("0.2") * 1j))
    finally:
        mpmath.mp.dps = 15
    assert abs(r.richardson - ref) < 1e-6
    assert abs(r.richardson - (-2.0)) < 1e-3


def _H_mpmath_mp(s, t, a, b, u, v):
    x = mpmath.mpc(a) + 1j * t + s + u
    y = mpmath.mpc(b) - 1j * t + s + v
    g = mpmath.gamma
    return g(x + y) * (g(0.5 - y) / g(0.5 + x) + g(0.5 - x) / g(0.5 + y)) + g(0.5 - x) * g(0.5 - y) / g(1 - x - y)


def test_H_residue_odd_is_zero():
    r = H_residue(12.0, SH, v=0.05 + 0.2j, odd=True)
    assert abs(r.richardson) < 1e-3


def test_pole_guard():
    s0 = 0.5 - SH.beta + 3j - 0.1
    with pytest.raises(PoleError):
        H_three_term(s0, 3.0, SH, 0, 0.1)


def test_A_normalization():
    assert abs(A_normalization_check(1.0, 10000, 1)) < 1e-3
    d = [abs(A_normalization_check(0.5, n, 6)) for n in (2500, 5000, 10000)]
    assert d[2] < d[1] < d[0]
    assert A_value(2.0, 2000, 1) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        A_normalization_check(0.05, 100)
    with pytest.raises(ValueError):
        A_normalization_check(1.0, 10**6)


def test_S_asymptotic_matches_sympy():
    x, y, u, a, b, L = sympy.symbols("x y u a b L")
    P = lambda z: z - z**2 / 3 + z**3 / 3
    F = sympy.integrate(P(x + u) * P(y + u), (u, 0, 1))
    mixed = sympy.diff(sympy.exp(L * (a * x + b * y)) * F, x, y).subs({x: 0, y: 0})
    val = float((mixed / ((a + b) * L)).subs({a: 0.1, b: 0.2, L: math.log(500.0)}))
    coef = (0.0, 1.0, -1 / 3, 1 / 3)
    assert S_asymptotic(500.0, 0.1, 0.2, coef) == pytest.approx(val, rel=1e-12)
    assert S_asymptotic_fd(500.0, 0.1, 0.2, coef) == pytest.approx(val, rel=1e-6)


def test_S_direct_close_to_asymptotic():
    for X in (300.0, 3000.0):
        L = math.log(X)
        d, a = S_asymptotic_check(X, ShiftPair(1 / L, 1 / L, math.log(10 * X)), (0.0, 1.0))
        assert abs(d - a) * L < 10


def test_S_small_shift_warns():
    with pytest.warns(UserWarning):
        S_asymptotic_check(100.0, ShiftPair(0.001, 0.001, 5.0), (0.0, 1.0))


@pytest.mark.parametrize("name", ["zeta", "H", "oddH", "A", "S"])
def test_verify_suites_pass(name):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = run_suite(name)
    assert res["passed"], res["failures"]


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
