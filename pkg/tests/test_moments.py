import math
import warnings

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from dirichlet_zeros.arith import moebius
from dirichlet_zeros.lfun import L_hurwitz
from dirichlet_zeros.characters import enumerate_characters
from dirichlet_zeros.moments import (
    COEFF_BOUND,
    MomentConfig,
    Mollifier,
    S1,
    S2,
    _direct_triple,
    _double_sum,
    diagonal_sum,
    first_moment,
    literal_main_terms,
    main_term,
    moment_report,
    mollifier_v,
    parity_class_weight,
    principal_L,
    twisted_moment_bruteforce,
)
from dirichlet_zeros.specfun import DEFAULT_WEIGHT


def test_mollifier_v_examples():
    assert mollifier_v(1, 100, 0.55) == pytest.approx(1.0)
    assert mollifier_v(101, 100, 0.55) == 0.0
    a = -(1 - 50 ** (-0.1)) / (1 - 100 ** (-0.1))
    b = -(1 - math.exp(-0.1 * math.log(50))) / (1 - math.exp(-0.1 * math.log(100)))
    assert mollifier_v(2, 100, 0.55) == pytest.approx(a, rel=1e-13)
    assert mollifier_v(2, 100, 0.55) == pytest.approx(b, rel=1e-13)
    assert mollifier_v(6, 100, 0.5) == pytest.approx(math.log(100 / 6) / math.log(100), rel=1e-13)
    assert mollifier_v(6, 100, 0.5 + 1e-9) == pytest.approx(mollifier_v(6, 100, 0.5), rel=1e-6)
    assert mollifier_v(4, 100, 0.6) == 0.0


def test_mollifier_tables():
    for m in (Mollifier.density(200.0, 0.6), Mollifier.levinson(200.0, (0.0, 0.7, 0.3)), Mollifier.unmollified()):
        c = m.coefficients()
        assert c[0] == 0.0 and c[1] == pytest.approx(1.0)
        assert len(c) - 1 <= max(1, m.X)
        assert np.max(np.abs(c)) <= COEFF_BOUND
    c = Mollifier.density(200.0, 0.6).coefficients()
    assert all(c[n] == pytest.approx(mollifier_v(n, 200.0, 0.6)) for n in range(1, 201))
    P = (0.0, 0.7, 0.3)
    c = Mollifier.levinson(200.0, P).coefficients()
    for n in (2, 3, 30, 199):
        x = math.log(200 / n) / math.log(200)
        assert c[n] == pytest.approx(moebius(n) * (0.7 * x + 0.3 * x * x))
    with pytest.raises(ValueError):
        Mollifier("bogus")
    with pytest.raises(ValueError):
        Mollifier.density(1.0, 0.6)


def test_diagonal_sum_matches_direct():
    rng = np.random.default_rng(2)
    c = np.zeros(61)
    c[1:] = rng.normal(size=60)
    for q in (1, 6, 7):
        for ea, eb, ed in ((1.1, 1.2, 1.0), (0.9, 1.0, 1.3)):
            assert diagonal_sum(c, c, q, ea, eb, ed).real == pytest.approx(_direct_triple(c, q, ea, eb, ed), rel=1e-11)


def test_unmollified_double_sum_is_exactly_one():
    cfg = MomentConfig(5, 100.0, 0.01, 0.02)
    assert _double_sum(cfg, 0.01, 0.02, False) == 1.0
    assert _double_sum(cfg, 0.01, 0.02, True) == 1.0


def test_principal_L():
    assert principal_L(2.0, 1) == pytest.approx(math.pi**2 / 6)
    assert principal_L(2.0, 6) == pytest.approx(math.pi**2 / 6 * (1 - 1 / 4) * (1 - 1 / 9))


def test_literal_main_term_q1():
    cfg = MomentConfig(1, 100.0, 0.01, 0.01)
    t1, t2 = literal_main_terms(cfg)
    assert t1 == pytest.approx(DEFAULT_WEIGHT.hat0 / 2 * float(mpmath.zeta(1.02)), rel=1e-10)
    # second term from its display with an independent t-integral
    def integrand(t):
        g = mpmath.loggamma((0.5 - 0.01 - 1j * t) / 2) + mpmath.loggamma((0.5 - 0.01 + 1j * t) / 2)
        g -= mpmath.loggamma((0.5 + 0.01 + 1j * t) / 2) + mpmath.loggamma((0.5 + 0.01 - 1j * t) / 2)
        return float(mpmath.re(mpmath.exp(g))) * float(DEFAULT_WEIGHT(np.array([t / 100]))[0])

    I = quad(integrand, 100, 200, limit=200, epsabs=1e-12)[0]
    ref = 1 / 200 * math.pi ** 0.02 * float(mpmath.zeta(0.98)) * I
    assert t2.real == pytest.approx(ref, rel=1e-8)


def test_parity_weight():
    assert parity_class_weight(1, "even") == (2.0, 1)
    assert parity_class_weight(1, "odd") == (0.0, 0)
    assert parity_class_weight(5, "even") == (pytest.approx(2 / 3), 1)
    assert parity_class_weight(5, "odd") == (pytest.approx(4 / 3), 2)


def test_swap_symmetry_main_and_brute():
    X = (5 * 60.0) ** 0.51
    ma = Mollifier.levinson(X, (0.0, 1.0))
    mb = Mollifier.density(X, 0.6)
    cfg = MomentConfig(5, 60.0, 0.03, 0.05, "odd", ma, mb)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m1 = sum(main_term(cfg))
        m2 = sum(main_term(cfg.swapped()))
    assert abs(m1 - np.conj(m2)) <= 1e-10 * abs(m1)
    b1 = twisted_moment_bruteforce(cfg)
    b2 = twisted_moment_bruteforce(cfg.swapped())
    assert abs(b1 - np.conj(b2)) <= 1e-8 * abs(b1)


def test_unmollified_integrand_is_L_Lbar_psi():
    T = 20.0
    cfg = MomentConfig(1, T, 0.0, 0.0)
    zeta = enumerate_characters(1)[0]

    def f(t):
        return abs(L_hurwitz(0.5 + 1j * t, zeta)) ** 2 * float(DEFAULT_WEIGHT(np.array([t / T]))[0])

    ref = quad(f, T, 2 * T, limit=400, epsabs=1e-11)[0] / T
    assert twisted_moment_bruteforce(cfg).real == pytest.approx(ref, rel=1e-7)


def test_moment_q1_shifted():
    T = 100.0
    rep = moment_report(MomentConfig(1, T, 1 / math.log(T), 1 / math.log(T)))
    assert rep.relative_residual <= 0.05
    assert rep.residual == pytest.approx(rep.brute_force - rep.main)


def test_moment_q5_even():
    rep = moment_report(MomentConfig(5, 100.0, 0.0, 0.0, "even"))
    assert rep.relative_residual < 0.05
    assert not rep.vacuous


def test_vacuous_class():
    rep = moment_report(MomentConfig(3, 100.0, 0.0, 0.0, "even"))
    assert rep.vacuous and rep.brute_force == 0 and rep.main == 0


def test_kappa_warning():
    X = (5 * 100.0) ** 0.6
    cfg = MomentConfig(5, 100.0, 0.01, 0.02, mollifier=Mollifier.levinson(X))
    with pytest.warns(UserWarning):
        main_term(cfg)


def test_thread_count_does_not_change_result():
    X = (8 * 100.0) ** 0.51
    base = MomentConfig(8, 100.0, 0.0, 0.0, "even", Mollifier.levinson(X))
    a = moment_report(base).to_dict()
    b = moment_report(MomentConfig(8, 100.0, 0.0, 0.0, "even", Mollifier.levinson(X), threads=4)).to_dict()
    assert a == b


def test_first_moment():
    r1 = first_moment(1, 100.0, 0.6)
    r2 = first_moment(1, 200.0, 0.6)
    assert r2.relative_residual < r1.relative_residual
    X = (5 * 100.0) ** 0.51
    r = first_moment(5, 100.0, 0.55, Mollifier.density(X, 0.55))
    assert r.relative_residual < 0.1


def test_S_trivial():
    assert S1(1.5, 0.6) == pytest.approx(1.0)
    assert S2(1.5, 0.6) == pytest.approx(1.0)


def test_S_paths_agree():
    for q in (1, 6):
        for x in (100, 500):
            s = 0.5 + 1 / math.log(x)
            assert S1(x, s, q) == pytest.approx(S1(x, s, q, "direct"), rel=1e-11)
            assert S2(x, s, q) == pytest.approx(S2(x, s, q, "direct"), rel=1e-11)


def test_S_laws():
    c1 = c2 = 0.0
    for q in (1, 6):
        for x in (100, 300, 1000):
            for k in (1, 3):
                s = 0.5 + k / math.log(x)
                L = principal_L(2 * s, q).real
                c1 = max(c1, abs(S1(x, s, q) * L - 1) / ((2 * s - 1) * x ** (1 - 2 * s) * math.log(x) ** 2))
                c2 = max(c2, S2(x, s, q) / (L * math.log(x) ** 2))
    assert c1 <= 10
    assert c2 <= 2
