import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from dirichlet_zeros.levinson import (
    KAPPA_DEFAULT,
    REF_Q_SLOPE,
    REF_R,
    LevinsonConfig,
    P_from_free,
    c_closed_form,
    c_value,
    exponential_P,
    free_from_P,
    optimize,
    proportion,
    proportion_from_c,
)


def _c_dblquad(P, qs, R, k):
    p = np.polynomial.Polynomial(P)
    dp = p.deriv()

    def f(v, u):
        Q = 1 + qs * v
        d = R * k * p(u) * Q + dp(u) * Q + k * p(u) * qs
        return math.exp(2 * R * v) * d * d

    return 1 + dblquad(f, 0, 1, 0, 1, epsabs=1e-13, epsrel=1e-13)[0] / k


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_closed_form(R):
    cfg = LevinsonConfig((0.0, 1.0), 0.0, R, KAPPA_DEFAULT)
    assert c_value(cfg) == pytest.approx(c_closed_form(R, KAPPA_DEFAULT), rel=1e-10)


def test_closed_form_small_R_limit():
    assert c_closed_form(1e-6, 0.539) == pytest.approx(1 + 1 / 0.539, abs=1e-4)
    assert c_value(LevinsonConfig((0.0, 1.0), 0.0, 1e-6, 0.539)) == pytest.approx(1 + 1 / 0.539, abs=1e-4)


def test_against_dblquad():
    P = (0.0, 1.3, -0.5, 0.2)
    cfg = LevinsonConfig(P, -0.7, 1.1, 0.53)
    assert c_value(cfg) == pytest.approx(_c_dblquad(P, -0.7, 1.1, 0.53), rel=1e-10)


def test_proportion_examples():
    assert proportion_from_c(1.0, 2.0) == 1.0
    with pytest.raises(ValueError):
        proportion_from_c(0.99, 1.0)
    cfg = LevinsonConfig((0.0, 1.0), 0.0, 1.3, 0.539)
    assert proportion(cfg) == pytest.approx(1 - math.log(c_closed_form(1.3, 0.539)) / 1.3, rel=1e-12)
    assert proportion(cfg) < 1


def test_parameterization_roundtrip():
    rng = np.random.default_rng(0)
    for d in range(1, 12):
        b = rng.normal(size=d)
        P = P_from_free(b)
        assert P[0] == 0 and P.sum() == pytest.approx(1.0)
        np.testing.assert_allclose(free_from_P(P), b)


def test_config_validation():
    with pytest.raises(ValueError):
        LevinsonConfig((0.0, 0.5))
    with pytest.raises(ValueError):
        LevinsonConfig((0.1, 0.9))
    with pytest.raises(ValueError):
        LevinsonConfig((0.0, 1.0), R=0.0)
    with pytest.raises(ValueError):
        LevinsonConfig((0.0, 1.0), kappa=0.6)
    with pytest.raises(ValueError):
        LevinsonConfig(tuple([0.0] * 13 + [1.0]))
    assert LevinsonConfig().q_linear
    assert not LevinsonConfig(Q_extra=(0.1,)).q_linear


def test_node_doubling_invariance_at_reference_point():
    P = exponential_P(1.025, -1.025)
    P[1] += 1 - P.sum()
    cfg = LevinsonConfig(tuple(P), REF_Q_SLOPE, REF_R, KAPPA_DEFAULT)
    a = c_value(cfg, tol=1e-12)
    b = c_value(cfg, tol=1e-12, n0=64)
    assert abs(a - b) < 1e-9
    assert proportion(cfg) == pytest.approx(0.382156, abs=5e-4)


def test_exponential_P_constraints():
    P = exponential_P(2.0, -1.0)
    assert P[0] == 0 and P.sum() == pytest.approx(1.0)
    x = np.linspace(0, 1, 11)
    target = (np.exp(2 * x) - np.exp(-x)) / (math.exp(2) - math.exp(-1))
    assert np.max(np.abs(np.polynomial.polynomial.polyval(x, P) - target)) < 1e-8
    with pytest.raises(ValueError):
        exponential_P(1.0, 1.0)


def test_optimizer_small_runs():
    kw = dict(degree=3, n_starts=3, maxfev=1500, family=False)
    a = optimize(0.53, **kw)
    b = optimize(0.53, **kw)
    assert a.to_dict() == b.to_dict()
    assert len(a.starts) == 3
    assert a.label == "simple zeros on the line"
    # longer mollifier helps
    assert optimize(0.539, **kw).proportion > a.proportion
    # forcing P(x) = x is worse
    one = optimize(0.53, degree=1, n_starts=1, family=False)
    assert one.proportion < a.proportion
    assert one.config.P == (0.0, 1.0)


def test_optimizer_q_degree_label():
    r = optimize(0.53, degree=2, n_starts=1, q_degree=2, maxfev=800, family=False)
    assert r.label == "zeros on the line, simplicity not implied"


def test_optimizer_validation():
    with pytest.raises(ValueError):
        optimize(0.5)
    with pytest.raises(ValueError):
        optimize(0.53, degree=13)
    with pytest.raises(ValueError):
        optimize(0.53, fixed_RQ=(1.0, -1.0), q_degree=2)
