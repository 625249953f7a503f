"""Oracle checks for standalone identities used in the moment computation.

Each check computes two independent sides and returns them (or their
relative gap) so callers can apply their own tolerances.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .arith import divisors, euler_phi, factorize, moebius, phi_star
from .moments import Mollifier, diagonal_sum, principal_L
from .specfun import PoleError, ShiftPair, X_gamma_part, log_gamma


# ---------------------------------------------------------------- divisor identity


def lemma_zeta_check(q: int, s: complex) -> tuple[complex, complex]:
    """Divisor-sum side and closed form of the phi* identity.

    lhs = sum_{w|q} mu(q/w) phi(w) sum_{f|q, (f,w)=1} mu(f) phi(q/f)/q w^-s prod_{p|f}(1 - p^-s)
    rhs = phi*(q) prod_{p|q}(1 - p^{s-1}) q^-s
    """
    s = complex(s)
    lhs = 0j
    divs = divisors(q)
    for w in divs:
        mw = moebius(q // w)
        if mw == 0:
            continue
        inner = 0j
        for f in divs:
            if math.gcd(f, w) != 1:
                continue
            mf = moebius(f)
            if mf == 0:
                continue
            prod = 1 + 0j
            for p in factorize(f).primes:
                prod *= 1 - p ** (-s)
            inner += mf * euler_phi(q // f) / q * prod
        lhs += mw * euler_phi(w) * w ** (-s) * inner
    rhs = phi_star(q) * q ** (-s)
    for p in factorize(q).primes:
        rhs *= 1 - p ** (s - 1)
    return complex(lhs), complex(rhs)


# ---------------------------------------------------------------- H function


def _check_gamma_args(*zs, dist: float = 1e-6):
    for z in zs:
        z = complex(z)
        n = round(z.real)
        if n <= 0 and abs(z - n) < dist:
            raise PoleError(f"gamma argument {z} within {dist} of a pole")


def _lg(z):
    return log_gamma(complex(z))


def _xy(s, t, shifts: ShiftPair, u, v):
    return shifts.alpha + 1j * t + s + u, shifts.beta - 1j * t + s + v


def H_three_term(
    s: complex, t: float, shifts: ShiftPair, u: complex = 0, v: complex = 0, odd: bool = False, pole_dist: float = 1e-6
) -> complex:
    """H_plus +- H_minus in the three-gamma-term form (minus for odd characters)."""
    x, y = _xy(s, t, shifts, u, v)
    _check_gamma_args(x + y, 0.5 - x, 0.5 - y, 0.5 + x, 0.5 + y, 1 - x - y, dist=pole_dist)
    hp = np.exp(_lg(x + y) + _lg(0.5 - y) - _lg(0.5 + x)) + np.exp(_lg(x + y) + _lg(0.5 - x) - _lg(0.5 + y))
    hm = np.exp(_lg(0.5 - x) + _lg(0.5 - y) - _lg(1 - x - y))
    return complex(hp - hm if odd else hp + hm)


def H_young(s: complex, t: float, shifts: ShiftPair, u: complex = 0, v: complex = 0, odd: bool = False) -> complex:
    """The same H as a single gamma quotient (offset 1/2 for even, 3/2 for odd)."""
    x, y = _xy(s, t, shifts, u, v)
    o = 1.5 if odd else 0.5
    _check_gamma_args((x + y) / 2, (o - x) / 2, (o - y) / 2, (o + x) / 2, (o + y) / 2)
    lg = _lg((x + y) / 2) + _lg((o - x) / 2) + _lg((o - y) / 2) - _lg((1 - x - y) / 2) - _lg((o + x) / 2) - _lg((o + y) / 2)
    return complex(math.sqrt(math.pi) * np.exp(lg))


@dataclass
class HCheck:
    three_term_vs_young: float  # relative gap between the two forms of H (any u, v)
    eqH_literal: float  # gap of H X_plus(s) = sqrt(pi) X_minus(s) Gamma ratio, as printed
    eqH_reflected: float  # same with X_minus(-s, t) on the right


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def H_identity_check(s: complex, t: float, shifts: ShiftPair, u: complex = 0, v: complex = 0, odd: bool = False) -> HCheck:
    """Compare the forms of H and the product identity with X_plus / X_minus.

    The product identity only involves u = v = 0.  Written out, the single
    quotient form of H has Gamma((1/2 - alpha - it - s)/2) etc., which is the
    numerator of X_minus at -s rather than at s; both readings are reported.
    """
    h3 = H_three_term(s, t, shifts, u, v, odd)
    hy = H_young(s, t, shifts, u, v, odd)
    parity = "odd" if odd else "even"
    H0 = H_three_term(s, t, shifts, 0, 0, odd)
    a, b = shifts.alpha, shifts.beta
    ratio = np.exp(_lg((a + b + 2 * s) / 2) - _lg((1 - a - b - 2 * s) / 2))
    lhs = H0 * X_gamma_part(s, t, shifts, "+", parity)
    lit = math.sqrt(math.pi) * X_gamma_part(s, t, shifts, "-", parity) * ratio
    ref = math.sqrt(math.pi) * X_gamma_part(-s, t, shifts, "-", parity) * ratio
    # G(s) = G(-s) multiplies both sides equally, so it is left out
    return HCheck(_rel(h3, hy), _rel(lhs, lit), _rel(lhs, ref))


def odd_H_check(s: complex, t: float, shifts: ShiftPair, u: complex = 0, v: complex = 0) -> HCheck:
    return H_identity_check(s, t, shifts, u, v, odd=True)


def H_zero_value(t: float, shifts: ShiftPair, u: complex = 0, v: complex = 0, odd: bool = False, offset: float = 1e-7) -> complex:
    """H just off s0 = (1 - alpha - beta - u - v)/2, where x + y = 1 and H vanishes.

    Gamma(1 - x - y) has a pole there, so H is sampled at s0 + offset.
    """
    s0 = (1 - shifts.alpha - shifts.beta - u - v) / 2
    return H_three_term(s0 + offset, t, shifts, u, v, odd, pole_dist=0.0)


@dataclass
class ResidueCheck:
    s0: complex
    samples: list[tuple[float, complex]]  # (h, h*H(s0+h))
    richardson: complex


def H_residue(t: float, shifts: ShiftPair, v: complex = 0, ks=(3, 4, 5), odd: bool = False) -> ResidueCheck:
    """(s - s0) H(s) at s0 = 1/2 - beta + it - v, at distances 10^-k, with Richardson extrapolation."""
    s0 = 0.5 - shifts.beta + 1j * t - v
    samples = []
    for k in ks:
        h = 10.0 ** (-k)
        samples.append((h, h * H_three_term(s0 + h, t, shifts, 0, v, odd, pole_dist=0.0)))
    # error is linear in h: combine the last two samples
    (h1, r1), (h2, r2) = samples[-2], samples[-1]
    rich = (h1 * r2 - h2 * r1) / (h1 - h2)
    return ResidueCheck(complex(s0), samples, complex(rich))


def random_H_points(n: int, seed: int = 0, re_s: float = 0.1):
    """Admissible (s, t, shifts, u, v) samples: Re s = re_s, t in [1, 50], small real shifts."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n):
        s = complex(re_s, rng.uniform(-20, 20))
        t = float(rng.uniform(1, 50))
        a, b = rng.uniform(0.005, 0.05, 2)
        u, v = complex(rng.uniform(-0.05, 0.05), rng.uniform(-1, 1)), complex(rng.uniform(-0.05, 0.05), rng.uniform(-1, 1))
        pts.append((s, t, ShiftPair(a, b, math.log(100.0)), u, v))
    return pts


# ---------------------------------------------------------------- Euler product normalisation


def A_value(s: float, truncation: int, q: int = 1) -> float:
    """L(1+2s, chi_0) times the (a,b)=1, (abd,q)=1 sum of mu(ad)mu(bd)/(abd)^{1+2s}, ad, bd <= truncation."""
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    mu = np.zeros(truncation + 1)
    if truncation >= 1:
        mu[1:] = Mollifier.levinson(truncation + 0.5, (1.0,)).coefficients()[1 : truncation + 1]
    e = 1 + 2 * s
    total = diagonal_sum(mu, mu, q, e, e, e).real
    return principal_L(1 + 2 * s, q).real * total


def A_normalization_check(s: float, truncation: int, q: int = 1) -> float:
    """A_{s,s}(s,s) - 1 for the truncated sum."""
    if not 0.1 < s <= 2.0:
        raise ValueError("s must lie in (0.1, 2]")
    if truncation > 10**5:
        raise ValueError("truncation above 1e5")
    return A_value(s, truncation, q) - 1.0


# ---------------------------------------------------------------- S(alpha, beta)


def _poly_int01(c: np.ndarray) -> float:
    ci = npoly.polyint(c)
    return float(npoly.polyval(1.0, ci) - npoly.polyval(0.0, ci))


def S_asymptotic(X: float, alpha: float, beta: float, P) -> float:
    """(1/((alpha+beta) log X)) d^2/dxdy X^{alpha x + beta y} int_0^1 P(x+u)P(y+u) du at 0.

    With F(x,y) = int P(x+u)P(y+u) du and L = log X the mixed derivative is
    L^2 alpha beta F + L alpha F_y + L beta F_x + F_xy, all at the origin,
    and F, F_x, F_y, F_xy are integrals of P^2, P P', P P', P'^2.
    """
    c = np.asarray(P, dtype=float)
    dc = npoly.polyder(c)
    L = math.log(X)
    F = _poly_int01(npoly.polymul(c, c))
    Fx = _poly_int01(npoly.polymul(dc, c))
    Fxy = _poly_int01(npoly.polymul(dc, dc))
    mixed = L * L * alpha * beta * F + L * alpha * Fx + L * beta * Fx + Fxy
    return mixed / ((alpha + beta) * L)


def S_asymptotic_fd(X: float, alpha: float, beta: float, P, h: float = 1e-4) -> float:
    """Same mixed derivative by central finite differences (cross-check)."""
    c = np.asarray(P, dtype=float)
    L = math.log(X)

    def F(x, y):
        # int_0^1 P(x+u) P(y+u) du by Gauss-Legendre (exact for polynomials)
        nodes, w = np.polynomial.legendre.leggauss(len(c) + 2)
        u = 0.5 * (nodes + 1)
        return 0.5 * float(np.sum(w * npoly.polyval(x + u, c) * npoly.polyval(y + u, c)))

    def phi(x, y):
        return math.exp(L * (alpha * x + beta * y)) * F(x, y)

    mixed = (phi(h, h) - phi(h, -h) - phi(-h, h) + phi(-h, -h)) / (4 * h * h)
    return mixed / ((alpha + beta) * L)


def S_direct(X: float, alpha: float, beta: float, P, q: int = 1) -> float:
    """L(1+alpha+beta, chi_0) sum mu(ad)P[ad] mu(bd)P[bd] / (a^{1+beta} b^{1+alpha} d)."""
    coef = Mollifier.levinson(X, tuple(P)).coefficients()
    total = diagonal_sum(coef, coef, q, 1 + beta, 1 + alpha, 1.0)
    return float((principal_L(1 + alpha + beta, q) * total).real)


def S_asymptotic_check(X: float, shifts: ShiftPair, P, q: int = 1) -> tuple[float, float]:
    a, b = shifts.alpha.real, shifts.beta.real
    if abs(a + b) * math.log(X) < 0.5:
        warnings.warn("alpha + beta is small compared with 1/log X", stacklevel=2)
    return S_direct(X, a, b, P, q), S_asymptotic(X, a, b, P)
