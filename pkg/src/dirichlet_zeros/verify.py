"""Identity check suites behind `dirichlet-zeros verify`.

Each suite returns {"passed", "failures", "points"}; every point carries its
residual, the tolerance it is held to and a pass flag.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor

from .identities import (
    A_normalization_check,
    H_identity_check,
    H_residue,
    H_three_term,
    H_zero_value,
    S_asymptotic_check,
    S_asymptotic_fd,
    lemma_zeta_check,
    random_H_points,
)
from .specfun import ShiftPair

ZETA_S = (0.2, 0.7, 0.5 + 1j)
ZETA_Q_MAX = 200
ZETA_TOL = 1e-11
H_POINTS = 100
H_TOL = 1e-9
H_SEED = 20240101
RESIDUE_TARGET = -2.0  # see the residue analysis in the README
RESIDUE_TOL = 1e-3
A_TRUNCATIONS = (1250, 2500, 5000, 10000)
A_HALVING_TOL = 0.505
S_X = (300, 1000, 3000)
S_C_MAX = 10.0


def _point(name: str, residual: float, tol: float, **extra) -> dict:
    return {"name": name, "residual": float(residual), "tol": tol, "passed": bool(residual <= tol), **extra}


def _summary(points: list[dict]) -> dict:
    fails = [p["name"] for p in points if not p["passed"]]
    return {"passed": not fails, "failures": fails, "points": points}


def suite_zeta(threads: int = 1) -> dict:
    def one(q):
        out = []
        for s in ZETA_S:
            lhs, rhs = lemma_zeta_check(q, s)
            out.append(_point(f"q={q} s={s}", abs(lhs - rhs) / (1 + abs(rhs)), ZETA_TOL, q=q, s=s))
        return out

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(one, range(1, ZETA_Q_MAX + 1)))
    return _summary([p for part in parts for p in part])


def _suite_H(odd: bool) -> dict:
    pts = []
    for i, (s, t, sh, u, v) in enumerate(random_H_points(H_POINTS, seed=H_SEED + int(odd))):
        chk = H_identity_check(s, t, sh, u, v, odd=odd)
        pts.append(_point(f"forms #{i}", chk.three_term_vs_young, H_TOL, s=s, t=t))
        pts.append(_point(f"eqH #{i}", chk.eqH_reflected, H_TOL, s=s, t=t, literal_residual=chk.eqH_literal))
    sh = ShiftPair(0.01, 0.02, math.log(1000.0))
    for t in (5.0, 20.0):
        off = 1e-7
        z = abs(H_zero_value(t, sh, 0.01 + 0.3j, 0.02 - 0.1j, odd=odd, offset=off))
        # H vanishes linearly, so |H| at distance off is O(off)
        pts.append(_point(f"zero at x+y=1, t={t}", z, 10 * off, t=t))
    return pts


def suite_H(threads: int = 1) -> dict:
    pts = _suite_H(False)
    sh = ShiftPair(0.01, 0.02, math.log(1000.0))
    for t in (5.0, 20.0):
        r = H_residue(t, sh, v=0.05 + 0.2j)
        pts.append(_point(f"residue t={t}", abs(r.richardson - RESIDUE_TARGET), RESIDUE_TOL, t=t, value=r.richardson))
    return _summary(pts)


def suite_oddH(threads: int = 1) -> dict:
    pts = _suite_H(True)
    sh = ShiftPair(0.01, 0.02, math.log(1000.0))
    for t in (5.0, 20.0):
        v = 0.05 + 0.2j
        s0 = 0.5 - sh.beta + 1j * t - v
        hmax = max(abs(H_three_term(s0 + 1e-3 * cmath.exp(2j * math.pi * k / 16), t, sh, 0, v, odd=True)) for k in range(16))
        pts.append(_point(f"bounded near former pole t={t}", hmax, 1e6, t=t))
    return _summary(pts)


def suite_A(threads: int = 1) -> dict:
    pts = []
    for q in (1, 6):
        for s in (0.5, 1.0):
            devs = [abs(A_normalization_check(s, n, q)) for n in A_TRUNCATIONS]
            for n, prev, cur in zip(A_TRUNCATIONS[1:], devs, devs[1:]):
                # the deviation decays like N^{-2s}, so at s = 1/2 it halves exactly up to
                # oscillation; 1% slack absorbs that
                pts.append(_point(f"q={q} s={s} N={n} halving", cur / prev, A_HALVING_TOL, q=q, s=s, deviation=cur))
    pts.append(_point("q=1 s=1 N=10000", abs(A_normalization_check(1.0, 10000, 1)), 1e-3))
    return _summary(pts)


def suite_S(threads: int = 1) -> dict:
    pts = []
    P = (0.0, 1.0)
    for q in (1, 6):
        for X in S_X:
            L = math.log(X)
            sh = ShiftPair(1 / L, 1 / L, math.log(10.0 * X))
            direct, asym = S_asymptotic_check(X, sh, P, q)
            C = abs(direct - asym) * L
            pts.append(_point(f"q={q} X={X} C", C, S_C_MAX, q=q, X=X, direct=direct, asymptotic=asym))
            fd = S_asymptotic_fd(X, 1 / L, 1 / L, P)
            pts.append(_point(f"q={q} X={X} exact vs finite difference", abs(fd - asym), 1e-6, q=q, X=X))
    return _summary(pts)


SUITES = {"zeta": suite_zeta, "H": suite_H, "oddH": suite_oddH, "A": suite_A, "S": suite_S}


def run_suite(name: str, threads: int = 1) -> dict:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](threads)
