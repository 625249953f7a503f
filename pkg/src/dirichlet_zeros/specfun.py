"""Complex special functions used by the L-function and moment code.

log-gamma, the bump weight psi, the kernel G, the gamma ratios X_plus /
X_minus and the contour integrals V_plus / V_minus.  Everything accepts
numpy arrays where that is natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.integrate import quad

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)

# Lanczos g=7, n=9 (Godfrey); relative error of Gamma ~1e-15 for Re z >= 1/2
_LANCZOS_G = 7.0
_LANCZOS_C = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_SHIFT_TO = 7.0  # recurrence moves Re z to at least this before Lanczos


class PoleError(ValueError):
    """Argument at (or numerically at) a pole."""


class ConvergenceError(RuntimeError):
    """A numerical refinement failed to settle within tolerance."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def _lanczos_log(z: np.ndarray) -> np.ndarray:
    zm = z - 1.0
    acc = np.full(zm.shape, _LANCZOS_C[0], dtype=complex)
    for k in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return LOG_SQRT_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma(z):
    """Principal-branch log Gamma(z), vectorized.

    Upward recurrence log G(z) = log G(z+n) - sum log(z+k) keeps the
    principal branch on the slit plane, then Lanczos at Re z >= 7.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    re = arr.real
    near_int = np.abs(arr - np.round(arr.real))
    if np.any((re <= 0.5) & (near_int == 0.0) & (np.round(re) <= 0)):
        raise PoleError("log_gamma evaluated at a nonpositive integer")
    n_shift = np.maximum(0, np.ceil(_SHIFT_TO - re)).astype(np.int64)
    out = np.zeros(arr.shape, dtype=complex)
    nmax = int(n_shift.max()) if n_shift.size else 0
    for k in range(nmax):
        m = n_shift > k
        out[m] -= np.log(arr[m] + k)
    out += _lanczos_log(arr + n_shift)
    return complex(out[0]) if scalar else out


def gamma_ratio(num: list, den: list):
    """exp(sum log_gamma(num) - sum log_gamma(den))."""
    acc = 0
    for z in num:
        acc = acc + log_gamma(z)
    for z in den:
        acc = acc - log_gamma(z)
    return np.exp(acc)


# ---------------------------------------------------------------- weight psi


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = (t > 1.0) & (t < 2.0)
    tm = t[m]
    out[m] = np.exp(4.0 - 1.0 / ((tm - 1.0) * (2.0 - tm)))
    return out


@dataclass(frozen=True)
class SmoothWeight:
    """A nonnegative smooth weight supported on [1, 2]."""

    func: Callable[[np.ndarray], np.ndarray] = _bump
    name: str = "bump"
    support: tuple[float, float] = (1.0, 2.0)

    def __call__(self, t):
        return self.func(t)

    @cached_property
    def hat0(self) -> float:
        """psi-hat(0) = integral of psi over its support."""
        a, b = self.support
        val, _ = quad(lambda x: float(self.func(np.array([x]))[0]), a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
        return val


DEFAULT_WEIGHT = SmoothWeight()


def psi(t):
    """The default bump exp(4 - 1/((t-1)(2-t))) on (1, 2), peak value 1 at t = 3/2."""
    return _bump(t)


# ---------------------------------------------------------------- shifts


@dataclass(frozen=True)
class ShiftPair:
    """Shifts (alpha, beta) together with the scale L = log(qT)."""

    alpha: complex
    beta: complex
    scaleL: float
    slack: float = field(default=40.0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if not self.scaleL > 1.0:
            raise ValueError(f"scaleL = log(qT) must exceed 1, got {self.scaleL}")

    @classmethod
    def for_qT(cls, alpha: complex, beta: complex, q: int, T: float, slack: float = 40.0) -> "ShiftPair":
        return cls(alpha, beta, math.log(q * T), slack)

    @property
    def bound(self) -> float:
        L = self.scaleL
        return self.slack * math.log(L) / L

    def check(self) -> None:
        if abs(self.alpha) > self.bound or abs(self.beta) > self.bound:
            raise ValueError(
                f"shifts |alpha|={abs(self.alpha):.3g}, |beta|={abs(self.beta):.3g} exceed "
                f"{self.slack} loglog(qT)/log(qT) = {self.bound:.3g}"
            )

    @property
    def total(self) -> complex:
        return self.alpha + self.beta

    def swapped(self) -> "ShiftPair":
        return replace(self, alpha=self.beta, beta=self.alpha)

    def reflected(self) -> "ShiftPair":
        """(alpha, beta) -> (-beta, -alpha), the substitution taking the + terms to the - terms."""
        return replace(self, alpha=-self.beta, beta=-self.alpha)

    def with_total(self, total: complex) -> "ShiftPair":
        """Move alpha and beta equally so that alpha + beta = total."""
        d = (total - self.total) / 2
        return replace(self, alpha=self.alpha + d, beta=self.beta + d)


def limit_delta(scaleL: float) -> float:
    return 1e-3 / scaleL


def symmetric_limit(func: Callable[[ShiftPair], complex], shifts: ShiftPair, delta: float | None = None):
    """Average func at alpha + beta = +delta and -delta.

    Used wherever a formula has a removable singularity at alpha + beta = 0.
    """
    if delta is None:
        delta = limit_delta(shifts.scaleL)
    base = shifts.with_total(0.0)
    return 0.5 * (func(base.with_total(delta)) + func(base.with_total(-delta)))


# ---------------------------------------------------------------- G and X


def G(s, shifts: ShiftPair):
    """e^{s^2} (h^2 - s^2)/h^2 with h = (alpha + beta)/2."""
    h = shifts.total / 2
    if h == 0:
        raise ValueError("G needs alpha + beta != 0; use symmetric_limit for the limit")
    s = np.asarray(s, dtype=complex)
    out = np.exp(s * s) * (h * h - s * s) / (h * h)
    return complex(out) if out.ndim == 0 else out


def _offset(parity) -> float:
    if parity in (0, "even"):
        return 0.5
    if parity in (1, "odd"):
        return 1.5
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def _X(s, t: float, shifts: ShiftPair, sign: int, parity, check_poles: bool = True, with_G: bool = True):
    o = _offset(parity)
    s = np.asarray(s, dtype=complex)
    a, b = shifts.alpha, shifts.beta
    n1 = (o + sign * (a + 1j * t) + s) / 2
    n2 = (o + sign * (b - 1j * t) + s) / 2
    if check_poles:
        for z in (n1, n2):
            z = np.atleast_1d(z)
            d = np.abs(z - np.round(z.real))
            if np.any((np.round(z.real) <= 0) & (d < 1e-8)):
                raise PoleError("X evaluated within 1e-8 of a gamma pole")
    d1 = (o + a + 1j * t) / 2
    d2 = (o + b - 1j * t) / 2
    lr = log_gamma(n1) + log_gamma(n2) - log_gamma(d1) - log_gamma(d2)
    out = np.exp(lr)
    if with_G:
        out = G(s, shifts) * out
    return complex(out) if np.ndim(out) == 0 else out


def X_plus(s, t: float, shifts: ShiftPair, parity="even"):
    return _X(s, t, shifts, +1, parity)


def X_minus(s, t: float, shifts: ShiftPair, parity="even"):
    return _X(s, t, shifts, -1, parity)


def X_gamma_part(s, t: float, shifts: ShiftPair, sign: str = "+", parity="even"):
    """X without the G(s) factor; defined also when alpha + beta = 0."""
    return _X(s, t, shifts, {"+": 1, "-": -1}[sign], parity, with_G=False)


def X_minus_at_zero(t, shifts: ShiftPair, parity="even"):
    """X_minus(0, t) = gamma ratio only (G(0) = 1); vectorized over t and valid for alpha + beta = 0."""
    o = _offset(parity)
    t = np.asarray(t, dtype=float)
    a, b = shifts.alpha, shifts.beta
    lr = (
        log_gamma((o - a - 1j * t) / 2)
        + log_gamma((o - b + 1j * t) / 2)
        - log_gamma((o + a + 1j * t) / 2)
        - log_gamma((o + b - 1j * t) / 2)
    )
    return np.exp(lr)


# ---------------------------------------------------------------- V


def trapezoid_truncation(tol: float) -> float:
    return 10.0 + math.sqrt(math.log(1.0 / tol))


def contour_nodes(c: float, S: float, h: float) -> tuple[np.ndarray, float]:
    """Nodes s = c + iy, y in [-S, S] with spacing h; returns (s, h)."""
    n = int(math.ceil(S / h))
    y = h * np.arange(-n, n + 1)
    return c + 1j * y, h


def _V_once(x: np.ndarray, t: float, shifts: ShiftPair, sign: int, parity, c: float, S: float, h: float):
    s, h = contour_nodes(c, S, h)
    ker = _X(s, t, shifts, sign, parity, check_poles=False) / s * (h / (2 * math.pi))
    logx = np.log(x)
    # sum over nodes of ker(s) x^{-s}; rows are x values
    xs = np.exp(-np.outer(logx, s))
    return xs @ ker, np.abs(xs) @ np.abs(ker)


def V(x, t: float, shifts: ShiftPair, sign: str = "+", parity="even", tol: float = 1e-10, c: float = 0.5, h: float | None = None):
    """(1/2 pi i) int_{(c)} X(s,t) x^{-s} ds/s by the trapezoid rule.

    The integrand has no singularity to the right of s = 0, so any c > 0
    gives the same value.  The rule is run at step h and h/2; disagreement
    above tol raises ConvergenceError.
    """
    sg = {"+": 1, "-": -1, 1: 1, -1: -1}[sign]
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise ValueError("V needs x > 0")
    S = trapezoid_truncation(tol)
    if h is None:
        spread = float(np.max(np.abs(np.log(xa)))) + math.log(abs(t) + 2.0)
        h = min(c / 10, 1.0 / (1.0 + spread))
    coarse, _ = _V_once(xa, t, shifts, sg, parity, c, S, h)
    fine, mass = _V_once(xa, t, shifts, sg, parity, c, S, h / 2)
    err = np.abs(fine - coarse)
    # rounding floor: the sum cancels down from sum |terms|
    scale = np.maximum(1.0, np.abs(fine)) + 1e3 * np.finfo(float).eps * mass / tol
    if np.any(err > tol * scale):
        raise ConvergenceError(
            "V quadrature did not settle under step halving",
            {"max_change": float(np.max(err / scale)), "h": h, "S": S, "tol": tol},
        )
    return complex(fine[0]) if np.ndim(x) == 0 else fine


def V_kernel(t: float, shifts: ShiftPair, sign: str, parity, c: float, S: float, h: float):
    """Precomputed (nodes, weights) so V at many x reduces to a matrix product."""
    sg = {"+": 1, "-": -1}[sign]
    s, h = contour_nodes(c, S, h)
    ker = _X(s, t, shifts, sg, parity, check_poles=False) / s * (h / (2 * math.pi))
    return s, ker


def stirling_X_plus_gap(t: float, shifts: ShiftPair, s: complex, parity="even") -> float:
    """|X_plus(s,t) (t/2)^{-s} - G(s)|, which is O(1/t) by Stirling.

    Each gamma quotient contributes (t/2)^{s/2}, so the scale is t/2, not t.
    """
    return abs(X_plus(s, t, shifts, parity) * (t / 2) ** (-s) - G(s, shifts))
