"""Dirichlet L-function evaluation and zero counting.

Two evaluators: Hurwitz zeta (Euler-Maclaurin) and a smoothed approximate
functional equation.  On top of these sit the completed function, the real
Z-function on the critical line and argument-principle zero counts.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .arith import factorize
from .characters import DirichletCharacter, root_number
from .specfun import ConvergenceError, PoleError, ShiftPair, V_kernel, contour_nodes, log_gamma

# B_2, B_4, ..., B_14
_BERNOULLI_EVEN = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


@dataclass(frozen=True)
class LEvalConfig:
    method: str = "hurwitz"  # or "afe"
    em_order: int = 12  # 2M, Bernoulli terms up to B_{2M}
    n0_min: int = 50
    tol: float = 1e-10

    def __post_init__(self):
        if self.method not in ("hurwitz", "afe"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 1e-12 <= self.tol <= 1e-4:
            raise ValueError(f"tol must lie in [1e-12, 1e-4], got {self.tol}")
        if self.em_order % 2 or not 2 <= self.em_order <= 2 * len(_BERNOULLI_EVEN):
            raise ValueError(f"em_order must be even and <= {2 * len(_BERNOULLI_EVEN)}")


DEFAULT_CONFIG = LEvalConfig()


def hurwitz_zeta(s, a: float, em_order: int = 12, n0_min: int = 50, drop_pole: bool = False):
    """zeta(s, a) = sum_{k>=0} (k+a)^{-s} by Euler-Maclaurin, vectorized in s.

    N0 = max(n0_min, 2 max|Im s|) terms are summed directly.  With drop_pole
    the entire function zeta(s, a) - 1/(s-1) is returned instead, which is
    what character sums with sum chi(a) = 0 need at s = 1.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError(f"a must lie in (0, 1], got {a}")
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    at_one = s_arr == 1.0
    if np.any(at_one) and not drop_pole:
        raise PoleError("hurwitz_zeta has a pole at s = 1")
    N = int(max(n0_min, math.ceil(2 * float(np.max(np.abs(s_arr.imag))))))
    logk = np.log(np.arange(N) + a)
    total = np.exp(-np.outer(s_arr, logk)).sum(axis=1)
    x = N + a
    lx = math.log(x)
    xs = np.exp(-s_arr * lx)  # x^{-s}
    if drop_pole:
        # (x^{1-s} - 1)/(s - 1) without cancellation near s = 1
        u = (1 - s_arr) * lx
        safe = np.where(at_one, 1.0, u)
        total += np.where(at_one, -lx, -lx * np.expm1(safe) / safe) + 0.5 * xs
    else:
        total += x * xs / (s_arr - 1) + 0.5 * xs
    # B_{2j}/(2j)! * s(s+1)...(s+2j-2) x^{-s-2j+1}
    fac = s_arr * xs / x
    for j in range(1, em_order // 2 + 1):
        total += _BERNOULLI_EVEN[j - 1] / math.factorial(2 * j) * fac
        fac = fac * (s_arr + 2 * j - 1) * (s_arr + 2 * j) / (x * x)
    return complex(total[0]) if np.ndim(s) == 0 else total


def hurwitz_table(s, q: int, cfg: LEvalConfig = DEFAULT_CONFIG, drop_pole: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """zeta(s, a/q) for every a coprime to q; returns (residues, table[len(a), len(s)])."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    res = np.array([a for a in range(1, q + 1) if math.gcd(a, q) == 1])
    table = np.array([hurwitz_zeta(s_arr, a / q, cfg.em_order, cfg.n0_min, drop_pole) for a in res])
    return res, table


def L_from_table(chi: DirichletCharacter, s, residues: np.ndarray, table: np.ndarray):
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    vals = chi.values[residues % chi.q]
    return np.exp(-s_arr * math.log(chi.q)) * (vals @ table)


def L_hurwitz(s, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG):
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if chi.is_principal and np.any(s_arr == 1.0):
        raise PoleError("L(s, principal) has a pole at s = 1")
    # sum chi(a) = 0 for non-principal chi, so the 1/(s-1) parts cancel exactly
    res, table = hurwitz_table(s_arr, chi.q, cfg, drop_pole=not chi.is_principal)
    out = L_from_table(chi, s_arr, res, table)
    return complex(out[0]) if np.ndim(s) == 0 else out


def L_many(s, chars: list[DirichletCharacter], cfg: LEvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """L(s, chi) for several characters of one modulus, sharing the Hurwitz table.

    Rows follow the order of ``chars``.
    """
    if not chars:
        return np.zeros((0, np.size(s)), dtype=complex)
    q = chars[0].q
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    drop = not any(c.is_principal for c in chars)
    res, table = hurwitz_table(s_arr, q, cfg, drop_pole=drop)
    vals = np.array([c.values[res % q] for c in chars])
    return np.exp(-s_arr * math.log(q))[None, :] * (vals @ table)


# ---------------------------------------------------------------- gamma factor


def _parity_a(chi: DirichletCharacter) -> int:
    return chi.parity


def log_gamma_factor(s, q: int, a: int):
    """log of (q/pi)^{(s+a)/2} Gamma((s+a)/2)."""
    s = np.asarray(s, dtype=complex)
    return (s + a) / 2 * math.log(q / math.pi) + log_gamma((s + a) / 2)


# ---------------------------------------------------------------- smoothed AFE

_AFE_B = 16.0  # kernel exp(w^2 / B)


def _afe_kernel(w):
    return np.exp(w * w / _AFE_B)


def _afe_weights(s: complex, q: int, a: int, nmax: int, tol: float, c: float = 1.5):
    """W1(n), W2(n) for n = 1..nmax and the quantities needed for the pole terms."""
    Y = math.sqrt(_AFE_B * (math.log(1.0 / tol) + 20.0))
    h = 0.05
    w, h = contour_nodes(c, Y, h)
    lg_s = complex(log_gamma_factor(s, q, a))
    k1 = np.exp(log_gamma_factor(s + w, q, a) - lg_s) * _afe_kernel(w) / w * (h / (2 * math.pi))
    k2 = np.exp(log_gamma_factor(1 - s + w, q, a) - lg_s) * _afe_kernel(w) / w * (h / (2 * math.pi))
    logn = np.log(np.arange(1, nmax + 1))
    E = np.exp(-np.outer(logn, w))
    return E @ k1, E @ k2, lg_s


def _afe_length(s: complex, q: int, tol: float) -> int:
    # W(n) ~ exp(-(B/4) log^2(n/n0)) beyond n0 = sqrt(q|t|/2pi)
    n0 = math.sqrt(q * (abs(s.imag) + 2.0) / (2 * math.pi))
    return int(math.ceil(n0 * math.exp(math.sqrt(4.0 * (math.log(1.0 / tol) + 10.0) / _AFE_B)))) + 5


def L_afe(s: complex, chi: DirichletCharacter, tol: float = 1e-12) -> complex:
    """L(s, chi) from the smoothed approximate functional equation.

    Non-primitive characters are reduced to the inducing primitive one and the
    missing Euler factors restored.
    """
    s = complex(s)
    if not chi.is_primitive:
        prim = chi.primitive_character()
        val = L_afe(s, prim, tol)
        for p in factorize(chi.q).primes:
            val *= 1 - prim(p) * p ** (-s)
        return val
    q, a = chi.q, _parity_a(chi)
    nmax = _afe_length(s, q, tol)
    W1, W2, lg_s = _afe_weights(s, q, a, nmax, tol)
    n = np.arange(1, nmax + 1)
    vals = chi.values[n % q]
    first = np.sum(vals * np.exp(-s * np.log(n)) * W1)
    eps = root_number(chi)
    second = eps * np.sum(np.conj(vals) * np.exp((s - 1) * np.log(n)) * W2)
    out = first + second
    if q == 1:
        # poles of the completed zeta at 0 and 1: Lambda(s) = I - dual - G(1-s)/(1-s) - G(s)/s
        out -= np.exp(-lg_s) * (_afe_kernel(1 - s) / (1 - s) + _afe_kernel(s) / s)
    return complex(out)


def L_value(s, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG):
    if cfg.method == "hurwitz":
        return L_hurwitz(s, chi, cfg)
    if np.ndim(s) == 0:
        return L_afe(complex(s), chi, min(cfg.tol, 1e-12))
    return np.array([L_afe(complex(x), chi, min(cfg.tol, 1e-12)) for x in np.ravel(s)]).reshape(np.shape(s))


def afe_product(alpha: complex, beta: complex, t: float, chi: DirichletCharacter, tol: float = 1e-7):
    """L(1/2+alpha+it, chi) L(1/2+beta-it, chi-bar) from the V_plus / V_minus expansion.

    The double sums over m, n are grouped by k = mn; V is evaluated at pi k/q.
    Needs a primitive character and alpha + beta away from 0 (the G kernel
    carries a 1/((alpha+beta)/2)^2 factor).
    """
    if not chi.is_primitive:
        raise ValueError("afe_product needs a primitive character")
    q = chi.q
    parity = "odd" if chi.parity else "even"
    shifts = ShiftPair(alpha, beta, max(math.log(q * max(abs(t), 3.0)), 1.1))
    c, h = 0.5, 0.08
    S = 10.0 + math.sqrt(math.log(1.0 / tol))
    sp, kp = V_kernel(t, shifts, "+", parity, c, S, h)
    sm, km = V_kernel(t, shifts, "-", parity, c, S, h)
    # V(x) <= sum|ker| x^{-c}... find K where the Gaussian tail is below tol
    mass = float(np.sum(np.abs(kp)) + np.sum(np.abs(km)))
    K = _product_length(t, q, shifts, parity, tol, mass)
    k = np.arange(1, K + 1)
    vals = chi.values[k % q]
    A1, B1 = 0.5 + alpha + 1j * t, 0.5 + beta - 1j * t
    A2, B2 = 0.5 - beta + 1j * t, 0.5 - alpha - 1j * t
    c_plus = _convolve_series(vals * np.exp(-A1 * np.log(k)), np.conj(vals) * np.exp(-B1 * np.log(k)), K)
    c_minus = _convolve_series(vals * np.exp(-A2 * np.log(k)), np.conj(vals) * np.exp(-B2 * np.log(k)), K)
    # V is smooth in log x: tabulate on a fine log grid and spline
    logx = np.log(math.pi * k / q)
    grid = np.linspace(logx[0], logx[-1], 4097)
    Vp = _spline_complex(grid, np.exp(-np.outer(grid, sp)) @ kp)(logx)
    Vm = _spline_complex(grid, np.exp(-np.outer(grid, sm)) @ km)(logx)
    return complex(np.sum(c_plus * Vp) + (q / math.pi) ** (-alpha - beta) * np.sum(c_minus * Vm))


def _spline_complex(x, y):
    from scipy.interpolate import CubicSpline

    re, im = CubicSpline(x, y.real), CubicSpline(x, y.imag)
    return lambda u: re(u) + 1j * im(u)


def _product_length(t, q, shifts, parity, tol, mass) -> int:
    K = 16
    while K <= 2**22:
        x = math.pi * K / q
        v = abs(complex(np.atleast_1d(_V_scalar(x, t, shifts, parity))[0]))
        # tail of sum d(k) k^{-1/2} |V(pi k/q)| beyond K
        if v * math.sqrt(K) < tol:
            return K
        K *= 2
    raise ConvergenceError("afe_product needs more than 2^22 terms", {"t": t, "q": q})


def _V_scalar(x, t, shifts, parity):
    from .specfun import V

    return V(np.array([x]), t, shifts, "+", parity, tol=1e-13)


def _convolve_series(f: np.ndarray, g: np.ndarray, K: int) -> np.ndarray:
    """(f * g)(k) = sum_{mn=k} f(m) g(n) for k = 1..K; f[0] is f(1)."""
    out = np.zeros(K, dtype=complex)
    for m in range(1, K + 1):
        cnt = K // m
        out[m - 1 :: m][:cnt] += f[m - 1] * g[:cnt]
    return out


# ---------------------------------------------------------------- completed function


def log_Lambda(s, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG):
    """log of (q/pi)^{(s+a)/2} Gamma((s+a)/2) L(s, chi) for primitive chi, with
    L evaluated through the functional equation when Re s < 1/2.

    The imaginary part is a phase representative, not a continuous branch.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=complex))
    q, a = chi.q, _parity_a(chi)
    out = np.empty(s_arr.shape, dtype=complex)
    right = s_arr.real >= 0.5
    if np.any(right):
        sr = s_arr[right]
        out[right] = log_gamma_factor(sr, q, a) + np.log(L_hurwitz(sr, chi, cfg).astype(complex))
    if np.any(~right):
        sl = 1 - s_arr[~right]
        eps = root_number(chi)
        lam = log_gamma_factor(sl, q, a) + np.log(L_hurwitz(sl, chi.conj(), cfg).astype(complex))
        out[~right] = np.log(eps) + lam
    return complex(out[0]) if np.ndim(s) == 0 else out


def Lambda(s, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG):
    """Completed L-function evaluated directly (no functional-equation switch)."""
    s = np.asarray(s, dtype=complex)
    q, a = chi.q, _parity_a(chi)
    return np.exp(log_gamma_factor(s, q, a)) * L_hurwitz(s, chi, cfg)


def functional_equation_residual(s, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG) -> float:
    """|Lambda(s,chi) - eps Lambda(1-s, chi-bar)| / |Lambda(s,chi)|, both sides by Hurwitz."""
    lhs = Lambda(s, chi, cfg)
    rhs = root_number(chi) * Lambda(1 - np.asarray(s), chi.conj(), cfg)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), 1e-300)))


def completed_Z(t, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG, return_imag: bool = False):
    """Real rotation of L(1/2+it, chi): eps^{-1/2} (q/pi)^{it/2} e^{i arg Gamma((1/2+a+it)/2)} L.

    With return_imag the discarded imaginary part is returned too.
    """
    if not chi.is_primitive:
        raise ValueError("completed_Z needs a primitive character")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    q, a = chi.q, _parity_a(chi)
    s = 0.5 + 1j * t_arr
    eps = root_number(chi)
    phase = np.exp(1j * (t_arr / 2 * math.log(q / math.pi) + log_gamma((0.5 + a + 1j * t_arr) / 2).imag))
    val = L_hurwitz(s, chi, cfg) * phase / np.sqrt(eps)
    re, im = val.real, val.imag
    if np.ndim(t) == 0:
        re, im = float(re[0]), float(im[0])
    return (re, im) if return_imag else re


# ---------------------------------------------------------------- zero counts


@dataclass
class ZeroCounts:
    q: int
    chi_index: int
    T: float
    N: int | None = None
    N0: int | None = None
    sigma: float | None = None
    rectangle_count: int | None = None
    jiggles: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


class NearContourError(ConvergenceError):
    pass


def _winding(func_log, path: np.ndarray, max_step: float = 0.4, max_rounds: int = 40):
    """Total phase change of exp(func_log) around the closed polyline ``path``.

    Segments whose wrapped phase increment exceeds max_step are bisected until
    none do.  Returns (winding number as float, points used, min |value|).
    """
    pts = path
    lv = func_log(pts)
    for _ in range(max_rounds):
        d = np.angle(np.exp(1j * (np.diff(lv.imag))))
        bad = np.nonzero(np.abs(d) > max_step)[0]
        if bad.size == 0:
            break
        mids = 0.5 * (pts[bad] + pts[bad + 1])
        lm = func_log(mids)
        pts = np.insert(pts, bad + 1, mids)
        lv = np.insert(lv, bad + 1, lm)
    else:
        raise NearContourError("phase tracking did not resolve; zero near contour, jiggle T")
    d = np.angle(np.exp(1j * np.diff(lv.imag)))
    return float(np.sum(d)) / (2 * math.pi), pts, lv


def _rect_path(x0: float, x1: float, y0: float, y1: float, step: float) -> np.ndarray:
    def seg(a: complex, b: complex) -> np.ndarray:
        n = max(2, int(math.ceil(abs(b - a) / step)))
        return a + (b - a) * np.arange(n) / n

    c = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    return np.concatenate([seg(c[0], c[1]), seg(c[1], c[2]), seg(c[2], c[3]), seg(c[3], c[0]), [c[0]]])


def _count_once_N(T: float, chi: DirichletCharacter, cfg: LEvalConfig, delta: float) -> tuple[float, float]:
    def flog(s):
        out = log_Lambda(s, chi, cfg)
        if chi.q == 1:
            out = out + np.log(s * (s - 1))
        return out

    # for zeta the bottom edge is lifted off the real axis, away from s = 0, 1
    y0 = 1e-2 if chi.q == 1 else 0.0
    path = _rect_path(-0.5 - delta, 1.5 + delta, y0, T, 0.1)
    w, pts, lv = _winding(flog, path)
    # on the critical strip part of the top edge a small |L| signals a zero close to height T
    top = (np.abs(pts.imag - T) < 1e-12) & (pts.real > -0.01) & (pts.real < 1.01)
    lmin = float(np.min(np.abs(L_hurwitz(pts[top], chi, cfg)))) if np.any(top) else 1.0
    return w, lmin


def _with_jiggle(fn, T: float, counts: ZeroCounts, max_k: int = 5):
    last_exc = None
    for k in range(max_k + 1):
        Tk = T + 0.37 * k * 1e-3
        try:
            w, lmin = fn(Tk)
        except NearContourError as exc:
            last_exc = exc
            continue
        resid = abs(w - round(w))
        if resid < 0.1 and lmin > 1e-5:
            counts.jiggles = k
            if k:
                counts.notes.append(f"T jiggled to {Tk:.6f}")
            return int(round(w))
        last_exc = NearContourError(
            "winding residual too large; zero near contour, jiggle T",
            {"T": Tk, "residual": resid, "min_abs_L": lmin},
        )
    raise last_exc


def count_N(T: float, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG, delta: float = 0.1) -> int:
    """Zeros of L(s, chi) with 0 < Im < T, by the argument principle on the completed function."""
    return count_N_report(T, chi, cfg, delta).N


def count_N_report(T: float, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG, delta: float = 0.1) -> ZeroCounts:
    if T <= 0:
        raise ValueError("T must be positive")
    if not chi.is_primitive:
        raise ValueError("count_N needs a primitive character")
    counts = ZeroCounts(chi.q, chi.index, T)
    counts.N = _with_jiggle(lambda Tk: _count_once_N(Tk, chi, cfg, delta), T, counts)
    return counts


def count_N0(T: float, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG, t_min: float = 1e-9) -> int:
    """Sign changes of completed_Z on (0, T], step halved until the count repeats."""
    if T <= 0:
        raise ValueError("T must be positive")
    q = chi.q
    spacing = 2 * math.pi / max(1.0, math.log(q * max(T, 10.0) / (2 * math.pi)))
    n = max(64, int(math.ceil(8 * T / spacing)))
    prev = None
    for _ in range(8):
        t = np.linspace(t_min, T, n + 1)
        z = completed_Z(t, chi, cfg)
        sgn = np.sign(z)
        cnt = int(np.count_nonzero(sgn[1:] * sgn[:-1] < 0))
        if cnt == prev:
            return cnt
        prev = cnt
        n *= 2
    raise ConvergenceError("N0 sign-change count did not stabilise", {"T": T, "q": q})


def zero_counts(T: float, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG) -> ZeroCounts:
    counts = count_N_report(T, chi, cfg)
    counts.N0 = count_N0(counts.T + 0.37 * counts.jiggles * 1e-3, chi, cfg)
    if counts.N0 > counts.N:
        raise ConvergenceError("N0 exceeds N", counts.to_dict())
    return counts


def _count_once_density(sigma: float, T: float, chi: DirichletCharacter, cfg: LEvalConfig) -> tuple[float, float]:
    def flog(s):
        out = np.log(L_hurwitz(s, chi, cfg).astype(complex))
        if chi.q == 1:
            out = out + np.log(s - 1)
        return out

    path = _rect_path(sigma, 2.0, -T, T, 0.05)
    w, pts, lv = _winding(flog, path)
    edge = np.abs(np.abs(pts.imag) - T) < 1e-12
    lmin = float(np.min(np.abs(np.exp(lv[edge].real)))) if np.any(edge) else 1.0
    return w, lmin


def count_density(sigma: float, T: float, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG) -> int:
    """Zeros with Re >= sigma and |Im| <= T: winding of L around [sigma, 2] x [-T, T]."""
    return count_density_report(sigma, T, chi, cfg).rectangle_count


def count_density_report(sigma: float, T: float, chi: DirichletCharacter, cfg: LEvalConfig = DEFAULT_CONFIG) -> ZeroCounts:
    if not 0.5 < sigma <= 1.0:
        raise ValueError(f"sigma must lie in (1/2, 1], got {sigma}")
    if T <= 0:
        raise ValueError("T must be positive")
    if not chi.is_primitive:
        raise ValueError("count_density needs a primitive character")
    counts = ZeroCounts(chi.q, chi.index, T, sigma=sigma)
    counts.rectangle_count = _with_jiggle(lambda Tk: _count_once_density(sigma, Tk, chi, cfg), T, counts)
    return counts


def first_zero_on_line(chi: DirichletCharacter, t_lo: float, t_hi: float, cfg: LEvalConfig = DEFAULT_CONFIG) -> float:
    """Bisect a sign change of completed_Z in [t_lo, t_hi]."""
    from scipy.optimize import brentq

    f = lambda t: completed_Z(t, chi, cfg)  # noqa: E731
    if f(t_lo) * f(t_hi) > 0:
        raise ValueError("no sign change in the bracket")
    return brentq(f, t_lo, t_hi, xtol=1e-13, rtol=1e-15)
