"""Mollifiers, the brute-force twisted second moment and its main terms.

The brute-force side integrates L(1/2+alpha+it, chi) L(1/2+beta-it, chi-bar)
times the mollifier pair over t in [T, 2T] and over the primitive characters
of one parity.  The main-term side evaluates the two-term diagonal formula.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .arith import factorize, moebius_table, phi_star
from .characters import DirichletCharacter, enumerate_characters
from .lfun import DEFAULT_CONFIG, LEvalConfig, hurwitz_zeta
from .specfun import DEFAULT_WEIGHT, ConvergenceError, ShiftPair, SmoothWeight, X_minus_at_zero, symmetric_limit

KAPPA_GENERAL = 0.5 + 1 / 66
KAPPA_MOBIUS = 0.5 + 5 / 128
KAPPA_DENSITY = 69 / 128
COEFF_BOUND = 8.0


# ---------------------------------------------------------------- mollifiers


def mollifier_v(n: int, x: float, sigma: float) -> float:
    """v(n) = mu(n)(1 - (x/n)^{1-2 sigma})/(1 - x^{1-2 sigma}) for n <= x, else 0.

    At sigma = 1/2 the limit mu(n) log(x/n)/log(x) is used.
    """
    if x <= 1:
        raise ValueError("mollifier length x must exceed 1")
    if sigma < 0.5:
        raise ValueError("sigma must be >= 1/2")
    if n < 1 or n > x:
        return 0.0
    mu = int(moebius_table(n)[n]) if n > 1 else 1
    if mu == 0:
        return 0.0
    return mu * _v_profile(x / n, x, sigma)


def _v_profile(ratio, x: float, sigma: float):
    """(1 - ratio^{1-2s})/(1 - x^{1-2s}), with the log limit at s = 1/2."""
    e = 1.0 - 2.0 * sigma
    if abs(e) < 1e-12:
        return np.log(ratio) / math.log(x)
    return -np.expm1(e * np.log(ratio)) / -math.expm1(e * math.log(x))


@dataclass(frozen=True)
class Mollifier:
    """Coefficient table n -> c(n), n <= X.

    kind is one of "unmollified", "density_v", "levinson_P".
    """

    kind: str = "unmollified"
    X: float = 1.0
    sigma: float = 0.5
    P: tuple[float, ...] = (0.0, 1.0)  # power-basis coefficients, P(x) = sum P[i] x^i

    def __post_init__(self):
        if self.kind not in ("unmollified", "density_v", "levinson_P"):
            raise ValueError(f"unknown mollifier kind {self.kind!r}")
        if self.kind != "unmollified" and self.X <= 1:
            raise ValueError("mollifier length X must exceed 1")

    @classmethod
    def unmollified(cls) -> "Mollifier":
        return cls()

    @classmethod
    def density(cls, X: float, sigma: float) -> "Mollifier":
        return cls("density_v", float(X), float(sigma))

    @classmethod
    def levinson(cls, X: float, P=(0.0, 1.0)) -> "Mollifier":
        return cls("levinson_P", float(X), 0.5, tuple(float(c) for c in P))

    @property
    def length(self) -> int:
        return 1 if self.kind == "unmollified" else int(math.floor(self.X + 1e-12))

    def coefficients(self) -> np.ndarray:
        """c[0..length], c[0] = 0."""
        N = self.length
        c = np.zeros(N + 1)
        if self.kind == "unmollified":
            c[1] = 1.0
            return c
        n = np.arange(1, N + 1)
        mu = moebius_table(N)[1:].astype(float)
        if self.kind == "density_v":
            c[1:] = mu * _v_profile(self.X / n, self.X, self.sigma)
        else:
            x = np.log(self.X / n) / math.log(self.X)
            c[1:] = mu * np.polynomial.polynomial.polyval(x, np.array(self.P))
        if np.max(np.abs(c)) > COEFF_BOUND:
            raise ValueError(f"mollifier coefficients exceed the bound {COEFF_BOUND}")
        return c

    def kappa(self, q: int, T: float) -> float:
        return math.log(self.X) / math.log(q * T) if self.kind != "unmollified" else 0.0

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "X": self.X}
        if self.kind == "density_v":
            d["sigma"] = self.sigma
        if self.kind == "levinson_P":
            d["P"] = list(self.P)
        return d


def mollifier_values(coef: np.ndarray, chi: DirichletCharacter, s: np.ndarray, conj: bool = False) -> np.ndarray:
    """sum_n c(n) chi(n) n^{-s} on an array of s (chi-bar if conj)."""
    n = np.nonzero(coef)[0]
    if n.size == 0:
        return np.zeros(s.shape, dtype=complex)
    vals = chi.values[n % chi.q]
    if conj:
        vals = np.conj(vals)
    w = coef[n] * vals
    return np.exp(-np.outer(s, np.log(n))) @ w


# ---------------------------------------------------------------- configuration


@dataclass(frozen=True)
class MomentConfig:
    q: int
    T: float
    alpha: complex
    beta: complex
    parity: str = "even"
    mollifier: Mollifier = field(default_factory=Mollifier)
    mollifier_b: Mollifier | None = None
    weight: SmoothWeight = DEFAULT_WEIGHT
    tol: float = 1e-8  # relative change under panel doubling
    gl_order: int = 24
    threads: int = 1

    def __post_init__(self):
        if self.q < 1 or self.T <= 0:
            raise ValueError("need q >= 1 and T > 0")
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")

    @property
    def shifts(self) -> ShiftPair:
        return ShiftPair(self.alpha, self.beta, math.log(max(self.q * self.T, 3.0)))

    @property
    def moll_b(self) -> Mollifier:
        return self.mollifier if self.mollifier_b is None else self.mollifier_b

    @property
    def X(self) -> float:
        return max(self.mollifier.X if self.mollifier.kind != "unmollified" else 1.0,
                   self.moll_b.X if self.moll_b.kind != "unmollified" else 1.0)

    @property
    def kappa(self) -> float:
        return math.log(self.X) / math.log(self.q * self.T)

    def swapped(self) -> "MomentConfig":
        return replace(self, alpha=self.beta, beta=self.alpha, mollifier=self.moll_b, mollifier_b=self.mollifier)

    def check_kappa(self) -> None:
        if self.X <= 1:
            return
        mob = all(m.kind != "unmollified" for m in (self.mollifier, self.moll_b))
        limit = KAPPA_MOBIUS if mob else KAPPA_GENERAL
        if not 0.5 < self.kappa < limit:
            warnings.warn(f"kappa = {self.kappa:.4f} outside (1/2, {limit:.4f}); main term evaluated anyway", stacklevel=3)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "T": self.T,
            "alpha": _cjson(self.alpha),
            "beta": _cjson(self.beta),
            "parity": self.parity,
            "mollifier": self.mollifier.to_dict(),
            "mollifier_b": self.moll_b.to_dict(),
            "kappa": self.kappa if self.X > 1 else None,
            "tol": self.tol,
        }


def _cjson(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


@dataclass
class MomentReport:
    brute_force: complex
    main_term_1: complex
    main_term_2: complex
    residual: complex
    relative_residual: float
    literal_main_1: complex
    literal_main_2: complex
    parity_weight: float
    class_size: int
    panels: int
    config: dict
    vacuous: bool = False

    @property
    def main(self) -> complex:
        return self.main_term_1 + self.main_term_2

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = _cjson(v) if isinstance(v, complex) else v
        return out


# ---------------------------------------------------------------- helpers


def primitive_class(q: int, parity: str) -> list[DirichletCharacter]:
    return enumerate_characters(q).primitive(parity)


def principal_L(s: complex, q: int) -> complex:
    """L(s, chi_{0,q}) = zeta(s) prod_{p|q}(1 - p^{-s})."""
    val = hurwitz_zeta(complex(s), 1.0)
    for p in factorize(q).primes:
        val *= 1 - p ** (-complex(s))
    return complex(val)


def gl_nodes(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


def _coprime_mask(N: int, q: int) -> np.ndarray:
    n = np.arange(N + 1)
    m = np.gcd(n, q) == 1
    m[0] = False
    return m


def diagonal_sum(ca: np.ndarray, cb: np.ndarray, q: int, ea: complex, eb: complex, ed: complex = 1.0) -> complex:
    """sum over (a,b)=1, (abd,q)=1 of ca[ad] cb[bd] / (a^ea b^eb d^ed).

    The coprimality (a,b)=1 is removed by Moebius inversion: with a = a'e,
    b = b'e and g = ed the sum becomes
    sum_g g^-ed prod_{p|g}(1 - p^{ed-ea-eb}) A_g B_g, A_g = sum_a' ca[a'g] a'^-ea.
    """
    N = min(len(ca), len(cb)) - 1
    if N < 1:
        return 0j
    mask = _coprime_mask(N, q)
    total = 0j
    h = _euler_factor_table(N, ed - ea - eb)
    for g in range(1, N + 1):
        if not mask[g]:
            continue
        m = np.arange(1, N // g + 1)
        keep = mask[m]
        m = m[keep]
        A = np.sum(ca[m * g] * np.exp(-ea * np.log(m)))
        if A == 0:
            continue
        B = np.sum(cb[m * g] * np.exp(-eb * np.log(m)))
        total += g ** (-ed) * h[g] * A * B
    return complex(total)


def _euler_factor_table(N: int, e: complex) -> np.ndarray:
    """prod_{p|g}(1 - p^e) for g = 0..N."""
    h = np.ones(N + 1, dtype=complex)
    sieve = np.zeros(N + 1, dtype=bool)
    for p in range(2, N + 1):
        if sieve[p]:
            continue
        sieve[p::p] = True
        h[p::p] *= 1 - p ** complex(e)
    return h


def _double_sum(cfg: MomentConfig, alpha: complex, beta: complex, second: bool) -> complex:
    if cfg.mollifier.kind == "unmollified" and cfg.moll_b.kind == "unmollified":
        return 1.0  # only a = b = d = 1
    ca, cb = cfg.mollifier.coefficients(), cfg.moll_b.coefficients()
    if second:
        return diagonal_sum(ca, cb, cfg.q, 1 - alpha, 1 - beta)
    return diagonal_sum(ca, cb, cfg.q, 1 + beta, 1 + alpha)


# ---------------------------------------------------------------- main terms


def gamma_integral(T: float, shifts: ShiftPair, parity: str, weight: SmoothWeight, panels: int = 64, order: int = 24) -> complex:
    """int X_minus(0, t) psi(t/T) dt over [T, 2T], panel-doubled to 1e-12."""
    prev = None
    for _ in range(8):
        t, w = gl_nodes(T, 2 * T, panels, order)
        val = complex(np.sum(w * weight(t / T) * X_minus_at_zero(t, shifts, parity)))
        if prev is not None and abs(val - prev) <= 1e-12 * max(1.0, abs(val)):
            return val
        prev = val
        panels *= 2
    raise ConvergenceError("gamma integral did not converge", {"T": T})


def literal_main_terms(cfg: MomentConfig, alpha: complex | None = None, beta: complex | None = None) -> tuple[complex, complex]:
    """The two displayed main terms, without the parity-class correction."""
    a = cfg.alpha if alpha is None else alpha
    b = cfg.beta if beta is None else beta
    tot = a + b
    if tot == 0:
        raise ValueError("alpha + beta = 0: use main_term, which takes the limit")
    q, T = cfg.q, cfg.T
    shifts = ShiftPair(a, b, cfg.shifts.scaleL)
    t1 = cfg.weight.hat0 / 2 * principal_L(1 + tot, q) * _double_sum(cfg, a, b, False)
    I = gamma_integral(T, shifts, cfg.parity, cfg.weight)
    t2 = (1 / (2 * T)) * (q / math.pi) ** (-tot) * principal_L(1 - tot, q) * _double_sum(cfg, a, b, True) * I
    return complex(t1), complex(t2)


def parity_class_weight(q: int, parity: str) -> tuple[float, int]:
    """(2 * #class / phi*(q), #class) for the primitive characters of one parity."""
    n = len(primitive_class(q, parity))
    ps = phi_star(q)
    return (2.0 * n / ps if ps else 0.0), n


def main_term(cfg: MomentConfig) -> tuple[complex, complex]:
    """Main terms scaled to the size of the parity class.

    The displayed formula carries phi*(q)/2 for the class size; the diagonal
    terms with w <= 2 in the character orthogonality make the true class
    size differ by (mu(q) + mu(q/2))/2, so both terms are multiplied by
    2 #class / phi*(q).  At alpha + beta = 0 the average over +-delta is used.
    """
    cfg.check_kappa()
    wgt, _ = parity_class_weight(cfg.q, cfg.parity)
    if cfg.alpha + cfg.beta == 0:
        def f(sh: ShiftPair):
            return np.array(literal_main_terms(cfg, sh.alpha, sh.beta))

        t1, t2 = symmetric_limit(f, cfg.shifts)
    else:
        t1, t2 = literal_main_terms(cfg)
    return complex(wgt * t1), complex(wgt * t2)


# ---------------------------------------------------------------- brute force


def _moment_integrand(cfg: MomentConfig, chars: list[DirichletCharacter], t: np.ndarray, lcfg: LEvalConfig, pool) -> np.ndarray:
    """Per-character integrand values, shape (len(chars), len(t)), without psi."""
    q = cfg.q
    s1 = 0.5 + cfg.alpha + 1j * t
    s2 = 0.5 + cfg.beta - 1j * t
    res = np.array([a for a in range(1, q + 1) if math.gcd(a, q) == 1])
    drop = q > 1  # primitive characters mod q > 1 are non-principal
    jobs = [(s, a / q) for s in (s1, s2) for a in res]
    rows = list(pool.map(lambda job: hurwitz_zeta(job[0], job[1], lcfg.em_order, lcfg.n0_min, drop), jobs))
    Z1 = np.array(rows[: len(res)])
    Z2 = np.array(rows[len(res) :])
    qs1 = np.exp(-s1 * math.log(q))
    qs2 = np.exp(-s2 * math.log(q))
    ca, cb = cfg.mollifier.coefficients(), cfg.moll_b.coefficients()

    def one(chi: DirichletCharacter) -> np.ndarray:
        v = chi.values[res % q]
        L1 = qs1 * (v @ Z1)
        L2 = qs2 * (np.conj(v) @ Z2)
        Ma = mollifier_values(ca, chi, 0.5 + 1j * t)
        Mb = mollifier_values(cb, chi, 0.5 - 1j * t, conj=True)
        return L1 * L2 * Ma * Mb

    return np.array(list(pool.map(one, chars)))


def twisted_moment_bruteforce(cfg: MomentConfig, lcfg: LEvalConfig = DEFAULT_CONFIG, return_panels: bool = False):
    """(1/(phi*(q) T)) int sum_{chi of the parity} L L-bar M M-bar psi(t/T) dt.

    Gauss-Legendre panels on [T, 2T]; the panel count is doubled until the
    relative change is below cfg.tol.  Characters are reduced in index order,
    panels in t order, so the result does not depend on cfg.threads.
    """
    if cfg.q > 40 or cfg.T > 500:
        warnings.warn("brute-force moment outside desk scale (q <= 40, T <= 500)", stacklevel=2)
    chars = primitive_class(cfg.q, cfg.parity)
    ps = phi_star(cfg.q)
    if not chars:
        return (0j, 0) if return_panels else 0j
    T = cfg.T
    panels = max(8, int(math.ceil(T * math.log(cfg.q * T) / 40)))
    prev = None
    with ThreadPoolExecutor(max_workers=max(1, cfg.threads)) as pool:
        for _ in range(8):
            t, w = gl_nodes(T, 2 * T, panels, cfg.gl_order)
            F = _moment_integrand(cfg, chars, t, lcfg, pool)
            per_char = F @ (w * cfg.weight(t / T))
            val = complex(sum(per_char)) / (ps * T)
            if prev is not None and abs(val - prev) <= cfg.tol * max(1.0, abs(val)):
                return (val, panels) if return_panels else val
            prev = val
            panels *= 2
    raise ConvergenceError("moment quadrature did not converge", {"panels": panels, "last": prev})


def moment_report(cfg: MomentConfig, lcfg: LEvalConfig = DEFAULT_CONFIG) -> MomentReport:
    wgt, n = parity_class_weight(cfg.q, cfg.parity)
    if n == 0:
        # no primitive characters of this parity: both sides vanish
        return MomentReport(0j, 0j, 0j, 0j, 0.0, 0j, 0j, 0.0, 0, 0, cfg.to_dict(), vacuous=True)
    brute, panels = twisted_moment_bruteforce(cfg, lcfg, return_panels=True)
    m1, m2 = main_term(cfg)
    l1, l2 = (m1 / wgt, m2 / wgt)
    resid = brute - (m1 + m2)
    rel = abs(resid) / max(1.0, abs(m1 + m2))
    return MomentReport(brute, m1, m2, resid, rel, l1, l2, wgt, n, panels, cfg.to_dict())


# ---------------------------------------------------------------- first moment


@dataclass
class FirstMomentReport:
    brute_force: complex
    main: float
    residual: complex
    relative_residual: float


def first_moment(q: int, T: float, sigma: float, mollifier: Mollifier | None = None,
                 weight: SmoothWeight = DEFAULT_WEIGHT, tol: float = 1e-8,
                 lcfg: LEvalConfig = DEFAULT_CONFIG) -> FirstMomentReport:
    """int sum* L(sigma+it, chi) M(sigma+it, chi) psi(t/T) dt against phi*(q) T psi-hat(0)."""
    mollifier = mollifier or Mollifier()
    chars = enumerate_characters(q).primitive()
    coef = mollifier.coefficients()
    res = np.array([a for a in range(1, q + 1) if math.gcd(a, q) == 1])
    panels = max(8, int(math.ceil(T * math.log(q * T) / 40)))
    prev = None
    for _ in range(8):
        t, w = gl_nodes(T, 2 * T, panels, 24)
        s = sigma + 1j * t
        Z = np.array([hurwitz_zeta(s, a / q, lcfg.em_order, lcfg.n0_min, q > 1) for a in res])
        qs = np.exp(-s * math.log(q))
        total = 0j
        ww = w * weight(t / T)
        for chi in chars:
            L = qs * (chi.values[res % q] @ Z)
            M = mollifier_values(coef, chi, s)
            total += np.sum(ww * L * M)
        if prev is not None and abs(total - prev) <= tol * max(1.0, abs(total)):
            break
        prev = total
        panels *= 2
    else:
        raise ConvergenceError("first moment quadrature did not converge")
    main = phi_star(q) * T * weight.hat0
    return FirstMomentReport(complex(total), main, complex(total - main), abs(total - main) / abs(main))


# ---------------------------------------------------------------- S1, S2


def v_table(x: float, sigma: float) -> np.ndarray:
    return Mollifier.density(x, sigma).coefficients()


def S1(x: float, sigma: float, q: int = 1, method: str = "mobius") -> float:
    """sum_{(a,b)=1, (abd,q)=1} v(ad) v(bd) / (abd)^{2 sigma}."""
    v = v_table(x, sigma)
    if method == "direct":
        return _direct_triple(v, q, 2 * sigma, 2 * sigma, 2 * sigma)
    return diagonal_sum(v, v, q, 2 * sigma, 2 * sigma, 2 * sigma).real


def S2(x: float, sigma: float, q: int = 1, method: str = "mobius") -> float:
    """sum_{(a,b)=1, (abd,q)=1} v(ad) v(bd) / (a b d^{2 sigma})."""
    v = v_table(x, sigma)
    if method == "direct":
        return _direct_triple(v, q, 1.0, 1.0, 2 * sigma)
    return diagonal_sum(v, v, q, 1.0, 1.0, 2 * sigma).real


def _direct_triple(v: np.ndarray, q: int, ea: float, eb: float, ed: float) -> float:
    """Literal enumeration over d, then a and b (vectorized over b)."""
    N = len(v) - 1
    total = 0.0
    for d in range(1, N + 1):
        if math.gcd(d, q) != 1:
            continue
        M = N // d
        idx = np.arange(1, M + 1)
        ok = (np.gcd(idx, q) == 1) & (v[idx * d] != 0)
        a_vals = idx[ok]
        if a_vals.size == 0:
            continue
        wa = v[a_vals * d] * a_vals ** (-ea)
        wb = v[a_vals * d] * a_vals ** (-eb)
        cop = np.gcd.outer(a_vals, a_vals) == 1
        total += d ** (-ed) * float(wa @ (cop @ wb))
    return total
