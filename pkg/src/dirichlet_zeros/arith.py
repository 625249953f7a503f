"""Exact integer and multiplicative-function utilities.

Everything here works on plain Python integers so results are exact; the only
floating point output is :func:`phi_sigma`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_WHEEL_PRIMES = (2, 3, 5)
_WHEEL_STEPS = (4, 2, 4, 2, 4, 6, 2, 6)  # gaps between residues coprime to 30


def _check_positive(n: int, name: str = "n") -> int:
    if isinstance(n, bool) or int(n) != n:
        raise TypeError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"{name} must be >= 1, got {n}")
    return n


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as sorted ``(prime, exponent)`` pairs."""

    pairs: tuple[tuple[int, int], ...]

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Trial division with a mod-30 wheel. Fine for n up to ~1e12."""
    n = _check_positive(n)
    pairs = []
    for p in _WHEEL_PRIMES:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
    d, i = 7, 0
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            pairs.append((d, e))
        d += _WHEEL_STEPS[i]
        i = (i + 1) % 8
    if n > 1:
        pairs.append((n, 1))
    return Factorization(tuple(pairs))


def divisors(n: int) -> list[int]:
    """Sorted list of the positive divisors of n."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def moebius(n: int) -> int:
    n = _check_positive(n)
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    out = _check_positive(n)
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def radical(n: int) -> int:
    return math.prod(factorize(n).primes)


def phi_star_product(q: int) -> int:
    """Number of primitive characters mod q from the local product formula.

    The local factor is p - 2 for p || q and (p - 1)^2 p^(e - 2) for p^e || q,
    e >= 2; equivalently q * prod_{p||q}(1 - 2/p) * prod_{p^2|q}(1 - 1/p)^2.
    """
    q = _check_positive(q, "q")
    out = 1
    for p, e in factorize(q):
        out *= (p - 2) if e == 1 else (p - 1) ** 2 * p ** (e - 2)
    return out


def phi_star_moebius(q: int) -> int:
    """Same count via sum_{d|q} mu(d) phi(q/d).

    phi(m) is the number of characters mod q whose conductor divides m, so
    Moebius inversion over the divisor lattice leaves conductor exactly q.
    """
    q = _check_positive(q, "q")
    return sum(moebius(d) * euler_phi(q // d) for d in divisors(q))


def phi_star(q: int) -> int:
    a = phi_star_product(q)
    b = phi_star_moebius(q)
    if a != b:  # pragma: no cover - would indicate a factorization bug
        raise ArithmeticError(f"phi_star disagreement at q={q}: {a} != {b}")
    return a


def phi_sigma_product(n: int, s: float) -> float:
    n = _check_positive(n)
    out = float(n) ** s
    for p in factorize(n).primes:
        out *= 1.0 - float(p) ** (-s)
    return out


def phi_sigma_divisor(n: int, s: float) -> float:
    n = _check_positive(n)
    return math.fsum(moebius(c) * float(n // c) ** s for c in divisors(n))


def phi_sigma(n: int, s: float) -> float:
    """sum_{cd=n} mu(c) d^s, i.e. n^s prod_{p|n}(1 - p^-s)."""
    return phi_sigma_product(n, s)


def c4(a: int, W: float) -> int:
    """-sum_{ef=a, e<=W} mu(e)."""
    a = _check_positive(a, "a")
    return -sum(moebius(e) for e in divisors(a) if e <= W)


def c6(n: int, W: float) -> int:
    """sum_{xy=n, x,y<=W} mu(x) mu(y)."""
    n = _check_positive(n)
    return sum(moebius(x) * moebius(n // x) for x in divisors(n) if x <= W and n // x <= W)


@dataclass(frozen=True)
class VaughanDecomposition:
    u: int
    W: float
    c1: int
    c2: int
    c3: int

    @property
    def total(self) -> int:
        return self.c1 + self.c2 + self.c3


def vaughan_decompose(u: int, W: float) -> VaughanDecomposition:
    """Split mu(u) = c1 + c2 + c3 by exhaustive divisor-triple enumeration.

    The coefficients come from 1/zeta = (1/zeta)(1 - zeta U)^2 + 2U - zeta U^2
    with U(s) = sum_{n<=W} mu(n) n^-s.  The coefficient of (1 - zeta U) at
    a >= 2 is c4(a), and at a = 1 it is zero; c4(a) also vanishes for
    1 < a <= W, so c1 is summed over a, b > W.
    """
    u = _check_positive(u, "u")
    if W < 1:
        raise ValueError(f"W must be >= 1, got {W}")
    divs = divisors(u)
    c1 = 0
    c3 = 0
    for a in divs:
        rest = u // a
        for b in divisors(rest):
            c = rest // b
            if a > W and b > W:
                c1 += moebius(c) * c4(a, W) * c4(b, W)
            if a <= W and b <= W:
                c3 -= moebius(a) * moebius(b)
    c2 = 2 * moebius(u) if u <= W else 0
    return VaughanDecomposition(u=u, W=float(W), c1=c1, c2=c2, c3=c3)


def moebius_table(n: int) -> np.ndarray:
    """mu(0..n) by a linear sieve; index 0 is set to 0."""
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    is_comp = np.zeros(n + 1, dtype=bool)
    for p in range(2, n + 1):
        if is_comp[p]:
            continue
        is_comp[2 * p :: p] = True
        mu[p::p] *= -1
        if p * p <= n:
            mu[p * p :: p * p] = 0
    return mu


def vaughan_table(n: int, W: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """c1, c2, c3 for every u in 0..n as int64 arrays, via Dirichlet convolution.

    Used for bulk exactness sweeps; :func:`vaughan_decompose` is the
    per-integer reference.
    """
    mu = moebius_table(n).astype(np.int64)
    Wi = int(math.floor(W))
    # U coefficients: mu(e) for e <= W
    U = np.zeros(n + 1, dtype=np.int64)
    U[1 : min(Wi, n) + 1] = mu[1 : min(Wi, n) + 1]
    one = np.zeros(n + 1, dtype=np.int64)
    one[1:] = 1
    zU = _dirichlet_convolve(one, U, n)
    # coefficients of (1 - zeta U): c4(a) for a > W (zero for 1 <= a <= W)
    c4a = -zU
    c4a[: min(Wi, n) + 1] = 0
    c1 = _dirichlet_convolve(_dirichlet_convolve(c4a, c4a, n), mu, n)
    c2 = np.zeros(n + 1, dtype=np.int64)
    c2[1 : min(Wi, n) + 1] = 2 * mu[1 : min(Wi, n) + 1]
    c3 = -_dirichlet_convolve(_dirichlet_convolve(U, U, n), one, n)
    return c1, c2, c3


def _dirichlet_convolve(f: np.ndarray, g: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n + 1, dtype=np.int64)
    for d in np.nonzero(f[1:])[0] + 1:
        d = int(d)
        m = n // d
        out[d :: d][:m] += f[d] * g[1 : m + 1]
    return out


def moebius_partial_sums(t_max: int, n: int, mu: np.ndarray | None = None) -> np.ndarray:
    """Running sums of mu(a)/a over a <= t, (a, n) = 1, for t = 1..t_max."""
    if mu is None:
        mu = moebius_table(t_max)
    a = np.arange(1, t_max + 1)
    terms = mu[1 : t_max + 1].astype(float) / a
    for p in factorize(n).primes:
        terms[(a % p) == 0] = 0.0
    return np.cumsum(terms)
