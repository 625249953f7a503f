"""Dirichlet characters mod q, built from the structure of (Z/qZ)*.

A character is stored by its discrete-log coordinates: for every cyclic
factor of (Z/qZ)* (one per odd prime power, one or two for the 2-part) an
integer k_i with chi(g_i) = exp(2 pi i k_i / n_i).  Values are then exact
root-of-unity exponents over the group exponent, and the complex table is
derived from those.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .arith import divisors, euler_phi, factorize, moebius, phi_star

MAX_MODULUS = 10**6


def _primitive_root_prime_power(p: int, e: int) -> int:
    """Generator of (Z/p^e Z)* for odd p."""
    phi_p = p - 1
    fac = factorize(phi_p).primes
    for g in range(2, p):
        if all(pow(g, phi_p // r, p) != 1 for r in fac):
            break
    else:  # pragma: no cover
        raise ArithmeticError(f"no primitive root mod {p}")
    if e >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class _Component:
    """One cyclic factor of (Z/qZ)*: residues mod ``modulus`` generated by ``gen``."""

    p: int
    modulus: int  # p^e
    gen: int
    order: int
    dlog: np.ndarray  # dlog[r] for r mod modulus, -1 where undefined
    # for the 2^e, e>=3 case the 2-part splits into <-1> x <5>; ``kind`` tells
    # which of the two coordinates this component reads
    kind: str = "cyclic"


def _dlog_table(modulus: int, gen: int, order: int) -> np.ndarray:
    table = np.full(modulus, -1, dtype=np.int64)
    x = 1
    for k in range(order):
        table[x] = k
        x = x * gen % modulus
    return table


def _components(q: int) -> list[_Component]:
    comps: list[_Component] = []
    for p, e in factorize(q):
        pe = p**e
        if p == 2:
            if e == 1:
                continue
            # sign coordinate: n = (-1)^a 5^b mod 2^e
            sign = np.full(pe, -1, dtype=np.int64)
            sign[1::4] = 0
            sign[3::4] = 1
            comps.append(_Component(2, pe, pe - 1, 2, sign, kind="sign"))
            if e >= 3:
                order = pe // 4
                five = _dlog_table(pe, 5, order)
                # n = -5^b when n = 3 mod 4
                neg = np.full(pe, -1, dtype=np.int64)
                odd = np.arange(1, pe, 2)
                neg[odd] = five[(pe - odd) % pe]
                table = np.where(sign == 0, five, neg)
                table[sign < 0] = -1
                comps.append(_Component(2, pe, 5, order, table, kind="five"))
        else:
            g = _primitive_root_prime_power(p, e)
            order = pe - pe // p
            comps.append(_Component(p, pe, g, order, _dlog_table(pe, g, order)))
    return comps


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A character mod q given by log coordinates ``exps`` on ``group``'s generators."""

    group: "CharacterGroup" = field(repr=False)
    exps: tuple[int, ...]
    index: int = 0

    @property
    def modulus(self) -> int:
        return self.group.q

    @property
    def q(self) -> int:
        return self.group.q

    @cached_property
    def exponent_table(self) -> np.ndarray:
        """chi(n) = exp(2 pi i E(n) / group.exponent); E(n) = -1 when gcd(n, q) > 1."""
        grp = self.group
        out = np.zeros(grp.q, dtype=np.int64)
        for comp, k, logs in zip(grp.components, self.exps, grp.residue_logs):
            out += (k * (grp.exponent // comp.order)) * logs
        out %= grp.exponent
        out[~grp.unit_mask] = -1
        return out

    @cached_property
    def values(self) -> np.ndarray:
        """Complex value table on residues 0..q-1."""
        e = self.exponent_table
        out = np.exp(2j * np.pi * np.where(e < 0, 0, e) / self.group.exponent)
        out[e < 0] = 0.0
        # snap real characters to exact +-1
        real = (2 * np.where(e < 0, 0, e)) % self.group.exponent == 0
        out[real & (e >= 0)] = np.round(out[real & (e >= 0)].real)
        return out

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.q])

    @property
    def is_principal(self) -> bool:
        return all(k == 0 for k in self.exps)

    @property
    def is_real(self) -> bool:
        return all((2 * k) % comp.order == 0 for k, comp in zip(self.exps, self.group.components))

    @property
    def is_even(self) -> bool:
        return self.parity == 0

    @cached_property
    def parity(self) -> int:
        """0 for even (chi(-1) = 1), 1 for odd."""
        s = 0
        for comp, k in zip(self.group.components, self.exps):
            if comp.kind == "sign":
                s += k
            elif comp.kind == "cyclic":
                s += k  # -1 = g^(order/2) for odd prime powers
        return s % 2

    @cached_property
    def conductor(self) -> int:
        f = 1
        comps = self.group.components
        by_prime: dict[int, list[tuple[_Component, int]]] = {}
        for comp, k in zip(comps, self.exps):
            by_prime.setdefault(comp.p, []).append((comp, k))
        for p, items in by_prime.items():
            if p == 2:
                sign_k = next(k for c, k in items if c.kind == "sign")
                five = [(c, k) for c, k in items if c.kind == "five"]
                if five and five[0][1] % five[0][0].order:
                    c, k = five[0]
                    o = c.order // math.gcd(k, c.order)
                    f *= 2 ** (o.bit_length() - 1 + 2)
                elif sign_k % 2:
                    f *= 4
            else:
                c, k = items[0]
                if k % c.order:
                    o = c.order // math.gcd(k, c.order)
                    v = 0
                    while o % p == 0:
                        o //= p
                        v += 1
                    f *= p ** (v + 1)
        return f

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    def conj(self) -> "DirichletCharacter":
        exps = tuple((-k) % c.order for k, c in zip(self.exps, self.group.components))
        return self.group.by_exps(exps)

    def primitive_character(self) -> "DirichletCharacter":
        """The character mod conductor that induces this one."""
        f = self.conductor
        grp = enumerate_characters(f)
        table = np.zeros(f, dtype=complex)
        for n in range(f):
            if math.gcd(n, f) != 1:
                continue
            lift = n
            while math.gcd(lift, self.q) != 1:
                lift += f
            table[n] = self.values[lift % self.q]
        for chi in grp.characters:
            if np.allclose(chi.values, table, atol=1e-9):
                return chi
        raise ArithmeticError("inducing character not found")  # pragma: no cover

    def induce(self, q: int) -> np.ndarray:
        """Value table of the character mod q induced by this one (q multiple of modulus)."""
        if q % self.q:
            raise ValueError(f"{q} is not a multiple of {self.q}")
        n = np.arange(q)
        out = self.values[n % self.q].copy()
        out[np.gcd(n, q) != 1] = 0.0
        return out

    def to_dict(self) -> dict:
        return {
            "modulus": self.q,
            "index": self.index,
            "log_coordinates": list(self.exps),
            "parity": "odd" if self.parity else "even",
            "conductor": self.conductor,
            "primitive": self.is_primitive,
            "real": self.is_real,
        }


class CharacterGroup:
    """All phi(q) characters mod q, in lexicographic order of log coordinates.

    The principal character is always index 0.  Immutable after construction.
    """

    def __init__(self, q: int, max_modulus: int = MAX_MODULUS):
        if q < 1:
            raise ValueError(f"modulus must be >= 1, got {q}")
        if q > max_modulus:
            raise ValueError(f"modulus {q} exceeds table bound {max_modulus}")
        self.q = q
        self.components = _components(q)
        orders = [c.order for c in self.components]
        self.exponent = math.lcm(*orders) if orders else 1
        n = np.arange(q)
        self.unit_mask = np.gcd(n, q) == 1 if q > 1 else np.ones(1, dtype=bool)
        self.residue_logs = [np.maximum(c.dlog[n % c.modulus], 0) for c in self.components]
        self._exps = list(itertools.product(*(range(o) for o in orders)))
        self._index = {e: i for i, e in enumerate(self._exps)}
        self.characters = tuple(DirichletCharacter(self, e, i) for i, e in enumerate(self._exps))

    def __len__(self) -> int:
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def __getitem__(self, i: int) -> DirichletCharacter:
        return self.characters[i]

    @property
    def principal(self) -> DirichletCharacter:
        return self.characters[0]

    principal_index = 0

    def by_exps(self, exps: tuple[int, ...]) -> DirichletCharacter:
        return self.characters[self._index[tuple(exps)]]

    def primitive(self, parity: int | str | None = None) -> list[DirichletCharacter]:
        want = {"even": 0, "odd": 1}.get(parity, parity) if parity is not None else None
        return [
            c
            for c in self.characters
            if c.is_primitive and (want is None or c.parity == want)
        ]

    def even(self) -> list[DirichletCharacter]:
        return [c for c in self.characters if c.parity == 0]


_GROUP_CACHE: dict[int, CharacterGroup] = {}


def enumerate_characters(q: int) -> CharacterGroup:
    grp = _GROUP_CACHE.get(q)
    if grp is None:
        grp = CharacterGroup(q)
        if q <= 5000:
            _GROUP_CACHE[q] = grp
    return grp


def count_primitive_by_conductor(q: int) -> int:
    """Number of characters mod q with conductor exactly q, from log coordinates only."""
    return sum(1 for c in CharacterGroup(q).characters if c.conductor == q)


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_a chi(a) e(a/q) for primitive chi."""
    if not chi.is_primitive:
        raise ValueError("Gauss sum requested for a non-primitive character")
    q = chi.q
    a = np.arange(q)
    terms = chi.values * np.exp(2j * np.pi * a / q)
    return complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag))


def root_number(chi: DirichletCharacter) -> complex:
    """epsilon(chi) = tau(chi) / (i^a sqrt(q)), a the parity."""
    return gauss_sum(chi) / ((1j) ** chi.parity * math.sqrt(chi.q))


def _signed_orthogonality(q: int, m: int, sign: int) -> float:
    if math.gcd(m, q) != 1:
        raise ValueError(f"m={m} is not coprime to q={q}")
    total = 0
    for w in divisors(q):
        mu = moebius(q // w)
        if mu == 0:
            continue
        plus = 1 if (m - 1) % w == 0 else 0
        minus = 1 if (m + 1) % w == 0 else 0
        total += mu * euler_phi(w) * (plus + sign * minus)
    return total / 2


def even_primitive_charsum(q: int, m: int) -> float:
    """sum over even primitive chi mod q of chi(m), by the divisor formula.

    Residues 1 and -1 that coincide mod w (w <= 2) are counted twice.
    """
    return _signed_orthogonality(q, m, +1)


def odd_primitive_charsum(q: int, m: int) -> float:
    return _signed_orthogonality(q, m, -1)


def count_parity_primitive(q: int, parity: int) -> int:
    """Number of primitive characters mod q of the given parity (0 even, 1 odd)."""
    return round(even_primitive_charsum(q, 1) if parity == 0 else odd_primitive_charsum(q, 1))


def even_charsum_bruteforce(q: int, m: int, primitive_only: bool = True) -> complex:
    grp = enumerate_characters(q)
    chars = grp.primitive("even") if primitive_only else grp.even()
    return complex(sum(c(m) for c in chars))


def character_sum_all(q: int, m: int) -> complex:
    return complex(sum(c(m) for c in enumerate_characters(q)))


def quadratic_character(q: int) -> DirichletCharacter:
    """The unique primitive real non-principal character for prime q (helper for examples)."""
    for chi in enumerate_characters(q).primitive():
        if chi.is_real and not chi.is_principal:
            return chi
    raise ValueError(f"no primitive quadratic character mod {q}")


def cmath_value(chi: DirichletCharacter, n: int) -> complex:
    """chi(n) recomputed from the exponent table (no rounding snap)."""
    e = int(chi.exponent_table[n % chi.q])
    if e < 0:
        return 0j
    return cmath.exp(2j * math.pi * e / chi.group.exponent)


__all__ = [
    "CharacterGroup",
    "DirichletCharacter",
    "character_sum_all",
    "count_parity_primitive",
    "count_primitive_by_conductor",
    "enumerate_characters",
    "even_charsum_bruteforce",
    "even_primitive_charsum",
    "gauss_sum",
    "odd_primitive_charsum",
    "phi_star",
    "quadratic_character",
    "root_number",
]
