import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirichlet_zeros.arith import euler_phi, phi_star
from dirichlet_zeros.characters import (
    CharacterGroup,
    character_sum_all,
    cmath_value,
    enumerate_characters,
    even_charsum_bruteforce,
    even_primitive_charsum,
    gauss_sum,
    odd_primitive_charsum,
    quadratic_character,
    root_number,
)


def _legendre(a, p):
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def test_q1():
    grp = enumerate_characters(1)
    assert len(grp) == 1
    chi = grp[0]
    assert chi(5) == 1 and chi.parity == 0 and chi.is_primitive


def test_q4():
    grp = enumerate_characters(4)
    assert len(grp) == 2
    chi = [c for c in grp if not c.is_principal][0]
    assert chi.parity == 1 and chi.conductor == 4
    assert chi(3) == pytest.approx(-1)


def test_q5():
    grp = enumerate_characters(5)
    assert len(grp) == 4
    assert len(grp.primitive()) == 3
    assert len(grp.even()) == 2
    chi = quadratic_character(5)
    assert chi.parity == 0


def test_quadratic_matches_legendre_symbol():
    for p in (3, 5, 7, 11, 13, 101):
        chi = quadratic_character(p)
        for a in range(1, p):
            assert chi(a) == pytest.approx(_legendre(a, p))


@pytest.mark.parametrize("q", [1, 2, 3, 4, 8, 9, 12, 16, 15, 24, 32, 45, 63, 97, 100, 128, 210])
def test_character_axioms(q):
    grp = enumerate_characters(q)
    assert len(grp) == euler_phi(q)
    assert grp.principal.is_principal
    assert sum(c.is_primitive for c in grp) == phi_star(q)
    rng = np.random.default_rng(q)
    for chi in grp:
        assert chi(1) == pytest.approx(1)
        for n in range(q):
            assert (abs(chi(n)) < 1e-15) == (math.gcd(n, q) > 1)
        for m, n in rng.integers(0, 5 * q + 1, size=(20, 2)):
            assert chi(int(m * n)) == pytest.approx(chi(int(m)) * chi(int(n)), abs=1e-12)
        assert chi(q - 1) == pytest.approx(1 if chi.parity == 0 else -1) or q == 1
        assert q % chi.conductor == 0
        # values match the exact exponent table
        for n in range(q):
            assert chi(n) == pytest.approx(cmath_value(chi, n), abs=1e-14)


def test_orthogonality_all_characters():
    for q in range(1, 201):
        phi = euler_phi(q)
        for m in range(q):
            if math.gcd(m, q) != 1:
                continue
            want = phi if m % q == 1 % q else 0
            assert abs(character_sum_all(q, m) - want) < 1e-9


def test_even_primitive_formula_examples():
    assert even_primitive_charsum(5, 1) == 1
    assert even_primitive_charsum(5, 4) == 1
    assert even_primitive_charsum(1, 1) == 1


def test_even_primitive_formula_against_enumeration():
    for q in range(1, 201):
        grp = enumerate_characters(q)
        odd_prim = grp.primitive("odd")
        for m in range(1, q + 1):
            if math.gcd(m, q) != 1:
                continue
            brute = even_charsum_bruteforce(q, m)
            assert round(brute.real) == even_primitive_charsum(q, m)
            assert abs(brute.imag) < 1e-9
            brute_odd = sum(c(m) for c in odd_prim)
            assert round(complex(brute_odd).real) == odd_primitive_charsum(q, m)


def test_charsum_rejects_non_coprime():
    with pytest.raises(ValueError):
        even_primitive_charsum(6, 2)


def test_gauss_sum_examples():
    assert gauss_sum(quadratic_character(5)) == pytest.approx(math.sqrt(5))
    assert gauss_sum(enumerate_characters(1)[0]) == pytest.approx(1)
    assert gauss_sum(quadratic_character(3)) == pytest.approx(1j * math.sqrt(3))


def test_gauss_sum_direct_oracle():
    # independent direct sum with cmath for a few characters
    for q in (7, 16, 45):
        for chi in enumerate_characters(q).primitive():
            tau = sum(chi(a) * cmath.exp(2j * math.pi * a / q) for a in range(q))
            assert gauss_sum(chi) == pytest.approx(tau, abs=1e-10)


def test_gauss_sum_modulus():
    for q in range(1, 501):
        for chi in enumerate_characters(q).primitive():
            assert abs(abs(gauss_sum(chi)) ** 2 - q) <= 1e-9 * q
            assert abs(root_number(chi)) == pytest.approx(1, abs=1e-10)


def test_gauss_sum_rejects_imprimitive():
    with pytest.raises(ValueError):
        gauss_sum(enumerate_characters(6).principal)


def test_induction_roundtrip():
    for q in (12, 45, 64, 100, 180):
        for chi in enumerate_characters(q):
            prim = chi.primitive_character()
            assert prim.q == chi.conductor and prim.is_primitive
            assert np.allclose(prim.induce(q), chi.values, atol=1e-12)


def test_conj_and_real():
    for chi in enumerate_characters(35):
        assert np.allclose(chi.conj().values, np.conj(chi.values))
        assert chi.is_real == np.allclose(chi.values.imag, 0)


def test_table_bound():
    with pytest.raises(ValueError):
        CharacterGroup(10**6 + 1)
    with pytest.raises(ValueError):
        CharacterGroup(0)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=3000))
def test_primitive_count_property(q):
    grp = enumerate_characters(q)
    assert len(grp.primitive()) == phi_star(q)
    assert len(grp.primitive("even")) + len(grp.primitive("odd")) == phi_star(q)
