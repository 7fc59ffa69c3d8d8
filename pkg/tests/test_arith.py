import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from centralval.arith import (Cyclo, DirichletCharacter, LocalChar, Surd, cohen_h, discriminant_split,
                              eps_half, gauss_mult, gauss_mult_bruteforce, gauss_quadratic, hilbert_oracle,
                              hilbert_symbol, is_fundamental, kronecker, legendre, moebius, ord_p, sigma)

nonzero = st.integers(-200, 200).filter(bool)
odd_pos = st.integers(1, 199).filter(lambda n: n % 2)


@given(nonzero, odd_pos, odd_pos)
def test_kronecker_multiplicative_in_n(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


@given(nonzero, nonzero, st.integers(1, 200))
def test_kronecker_multiplicative_in_a(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


@given(st.sampled_from([2, 3, 5, 7]), nonzero, nonzero, st.integers(-2, 2), st.integers(-2, 2))
def test_hilbert_symbol_matches_search(p, a, b, i, j):
    x, y = Fraction(a) * Fraction(p) ** i, Fraction(b) * Fraction(p) ** j
    assert hilbert_symbol(x, y, p) == hilbert_oracle(x, y, p)


@given(nonzero, nonzero)
def test_hilbert_product_formula(a, b):
    places = ["inf", 2] + [p for p in range(3, 201) if all(p % q for q in range(2, p)) and (a * b) % p == 0]
    assert math.prod(hilbert_symbol(a, b, v) for v in places) == 1


def test_hilbert_small_table():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, "inf") == -1
    assert hilbert_symbol(3, 3, 3) == -1
    assert hilbert_symbol(5, 3, 3) == -1


cyclo = st.builds(lambda n, terms: Cyclo.from_exponents(n, terms),
                  st.sampled_from([3, 4, 5, 8, 12]),
                  st.lists(st.tuples(st.integers(0, 23), st.integers(-3, 3)), max_size=4))


@given(cyclo, cyclo, cyclo)
def test_cyclo_ring_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-9


@given(cyclo)
def test_cyclo_inverse_and_conj(x):
    if x:
        assert x * x.inverse() == Cyclo.rational(1)
    assert abs(complex(x.conj()) - complex(x).conjugate()) < 1e-9


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_quadratic_gauss_sum(p):
    G1 = gauss_quadratic(1, p)
    assert G1 * G1 == Cyclo.rational(legendre(-1, p) * p)
    for a in range(1, p):
        assert gauss_quadratic(a, p) == G1 * legendre(a, p)


@pytest.mark.parametrize("p,c", [(3, 1), (5, 1), (7, 1), (3, 2)])
def test_gauss_integral_closed_form_vs_sum(p, c):
    order = (p - 1) * p ** (c - 1)
    for idx in range(1, order):
        if c > 1 and idx % p == 0:
            continue
        mu = LocalChar(p, c, idx)
        for a in (Fraction(1), Fraction(2, p), Fraction(1, p ** c), Fraction(3, p ** c), Fraction(1, p ** (c + 1))):
            if a.numerator % p == 0:
                continue
            assert gauss_mult(a, mu) == gauss_mult_bruteforce(a, mu)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_root_number_product_rule(p):
    for idx in range(1, p - 1):
        mu = LocalChar(p, 1, idx)
        assert eps_half(mu) * eps_half(mu.inverse()) == mu(-1)


def test_surd_arithmetic():
    x = Surd(1, 2, 3)
    assert x * x.conjugate() == Surd(x.norm())
    assert Surd.sqrt_p_power(5, 2).to_fraction() == 5
    with pytest.raises(TypeError):
        Surd.sqrt_p_power(5, 1).to_fraction()
    assert x ** -1 * x == Surd(1)


def test_dirichlet_character_quadratic():
    chi = DirichletCharacter.quadratic(-4)
    assert [chi(n) for n in range(1, 9)] == [1, 0, -1, 0, 1, 0, -1, 0]
    assert chi.conductor() == 4 and chi.is_real() and not chi.is_even()


def test_dirichlet_character_local_components():
    mu = LocalChar(5, 1, 1)
    chi = DirichletCharacter.from_locals([mu])
    assert chi.conductor() == 5
    assert chi.local_is_odd(5) == mu.is_odd()
    assert (chi ** 4).is_trivial()
    for m in range(1, 20):
        for n in range(1, 20):
            assert chi(m * n) == chi(m) * chi(n) if chi(m) and chi(n) else chi(m * n) == 0


def test_cohen_h_constant_terms():
    # H(r, 0) = zeta(1 - 2r)
    assert cohen_h(1, 0) == Fraction(-1, 12)
    assert cohen_h(2, 0) == Fraction(1, 120)
    assert cohen_h(3, 0) == Fraction(-1, 252)


@settings(max_examples=500)
@given(st.integers(1, 10 ** 6))
def test_discriminant_split(xi):
    if math.isqrt(xi) ** 2 == xi:
        return
    d, f = discriminant_split(xi)
    assert d * f * f == xi and is_fundamental(-d)


@given(st.integers(1, 3000))
def test_elementary_functions(n):
    assert sum(moebius(d) for d in range(1, n + 1) if n % d == 0) == (1 if n == 1 else 0)
    assert sigma(n, 0) == sum(1 for d in range(1, n + 1) if n % d == 0)
    assert ord_p(Fraction(n * 9, 2), 3) == ord_p(n, 3) + 2


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_hilbert_bilinearity_200_triples(p):
    import random
    rng = random.Random(p)
    for _ in range(200):
        a, b, c = (Fraction(rng.choice([-1, 1]) * rng.randint(1, 300)) * Fraction(p) ** rng.randint(-2, 2)
                   for _ in range(3))
        assert hilbert_symbol(a * b, c, p) == hilbert_symbol(a, c, p) * hilbert_symbol(b, c, p)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_gauss_sum_conjugation(p):
    for a in range(1, p):
        assert gauss_quadratic(a, p).conj() == gauss_quadratic(-a, p)
