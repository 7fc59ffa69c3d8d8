import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from centralval.arith import Cyclo, Mono, hilbert_symbol
from centralval.checks import _random_sl2_q, _random_sl2_z, cocycle_records, fourier_records
from centralval.metaplectic import (S, SL2, Meta, SchwartzTable, chi_psi, cocycle, integrate_K, s_p,
                                    schwartz_inner, t_el, u_el, weil_act, weil_index, weil_index_numeric,
                                    weil_inner)


def test_cocycle_and_splitting_records():
    recs = cocycle_records(samples=1500, seed=3)
    assert all(r.ok for r in recs), recs


def test_metaplectic_associativity_10k():
    rng = random.Random(11)
    for i in range(10_000):
        p = (3, 5, 7)[i % 3]
        g = [Meta(_random_sl2_q(rng, p), rng.choice((1, -1)), p) for _ in range(3)]
        assert (g[0] * g[1]) * g[2] == g[0] * (g[1] * g[2])


def test_splitting_is_a_homomorphism():
    rng = random.Random(5)
    for i in range(2000):
        p = (3, 5, 7)[i % 3]
        k1, k2 = _random_sl2_z(rng, p), _random_sl2_z(rng, p)
        assert Meta.split(k1, p) * Meta.split(k2, p) == Meta.split(k1 * k2, p)
        assert cocycle(k1, k2, p) == s_p(k1, p) * s_p(k2, p) * s_p(k1 * k2, p)


def test_double_fourier_reflection():
    assert all(r.ok for r in fourier_records(seed=1))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_weil_index_closed_form_vs_gauss_sum(p):
    for t in (F(1), F(-1), F(2), F(p), F(3 * p), F(1, p), F(2, p ** 3)):
        if t.numerator % p == 0 and t.numerator // p % p == 0:
            continue
        assert weil_index(t, p).key() == weil_index_numeric(t, p).key()


@settings(max_examples=1000)
@given(st.sampled_from([3, 5, 7]), st.integers(-40, 40).filter(bool), st.integers(-40, 40).filter(bool),
       st.integers(-2, 2), st.integers(-2, 2), st.sampled_from([F(1), F(-1), F(2)]))
def test_chi_psi_product_identity(p, a, b, i, j, t):
    x, y = F(a) * F(p) ** i, F(b) * F(p) ** j
    lhs = chi_psi(x * y, t, p).to_cyclo()
    rhs = (chi_psi(x, t, p) * chi_psi(y, t, p)).to_cyclo() * hilbert_symbol(x, y, p)
    assert lhs == rhs


def _gens(rng, p):
    choice = rng.randrange(3)
    if choice == 0:
        return t_el(F(rng.choice([1, 2, -1])) * F(p) ** rng.randint(-1, 1))
    if choice == 1:
        return u_el(F(rng.randint(-3, 3), p ** rng.randint(0, 1)))
    return S


@pytest.mark.parametrize("p", [3, 5])
def test_weil_action_composes_with_cocycle(p):
    rng = random.Random(p)
    phi = SchwartzTable(p, 0, 1, [Cyclo.rational(rng.randint(-3, 3)) for _ in range(p)])
    for _ in range(40):
        g1, g2 = Meta(_gens(rng, p), 1, p), Meta(_gens(rng, p), 1, p)
        for t in (F(1), F(-1)):
            assert weil_act(g1 * g2, phi, t) == weil_act(g1, weil_act(g2, phi, t), t)


# p = 7 is exercised through the matrix-coefficient suites; random words there build large tables
@pytest.mark.parametrize("p", [3, 5])
def test_weil_inner_matches_action_then_pairing(p):
    rng = random.Random(17 + p)
    one = SchwartzTable.indicator(p)
    phi = SchwartzTable(p, 1, 1, [Cyclo.rational(rng.randint(-2, 2)) for _ in range(p * p)])
    for _ in range(25):
        g = Meta(_gens(rng, p), 1, p) * Meta(_gens(rng, p), 1, p) * Meta(_gens(rng, p), 1, p)
        for f in (one, phi):
            assert weil_inner(g, f, -1) == schwartz_inner(weil_act(g, f, -1), f)


@pytest.mark.parametrize("p", [3, 5])
def test_haar_volume_and_depth_stability(p):
    assert integrate_K(lambda c, d: Mono(1), p).to_fraction() == 1 - F(1, p * p)

    def f(c, d):
        oc = 99 if c == 0 else next(i for i in range(99) if c % p ** (i + 1))
        return Mono(F(p) ** (-min(oc, 3)))
    integrate_K(f, p, r=1, check_depth=True)


def test_sl2_guards():
    with pytest.raises(ValueError):
        SL2(1, 1, 1, 1).check_sl2()
    with pytest.raises(ValueError):
        Meta(S, 1, 3) * Meta(S, 1, 5)
