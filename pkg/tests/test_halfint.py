from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from centralval.arith import Surd, cohen_h, kronecker
from centralval.halfint import (PlusForm, chebyshev_S, coeff_relation, cohen_eisenstein, hecke_Tp2, in_D_set,
                                jacobi_cusp_12, jacobi_eisenstein, lemma31_check, lemma31_rhs, psi_data, psi_p,
                                psi_p_laurent, shimura_lift, theta_series)
from centralval.qexp import QSeries, TruncationError, newform_22, satake
from centralval.siegel import synthetic_plus_form

DISCS = (-3, -4, -7, -8, -11)


def test_theta_squared_counts_sums_of_two_squares():
    t2 = theta_series(100) ** 2
    for n in range(101):
        assert t2[n] == sum(1 for a in range(-10, 11) for b in range(-10, 11) if a * a + b * b == n)


@pytest.mark.parametrize("r", [3, 5])
def test_cohen_eisenstein_matches_bernoulli_route(r):
    H = cohen_eisenstein(r, 200)
    h0 = cohen_h(r, 0)
    assert all(H[N] == cohen_h(r, N) / h0 for N in range(201))


def test_jacobi_eisenstein_low_coefficients():
    E4, E6 = jacobi_eisenstein(4, 40), jacobi_eisenstein(6, 40)
    assert (E4.C(0, 0), E4.C(1, 1), E4.C(1, 0), E4.C(1, 2)) == (1, 56, 126, 1)
    assert (E6.C(1, 1), E6.C(1, 0)) == (-88, -330)


def test_jacobi_coefficients_depend_only_on_discriminant():
    J = jacobi_cusp_12(200)
    for n in range(1, 12):
        for r in range(-6, 7):
            for s in (-1, 1):
                # C(n, r) = C(n + r s + 1, r + 2 s): invariance under r -> r + 2
                assert J.C(n, r) == J.C(n + s * r + 1, r + 2 * s)


def test_h_low_coefficients(pipe):
    h = pipe.h
    assert [h.coeff(m) for m in (3, 4, 7, 8, 11, 12)] == [1, 10, -88, -132, 1275, 736]
    assert h.coeff(0) == 0 and h.coeff(1) == 0 and h.coeff(2) == 0


def test_h_in_plus_space(pipe):
    assert pipe.h.in_plus_space()


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_T_p2_eigenvalue(pipe, p):
    Th = hecke_Tp2(pipe.h, p)
    assert Th.c == pipe.h.c.truncate(Th.T) * pipe.f.a(p)


def test_T_p2_rejects_p2(pipe):
    with pytest.raises(ValueError):
        hecke_Tp2(pipe.h, 2)


@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5, 7]))
def test_T_p2_preserves_plus_space(seed, p):
    h = synthetic_plus_form(11, 5 * p * p, seed)
    assert hecke_Tp2(h, p).in_plus_space()


@pytest.mark.parametrize("D", DISCS)
def test_shimura_lift(pipe, D):
    n = 13
    s = shimura_lift(pipe.h, D, n)
    assert s == pipe.f.series.truncate(n) * pipe.h.coeff(-D)


def test_shimura_truncation_guard(pipe):
    with pytest.raises(TruncationError):
        shimura_lift(pipe.h, -11, 60)
    with pytest.raises(ValueError):
        shimura_lift(pipe.h, 5, 3)


@pytest.mark.parametrize("p", [3, 5])
def test_shimura_commutes_with_hecke(pipe, p):
    # zeta^D(T_{p^2} h) = T_p zeta^D(h)
    D = -3
    n = 5
    lhs = shimura_lift(hecke_Tp2(pipe.h, p), D, n)
    rhs = shimura_lift(pipe.h, D, n) * pipe.f.a(p)
    assert lhs == rhs


@pytest.mark.parametrize("D", DISCS)
def test_coefficient_relation(pipe, D):
    for n in range(1, 14):
        if n * n * abs(D) <= pipe.h.T:
            assert coeff_relation(pipe.h, pipe.f, D, n).holds


@given(st.integers(0, 12))
def test_chebyshev_recursion(e):
    t = Surd(0, Fraction(3, 7), 7)
    assert chebyshev_S(e + 1, t) == chebyshev_S(e, t) * t - chebyshev_S(e - 1, t)


@given(st.integers(1, 2000), st.sampled_from([3, 5, 7, 11]))
def test_psi_closed_form_matches_laurent_polynomial(xi, p):
    f = newform_22(12)
    data = psi_data(f, p)
    lau = psi_p_laurent(xi, p, data)
    # evaluate the Laurent polynomial in X + 1/X = t through S_e
    if not lau:
        assert psi_p(xi, p, data) == Surd(0)
        return
    X = [complex(r) for r in satake(f, p).roots()]
    val = sum(complex(float(c)) * X[0] ** k for k, c in lau.items())
    assert abs(val - float(psi_p(xi, p, data))) < 1e-9 * max(1, abs(val))


@given(st.integers(1, 3000), st.sampled_from([3, 5, 7, 11, 13]))
def test_psi_recursion_laurent_identity(xi, p):
    # Psi(p^2 xi) (X - 1/X) = (X^(e+2) - X^-(e+2)) - p^(-1/2) chi (X^(e+1) - X^-(e+1))
    from centralval.arith import discriminant_split, ord_p
    f = newform_22(20)
    data = psi_data(f, p)
    d, fr = discriminant_split(xi)
    e = ord_p(fr, p)
    chi = kronecker(-d, p)
    lau = psi_p_laurent(p * p * xi, p, data)
    prod = {}
    for k, c in lau.items():
        prod[k + 1] = prod.get(k + 1, Surd(0)) + c
        prod[k - 1] = prod.get(k - 1, Surd(0)) - c
    want = {e + 2: Surd(1), -e - 2: Surd(-1)}
    rp = Surd(0, Fraction(chi, p), p)
    want[e + 1] = want.get(e + 1, Surd(0)) - rp
    want[-e - 1] = want.get(-e - 1, Surd(0)) + rp
    keys = set(prod) | set(want)
    assert all(prod.get(k, Surd(0)) == want.get(k, Surd(0)) for k in keys)


def test_psi_formula(pipe):
    for xi in range(1, 400):
        assert lemma31_check(pipe.h, pipe.f, xi).holds


@pytest.mark.parametrize("D", [-3, -4, -7])
def test_psi_formula_reduces_to_coefficient_relation(pipe, D):
    for n in range(1, 12):
        assert lemma31_rhs(pipe.h, pipe.f, n * n * abs(D)) == coeff_relation(pipe.h, pipe.f, D, n).rhs


def test_bad_prime_psi_values():
    from centralval.halfint import PsiData
    # chi_{-xi}(p) = -w_p at p | M kills Psi; N/M keeps chi(chi + w)
    assert psi_p(3, 5, PsiData("M", w=kronecker(-3, 5))) == Surd(0)
    assert psi_p(3, 5, PsiData("N/M", w=kronecker(-3, 5))) == Surd(2)


def test_admissible_discriminants():
    assert in_D_set(-3, 11, 1, 1, {})
    assert not in_D_set(5, 11, 1, 1, {})
    assert not in_D_set(-12, 11, 1, 1, {})
    assert in_D_set(-3, 11, 5, 5, {5: 1}) == (kronecker(-3, 5) == -1)


def test_plus_form_json_round_trip(pipe):
    h = PlusForm(11, pipe.h.c.truncate(50))
    assert PlusForm.from_json(h.to_json()).c == h.c


def test_kohnen_formula(pipe, nrm):
    from centralval.halfint import kohnen_rhs
    for D in (-3, -4):
        lhs = float(pipe.h.coeff(-D)) ** 2 / nrm.h
        rhs = kohnen_rhs(pipe.f, D, 11, petersson=nrm.f, nmax=pipe.f.T)
        assert abs(lhs / rhs - 1) < 1e-6


def test_plus_space_guard():
    assert not PlusForm(11, QSeries.from_coeffs([0, 1, 0, 1])).in_plus_space()
