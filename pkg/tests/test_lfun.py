import math

import mpmath
import numpy as np
import pytest

from centralval.lfun import (HypothesisError, InsufficientCoefficients, L_adjoint, L_deg6, L_f, L_f_twist,
                             bad_factor_deg6, check_hypotheses, dirichlet_from_euler, euler_ad_g, euler_deg6,
                             euler_f, factorization_check, lambda_deg6_center, primes_upto,
                             riemann_zeta_completed, root_number, unitary_roots)
from centralval.qexp import EllipticForm, delta, newform_22


@pytest.fixture(scope="module")
def fg():
    return newform_22(1200), EllipticForm(12, 1, delta(1200), newform=True, label="12.1.a")


def test_euler_factors_unitary(fg):
    f, g = fg
    for p in primes_upto(50):
        for P, scale in ((euler_f(f, p), p ** 10.5), (euler_deg6(f, g, p), p ** 10.5)):
            assert np.allclose(np.abs(unitary_roots(P, scale)), 1, atol=1e-9)
        assert np.allclose(np.abs(unitary_roots(euler_ad_g(g, p), 1.0)), 1, atol=1e-9)


def test_factorization_all_good_primes(fg):
    f, g = fg
    assert all(factorization_check(f, g, p)[0] for p in primes_upto(100))


def test_dirichlet_series_from_euler_reproduces_coefficients(fg):
    f, _ = fg
    a = dirichlet_from_euler(lambda p: euler_f(f, p), 300)
    assert [a[n] for n in range(1, 301)] == [f.a(n) for n in range(1, 301)]


def test_zeta_completed_against_mpmath():
    Z = riemann_zeta_completed()
    for s in (0.3, 2.0, 3.5):
        v, err = Z.value(s)
        ref = float(mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s))
        assert abs(v - ref) < 1e-12 * abs(ref)
    assert abs(Z.value(0.3)[0] - Z.value(0.7)[0]) < 1e-12


def test_smoothing_robustness(fg):
    f, _ = fg
    L = L_f(f, 400)
    for s in (11.3, 12.0):
        v1, e1 = L.value(s)
        v2, e2 = L.value(s, A=0.04)
        assert abs(v1 - v2) <= max(e1, e2) + 1e-14 * abs(v1)


@pytest.mark.parametrize("delta_", [0.1, 0.5])
def test_center_symmetry(fg, delta_):
    f, g = fg
    for L, k in ((L_f_twist(f, -3, 1200), 11), (L_deg6(f, g, 400), 11)):
        # N^(s/2) Lambda(s) is the self-dual normalization
        a = L.value(k + delta_)[0] * L.conductor ** ((k + delta_) / 2)
        b = L.value(k - delta_)[0] * L.conductor ** ((k - delta_) / 2)
        assert abs(a - L.sign * b) < 1e-10 * max(abs(a), 1e-300)


def test_value_off_center_matches_direct_sum(fg):
    f, _ = fg
    L = L_f(f, 1200)
    v = L.value(14.0)[0]
    # the plain Dirichlet sum is truncated at 1200 terms, which limits agreement to ~1e-11
    assert abs(v / L.direct_value(14.0) - 1) < 1e-10


def test_odd_sign_forces_central_zero(fg):
    f, _ = fg
    assert root_number(f) == -1
    assert abs(L_f(f, 600).value(11.0)[0]) < 1e-14 * abs(L_f(f, 600).value(12.0)[0])


def test_degree6_central_value_nonnegative(fg):
    f, g = fg
    r = lambda_deg6_center(f, g, 400)
    assert r.value > 0 and r.error_bound < 1e-10 * r.value
    assert r.row()["s"] == 11.0


def test_adjoint_L_matches_petersson(fg):
    _, g = fg
    v = L_adjoint(g, 1200).value(1.0)[0] / 2 ** 12
    assert abs(v / 1.0353620568043209e-06 - 1) < 1e-9


def test_insufficient_coefficients(fg):
    f, g = fg
    with pytest.raises(InsufficientCoefficients):
        L_deg6(f, g, 10).check_reach(11.0)


def test_hypothesis_checks(fg):
    f, g = fg
    assert check_hypotheses(f, g)
    with pytest.raises(HypothesisError):
        check_hypotheses(g, g)


def test_bad_prime_factor_shape():
    f = newform_22(20)
    f.level, f.atkin_lehner = 5, {5: -1}
    P = bad_factor_deg6(f, 5)
    assert P[0] == 1 and len(P) <= 3


def test_tail_bound_is_finite(fg):
    f, _ = fg
    assert math.isfinite(L_f(f, 400).value(11.5)[1])
