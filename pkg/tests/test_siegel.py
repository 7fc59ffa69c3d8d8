import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from centralval.qexp import TruncationError
from centralval.siegel import (BiSeries, HalfIntegralMatrix, SKLift, apply_second_variable, project_level1,
                               pullback, rp_pullback_check, sk_coefficient, synthetic_plus_form)


def _act(B: HalfIntegralMatrix, U):
    """U^T B U for B = [[n, r/2], [r/2, m]] and U in GL2(Z)."""
    (a, b), (c, d) = U
    n, r, m = B.n, B.r, B.m
    n2 = n * a * a + r * a * c + m * c * c
    m2 = n * b * b + r * b * d + m * d * d
    r2 = 2 * n * a * b + r * (a * d + b * c) + 2 * m * c * d
    return HalfIntegralMatrix(n2, r2, m2)


def _random_unimodular(rng):
    U = ((1, 0), (0, 1))
    for _ in range(rng.randint(1, 5)):
        k = rng.randint(-2, 2)
        G = rng.choice([((1, k), (0, 1)), ((1, 0), (k, 1)), ((0, 1), (1, 0)), ((-1, 0), (0, 1))])
        U = tuple(tuple(sum(U[i][t] * G[t][j] for t in range(2)) for j in range(2)) for i in range(2))
    return U


def test_fourier_coefficient_invariance_on_100_pairs(pipe):
    lift = SKLift(pipe.h, 11)
    rng = random.Random(7)
    checked = 0
    while checked < 100:
        B = HalfIntegralMatrix(rng.randint(1, 6), rng.randint(-6, 6), rng.randint(1, 6))
        if not B.is_positive_definite():
            continue
        B2 = _act(B, _random_unimodular(rng))
        if B2.disc > pipe.h.T or B2.n <= 0:
            continue
        assert B2.disc == B.disc and B2.content() == B.content()
        assert sk_coefficient(lift, B) == sk_coefficient(lift, B2)
        checked += 1


def test_sk_coefficient_guards(pipe):
    lift = SKLift(pipe.h, 11)
    with pytest.raises(ValueError):
        sk_coefficient(lift, HalfIntegralMatrix(1, 2, 1))
    with pytest.raises(TruncationError):
        sk_coefficient(lift, HalfIntegralMatrix(100, 0, 100))


def test_primitive_coefficients_are_c(pipe):
    lift = SKLift(pipe.h, 11)
    assert sk_coefficient(lift, HalfIntegralMatrix(1, 1, 1)) == pipe.h.coeff(3)
    # content 2: A(2, 2, 2) = c(12) + 2^11 c(3)
    assert sk_coefficient(lift, HalfIntegralMatrix(2, 2, 2)) == pipe.h.coeff(12) + 2 ** 11 * pipe.h.coeff(3)


def test_pullback_symmetric_and_proportional_to_delta_squared(pipe):
    b = pullback(SKLift(pipe.h, 11), 12, 12)
    assert b.is_symmetric()
    proj = project_level1(b, pipe.g)
    assert proj.lam == 12 and proj.residual == 0


def test_projection_rejects_non_product(pipe):
    b = pullback(SKLift(pipe.h, 11), 4, 4)
    b.b[2][3] += 1
    with pytest.raises(ArithmeticError):
        project_level1(b, pipe.g)


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_U_after_V_in_second_variable(seed, d):
    rng = random.Random(seed)
    s = BiSeries(3, 5, [[Fraction(rng.randint(-9, 9)) for _ in range(6)] for _ in range(4)])
    assert apply_second_variable("U", apply_second_variable("V", s, d), d) == s.scale(d)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_R_p_pullback_identity_synthetic(seed):
    p, T = 3, 6
    h = synthetic_plus_form(11, 4 * T * T * p, seed)
    w = rp_pullback_check(SKLift(h, 11), p, T)
    assert w.holds
    # with V_p carrying its factor p the two sides differ by exactly p
    assert not w.literal_holds and w.factor == p


def test_pullback_truncation_guard(pipe):
    with pytest.raises(TruncationError):
        pullback(SKLift(pipe.h, 11), 30, 30)
