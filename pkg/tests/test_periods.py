from fractions import Fraction as F

import pytest

from centralval.arith import gauss_quadratic, legendre
from centralval.localreps import Rep
from centralval.periods import (I_sharp, I_sharp_closed, alpha_sharp_N_over_M, alpha_sharp_closed,
                                archimedean_check, coset_volume, coset_volume_enumeration, gamma0_volume_closed,
                                gamma00_ledger, local_L_ratio, nonresidue, omega_M, omega_M_closed,
                                p2_norm_checks, r_gamma, vanishing_ledger, zeta_p2)


@pytest.mark.parametrize("p", [3, 5])
def test_gamma0_volumes_three_ways(p):
    for r in (Rep("alpha", 0), Rep("alpha", 2), Rep("alpha", -1), Rep("beta", 1), Rep("beta", 0), Rep("beta", 3)):
        v = coset_volume(r.matrix(p), p, 1)
        assert v == gamma0_volume_closed(r, p)
        if abs(r.n) <= 1:
            assert v == coset_volume_enumeration(r.matrix(p), p, 1, 3)


@pytest.mark.parametrize("p", [3, 5])
def test_tail_closed_form_independent_of_window(p):
    for w in (1, -1):
        vals = [alpha_sharp_N_over_M(p, w, T=T, tail="closed") for T in (1, 2, 3, 4)]
        vals.append(alpha_sharp_N_over_M(p, w, T=4, tail="brute"))
        assert all(v == vals[0] for v in vals)
        assert vals[0].to_fraction() == alpha_sharp_closed(p, "N/M", w)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_massive_cosets_of_gamma00(p):
    u = nonresidue(p)
    led = gamma00_ledger(p, u, volumes="closed")
    mass = [e for e in led.entries if e.volume is not None]
    assert len(mass) == 3
    # G(u, p) = -G(1, p) makes the two r-terms sum to p^-3 (p - 1)
    assert gauss_quadratic(u, p) == -gauss_quadratic(1, p)
    vol = F((p - 1) ** 2, 2 * p ** 3)
    s = omega_M_closed(p, r_gamma(p, 1)) * vol + omega_M_closed(p, r_gamma(p, u)) * vol
    assert s.to_fraction() == F(p - 1, p ** 3)


def test_vanishing_ledger_p3():
    p, u = 3, 2
    massive = {Rep("alpha", 0), r_gamma(p, 1), r_gamma(p, u)}
    rows = vanishing_ledger(p, u)
    assert {fam for fam, *_ in rows} == {"I", "II", "III", "IV", "V"}
    for fam, r, ph, pg, pf, om in rows:
        if r not in massive:
            assert om == 0, (fam, r.label())
    assert omega_M(p, r_gamma(p, 1)) == omega_M_closed(p, r_gamma(p, 1))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_local_constants(p):
    assert I_sharp_closed(p, "N/M") == F(1, p)
    assert I_sharp_closed(p, "M") == F(2, p * (p + 1))
    for w in (1, -1):
        assert alpha_sharp_closed(p, "N/M", w) * local_L_ratio(p, "N/M", w) == F(1, p)
    assert alpha_sharp_closed(p, "M") * local_L_ratio(p, "M") == F(2, p * (p + 1))
    assert zeta_p2(p) == F(p * p, p * p - 1)
    assert legendre(nonresidue(p), p) == -1


def test_I_sharp_M_case_p3():
    assert I_sharp(3, "M").I_sharp.to_fraction() == F(1, 6)


@pytest.mark.parametrize("k", [1, 3, 11])
def test_archimedean(k):
    c = archimedean_check(k)
    assert c["integral_error"] < 1e-10 and c["gamma_ratio_error"] < 1e-12
    assert abs(c["I_sharp"] - 1) < 1e-10


def test_archimedean_rejects_even_k():
    with pytest.raises(ValueError):
        archimedean_check(2)


def test_dyadic_norm_lemmas():
    d = p2_norm_checks()
    for key in ("t(2) acts on 1_Z2 as 2^-1/2 1_(1/2)Z2", "phi2^(2) = 1_(1/2)Z2",
                "<phi2^(2),phi2^(2)> = 2<phi2,phi2>", "<w(t2)phi, w(t2)phi> = <phi, phi>", "index check"):
        assert d[key] is True
    assert I_sharp(2).I_sharp == 1
