from fractions import Fraction as F

import pytest

from centralval.arith import Mono
from centralval.localreps import (LocalVector, Rep, Untabulated, closed_form_phi, matcoef, norm2, odd_weil,
                                  ps_new, rep_alpha, rep_beta, special, steinberg, weil_pairing)
from centralval.periods import odd_character


def _ledger_reps(p):
    reps = [Rep("nu", 0, F(g)) for g in range(1, p)] + [rep_beta(1)]
    reps += [Rep("beta_nu", m, 0, F(d)) for m in (1, 2) for d in range(1, p)]
    reps += [Rep("nu_beta_nu", m, F(g), F(d)) for m in (1, 2) for g in range(1, p) for d in range(1, p)]
    reps += [rep_alpha(n) for n in (-2, -1, 0, 1, 2)]
    reps += [Rep("alpha_nu", n, 0, F(1)) for n in (1, 2)] + [Rep("nu_alpha", n, F(1)) for n in (-1, -2)]
    reps += [rep_beta(m) for m in (-1, 0, 2, 3)]
    return reps


@pytest.mark.parametrize("p", [3, 5])
def test_level_p2_vectors_match_closed_forms(p):
    chi = odd_character(p)
    vecs = (ps_new(p, chi, Mono(1, F(1, 8)), Mono(1, F(1, 3))), odd_weil(p, chi))
    seen = 0
    for r in _ledger_reps(p):
        for v in vecs:
            try:
                cf = closed_form_phi(v, r)
            except Untabulated:
                continue
            assert matcoef(v, r.meta(p)) == cf, (v.model, r.label())
            seen += 1
    assert seen > 4 * p


@pytest.mark.parametrize("p", [3, 5])
def test_hermitian_symmetry(p):
    chi = odd_character(p)
    vecs = (steinberg(p, 1), special(p, -1), ps_new(p, chi, Mono(1, F(1, 8)), Mono(1, F(1, 3))), odd_weil(p, chi))
    for r in (rep_alpha(1), rep_alpha(-2), rep_beta(1), rep_beta(2), Rep("nu_beta_nu", 1, F(1), F(1))):
        g = r.meta(p)
        for v in vecs:
            assert matcoef(v, g.inv()) == matcoef(v, g).conj()
        assert weil_pairing(g.inv(), p) == weil_pairing(g, p).conj()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_norms(p):
    chi = odd_character(p)
    for w in (1, -1):
        assert norm2(special(p, w)).to_fraction() == F(p * p - 1, p)
    assert norm2(ps_new(p, chi, Mono(1, F(1, 8)), Mono(1, F(1, 3)))).to_fraction() == F(1, p + 1)
    assert norm2(odd_weil(p, chi)).to_fraction() == 1 - F(1, p)


def test_matrix_coefficient_at_identity_is_one():
    for v in (steinberg(3, 1), special(3, 1)):
        assert matcoef(v, rep_alpha(0).meta(3)).to_fraction() == 1
    assert weil_pairing(rep_alpha(0).meta(3), 3).to_fraction() == 1


def test_model_guards():
    with pytest.raises(ValueError):
        special(5, 1, D=2)              # (2/5) = -1
    with pytest.raises(ValueError):
        odd_weil(5, odd_character(5), D=2)
    with pytest.raises(Untabulated):
        closed_form_phi(LocalVector("weil-pairing", 3), Rep("nu", 0, F(1)))
