"""Explicit local vectors at a prime p and their normalized matrix coefficients.

Four models are implemented:

* ``steinberg``: the K_0(p)-new vector of an unramified quadratic twist of
  Steinberg, restricted to GL2(Z_p) as 1_{K_0} - (1/p) 1_{K_0 w K_0};
* ``ps``: the K_0^1(p)-new vector of a principal series pi(xi1, xi2) with xi1
  unramified and xi2 of conductor p, and its translate by diag(p^-1, 1);
* ``special``: the Gamma_0-new vector of the special genuine representation
  of the metaplectic cover, 1 on SL2(Z_p) minus (p+1) on Gamma_0;
* ``odd-weil``: the vector 1_{Z_p^x} chi^-1 of the odd Weil representation.

Brute-force matrix coefficients integrate over SL2(Z_p) with the exact cell
integrator; closed forms are tabulated next to them for comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arith import (Cyclo, LocalChar, Mono, as_fraction, gauss_quadratic, legendre, ord_p,
                    sqrt_int, unit_part)
from .metaplectic import (I2, S, SL2, Meta, SchwartzTable, alpha, chi_psi, cocycle,
                          integrate_K, nu, s_p, weil_inner, word)

F = Fraction

PS_MODELS = ("ps-new", "ps-new-shifted")


# ---------------------------------------------------------------------------
# representatives

@dataclass(frozen=True)
class Rep:
    """A double-coset representative: a word in alpha_n, beta_m, nu_gamma."""
    kind: str                 # 'alpha', 'beta', 'nu', 'alpha_nu', 'nu_alpha', 'beta_nu', 'nu_beta_nu'
    n: int = 0
    gamma: Fraction = F(0)
    delta: Fraction = F(0)

    def meta(self, p: int) -> Meta:
        a = Meta(alpha(self.n, p), 1, p)
        b = word(p, S, alpha(self.n, p))
        ng = Meta(nu(self.gamma, p), 1, p)
        nd = Meta(nu(self.delta, p), 1, p)
        return {
            "alpha": lambda: a,
            "beta": lambda: b,
            "nu": lambda: ng,
            "alpha_nu": lambda: a * nd,
            "nu_alpha": lambda: ng * a,
            "beta_nu": lambda: b * nd,
            "nu_beta_nu": lambda: ng * b * nd,
        }[self.kind]()

    def matrix(self, p: int) -> SL2:
        return self.meta(p).g

    def label(self) -> str:
        if self.kind in ("alpha", "beta"):
            return f"{self.kind}_{self.n}"
        return f"{self.kind}(n={self.n}, gamma={self.gamma}, delta={self.delta})"


def rep_alpha(n):
    return Rep("alpha", n)


def rep_beta(m):
    return Rep("beta", m)


# ---------------------------------------------------------------------------
# vector models

@dataclass
class LocalVector:
    """A local test vector; ``params`` depend on the model.

    steinberg-new: xi_p = xi(p) in {+1, -1} (xi unramified quadratic, xi(p) = -w_p).
    metaplectic-special: D (unit with (D/p) = w_p); psi = psi_p^(-D).
    ps-new(-shifted): chi (LocalChar of conductor p), xi1_p, xi2_p (Mono of modulus 1).
    odd-weil:  chi (odd LocalChar of conductor p), D (square unit); psi = psi_p^(-D).
    """
    model: str
    p: int
    params: dict = field(default_factory=dict)

    @property
    def psi_t(self):
        return -F(self.params.get("D", 1))


def steinberg(p: int, w: int) -> LocalVector:
    return LocalVector("steinberg-new", p, {"xi_p": -w})


def special(p: int, w: int, D=None) -> LocalVector:
    if D is None:
        D = next(d for d in range(1, 4 * p) if d % p and legendre(d, p) == w)
    if legendre(D, p) != w:
        raise ValueError("D must satisfy (D/p) = w")
    return LocalVector("metaplectic-special", p, {"D": F(D), "w": w})


def ps_new(p: int, chi: LocalChar, xi1_p: Mono = Mono(1), xi2_p: Mono = Mono(1),
           shifted: bool = True) -> LocalVector:
    model = "ps-new-shifted" if shifted else "ps-new"
    return LocalVector(model, p, {"chi": chi, "xi1_p": xi1_p, "xi2_p": xi2_p})


def odd_weil(p: int, chi: LocalChar, D=1) -> LocalVector:
    if not chi.is_odd():
        raise ValueError("the odd Weil vector needs an odd character")
    if legendre(D, p) != 1:
        raise ValueError("D must be a square unit")
    return LocalVector("odd-weil", p, {"chi": chi, "D": F(D)})


def odd_weil_table(v: LocalVector) -> SchwartzTable:
    p, chi = v.p, v.params["chi"].inverse()
    vals = [Cyclo.rational(0)] + [chi(u) for u in range(1, p)]
    return SchwartzTable(p, 0, 1, vals)


# ---------------------------------------------------------------------------
# evaluation

def _mono_power(m: Mono, e: int) -> Mono:
    out = Mono(1)
    base = m if e >= 0 else m.conj() * F(1, m.q * m.q)
    for _ in range(abs(e)):
        out = out * base
    return out


def eval_steinberg(x: SL2, p: int, xi_p: int) -> Mono:
    """GL2 element x (det arbitrary) in the induced model of xi St."""
    g, dl = x[2], x[3]
    det = x.det()
    xi_det = xi_p ** (ord_p(det, p) % 2)
    if g == 0 or (dl != 0 and ord_p(g, p) > ord_p(dl, p)):
        e = ord_p(det, p) - 2 * ord_p(dl, p)
        return Mono(xi_det * F(p) ** (-e))
    e = ord_p(det, p) - 2 * ord_p(g, p)
    return Mono(-xi_det * F(p) ** (-e) / p)


def eval_ps(x: SL2, v: LocalVector) -> Mono | None:
    """The K_0^1-new vector of pi(xi1, xi2), or its diag(p^-1,1)-translate."""
    p = v.p
    if v.model == "ps-new-shifted":
        x = x * SL2(F(1, p), 0, 0, 1)
    g, dl = x[2], x[3]
    if dl == 0 or (g != 0 and ord_p(g, p) <= ord_p(dl, p)):
        return None
    det = x.det()
    a = det / dl
    chi: LocalChar = v.params["chi"]
    oa, od = ord_p(a, p), ord_p(dl, p)
    val = _mono_power(v.params["xi1_p"], oa - 1) * _mono_power(v.params["xi2_p"], od)
    val = val * chi.mono(unit_part(dl, p)) * Mono.p_power(p, -(oa - od))
    return val


def eval_special(xt: Meta, v: LocalVector) -> Mono:
    """The Gamma_0-new vector of the special representation at [x, eps]."""
    p = v.p
    x, eps = xt.g, xt.eps
    A, B, C, D = x
    if C == 0 or (D != 0 and ord_p(C, p) > ord_p(D, p)):
        b = SL2(1 / D, B, 0, D)
        kappa = SL2(1, 0, C / D, 1)
        hK = -p
        a = 1 / D
    else:
        kappa = SL2(0, -1, 1, D / C)
        b = SL2(1 / C, A, 0, C)
        hK = 1
        a = 1 / C
    e = eps * cocycle(b, kappa, p) * s_p(kappa, p)
    oa = ord_p(a, p)
    val = chi_psi(a, v.psi_t, p) * Mono.p_power(p, -3 * oa) * (e * (-1) ** (oa % 2) * hK)
    return val


def eval_vector(v: LocalVector, g) -> Cyclo:
    """Value of the vector at a group element (SL2/GL2 matrix or Meta)."""
    if v.model == "steinberg-new":
        return eval_steinberg(_mat(g), v.p, v.params["xi_p"]).to_cyclo()
    if v.model in PS_MODELS:
        r = eval_ps(_mat(g), v)
        return Cyclo.rational(0) if r is None else r.to_cyclo()
    if v.model == "metaplectic-special":
        gt = g if isinstance(g, Meta) else Meta(g, 1, v.p)
        return eval_special(gt, v).to_cyclo()
    raise ValueError(f"eval_vector does not apply to model {v.model}")


def _mat(g):
    return g.g if isinstance(g, Meta) else g


def _k_of(c, d, p) -> SL2:
    """An element of SL2(Z_p) with bottom row (c, d)."""
    if d % p:
        return SL2(1 / d, 0, c, d)
    return SL2(0, -1 / c, c, d)


# ---------------------------------------------------------------------------
# matrix coefficients by integration

def _cutoff(g: SL2, p: int) -> int:
    worst = max((abs(ord_p(e, p)) for e in g if e != 0), default=0)
    return 2 * worst + 4


def inner(v: LocalVector, g, check_depth: bool = False) -> Cyclo:
    """<pi(g) v, v> by exact integration (unnormalized).

    SL2(Z_p) carries total volume 1 - p^-2 (so vol Gamma_0 = p^-1(1 - p^-1)).
    GL2(Z_p) carries total volume 1; the GL2 integrands here are invariant
    under diag(1, u), so their integral is the SL2 one divided by 1 - p^-2.
    """
    p = v.p
    if v.model == "odd-weil":
        phi = odd_weil_table(v)
        gt = g if isinstance(g, Meta) else Meta(g, 1, p)
        return weil_inner(gt, phi, v.psi_t)
    gm = _mat(g)
    cut = _cutoff(gm, p)
    if v.model == "steinberg-new":
        xi = v.params["xi_p"]

        def f(c, d):
            k = _k_of(c, d, p)
            return eval_steinberg(k * gm, p, xi) * eval_steinberg(k, p, xi).q
    elif v.model in PS_MODELS:
        def f(c, d):
            k = _k_of(c, d, p)
            a = eval_ps(k * gm, v)
            if a is None:
                return None
            b = eval_ps(k, v)
            return None if b is None else a * b.conj()
    elif v.model == "metaplectic-special":
        gt = g if isinstance(g, Meta) else Meta(g, 1, p)

        def f(c, d):
            k = _k_of(c, d, p)
            kt = Meta(k, s_p(k, p), p)
            hk = -p if c % p == 0 else 1
            return eval_special(kt * gt, v) * hk
    else:
        raise ValueError(v.model)
    val = integrate_K(f, p, r=1, cutoff=cut, check_depth=check_depth)
    if v.model != "metaplectic-special":
        val = val / (1 - F(1, p * p))
    return val


def norm2(v: LocalVector) -> Cyclo:
    return inner(v, Meta(I2, 1, v.p) if v.model in ("metaplectic-special", "odd-weil") else I2)


def matcoef(v: LocalVector, g) -> Cyclo:
    """Normalized Phi_v(g) = <pi(g) v, v> / ||v||^2."""
    return inner(v, g) / norm2(v)


def weil_pairing(g, p: int) -> Cyclo:
    """<omega_{psi-bar}(g) 1_{Z_p}, 1_{Z_p}> (the norm of 1_{Z_p} is 1)."""
    one = SchwartzTable.indicator(p)
    gt = g if isinstance(g, Meta) else Meta(g, 1, p)
    return weil_inner(gt, one, -1)


# ---------------------------------------------------------------------------
# closed forms

class Untabulated(ValueError):
    pass


def closed_form_phi(v: LocalVector, rep: Rep) -> Cyclo:
    """Tabulated closed form of Phi_v at a representative."""
    p = v.p
    n = rep.n
    if v.model == "steinberg-new":
        if rep.kind == "alpha":
            return Cyclo.rational(F(p) ** (-2 * abs(n)))
        if rep.kind == "beta":
            return Cyclo.rational(-F(p) ** (-abs(2 * n - 1)))
    if v.model == "metaplectic-special":
        c = chi_psi(F(p) ** n, v.psi_t, p)
        if rep.kind == "alpha":
            return (c * Mono.p_power(p, -3 * abs(n)) * (-1) ** (n % 2)).to_cyclo()
        if rep.kind == "beta":
            return (c * Mono.p_power(p, -abs(3 * n - 2)) * (-1) ** ((n + 1) % 2)).to_cyclo()
    if v.model == "weil-pairing":
        if rep.kind in ("alpha", "beta"):
            return (chi_psi(F(p) ** n, -1, p) * Mono.p_power(p, -abs(n))).to_cyclo()
    if v.model == "ps-new-shifted":
        return _closed_ps(v, rep)
    if v.model == "odd-weil":
        return _closed_odd(v, rep)
    raise Untabulated(f"no closed form for {v.model} at {rep.label()}")


def _closed_ps(v: LocalVector, rep: Rep) -> Cyclo:
    p = v.p
    chi = v.params["chi"]
    if rep.kind == "nu" and ord_p(rep.gamma, p) == 0:
        return Cyclo.rational(0)
    if rep.kind == "beta" and rep.n == 1:
        return Cyclo.rational(0)
    if rep.kind == "beta_nu" and rep.n == 1 and ord_p(rep.delta, p) == 0:
        return Cyclo.rational(0)
    if rep.kind == "nu_beta_nu" and rep.n >= 1 and ord_p(rep.gamma, p) == 0 and ord_p(rep.delta, p) == 0:
        if rep.n == 1 and _congruent_one(rep.gamma * rep.delta, p):
            return chi(rep.gamma)
        return Cyclo.rational(0)
    raise Untabulated(f"no closed form for ps at {rep.label()}")


def _congruent_one(x, p: int) -> bool:
    x = as_fraction(x)
    return (x.numerator - x.denominator) % p == 0


def _closed_odd(v: LocalVector, rep: Rep) -> Cyclo:
    p = v.p
    chi = v.params["chi"]
    if rep.kind == "alpha" and rep.n != 0:
        return Cyclo.rational(0)
    if rep.kind == "alpha" and rep.n == 0:
        return Cyclo.rational(1)
    if rep.kind in ("alpha_nu", "nu_alpha") and rep.n != 0:
        return Cyclo.rational(0)
    if rep.kind == "beta" and rep.n != 1:
        return Cyclo.rational(0)
    if rep.kind == "beta_nu" and rep.n > 1 and ord_p(rep.delta, p) == 0:
        return Cyclo.rational(0)
    if rep.kind == "nu_beta_nu" and rep.n == 1 and ord_p(rep.gamma, p) == 0:
        if _congruent_one(rep.gamma * rep.delta, p):
            g = int(as_fraction(rep.gamma) % p) if as_fraction(rep.gamma).denominator == 1 else None
            if g is None:
                raise Untabulated("gamma must be an integer representative")
            c = chi_psi(F(p), v.psi_t, p).to_cyclo() * chi(rep.gamma) / sqrt_int(p)
            return c * (p - gauss_quadratic(-g, p)) / (p - 1)
    raise Untabulated(f"no closed form for odd-weil at {rep.label()}")
