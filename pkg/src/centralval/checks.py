"""Verification suites shared by the command line and the acceptance tests.

Every suite returns a list of :class:`Record`; a record names the identity
being checked, what was expected, what was computed and how the two sides
were obtained.  Exact suites compare with ``==`` on rationals or cyclotomic
numbers; numeric suites report a relative discrepancy against a tolerance.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .arith import Cyclo, legendre

PLUMBING = "plumbing"


@dataclass
class Record:
    check: str
    anchor: str
    expected: str
    computed: str
    status: str                 # "pass", "fail" or "vacuous"
    provenance: str

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "vacuous")


def _show(x) -> str:
    if isinstance(x, Cyclo) and x.is_rational():
        x = x.to_fraction()
    if isinstance(x, float):
        return repr(x)
    return str(x)


def exact(check, anchor, expected, computed, provenance) -> Record:
    return Record(check, anchor, _show(expected), _show(computed),
                  "pass" if expected == computed else "fail", provenance)


def numeric(check, anchor, expected: float, computed: float, tol: float, provenance) -> Record:
    expected, computed = float(expected), float(computed)
    rel = abs(computed - expected) / abs(expected) if expected else abs(computed)
    return Record(check, anchor, repr(expected), f"{computed!r} (rel. discrepancy {rel:.3e}, tol {tol:g})",
                  "pass" if rel <= tol else "fail", provenance)


def boolean(check, anchor, holds: bool, detail: str, provenance) -> Record:
    return Record(check, anchor, "True", f"{holds} ({detail})" if detail else str(holds),
                  "pass" if holds else "fail", provenance)


@dataclass
class Report:
    subcommand: str
    config: dict
    records: list = field(default_factory=list)
    timestamp: str = ""

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    def to_json(self) -> dict:
        return {"subcommand": self.subcommand, "config": self.config,
                "status": "pass" if self.ok else "fail",
                "records": [asdict(r) for r in self.records],
                "timestamp": self.timestamp}


def check_odd_primes(primes):
    bad = [p for p in primes if p == 2 or p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1))]
    if bad:
        raise ValueError(f"the local matrix needs odd primes; got {bad}")


# ---------------------------------------------------------------------------
# local periods

def matrix_coefficient_records(primes=(3, 5, 7), T: int = 4) -> list[Record]:
    """Brute-force Phi against the tabulated closed forms on alpha_n, beta_m, |n|, |m| <= T."""
    from .localreps import LocalVector, Rep, closed_form_phi, special, steinberg
    from .periods import _phi_N_over_M
    check_odd_primes(primes)
    out = []
    for p in primes:
        # the (Phi_h, Phi_g, Phi_phi) triple is cached and reused by the period assembly
        cases = [(f"steinberg w={w}", steinberg(p, w), lambda r, w=w: _phi_N_over_M(p, w, r, None)[1]) for w in (1, -1)]
        cases += [(f"special w={w}", special(p, w), lambda r, w=w: _phi_N_over_M(p, w, r, None)[0]) for w in (1, -1)]
        cases.append(("weil pairing", LocalVector("weil-pairing", p), lambda r: _phi_N_over_M(p, 1, r, None)[2]))
        for name, v, brute in cases:
            bad = []
            for kind in ("alpha", "beta"):
                for n in range(-T, T + 1):
                    r = Rep(kind, n)
                    if brute(r) != closed_form_phi(v, r):
                        bad.append(r.label())
            out.append(Record(f"phi/{p}/{name}", f"{name} matrix coefficient on alpha_n, beta_m",
                              "0 mismatches", f"{len(bad)} mismatches {bad}" if bad else "0 mismatches",
                              "fail" if bad else "pass",
                              f"cell integrator vs closed form, |n|,|m| <= {T}"))
    return out


def steinberg_period_records(primes=(3, 5, 7), T: int = 4) -> list[Record]:
    from .periods import I_sharp, alpha_sharp_closed
    check_odd_primes(primes)
    out = []
    for p in primes:
        for w in (1, -1):
            r = I_sharp(p, "N/M", w, T=T)
            out.append(exact(f"alpha_sharp/{p}/N-M/w={w}", "alpha_sharp = (p - w)/(p^2 + w) zeta_p(2)^-1",
                             alpha_sharp_closed(p, "N/M", w), _frac(r.alpha_sharp),
                             "brute-force Omega, exact volumes, geometric tails"))
            out.append(exact(f"I_sharp/{p}/N-M/w={w}", "I_sharp = 1/p", Fraction(1, p), _frac(r.I_sharp),
                             "alpha_sharp times local L-ratio"))
    return out


def _frac(x):
    return x.to_fraction() if isinstance(x, Cyclo) and x.is_rational() else x


def gamma00_records(primes=(3, 5, 7), square_units=(1, 4)) -> list[Record]:
    """Vanishing families, the Omega identity on nu_g beta_1 nu_g^-1 and the assembled period,
    repeated over every non-residue u and the listed square units."""
    from .arith import gauss_quadratic
    from .localreps import Rep
    from .periods import (I_sharp, alpha_sharp_M, alpha_sharp_closed, local_L_ratio, omega_M,
                          omega_M_closed, r_gamma, vanishing_ledger)
    check_odd_primes(primes)
    out = []
    for p in primes:
        units = [u for u in range(2, p) if legendre(u, p) == -1]
        squares = [d for d in square_units if d % p and legendre(d, p) == 1]
        for u in units:
            for D in squares:
                rows = vanishing_ledger(p, u, D)
                massive = {Rep("alpha", 0), r_gamma(p, 1), r_gamma(p, u)}
                nz = [f"{fam}:{r.label()}" for fam, r, ph, pg, pf, om in rows if r not in massive and om != 0]
                out.append(Record(f"vanishing/{p}/u={u}/D={D}", "Omega vanishes off the three massive cosets",
                                  "0 nonzero", f"{len(nz)} nonzero {nz}" if nz else "0 nonzero",
                                  "fail" if nz else "pass", f"brute force on {len(rows)} representatives"))
                a = alpha_sharp_M(p, u, D)
                out.append(exact(f"alpha_sharp/{p}/M/u={u}/D={D}", "alpha_sharp = 2 p^-3 (p - 1)",
                                 alpha_sharp_closed(p, "M"), _frac(a), "brute-force Omega, exact volumes"))
                out.append(exact(f"I_sharp/{p}/M/u={u}/D={D}", "I_sharp = 2/(p(p+1))", Fraction(2, p * (p + 1)),
                                 _frac(a * local_L_ratio(p, "M")), "alpha_sharp times local L-ratio"))
        bad = [g for g in range(1, p) if omega_M(p, r_gamma(p, g)) != omega_M_closed(p, r_gamma(p, g))]
        out.append(Record(f"omega-gauss/{p}", "Omega(nu_g beta_1 nu_g^-1) = (p - G(g, p))/(p(p - 1))",
                          "0 mismatches", f"mismatch at g in {bad}" if bad else "0 mismatches",
                          "fail" if bad else "pass", "brute force vs quadratic Gauss sum, as cyclotomic numbers"))
        G = [gauss_quadratic(g, p) for g in range(1, p)]
        out.append(boolean(f"gauss/{p}", "G(g, p)^2 = (-1/p) p", all(x * x == legendre(-1, p) * p for x in G),
                           "", "cyclotomic arithmetic"))
        r = I_sharp(p, "M")
        out.append(exact(f"I_sharp/{p}/M", "I_sharp = 2/(p(p+1))", Fraction(2, p * (p + 1)), _frac(r.I_sharp),
                         r.provenance))
    return out


def norm_records(primes=(3, 5, 7)) -> list[Record]:
    from .arith import Mono
    from .localreps import norm2, odd_weil, ps_new, special
    from .periods import odd_character, p2_norm_checks
    check_odd_primes(primes)
    out = []
    for p in primes:
        chi = odd_character(p)
        for w in (1, -1):
            out.append(exact(f"norm/{p}/special/w={w}", "||h_p||^2 = p^-1 (p^2 - 1)", Fraction(p * p - 1, p),
                             _frac(norm2(special(p, w))), "cell integrator"))
        out.append(exact(f"norm/{p}/ps-new", "||g_p||^2 = (p + 1)^-1", Fraction(1, p + 1),
                         _frac(norm2(ps_new(p, chi, Mono(1, Fraction(1, 8)), Mono(1, Fraction(1, 3))))),
                         "cell integrator"))
        out.append(exact(f"norm/{p}/odd-weil", "||odd Weil vector||^2 = 1 - p^-1", 1 - Fraction(1, p),
                         _frac(norm2(odd_weil(p, chi))), "Schwartz-table inner product"))
    d = p2_norm_checks()
    for key in ("t(2) acts on 1_Z2 as 2^-1/2 1_(1/2)Z2", "phi2^(2) = 1_(1/2)Z2",
                "<phi2^(2),phi2^(2)> = 2<phi2,phi2>", "<w(t2)phi, w(t2)phi> = <phi, phi>", "index check"):
        out.append(boolean(f"dyadic/{key}", key, bool(d[key]), "", "exact dyadic Weil action"))
    return out


def archimedean_records(ks=(1, 3, 11)) -> list[Record]:
    from .periods import archimedean_check
    out = []
    for k in ks:
        c = archimedean_check(k)
        out.append(numeric(f"arch/{k}/integral", "int_0^inf cosh^-2(k+1) sinh(2t) dt = 1/k",
                           1 / k, c["integral"], 1e-10, "mpmath quadrature, 30 digits"))
        out.append(Record(f"arch/{k}/gamma", "gamma ratio x 2 pi^2 / k = 1", "1",
                          f"error {c['gamma_ratio_error']:.3e}",
                          "pass" if c["gamma_ratio_error"] <= 1e-12 else "fail", "mpmath gamma factors"))
        out.append(numeric(f"arch/{k}/I_sharp", "I_inf = 1", 1.0, c["I_sharp"], 1e-10, "product of the two"))
    return out


# ---------------------------------------------------------------------------
# global relations

@dataclass
class Pipeline:
    """The weight-22 newform, Delta and the weight-23/2 plus form, built once."""
    trunc_h: int = 2000
    trunc_f: int = 1200

    def __post_init__(self):
        from .halfint import plus_form_23_2
        from .qexp import EllipticForm, delta, newform_22
        self.h = plus_form_23_2(self.trunc_h)
        self.f = newform_22(self.trunc_f)
        self.g = EllipticForm(12, 1, delta(self.trunc_f), newform=True, label="12.1.a")


def halfint_records(pipe: Pipeline, discs=(-3, -4, -7, -8, -11), shimura_n: int = 60, lemma22_n: int = 25,
                    xi_max: int = 2000, primes=(3, 5, 7)) -> list[Record]:
    from .halfint import coeff_relation, hecke_Tp2, lemma31_check, shimura_lift
    h, f = pipe.h, pipe.f
    need = shimura_n ** 2 * max(abs(D) for D in discs) if discs else 0
    if need > h.T:
        raise ValueError(f"Shimura check to n = {shimura_n} needs h to {need} coefficients, have {h.T}")
    out = [boolean("plus-space", "c(m) = 0 unless (-1)^k m = 0, 1 mod 4", h.in_plus_space(),
                   f"c(m), m <= {h.T}", "Eichler-Zagier image of phi_12,1")]
    for p in primes:
        Th = hecke_Tp2(h, p)
        out.append(boolean(f"T_p2/{p}", "T_{p^2} h = a_f(p) h", Th.c == h.c.truncate(Th.T) * f.a(p),
                           f"a_f({p}) = {f.a(p)}, {Th.T + 1} coefficients", "exact rationals"))
    for D in discs:
        s = shimura_lift(h, D, shimura_n)
        out.append(boolean(f"shimura/{D}", "zeta^D(h) = c(|D|) f", s == f.series.truncate(shimura_n) * h.coeff(-D),
                           f"n <= {shimura_n}, c(|D|) = {h.coeff(-D)}", "exact rationals"))
        bad = [n for n in range(1, lemma22_n + 1) if not coeff_relation(h, f, D, n).holds]
        out.append(boolean(f"coeff-relation/{D}", "c(n^2 |D|) = c(|D|) sum mu(d) (D/d) d^(k-1) a(n/d)",
                           not bad, f"n <= {lemma22_n}" + (f", fails at {bad}" if bad else ""), "exact rationals"))
    if xi_max > 0:
        bad = [xi for xi in range(1, xi_max + 1) if not lemma31_check(h, f, xi).holds]
        out.append(boolean("psi-formula", "c(xi) = c(d_xi) f_xi^(k-1/2) prod Psi_p(xi)", not bad,
                           f"xi <= {xi_max}" + (f", fails at {bad[:10]}" if bad else ""),
                           "Chebyshev recursion in the Satake trace, exact"))
    else:
        out.append(Record("psi-formula", "c(xi) = c(d_xi) f_xi^(k-1/2) prod Psi_p(xi)", "no xi",
                          "empty range", "vacuous", PLUMBING))
    return out


def factorization_records(pipe: Pipeline, pmax: int = 100) -> list[Record]:
    from .lfun import factorization_check, primes_upto
    bad = [p for p in primes_upto(pmax) if not factorization_check(pipe.f, pipe.g, p)[0]]
    return [boolean("euler-factorization", "degree 8 = degree 2 x degree 6 at good p", not bad,
                    f"p <= {pmax}" + (f", fails at {bad}" if bad else ""),
                    "Satake products in Q[a]/(a^2 - a_f a + p^21) vs the degree-6 table")]


@dataclass
class Norms:
    f: float
    g: float
    h: float


def norms(pipe: Pipeline, tol: float = 1e-10) -> Norms:
    from .halfint import petersson_plus
    from .qexp import petersson_norm
    return Norms(petersson_norm(pipe.f, tol=tol).value, petersson_norm(pipe.g, tol=tol).value,
                 petersson_plus(pipe.h, tol=tol).value)


def kohnen_records(pipe: Pipeline, nrm: Norms, discs=(-3, -4), tol: float = 1e-6) -> list[Record]:
    from .halfint import kohnen_rhs
    out = []
    k = pipe.h.k
    for D in discs:
        lhs = float(pipe.h.coeff(-D)) ** 2 / nrm.h
        rhs = kohnen_rhs(pipe.f, D, k, petersson=nrm.f, nmax=pipe.f.T)
        out.append(numeric(f"kohnen/{D}", "|c(|D|)|^2/<h,h> = ((k-1)!/pi^k) |D|^(k-1/2) L(f,D,k)/<f,f>",
                           rhs, lhs, tol, "numerical Petersson integrals and AFE"))
    return out


def petersson_records(pipe: Pipeline, tol: float = 1e-8) -> list[Record]:
    from .qexp import petersson_norm
    out = []
    for form in (pipe.g, pipe.f):
        a = petersson_norm(form, "direct-integral").value
        b = petersson_norm(form, "adjoint-L").value
        out.append(numeric(f"petersson/{form.label}", "direct integral = L(1, Ad)/2^weight", b, a, tol,
                           "fundamental-domain quadrature vs adjoint L-value"))
    return out


@dataclass
class IchinoResult:
    lhs: float
    lhs_error: float
    rhs: float
    lam: Fraction
    rel: float


def ichino_sides(pipe: Pipeline, nrm: Norms, h=None, nmax: int = 400) -> IchinoResult:
    """Lambda(f x Ad g, k) against 2^(k+1) <f,f>/<h,h> |<F|, g x g>|^2 / <g,g>^2.

    <F|_{H x H}, g x g> = lam <g,g>^2 where lam is the exact proportionality
    constant of the pullback, so the right side is 2^(k+1) lam^2 <f,f> <g,g>^2 / <h,h>.
    """
    from .halfint import petersson_plus
    from .lfun import lambda_deg6_center
    from .siegel import SKLift, project_level1, pullback
    h = pipe.h if h is None else h
    k = h.k
    T = min(math.isqrt(h.T // 4), 20)
    lam = project_level1(pullback(SKLift(h, k), T, T), pipe.g).lam
    hh = nrm.h if h is pipe.h else petersson_plus(h).value
    rhs = 2 ** (k + 1) * float(lam) ** 2 * nrm.f * nrm.g ** 2 / hh
    L = lambda_deg6_center(pipe.f, pipe.g, nmax)
    return IchinoResult(L.value, L.error_bound, rhs, lam, abs(L.value - rhs) / abs(rhs))


def ichino_records(pipe: Pipeline, nrm: Norms, tol: float = 1e-5) -> list[Record]:
    res = ichino_sides(pipe, nrm)
    anchor = "Lambda(f x Ad g, k) = 2^(k+1) <f,f>/<h,h> |<F|, g x g>|^2/<g,g>^2"
    out = [numeric("ichino", anchor, res.rhs, res.lhs, tol, "AFE vs Petersson integrals and exact pullback")]
    out.append(boolean("ichino/nonnegative", "both sides >= 0", res.lhs >= 0 and res.rhs >= 0,
                       f"lhs {res.lhs:.6g}, rhs {res.rhs:.6g}", "sign"))
    scaled = ichino_sides(pipe, nrm, h=pipe.h.scale(7))
    out.append(numeric("ichino/scale-h-by-7", "rhs is homogeneous of degree 0 in h", res.rhs, scaled.rhs, 1e-9,
                       f"lambda {res.lam} -> {scaled.lam}"))
    return out


# ---------------------------------------------------------------------------
# structural invariants

def _random_sl2_z(rng, p):
    while True:
        c = rng.randint(-50, 50) * p ** rng.randint(0, 3)
        d = rng.randint(-60, 60)
        if math.gcd(c, d) == 1:
            break
    # a d - b c = 1 from the extended Euclidean algorithm
    _, x, y = _egcd(d, c)
    from .metaplectic import SL2
    return SL2(Fraction(x), Fraction(-y), Fraction(c), Fraction(d))


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _random_sl2_q(rng, p):
    from .metaplectic import SL2

    def q():
        return Fraction(rng.randint(-30, 30)) * Fraction(p) ** rng.randint(-3, 3)
    while True:
        a, b, c = q(), q(), q()
        if a:
            return SL2(a, b, c, (1 + b * c) / a)


def cocycle_records(samples: int = 10_000, primes=(3, 5, 7), seed: int = 0) -> list[Record]:
    from .metaplectic import cocycle, s_p
    rng = random.Random(seed)
    bad_c = bad_s = 0
    for i in range(samples):
        p = primes[i % len(primes)]
        g1, g2, g3 = (_random_sl2_q(rng, p) for _ in range(3))
        if cocycle(g1, g2, p) * cocycle(g1 * g2, g3, p) != cocycle(g1, g2 * g3, p) * cocycle(g2, g3, p):
            bad_c += 1
        k1, k2 = _random_sl2_z(rng, p), _random_sl2_z(rng, p)
        assert k1.det() == 1 and k2.det() == 1
        if cocycle(k1, k2, p) != s_p(k1, p) * s_p(k2, p) * s_p(k1 * k2, p):
            bad_s += 1
    return [Record("cocycle", "eps(g1,g2) eps(g1 g2,g3) = eps(g1,g2 g3) eps(g2,g3)", "0 failures",
                   f"{bad_c} failures in {samples}", "pass" if not bad_c else "fail", f"random SL2(Q_p), seed {seed}"),
            Record("splitting", "eps(k1,k2) = s(k1) s(k2) s(k1 k2) on SL2(Z_p)", "0 failures",
                   f"{bad_s} failures in {samples}", "pass" if not bad_s else "fail", f"random SL2(Z), seed {seed}")]


def fourier_records(primes=(3, 5, 7), seed: int = 0) -> list[Record]:
    from .metaplectic import SchwartzTable, fourier
    rng = random.Random(seed)
    out = []
    for p in primes:
        bad = []
        for t in (Fraction(1), Fraction(-1), Fraction(p), Fraction(2, p), Fraction(-3)):
            L, m = rng.randint(-1, 1), rng.randint(1, 2)
            phi = SchwartzTable(p, L, m, [Cyclo.rational(rng.randint(-5, 5)) for _ in range(p ** (L + m))])
            if fourier(fourier(phi, t), t) != phi.reflect():
                bad.append(str(t))
        out.append(boolean(f"double-fourier/{p}", "F_psi F_psi phi (x) = phi(-x)", not bad,
                           f"fails for t in {bad}" if bad else "5 characters", "exact Schwartz tables"))
    return out


def rp_records(p: int = 3, T: int = 6, seed: int = 0) -> list[Record]:
    from .siegel import SKLift, rp_pullback_check, synthetic_plus_form
    h = synthetic_plus_form(11, 4 * T * T * p, seed)
    w = rp_pullback_check(SKLift(h, 11), p, T)
    return [boolean(f"R_p/{p}", "(R_p F)| = (id x V_p U_p)(F|) with the classical V_p", w.holds,
                    f"ratio of sides {w.factor}", "exact Fourier coefficients of a synthetic lift")]


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t
