"""Euler factors, completed L-functions and their numerical evaluation.

Euler polynomials are coefficient lists [c_0, c_1, ...] in X = p^(-s) with
c_0 = 1; the local factor is 1 / P(X).  Classical normalizations are used
throughout: L(f, s) has center l/2 for f of weight l, and
L(f x Ad g, s) for (f, g) of weights (2k, k+1) has center k with
gamma factor Gamma_C(s) Gamma_C(s+k) Gamma_C(s-k+1).

Numerical values come from a smoothed approximate functional equation
(see ``CompletedL.value``).  Everything in this module except the Euler
polynomials is double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import loggamma

from .arith import Surd, is_prime, kronecker
from .qexp import EllipticForm, NormResult, _prime_divisors


DEFAULT_A = 0.02


class InsufficientCoefficients(ValueError):
    def __init__(self, need: int, have: int):
        super().__init__(f"need {need} Dirichlet coefficients, have {have}")
        self.need, self.have = need, have


class HypothesisError(ValueError):
    """A structural hypothesis on (f, g, chi) fails; the message names it."""


# ---------------------------------------------------------------------------
# polynomial helpers

def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_scale(P, c):
    """P(c X)."""
    return [x * c ** i for i, x in enumerate(P)]


def primes_upto(n: int):
    return [p for p in range(2, n + 1) if is_prime(p)]


class QuadExt:
    """a + b u in Q[u] / (u^2 - s u - n), exact."""

    __slots__ = ("a", "b", "s", "n")

    def __init__(self, a, b, s, n):
        self.a, self.b, self.s, self.n = Fraction(a), Fraction(b), s, n

    def __add__(self, o):
        if not isinstance(o, QuadExt):
            return QuadExt(self.a + o, self.b, self.s, self.n)
        return QuadExt(self.a + o.a, self.b + o.b, self.s, self.n)

    __radd__ = __add__

    def __mul__(self, o):
        if not isinstance(o, QuadExt):
            return QuadExt(self.a * o, self.b * o, self.s, self.n)
        # u^2 = s u + n
        bb = self.b * o.b
        return QuadExt(self.a * o.a + bb * self.n,
                       self.a * o.b + self.b * o.a + bb * self.s, self.s, self.n)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.s, self.n)

    def __pow__(self, e):
        out = QuadExt(1, 0, self.s, self.n)
        for _ in range(e):
            out = out * self
        return out

    def rational(self) -> Fraction:
        if self.b:
            raise ValueError("element is not rational")
        return self.a


# ---------------------------------------------------------------------------
# Euler factors

def euler_f(f: EllipticForm, p: int):
    """1 - a_p X + chi(p) p^(l-1) X^2, or 1 - a_p X for p | N."""
    a = f.a(p)
    if f.level % p == 0:
        return [Fraction(1), -a]
    return [Fraction(1), -a, f.chi(p) * Fraction(p) ** (f.weight - 1)]


def euler_f_twist(f: EllipticForm, D: int, p: int):
    """Euler factor of f twisted by the quadratic character chi_D."""
    c = kronecker(D, p)
    if c == 0:
        return [Fraction(1)]
    P = euler_f(f, p)
    return [x * c ** i for i, x in enumerate(P)]


def adjoint_trace(g: EllipticForm, p: int) -> Fraction:
    """t = beta^2 + beta^-2 = a_g(p)^2 / p^(l-1) - 2 in unitary normalization."""
    return g.a(p) ** 2 / Fraction(p) ** (g.weight - 1) - 2


def euler_ad_g(g: EllipticForm, p: int):
    """(1 - beta^2 X)(1 - X)(1 - beta^-2 X), unitary normalization, good p."""
    if g.level % p == 0:
        raise ValueError("good primes only")
    t = adjoint_trace(g, p)
    return [Fraction(1), -(t + 1), t + 1, Fraction(-1)]


def euler_deg6(f: EllipticForm, g: EllipticForm, p: int):
    """Degree-6 factor of L(f x Ad g, s), classical normalization.

    Good p: prod over gamma in {beta^2, 1, beta^-2} of
    1 - a_f(p) gamma X + p^(2k-1) gamma^2 X^2, computed in
    Q[u]/(u^2 - t u + 1) with u = beta^2; the u-part must vanish.
    Bad p (square-free level) is pinned by its central value, see
    ``bad_factor_deg6``.
    """
    if f.level % (p * p) == 0:
        raise ValueError("square-free level required")
    if f.level % p == 0:
        return bad_factor_deg6(f, p)
    t = adjoint_trace(g, p)
    A = f.a(p)
    c = f.chi(p) * Fraction(p) ** (f.weight - 1)
    u = QuadExt(0, 1, t, -1)
    uinv = QuadExt(t, -1, t, -1)    # u^-1 = t - u
    one = QuadExt(1, 0, t, -1)
    P = [one]
    for gam in (u, one, uinv):
        P = poly_mul(P, [one, -A * gam, c * gam * gam])
    return [x.rational() for x in P]


def bad_factor_deg6(f: EllipticForm, p: int):
    """Bad-prime factor in the unitary variable, coefficients in Q(sqrt p).

    These are defined by the central values used in the local period
    computation rather than by an independent recipe:
      p | N/M: P(X) = (1 + w p^(-1/2) X)(1 + w p^(-3/2) X),
               P(p^-1/2)^-1 = p^3 / ((p^2 + w)(p + w));
      p | M:   P(X) = 1 - p^(-1/2) X, P(p^-1/2)^-1 = p / (p - 1).
    """
    w = f.atkin_lehner[p]
    M = f.character.conductor()
    if M % p:
        a = Surd(0, Fraction(w, p), p)
        b = Surd(0, Fraction(w, p * p), p)
        return [Surd(1), a + b, a * b]
    return [Surd(1), Surd(0, Fraction(-1, p), p)]


def bad_center_value(f: EllipticForm, p: int) -> Fraction:
    P = bad_factor_deg6(f, p)
    x = Surd(0, Fraction(1, p), p)     # p^(-1/2)
    val = Surd(0)
    for i, c in enumerate(P):
        val = val + c * x ** i
    return 1 / val.to_fraction()


def euler_triple(f: EllipticForm, g: EllipticForm, p: int):
    """Degree-8 factor of L(f' x g x g, s) from Satake data, classical.

    Roots a_i b_j b_l with a_1 + a_2 = a_f(p), a_1 a_2 = chi^-1(p) p^(2k-1)
    (f' = f twisted by chi^-1) and b_1 + b_2 = a_g(p), b_1 b_2 = chi(p) p^k.
    Built as Q(a_1 X) Q(a_2 X) with Q(Y) = prod_{j,l}(1 - b_j b_l Y), in
    Q[a]/(a^2 - a_f a + a_1 a_2).
    """
    if f.level % p == 0:
        raise ValueError("good primes only")
    k = g.weight - 1
    bg = g.a(p)
    prod_b = g.chi(p) * Fraction(p) ** k
    # Q(Y) = (1 - b1 b2 Y)^2 (1 - (b1^2 + b2^2) Y + (b1 b2)^2 Y^2)
    Qy = poly_mul(poly_mul([1, -prod_b], [1, -prod_b]), [1, -(bg * bg - 2 * prod_b), prod_b * prod_b])
    Af = f.a(p)
    chi_inv = f.chi(p)
    norm_a = Fraction(p) ** (f.weight - 1) * (1 if chi_inv == 1 else chi_inv)
    a1 = QuadExt(0, 1, Af, -norm_a)
    a2 = QuadExt(Af, -1, Af, -norm_a)
    one = QuadExt(1, 0, Af, -norm_a)
    Q1 = [c * (a1 ** i) for i, c in enumerate(Qy)]
    Q2 = [c * (a2 ** i) for i, c in enumerate(Qy)]
    P = poly_mul([one * c for c in [1]], Q1)
    P = poly_mul(P, Q2)
    return [x.rational() for x in P]


def factorization_check(f: EllipticForm, g: EllipticForm, p: int):
    """Degree-8 = degree-2 x degree-6 after the shift s -> s - k.

    Returns (holds, lhs, rhs) with the polynomials in X = p^-s.
    """
    k = g.weight - 1
    lhs = euler_triple(f, g, p)
    pk = Fraction(p) ** k
    rhs = poly_mul(poly_scale(euler_f(f, p), pk), poly_scale(euler_deg6(f, g, p), pk))
    return lhs == rhs, lhs, rhs


def unitary_roots(P, scale: float):
    """Reciprocal roots of P(X), divided by ``scale``."""
    c = [float(x) for x in P]
    r = np.roots(c[::-1])
    return 1 / r / scale


# ---------------------------------------------------------------------------
# Dirichlet series from Euler factors

def dirichlet_from_euler(euler, nmax: int):
    """Coefficients a_1..a_nmax (index 0 unused) of prod_p 1/P_p(p^-s).

    ``euler(p)`` returns the polynomial P_p as a list; values may be any
    ring elements supporting + and *.
    """
    a = [0] * (nmax + 1)
    a[1] = 1
    for p in primes_upto(nmax):
        P = euler(p)
        emax = int(math.log(nmax) / math.log(p) + 1e-9)
        # power series 1/P up to X^emax
        inv = [1] + [0] * emax
        for e in range(1, emax + 1):
            s = 0
            for j in range(1, min(e, len(P) - 1) + 1):
                s = s - P[j] * inv[e - j]
            inv[e] = s
        # multiply into a: for every n coprime to p
        for n in range(nmax // p, 0, -1):
            if n % p == 0 or a[n] == 0:
                continue
            pe = p
            for e in range(1, emax + 1):
                if n * pe > nmax:
                    break
                a[n * pe] = a[n] * inv[e]
                pe *= p
    return a


def divisor_count_sieve(nmax: int):
    d = [0] * (nmax + 1)
    for i in range(1, nmax + 1):
        for m in range(i, nmax + 1, i):
            d[m] += 1
    return d


# ---------------------------------------------------------------------------
# completed L-functions

def gamma_R_log(s):
    return -s / 2 * np.log(np.pi) + loggamma(s / 2)


def gamma_C_log(s):
    return np.log(2) - s * np.log(2 * np.pi) + loggamma(s)


@dataclass
class CompletedL:
    """Lambda(s) = gamma(s) L(s), self-dual, with

        N^(s/2) Lambda(s) = sign * N^((w-s)/2) Lambda(w - s).

    ``gammas`` is a list of ("R" | "C", shift) meaning Gamma_R(s + shift)
    or Gamma_C(s + shift).  ``coeffs[n]`` is the n-th Dirichlet
    coefficient (index 0 ignored).  ``poles`` lists (rho, residue) of
    N^(s/2) Lambda(s), for the zeta function.  ``coeff_exponent`` and
    ``degree`` give the envelope |a_n| <= n^coeff_exponent d(n)^(degree-1)
    used in the truncation bound.
    """
    coeffs: np.ndarray
    gammas: list
    conductor: int
    sign: int
    w: float
    degree: int
    coeff_exponent: float
    label: str = ""
    poles: list = field(default_factory=list)

    def log_gamma(self, s):
        out = 0
        for kind, mu in self.gammas:
            out = out + (gamma_R_log(s + mu) if kind == "R" else gamma_C_log(s + mu))
        return out

    def _W(self, s: float, n: np.ndarray, c: float, A: float, h: float, tmax: float):
        """W(s, n) = (1/2 pi i) int_(c) N^((s+z)/2) gamma(s+z) n^-(s+z) G(z) dz / z."""
        t = np.arange(-tmax, tmax + h / 2, h)
        z = c + 1j * t
        base = (s + z) / 2 * np.log(self.conductor) + self.log_gamma(s + z) + A * z * z - np.log(z)
        logn = np.log(n.astype(float))
        E = base[None, :] - np.multiply.outer(logn, s + z)
        vals = np.exp(E)
        return (vals.sum(axis=1) * h / (2 * np.pi)).real

    def _tmax(self, s: float, A: float, c: float, drop: float = 60.0) -> float:
        """Half-width of the t-range: where the integrand has fallen by e^-drop.

        Large gamma shifts make |gamma(s + c + it)| grow like a power of |t|
        before the exponential decay sets in, so this is found numerically.
        """
        t = np.linspace(0, 2000, 20001)
        out = 0.0
        for sign in (1, -1):
            for x in (s, self.w - s):
                z = c + 1j * sign * t
                mag = (self.log_gamma(x + z) + A * z * z - np.log(z)).real
                above = np.nonzero(mag > mag.max() - drop)[0]
                out = max(out, t[above[-1]] + 1.0)
        return out

    def _line(self, s: float) -> float:
        c = max(1.0, self.coeff_exponent + 1.5 - s, self.coeff_exponent + 1.5 - (self.w - s))
        for rho, _ in self.poles:
            c = max(c, abs(rho - s) + 0.75, abs(rho - (self.w - s)) + 0.75)
        return c

    def value(self, s: float, A: float = DEFAULT_A, c: float | None = None, h: float = 0.04,
              tmax: float | None = None, nterms: int | None = None):
        """(Lambda(s), error estimate) via the approximate functional equation

            N^(s/2) Lambda(s) = sum a_n [W(s,n) + sign W(w-s,n)] - pole terms,

        with G(z) = exp(A z^2).  A small A keeps the exponential decay of W in
        n that the gamma factors provide (a large A makes it log-normal).  The
        line Re z = c lies right of the abscissa of absolute convergence for
        both s and w - s and encloses any poles.  The estimate adds the quadrature change under
        halving the step and the envelope bound on the truncated tail.
        """
        if c is None:
            c = self._line(s)
        if tmax is None:
            tmax = self._tmax(s, A, c)
        have = len(self.coeffs) - 1
        N = have if nterms is None else min(nterms, have)
        n = np.arange(1, N + 1)
        a = np.asarray(self.coeffs[1:N + 1], dtype=float)

        def total(step):
            W1 = self._W(s, n, c, A, step, tmax)
            W2 = self._W(self.w - s, n, c, A, step, tmax)
            S = float(a @ W1 + self.sign * (a @ W2))
            for rho, res in self.poles:
                S -= res * math.exp(A * (rho - s) ** 2) / (rho - s)
            return S, W1, W2

        S, W1, W2 = total(h)
        S2, _, _ = total(2 * h)
        quad_err = abs(S - S2)
        # tail: envelope times |W| just beyond the cut, geometric-style sum
        tail = self._tail_bound(s, N, c, A, h, tmax)
        scale = math.exp(-s / 2 * math.log(self.conductor))
        return S * scale, (quad_err + tail) * scale

    def _tail_bound(self, s, N, c, A, h, tmax):
        m = np.arange(N + 1, 4 * N + 2)
        W1 = np.abs(self._W(s, m, c, A, h, tmax))
        W2 = np.abs(self._W(self.w - s, m, c, A, h, tmax))
        d = np.array(divisor_count_sieve(4 * N + 1)[N + 1:], dtype=float)
        env = m.astype(float) ** self.coeff_exponent * d ** (self.degree - 1)
        return float(np.sum(env * (W1 + W2)))

    def required_terms(self, s: float, eps: float = 1e-10, A: float = DEFAULT_A, limit: int = 20000) -> int:
        """Smallest N whose tail bound is below eps times the first term."""
        c = self._line(s)
        tmax = self._tmax(s, A, c)
        n = np.unique(np.geomspace(1, limit, 600).astype(int))
        W = np.abs(self._W(s, n, c, A, 0.04, tmax)) + np.abs(self._W(self.w - s, n, c, A, 0.04, tmax))
        dn = np.array(divisor_count_sieve(limit), float)[n]
        env = n.astype(float) ** self.coeff_exponent * dn ** (self.degree - 1)
        contrib = env * W
        # sampled points are sparse: weight each by its gap to the next one
        gaps = np.diff(np.append(n, n[-1] + 1))
        tail = np.cumsum((contrib * gaps)[::-1])[::-1]
        ok = np.nonzero(tail < eps * contrib[0])[0]
        if not len(ok):
            raise InsufficientCoefficients(limit, limit)
        return int(n[ok[0]])

    def check_reach(self, s: float, eps: float = 1e-10):
        need = self.required_terms(s, eps)
        if need > len(self.coeffs) - 1:
            raise InsufficientCoefficients(need, len(self.coeffs) - 1)
        return need

    def direct_value(self, s: float) -> float:
        """gamma(s) sum a_n n^-s; valid only where the series converges."""
        n = np.arange(1, len(self.coeffs))
        L = float(np.sum(np.asarray(self.coeffs[1:], float) * n ** (-float(s))))
        return float(np.exp(self.log_gamma(s)).real) * L


# ---------------------------------------------------------------------------
# concrete L-functions

def riemann_zeta_completed(nmax: int = 200) -> CompletedL:
    """pi^(-s/2) Gamma(s/2) zeta(s), with poles at 0 and 1."""
    return CompletedL(np.ones(nmax + 1), [("R", 0)], 1, 1, 1.0, 1, 0.0, "zeta",
                      poles=[(1.0, 1.0), (0.0, -1.0)])


def L_f(f: EllipticForm, nmax: int | None = None) -> CompletedL:
    """Lambda(f, s) = Gamma_C(s) L(f, s), level N, sign from the weight and w_p."""
    nmax = nmax or f.T
    a = [float(x) for x in f.series.coeffs()[: nmax + 1]]
    sign = root_number(f)
    return CompletedL(np.array(a), [("C", 0)], f.level, sign, float(f.weight), 2,
                      (f.weight - 1) / 2, f.label)


def root_number(f: EllipticForm) -> int:
    """epsilon(f) = i^l prod_p eps_p with eps_p = w_p (a(p) = -p^(l/2-1) w_p)."""
    eps = (-1) ** (f.weight // 2)
    for p, w in f.atkin_lehner.items():
        eps *= w
    return eps


def L_f_twist(f: EllipticForm, D: int, nmax: int | None = None) -> CompletedL:
    """Lambda(f x chi_D, s) for a level-1 f and fundamental D.

    The sign is eps(f) chi_D(-1) (the standard quadratic-twist formula at
    level 1); the conductor is D^2.
    """
    if f.level != 1:
        raise ValueError("twisted L-values are implemented at level 1")
    nmax = nmax or f.T
    a = [float(kronecker(D, n) * x) if n else 0.0 for n, x in enumerate(f.series.coeffs()[: nmax + 1])]
    sign = root_number(f) * (1 if D > 0 else -1)
    return CompletedL(np.array(a), [("C", 0)], D * D, sign, float(f.weight), 2,
                      (f.weight - 1) / 2, f"{f.label}x({D})")


def L_adjoint(g: EllipticForm, nmax: int) -> CompletedL:
    """Lambda(s, Ad g) = Gamma_R(s+1) Gamma_C(s+l-1) L(s, Ad g), unitary, level 1."""
    if g.level != 1:
        raise ValueError("adjoint L-function implemented at level 1")
    a = dirichlet_from_euler(lambda p: euler_ad_g(g, p), nmax)
    return CompletedL(np.array([float(x) for x in a]), [("R", 1), ("C", g.weight - 1)],
                      1, 1, 1.0, 3, 0.0, f"ad {g.label}")


def L_deg6(f: EllipticForm, g: EllipticForm, nmax: int) -> CompletedL:
    """Lambda(f x Ad g, s) = Gamma_C(s) Gamma_C(s+k) Gamma_C(s-k+1) L(f x Ad g, s)."""
    k = g.weight - 1
    if f.weight != 2 * k:
        raise ValueError("weights must be (2k, k+1)")
    if f.level != 1 or g.level != 1:
        raise ValueError("degree-6 Dirichlet series implemented at level 1")
    a = dirichlet_from_euler(lambda p: euler_deg6(f, g, p), nmax)
    return CompletedL(np.array([float(x) for x in a]), [("C", 0), ("C", k), ("C", 1 - k)],
                      1, 1, float(2 * k), 6, (2 * k - 1) / 2, f"{f.label} x Ad {g.label}")


def check_hypotheses(f: EllipticForm, g: EllipticForm):
    """(SF), (H1), (H2) and the weight/parity setup; raises HypothesisError."""
    N = f.level
    k = g.weight - 1
    if f.weight != 2 * k or k % 2 == 0:
        raise HypothesisError("setup: weights must be (2k, k+1) with k odd")
    if N != g.level or N % 2 == 0 or any(N % (p * p) == 0 for p in _prime_divisors(N)):
        raise HypothesisError("(SF): N_f = N_g must be odd and square-free")
    chi = g.character
    M = chi.conductor()
    for p in _prime_divisors(M):
        if not chi.local_is_odd(p):
            raise HypothesisError(f"(H1): chi_({p})(-1) != -1")
        if f.atkin_lehner.get(p) != -1:
            raise HypothesisError(f"(H2): eps_{p}(f) != -1")
    return True


@dataclass
class LValue:
    label: str
    s: float
    value: float
    error_bound: float

    def row(self):
        return {"L-label": self.label, "s": self.s, "value": self.value, "error_bound": self.error_bound}


def lambda_deg6_center(f: EllipticForm, g: EllipticForm, nmax: int = 400, tol: float = 1e-8) -> LValue:
    """Lambda(f x Ad g, k) at the center; must be >= -tolerance."""
    check_hypotheses(f, g)
    k = g.weight - 1
    L = L_deg6(f, g, nmax)
    L.check_reach(k)
    v, err = L.value(float(k))
    if v < -max(err, tol * abs(v)):
        raise ArithmeticError(f"negative central value {v} (error {err})")
    return LValue(L.label, float(k), v, err)


def petersson_from_adjoint(form: EllipticForm, tol: float = 1e-10, nmax: int = 1200) -> NormResult:
    """<f, f> = Lambda(1, Ad f) / 2^l at level 1."""
    if form.level != 1:
        raise ValueError("adjoint-L Petersson route implemented at level 1")
    if form.T < nmax:
        nmax = form.T
    L = L_adjoint(form, nmax)
    L.check_reach(1.0, eps=max(tol * 1e-2, 1e-11))
    v, err = L.value(1.0)
    val = v / 2 ** form.weight
    return NormResult(val, err / 2 ** form.weight, "adjoint-L")
