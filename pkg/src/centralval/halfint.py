"""Kohnen plus-space forms via index-1 Jacobi forms, Shimura lifts, Psi_p.

Index-1 Jacobi forms are stored through their theta-decomposition
coefficients: C(n, r) = ctilde(4n - r^2).  Multiplying a Jacobi form by an
elliptic modular form E(tau) multiplies the ctilde-series by E(4 tau), so
the whole construction stays inside one-variable series arithmetic.

Plus-space forms of weight k + 1/2 carry coefficients c(m), supported on
(-1)^k m = 0, 1 mod 4.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import (DirichletCharacter, Surd, discriminant_split, divisors,
                    is_fundamental, kronecker, moebius, ord_p)
from .qexp import (EllipticForm, QSeries, TruncationError, divisor_sums, eisenstein,
                   evaluate, fd_lower_integral, satake, upper_strip_integral, _prime_divisors)


# ---------------------------------------------------------------------------
# weight 1/2 and 2 building blocks on Gamma_0(4)

def theta_series(T: int) -> QSeries:
    """theta = sum_{n in Z} q^(n^2)."""
    c = [0] * (T + 1)
    n = 0
    while n * n <= T:
        c[n * n] += 1 if n == 0 else 2
        n += 1
    return QSeries(c)


def f2_series(T: int) -> QSeries:
    """F_2 = sum_{n odd} sigma_1(n) q^n, weight 2 on Gamma_0(4)."""
    sig = divisor_sums(T, 1)
    return QSeries([sig[n] if n % 2 else 0 for n in range(T + 1)])


def _solve(rows, rhs):
    """Exact Gaussian elimination for a consistent (possibly overdetermined) system."""
    m = len(rows[0])
    A = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    piv_rows = []
    col_of = []
    r0 = 0
    for c in range(m):
        piv = next((i for i in range(r0, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r0], A[piv] = A[piv], A[r0]
        pv = A[r0][c]
        A[r0] = [x / pv for x in A[r0]]
        for i in range(len(A)):
            if i != r0 and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r0])]
        piv_rows.append(r0)
        col_of.append(c)
        r0 += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in A):
        raise ArithmeticError("inconsistent linear system")
    if len(col_of) < m:
        raise ArithmeticError("solution is not unique")
    sol = [Fraction(0)] * m
    for r, c in zip(piv_rows, col_of):
        sol[c] = A[r][-1]
    return sol


def cohen_eisenstein(r: int, T: int) -> QSeries:
    """Cohen's Eisenstein series of weight r + 1/2 in the plus space,
    normalized to constant term 1, so its coefficients are H(r,N)/H(r,0).

    Built as the unique combination of theta^(2r+1-4j) F_2^j whose
    coefficients vanish off (-1)^r N = 0, 1 mod 4 (this plus space is
    one-dimensional for the r used here).  Agreement with the Bernoulli
    route ``cohen_h`` is a test, not an input.
    """
    th = theta_series(T)
    F = f2_series(T)
    basis = [th ** (2 * r + 1 - 4 * j) * F ** j for j in range(r // 2 + 1)]
    bad = [N for N in range(1, min(T, 40 * len(basis)) + 1) if ((-1) ** r * N) % 4 not in (0, 1)]
    rows = [[b[0] for b in basis]] + [[b[N] for b in basis] for N in bad]
    rhs = [1] + [0] * len(bad)
    x = _solve(rows, rhs)
    out = QSeries.zero(T)
    for xi, b in zip(x, basis):
        if xi:
            out = out + b * xi
    return out


# ---------------------------------------------------------------------------
# Jacobi forms of index 1

@dataclass(frozen=True)
class JacobiForm:
    """Index-1 Jacobi form: C(n, r) = ctilde(4n - r^2)."""
    weight: int
    ctilde: QSeries
    index: int = 1

    def C(self, n: int, r: int) -> Fraction:
        D = 4 * n - r * r
        if D < 0:
            return Fraction(0)
        return self.ctilde[D]

    def times(self, E: QSeries, weight: int) -> "JacobiForm":
        """Product with an elliptic form E of the given weight."""
        T = self.ctilde.T
        return JacobiForm(self.weight + weight, self.ctilde * E.substitute(4, T))

    def __add__(self, o):
        if o.weight != self.weight:
            raise ValueError("weights differ")
        return JacobiForm(self.weight, self.ctilde + o.ctilde)

    def __sub__(self, o):
        if o.weight != self.weight:
            raise ValueError("weights differ")
        return JacobiForm(self.weight, self.ctilde - o.ctilde)

    def scale(self, c) -> "JacobiForm":
        return JacobiForm(self.weight, self.ctilde * c)


def jacobi_eisenstein(k: int, T: int) -> JacobiForm:
    """E_{k,1}: ctilde(N) = H(k-1, N) / H(k-1, 0)."""
    if k not in (4, 6):
        raise ValueError("k must be 4 or 6")
    return JacobiForm(k, cohen_eisenstein(k - 1, T))


def jacobi_cusp_12(T: int) -> JacobiForm:
    """phi_{12,1} proportional to E_4^2 E_{4,1} - E_6 E_{6,1}, ctilde(3) = 1."""
    E4 = eisenstein(4, T // 4 + 1)
    E6 = eisenstein(6, T // 4 + 1)
    J = jacobi_eisenstein(4, T).times(E4 * E4, 8) - jacobi_eisenstein(6, T).times(E6, 6)
    if J.ctilde[0] != 0:
        raise ArithmeticError("combination is not cuspidal")
    return J.scale(1 / J.ctilde[3])


# ---------------------------------------------------------------------------
# plus-space forms

@dataclass
class PlusForm:
    """Coefficients c(m) of a weight k + 1/2 plus-space form of level 4NM."""
    k: int
    c: QSeries
    level: int = 4
    character: DirichletCharacter = field(default_factory=DirichletCharacter.trivial)

    @property
    def T(self):
        return self.c.T

    def coeff(self, m: int) -> Fraction:
        if m < 0:
            return Fraction(0)
        return self.c[m]

    __call__ = coeff

    def chi(self, n):
        return self.character(n) if self.character.modulus > 1 else 1

    def in_plus_space(self) -> bool:
        s = (-1) ** self.k
        return all(x == 0 for m, x in enumerate(self.c.num) if (s * m) % 4 not in (0, 1))

    def scale(self, a) -> "PlusForm":
        return PlusForm(self.k, self.c * a, self.level, self.character)

    def to_json(self) -> dict:
        return {"k": self.k, "level": self.level, "T": self.T,
                "character": "trivial" if self.character.is_trivial() else repr(self.character),
                "c": {str(m): str(x) for m, x in enumerate(self.c.coeffs()) if x}}

    @classmethod
    def from_json(cls, d: dict) -> "PlusForm":
        if d.get("character", "trivial") != "trivial":
            raise ValueError("only trivial characters are read from coefficient files")
        cs = {int(m): Fraction(x) for m, x in d["c"].items()}
        T = int(d.get("T", max(cs) if cs else 0))
        return cls(int(d["k"]), QSeries.from_coeffs([cs.get(m, 0) for m in range(T + 1)]), int(d["level"]))

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)


def eichler_zagier(J: JacobiForm) -> PlusForm:
    """Index-1 Jacobi form of weight k+1 -> plus form of weight k+1/2, c(m) = ctilde(m)."""
    if J.index != 1:
        raise ValueError("index 1 only")
    return PlusForm(J.weight - 1, J.ctilde)


def plus_form_23_2(T: int) -> PlusForm:
    """h in S^+_{23/2}(4), the Shimura lift partner of the weight-22 newform."""
    return eichler_zagier(jacobi_cusp_12(T))


def hecke_Tp2(h: PlusForm, p: int) -> PlusForm:
    """T_{p^2}: c(p^2 n) + ((-1)^k n / p) chi(p) p^(k-1) c(n) + chi(p)^2 p^(2k-1) c(n/p^2)."""
    N = h.level // 4
    if p == 2 or N % p == 0:
        raise ValueError("T_{p^2} needs p coprime to 2N")
    k = h.k
    chi = h.chi(p)
    T = h.T // (p * p)
    s = (-1) ** k
    out = []
    for n in range(T + 1):
        v = h.c[p * p * n] + kronecker(s * n, p) * chi * Fraction(p) ** (k - 1) * h.c[n]
        if n % (p * p) == 0:
            v += chi * chi * Fraction(p) ** (2 * k - 1) * h.c[n // (p * p)]
        out.append(v)
    return PlusForm(k, QSeries.from_coeffs(out), h.level, h.character)


def shimura_lift(h: PlusForm, D: int, nmax: int) -> QSeries:
    """zeta^D(h): n-th coefficient sum_{d | n} (D/d) chi(d) d^(k-1) c(n^2 |D| / d^2)."""
    k = h.k
    if (-1) ** k * D <= 0:
        raise ValueError("need (-1)^k D > 0")
    if not is_fundamental(D):
        raise ValueError("D must be a fundamental discriminant")
    if nmax * nmax * abs(D) > h.T:
        raise TruncationError(f"need c up to {nmax * nmax * abs(D)}, have {h.T}")
    out = [Fraction(0)]
    for n in range(1, nmax + 1):
        out.append(sum(kronecker(D, d) * h.chi(d) * Fraction(d) ** (k - 1) * h.c[n * n * abs(D) // (d * d)]
                       for d in divisors(n)))
    return QSeries.from_coeffs(out)


@dataclass
class Witness:
    holds: bool
    lhs: object
    rhs: object
    detail: str = ""


def coeff_relation(h: PlusForm, f: EllipticForm, D: int, n: int) -> Witness:
    """c(n^2 |D|) = c(|D|) sum_{d | n} mu(d) (D/d) chi(d) d^(k-1) a_chi(n/d)."""
    k = h.k
    lhs = h.coeff(n * n * abs(D))
    s = Fraction(0)
    for d in divisors(n):
        mu = moebius(d)
        if mu:
            m = n // d
            s += mu * kronecker(D, d) * h.chi(d) * Fraction(d) ** (k - 1) * h.chi(m) * f.a(m)
    rhs = h.coeff(abs(D)) * s
    return Witness(lhs == rhs, lhs, rhs, f"D={D}, n={n}")


# ---------------------------------------------------------------------------
# Psi_p and the coefficient formula in terms of Satake parameters

def chebyshev_S(e: int, t):
    """S_e(t) = sum_{j=0}^{e} X^(e-2j) for X + 1/X = t (S_-1 = 0)."""
    if e < 0:
        return Surd(0) if isinstance(t, Surd) else 0
    a, b = Surd(1), t if isinstance(t, Surd) else Surd(t)
    if e == 0:
        return a
    for _ in range(e - 1):
        a, b = b, b * t - a
    return b


@dataclass(frozen=True)
class PsiData:
    """Local data for Psi_p: case in {"good", "N/M", "M"}; for good p the
    Satake trace alpha + 1/alpha (a Surd), for bad p the sign w_p."""
    case: str
    trace: Surd | None = None
    w: int | None = None


def psi_p(xi, p: int, data: PsiData) -> Surd:
    """Psi_p(xi; alpha_p), exact in Q(sqrt p).

    good:  (X^(e+1) - X^(-e-1))/(X - 1/X) - p^(-1/2) chi(p) (X^e - X^-e)/(X - 1/X)
    N/M:   chi(p) (chi(p) + w_p) X^e
    M:     chi(p) (chi(p) - w_p) X^e
    e < 0: 0
    with chi = chi_{-xi}, e = ord_p of the conductor part f_xi, X = alpha_p
    (= -p^(-1/2) w_p at bad p).
    """
    d, f = discriminant_split(xi)
    e = ord_p(f, p)
    if e < 0:
        return Surd(0)
    chi = kronecker(-d, p)
    if data.case == "good":
        rp = Surd(0, Fraction(1, p), p)
        return chebyshev_S(e, data.trace) - rp * chi * chebyshev_S(e - 1, data.trace)
    alpha = Surd(0, Fraction(-data.w, p), p)
    sgn = data.w if data.case == "N/M" else -data.w
    return Surd(chi * (chi + sgn)) * alpha ** e


def psi_p_laurent(xi, p: int, data: PsiData) -> dict:
    """Psi_p as a Laurent polynomial {exponent: coefficient} in X (good p)."""
    d, f = discriminant_split(xi)
    e = ord_p(f, p)
    if e < 0:
        return {}
    chi = kronecker(-d, p)
    out = {}
    for j in range(e + 1):
        out[e - 2 * j] = out.get(e - 2 * j, Surd(0)) + Surd(1)
    for j in range(e):
        out[e - 1 - 2 * j] = out.get(e - 1 - 2 * j, Surd(0)) - Surd(0, Fraction(chi, p), p)
    return out


def psi_data(f: EllipticForm, p: int, M: int = 1) -> PsiData:
    if f.level % p:
        return PsiData("good", trace=satake(f, p).trace)
    return PsiData("M" if M % p == 0 else "N/M", w=f.atkin_lehner[p])


def lemma31_rhs(h: PlusForm, f: EllipticForm, xi: int, M: int = 1) -> Fraction:
    """2^(-nu(N)) c(d_xi) chi(f_xi) f_xi^(k-1/2) prod_p Psi_p(xi; alpha_p).

    Each prime contributes p^(e(k-1/2)) Psi_p, which must be rational; a
    leftover square root is reported as a TypeError.
    """
    k = h.k
    N = f.level
    d, fr = discriminant_split(xi)
    primes = set(_prime_divisors(N)) | set(_prime_divisors(fr.numerator)) | set(_prime_divisors(fr.denominator))
    total = Fraction(1, 2 ** len(_prime_divisors(N))) * h.coeff(d)
    if fr.numerator > 1 or fr.denominator > 1:
        total *= h.chi(fr.numerator)
        if fr.denominator > 1:
            cd = h.chi(fr.denominator)
            total = total / cd if cd else Fraction(0)
    for p in sorted(primes):
        e = ord_p(fr, p)
        local = psi_p(xi, p, psi_data(f, p, M)) * Surd.sqrt_p_power(p, e * (2 * k - 1))
        total *= local.to_fraction()
    return total


def lemma31_check(h: PlusForm, f: EllipticForm, xi: int, M: int = 1) -> Witness:
    if xi > h.T:
        raise TruncationError(f"xi = {xi} beyond truncation {h.T}")
    lhs = h.coeff(xi)
    rhs = lemma31_rhs(h, f, xi, M)
    return Witness(lhs == rhs, lhs, rhs, f"xi={xi}")


# ---------------------------------------------------------------------------
# Petersson norm and the Kohnen / Baruch-Mao identity

def theta_components(h: PlusForm):
    """(h0, h1) with h(tau) = h0(4 tau) + h1(4 tau) for k odd:
    h0 = sum c(4n) q^n and h1 = sum c(4n-1) q^(n-1/4)."""
    c = h.c.to_float()
    if h.k % 2 == 0:
        raise ValueError("components implemented for odd k")
    h0 = c[0::4]
    h1 = c[3::4]        # c(4n - 1) for n >= 1, exponent n - 1/4 = (n - 1) + 3/4
    return h0, h1


def plus_vector_value(h: PlusForm, tau, nterms: int = 400):
    """(|h0|^2 + |h1|^2) at tau, the SL2(Z)-invariant combination up to y^(k+1/2)."""
    h0, h1 = theta_components(h)
    v0 = evaluate(h0[:nterms], tau)
    v1 = evaluate(h1[:nterms], tau, offset=0.75)
    return np.abs(v0) ** 2 + np.abs(v1) ** 2


def petersson_plus(h: PlusForm, nodes: int = 64, tol: float = 1e-10):
    """<h, h> = (1/6) int_{Gamma_0(4)\\H} |h|^2 y^(k+1/2) dmu at level 4.

    Through the theta decomposition the (h0, h1) vector transforms under an
    irreducible unitary 2-dimensional representation; Schur orthogonality
    over the six cosets of Gamma^0(4) gives
        <h, h> = 4^-(k+1/2) int_F (|h0|^2 + |h1|^2) y^(k+1/2) dmu.
    """
    from .qexp import NormResult
    if h.level != 4:
        raise ValueError("theta-decomposition route implemented at level 4")
    w = h.k + 0.5
    c = h.c.to_float()
    if c[0] != 0:
        raise ValueError("not a cusp form")
    # y >= 1: integrate x out; every c(m) q^(m/4) contributes exp(-pi m y)
    upper = upper_strip_integral(c ** 2, np.pi, w)
    h0, h1 = theta_components(h)
    n0 = min(len(h0), 200)

    def integrand(X, Y):
        tau = X + 1j * Y
        v = np.abs(evaluate(h0[:n0], tau)) ** 2 + np.abs(evaluate(h1[:n0], tau, offset=0.75)) ** 2
        return v * Y ** (w - 2)

    lower = fd_lower_integral(integrand, nodes, nodes)
    lower2 = fd_lower_integral(integrand, nodes // 2 + 8, nodes // 2 + 8)
    value = (upper + lower) / 4 ** w
    err = abs(lower - lower2) / 4 ** w
    if err > tol * value:
        raise ArithmeticError(f"quadrature error {err:.3e} exceeds tolerance")
    return NormResult(value, err, "theta-decomposition")


def in_D_set(D: int, k: int, N: int, M: int, w: dict) -> bool:
    """D in the admissible set: (-1)^k D > 0 fundamental, (D/p) = w_p for
    p | N/M and (D/p) = -w_p for p | M."""
    if (-1) ** k * D <= 0 or not is_fundamental(D):
        return False
    for p in _prime_divisors(N):
        want = -w[p] if M % p == 0 else w[p]
        if kronecker(D, p) != want:
            return False
    return True


def kohnen_rhs(f: EllipticForm, D: int, k: int, N: int = 1, M: int = 1,
               L_value: float | None = None, petersson: float | None = None, nmax: int = 600) -> float:
    """2^nu(N) ((k-1)!/pi^k) |D|^(k-1/2) prod_{p|M} p/(p+1) L(f,D,k) / <f,f>."""
    if not in_D_set(D, k, N, M, f.atkin_lehner):
        raise ValueError(f"D = {D} is not admissible for (k, N, M) = ({k}, {N}, {M})")
    if L_value is None:
        L_value = twisted_central_L(f, D, nmax)
    if petersson is None:
        from .qexp import petersson_norm
        petersson = petersson_norm(f).value
    nu = len(_prime_divisors(N))
    fac = math.prod(Fraction(p, p + 1) for p in _prime_divisors(M))
    return (2 ** nu * math.factorial(k - 1) / math.pi ** k * abs(D) ** (k - 0.5)
            * float(fac) * L_value / petersson)


def twisted_central_L(f: EllipticForm, D: int, nmax: int = 600) -> float:
    """Finite L(f, D, k) = L(f x chi_D, k) at the center k = weight/2."""
    from .lfun import L_f_twist, gamma_C_log
    k = f.weight // 2
    L = L_f_twist(f, D, min(nmax, f.T))
    L.check_reach(float(k))
    v, _ = L.value(float(k))
    return v / float(np.exp(gamma_C_log(k)).real)
