"""Truncated q-expansions, level-1 generators, Hecke operators, Petersson norms.

Operator conventions (used consistently across the package)::

    (U_d a)(n) = a(dn)
    (V_d a)(n) = d * a(n/d)            (note the factor d)
    T_p        = U_p + chi(p) p^(l-2) V_p,  i.e.  a(pn) + chi(p) p^(l-1) a(n/p)

The Petersson product of weight-l forms on Gamma_0(N) is
(1/[SL2(Z):Gamma_0(N)]) * int_{Gamma_0(N)\\H} f conj(g) y^(l-2) dx dy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from scipy.special import gammaincc, gammaln

from .arith import DirichletCharacter, Surd, bernoulli


class TruncationError(ValueError):
    """Raised when a coefficient beyond the stored truncation is requested."""


# ---------------------------------------------------------------------------
# integer polynomial products

def _pack(vals, nbytes):
    pos = b"".join((v if v > 0 else 0).to_bytes(nbytes, "little") for v in vals)
    neg = b"".join((-v if v < 0 else 0).to_bytes(nbytes, "little") for v in vals)
    return gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(int.from_bytes(neg, "little"))


def int_convolve(a, b, T: int):
    """First T+1 coefficients of the product of two integer polynomials.

    Large inputs go through Kronecker substitution: both polynomials are
    packed into one big integer each (signed digits, byte-aligned slots),
    multiplied by GMP and unpacked with a constant offset per slot.
    """
    a = list(a[: T + 1])
    b = list(b[: T + 1])
    L = min(len(a) + len(b) - 1, T + 1)
    if not a or not b or L <= 0:
        return [0] * (T + 1)
    if min(len(a), len(b)) < 48:
        out = [0] * L
        if len(a) > len(b):
            a, b = b, a
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), L - i)):
                    out[i + j] += x * b[j]
        return out + [0] * (T + 1 - L)
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if ma == 0 or mb == 0:
        return [0] * (T + 1)
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    nb = (bits + 7) // 8
    R = _pack(a, nb) * _pack(b, nb)
    full = len(a) + len(b) - 1
    half = 1 << (8 * nb - 1)
    off = int.from_bytes(half.to_bytes(nb, "little") * full, "little")
    raw = int(R + off).to_bytes(full * nb + 1, "little")
    out = [int.from_bytes(raw[i * nb:(i + 1) * nb], "little") - half for i in range(L)]
    return out + [0] * (T + 1 - L)


# ---------------------------------------------------------------------------
# QSeries

class QSeries:
    """sum_{n=0}^{T} a(n) q^n with rational coefficients.

    Stored as integer numerators over one common denominator so products
    can use integer convolution.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den: int = 1):
        num = [int(x) for x in num]
        if den == 0:
            raise ZeroDivisionError
        if den < 0:
            num, den = [-x for x in num], -den
        g = math.gcd(den, *num) if num else den
        if g > 1:
            num = [x // g for x in num]
            den //= g
        self.num = num
        self.den = den

    @classmethod
    def from_coeffs(cls, coeffs):
        cs = [Fraction(c) for c in coeffs]
        den = math.lcm(*(c.denominator for c in cs)) if cs else 1
        return cls([c.numerator * (den // c.denominator) for c in cs], den)

    @classmethod
    def zero(cls, T: int):
        return cls([0] * (T + 1))

    @classmethod
    def one(cls, T: int):
        return cls([1] + [0] * T)

    @property
    def T(self) -> int:
        return len(self.num) - 1

    def __len__(self):
        return len(self.num)

    def __getitem__(self, n):
        if isinstance(n, slice):
            return [self[i] for i in range(*n.indices(len(self.num)))]
        if n < 0:
            return Fraction(0)
        if n > self.T:
            raise TruncationError(f"coefficient {n} beyond truncation {self.T}")
        return Fraction(self.num[n], self.den)

    def coeffs(self):
        return [Fraction(x, self.den) for x in self.num]

    def truncate(self, T: int) -> "QSeries":
        if T > self.T:
            raise TruncationError(f"cannot extend truncation {self.T} to {T}")
        return QSeries(self.num[: T + 1], self.den)

    def _align(self, other):
        T = min(self.T, other.T)
        return T, self.num[: T + 1], other.num[: T + 1]

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = Fraction(other)
            num = list(self.num)
            num[0] = num[0] * other.denominator + other.numerator * self.den
            return QSeries([num[0]] + [x * other.denominator for x in num[1:]], self.den * other.denominator)
        T, a, b = self._align(other)
        d1, d2 = self.den, other.den
        return QSeries([x * d2 + y * d1 for x, y in zip(a, b)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-x for x in self.num], self.den)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            c = Fraction(other)
            return QSeries([x * c.numerator for x in self.num], self.den * c.denominator)
        T = min(self.T, other.T)
        return QSeries(int_convolve(self.num, other.num, T), self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = Fraction(c)
        return QSeries([x * c.denominator for x in self.num], self.den * c.numerator)

    def __pow__(self, e: int):
        out = QSeries.one(self.T)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.den == other.den and self.num == other.num

    def __hash__(self):
        return hash((tuple(self.num), self.den))

    def is_zero(self):
        return not any(self.num)

    def substitute(self, d: int, T: int | None = None) -> "QSeries":
        """f(q^d), without any normalizing factor."""
        T = self.T * d if T is None else T
        num = [0] * (T + 1)
        for n in range(min(self.T, T // d) + 1):
            num[n * d] = self.num[n]
        return QSeries(num, self.den)

    def valuation(self):
        for i, x in enumerate(self.num):
            if x:
                return i
        return None

    def to_float(self) -> np.ndarray:
        return np.array([x / self.den for x in self.num], dtype=float)

    def __call__(self, tau) -> np.ndarray:
        """Numerical value at tau (scalar or array) in the upper half plane."""
        return evaluate(self.to_float(), tau)

    def __repr__(self):
        shown = " + ".join(f"{c}*q^{i}" for i, c in enumerate(self.coeffs()[:6]) if c)
        return f"QSeries({shown or '0'} + O(q^{self.T + 1}))"


def evaluate(coeffs, tau, offset: float = 0.0) -> np.ndarray:
    """sum_n c_n exp(2 pi i (n + offset) tau), vectorized over tau."""
    tau = np.asarray(tau, dtype=complex)
    c = np.asarray(coeffs)
    n = np.arange(len(c)) + offset
    nz = c != 0
    if not nz.any():
        return np.zeros(tau.shape, dtype=complex)
    ph = np.exp(2j * np.pi * np.multiply.outer(tau, n[nz]))
    return ph @ c[nz]


# ---------------------------------------------------------------------------
# generators

def eisenstein(k: int, T: int) -> QSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n."""
    if k < 4 or k % 2:
        raise ValueError("weight must be even and at least 4")
    c = -Fraction(2 * k) / bernoulli(k)
    sig = divisor_sums(T, k - 1)
    return QSeries.from_coeffs([Fraction(1)] + [c * sig[n] for n in range(1, T + 1)])


def divisor_sums(T: int, r: int):
    """[sigma_r(n) for n in 0..T] via a sieve (entry 0 is 0)."""
    out = [0] * (T + 1)
    for d in range(1, T + 1):
        dr = d ** r
        for m in range(d, T + 1, d):
            out[m] += dr
    return out


def delta(T: int) -> QSeries:
    """Delta = (E_4^3 - E_6^2) / 1728."""
    if T < 2:
        raise ValueError("truncation must be at least 2")
    return (eisenstein(4, T) ** 3 - eisenstein(6, T) ** 2) / 1728


def delta_product(T: int) -> QSeries:
    """q prod (1 - q^n)^24, an independent route to Delta."""
    P = [1] + [0] * T
    for n in range(1, T + 1):
        for _ in range(24):
            for m in range(T, n - 1, -1):
                P[m] -= P[m - n]
    return QSeries([0] + P[:T])


# ---------------------------------------------------------------------------
# forms

@dataclass
class EllipticForm:
    weight: int
    level: int
    series: QSeries
    character: DirichletCharacter = field(default_factory=DirichletCharacter.trivial)
    atkin_lehner: dict = field(default_factory=dict)
    label: str = ""
    newform: bool = False

    def a(self, n: int) -> Fraction:
        return self.series[n]

    @property
    def T(self):
        return self.series.T

    def chi(self, n: int):
        return self.character(n) if self.character.modulus > 1 else 1

    def check(self, primes=(2, 3, 5, 7, 11, 13)):
        """Newform sanity: a(1) = 1, Atkin-Lehner data exactly at p | N,
        and T_p-eigenvalue a(p) on the available truncation."""
        if self.newform and self.a(1) != 1:
            raise ValueError("normalized newform must have a(1) = 1")
        bad = {p for p in _prime_divisors(self.level)}
        if set(self.atkin_lehner) != bad:
            raise ValueError("Atkin-Lehner signs must be given exactly for p | N")
        for p in primes:
            if self.level % p == 0 or self.T // p < 2:
                continue
            Tf = hecke_T(p, self)
            if Tf != self.series.truncate(Tf.T) * self.a(p):
                raise ValueError(f"not a T_{p} eigenform")
        return True

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "weight": self.weight,
            "level": self.level,
            "character": "trivial" if self.character.is_trivial() else repr(self.character),
            "an": [str(c) for c in self.series.coeffs()],
            "atkin_lehner": {str(p): w for p, w in self.atkin_lehner.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> "EllipticForm":
        if d.get("character", "trivial") != "trivial":
            raise ValueError("only trivial characters are read from coefficient files")
        s = QSeries.from_coeffs([Fraction(x) for x in d["an"]])
        return cls(int(d["weight"]), int(d["level"]), s,
                   atkin_lehner={int(p): int(w) for p, w in d.get("atkin_lehner", {}).items()},
                   label=d.get("label", ""), newform=True)

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _prime_divisors(n: int):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def level1_cusp_basis_element(weight: int, T: int) -> QSeries:
    """Delta * E_{weight-12} (E_0 = 1); spans S_weight(1) when it is 1-dimensional."""
    r = weight - 12
    if r < 0 or r % 2 or r == 2:
        raise ValueError("need weight 12 or weight 12 + r with E_r available")
    D = delta(T)
    if r == 0:
        return D
    E = {4: eisenstein(4, T), 6: eisenstein(6, T)}
    if r == 4:
        return D * E[4]
    if r == 6:
        return D * E[6]
    if r == 8:
        return D * E[4] ** 2
    if r == 10:
        return D * E[4] * E[6]
    if r == 14:
        return D * E[4] ** 2 * E[6]
    raise ValueError("S_weight(1) is not one-dimensional")


def newform_level1(weight: int, T: int) -> EllipticForm:
    """Normalized eigenform spanning a one-dimensional S_weight(1)."""
    s = level1_cusp_basis_element(weight, T)
    s = s / s[1]
    return EllipticForm(weight, 1, s, label=f"{weight}.1.a", newform=True)


def newform_22(T: int) -> EllipticForm:
    """The weight-22 level-1 newform, Delta * E_4 * E_6."""
    return newform_level1(22, T)


# ---------------------------------------------------------------------------
# operators

def op_U(d: int, s: QSeries) -> QSeries:
    """(U_d a)(n) = a(dn)."""
    T = s.T // d
    return QSeries([s.num[d * n] for n in range(T + 1)], s.den)


def op_V(d: int, s: QSeries, T: int | None = None) -> QSeries:
    """(V_d a)(n) = d * a(n/d)."""
    return s.substitute(d, T) * d


def hecke_T(p: int, form: EllipticForm) -> QSeries:
    """T_p = U_p + chi(p) p^(l-2) V_p on the valid truncation."""
    if form.level % p == 0:
        raise ValueError("T_p requires p coprime to the level; use op_U")
    U = op_U(p, form.series)
    chi = form.chi(p)
    V = op_V(p, form.series, U.T)
    if chi == 1:
        return U + V * Fraction(p) ** (form.weight - 2)
    if chi == -1:
        return U - V * Fraction(p) ** (form.weight - 2)
    raise ValueError("hecke_T on rational series needs a real character")


def hecke_T_coeff(p: int, form: EllipticForm, n: int) -> Fraction:
    """Direct coefficient formula a(pn) + chi(p) p^(l-1) a(n/p)."""
    out = form.a(p * n)
    if n % p == 0:
        out += form.chi(p) * Fraction(p) ** (form.weight - 1) * form.a(n // p)
    return out


def twist(form: EllipticForm, lam: DirichletCharacter) -> EllipticForm:
    """f (x) lambda: coefficients lambda(n) a(n), level N M^2, character chi lambda^2."""
    if not lam.is_real():
        raise ValueError("rational series can only be twisted by real characters")
    s = QSeries([lam(n) * x for n, x in enumerate(form.series.num)], form.series.den)
    M = lam.modulus
    return EllipticForm(form.weight, form.level * M * M, s,
                        character=form.character * lam ** 2, label=form.label + f"x{M}")


# ---------------------------------------------------------------------------
# Satake parameters

@dataclass(frozen=True)
class Satake:
    """Satake data at p in the unitary normalization.

    Good p: alpha + alpha^-1 = trace = p^(1/2 - k) a(p) (weight 2k), stored
    as a Surd; ``alpha`` is None and roots() returns the numeric pair.
    Bad p: alpha = -p^(-1/2) w_p exactly.
    """
    p: int
    trace: Surd | None = None
    alpha: Surd | None = None

    def roots(self):
        if self.alpha is not None:
            return (float(self.alpha),)
        t = float(self.trace)
        disc = complex(t * t - 4)
        r = np.sqrt(disc)
        return ((t + r) / 2, (t - r) / 2)


def satake(form: EllipticForm, p: int) -> Satake:
    """Satake parameter at p for a newform of even weight 2k (unitary scaling
    p^(1/2 - k) a(p))."""
    if form.level % (p * p) == 0:
        raise ValueError("square-free level required at p")
    if form.weight % 2:
        raise ValueError("weight must be even")
    k = form.weight // 2
    if form.level % p == 0:
        w = form.atkin_lehner[p]
        return Satake(p, alpha=Surd(0, Fraction(-w, p), p))
    # p^(1/2-k) = p^(-k) sqrt(p)
    return Satake(p, trace=Surd(0, form.a(p) / Fraction(p) ** k, p))


# ---------------------------------------------------------------------------
# Petersson norms

def _gl_nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def fd_lower_integral(func, nx: int = 64, ny: int = 64):
    """int over {|x| <= 1/2, sqrt(1-x^2) <= y <= 1} of func(x, y) dx dy.

    ``func`` must be even in x.  Gauss-Legendre in x on [0, 1/2] and in y
    on [sqrt(1-x^2), 1] (both boundaries are smooth there).
    """
    xs, wx = _gl_nodes(nx)
    ys, wy = _gl_nodes(ny)
    X = 0.25 * (xs + 1)
    WX = 0.25 * wx
    lo = np.sqrt(1 - X ** 2)
    Y = lo[:, None] + (1 - lo)[:, None] * (ys[None, :] + 1) / 2
    WY = (1 - lo)[:, None] / 2 * wy[None, :]
    vals = func(np.repeat(X[:, None], ny, axis=1), Y)
    return 2 * float(np.sum(WX[:, None] * WY * vals))


def upper_strip_integral(sq_coeffs, rate: float, s: float):
    """sum_m |c_m|^2 int_1^inf exp(-rate m y) y^(s-2) dy  (m >= 1).

    This is the y >= 1 part of int |sum c_m e(m tau rate/(4 pi))|^2 y^s dmu
    after integrating out x by Parseval.
    """
    m = np.arange(len(sq_coeffs), dtype=float)
    out = 0.0
    a = s - 1
    for mi, c2 in zip(m[1:], sq_coeffs[1:]):
        if c2 == 0:
            continue
        x = rate * mi
        # Gamma(a, x) / x^a
        q = gammaincc(a, x)
        if q > 0:
            out += c2 * q * float(np.exp(gammaln(a) - a * np.log(x)))
    return out


@dataclass
class NormResult:
    value: float
    error: float
    method: str


def petersson_norm(form: EllipticForm, method: str = "direct-integral", tol: float = 1e-10,
                   nodes: int = 64) -> NormResult:
    """<f, f> in the normalization of the module docstring."""
    if method == "direct-integral":
        return _petersson_direct(form, tol, nodes)
    if method == "adjoint-L":
        from .lfun import petersson_from_adjoint
        return petersson_from_adjoint(form, tol)
    raise ValueError(f"unknown method {method!r}")


def _petersson_direct(form: EllipticForm, tol: float, nodes: int) -> NormResult:
    if form.level != 1:
        raise ValueError("direct integration is implemented for level 1")
    if form.series[0] != 0:
        raise ValueError("not a cusp form")
    l = form.weight
    a = form.series.to_float()
    # series truncation: at y >= sqrt(3)/2, |a_n q^n| <= d(n) n^((l-1)/2) exp(-pi sqrt3 n)
    nmax = len(a) - 1
    lead = abs(a[1]) if abs(a[1]) > 0 else np.max(np.abs(a))
    tail = sum(2 * n ** ((l - 1) / 2 + 0.5) * np.exp(-np.pi * np.sqrt(3) * n)
               for n in range(nmax + 1, nmax + 200)) * lead
    upper = upper_strip_integral(a ** 2, 4 * np.pi, l)

    def integrand(X, Y):
        v = evaluate(a, X + 1j * Y)
        return np.abs(v) ** 2 * Y ** (l - 2)

    lower = fd_lower_integral(integrand, nodes, nodes)
    lower2 = fd_lower_integral(integrand, nodes // 2 + 8, nodes // 2 + 8)
    value = upper + lower
    err = abs(lower - lower2) + 4 * tail * lead
    if err > tol * abs(value):
        raise ArithmeticError(f"Petersson quadrature error {err:.3e} exceeds tolerance")
    return NormResult(value, err, "direct-integral")
