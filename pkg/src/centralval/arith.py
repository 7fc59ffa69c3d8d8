"""Exact scalars and the number-theoretic primitives used everywhere else.

Three exact types live here:

* ``Cyclo``: an element of Q(zeta_n), stored as an integer coefficient
  vector over the power basis 1, z, ..., z^(phi(n)-1) plus a common
  denominator.  Mixed operations promote to the compositum.
* ``Surd``: an element a + b*sqrt(r) of a real quadratic field, used for
  Satake-type half powers that must cancel before comparison.
* ``Mono``: a monomial  q * zeta^t * sqrt(r)  (q rational, t in Q/Z).
  Products of such values stay monomials, which lets the p-adic integrator
  accumulate sums by key and only touch cyclotomic arithmetic at the end.

Conventions
-----------
The local additive character is psi_p(x) = exp(-2 pi i {x}_p), so that
psi_p(a / p^e) = zeta_{p^e}^{-a}.  Haar measure on Z_p has total mass 1.
"""
from __future__ import annotations

import heapq
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from sympy import factorint, primitive_root, bernoulli as _sym_bernoulli

Q = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected rational, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# elementary p-adic helpers on rationals

def ord_p(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("ord_p(0) is infinite")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    """x / p^ord_p(x)."""
    x = as_fraction(x)
    return x / Fraction(p) ** ord_p(x, p)


def residue(x, m: int) -> int:
    """Image in Z/mZ of a rational whose denominator is prime to m."""
    x = as_fraction(x)
    return x.numerator * pow(x.denominator, -1, m) % m


def squarefree_part(n: int) -> int:
    if n == 0:
        raise ValueError("squarefree part of 0")
    s = -1 if n < 0 else 1
    for q, e in factorint(abs(n)).items():
        if e % 2:
            s *= q
    return s


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return list(factorint(n).items()) == [(n, 1)]


def divisors(n: int) -> list[int]:
    out = [1]
    for q, e in factorint(n).items():
        out = [d * q ** i for d in out for i in range(e + 1)]
    return sorted(out)


def moebius(n: int) -> int:
    f = factorint(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def sigma(n: int, r: int) -> int:
    return sum(d ** r for d in divisors(n))


# ---------------------------------------------------------------------------
# symbols

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), completely multiplicative in n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            res = -res
    # Jacobi symbol (a/n) for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


def legendre(a, p: int) -> int:
    """Legendre symbol of a p-integral rational."""
    a = as_fraction(a)
    if a.numerator % p == 0:
        return 0
    return kronecker(residue(a, p), p)


def hilbert_symbol(a, b, place) -> int:
    """Hilbert symbol (a, b)_v for nonzero rationals; place is a prime or 'inf'."""
    a, b = as_fraction(a), as_fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if place in ("inf", math.inf, None):
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    al, be = ord_p(a, p), ord_p(b, p)
    u, v = unit_part(a, p), unit_part(b, p)
    if p != 2:
        s = (-1) ** ((al * be * (p - 1) // 2) % 2)
        return s * legendre(u, p) ** (be % 2) * legendre(v, p) ** (al % 2)
    u8, v8 = residue(u, 8), residue(v, 8)

    def eps(x):
        return ((x - 1) // 2) % 2

    def omega(x):
        return ((x * x - 1) // 8) % 2

    e = eps(u8) * eps(v8) + al * omega(v8) + be * omega(u8)
    return -1 if e % 2 else 1


def hilbert_oracle(a, b, p: int) -> int:
    """Brute-force Hilbert symbol by searching for a primitive zero of a x^2 + b y^2 - z^2.

    Valuations are first reduced mod 2; the search runs modulo p^3
    (2^6 for p = 2), where a primitive solution always lifts.
    """
    a, b = as_fraction(a), as_fraction(b)
    a = unit_part(a, p) * p ** (ord_p(a, p) % 2)
    b = unit_part(b, p) * p ** (ord_p(b, p) % 2)
    m = p ** (6 if p == 2 else 3)
    A, B = residue(a, m), residue(b, m)
    z = np.arange(m, dtype=np.int64)
    sq_all = np.zeros(m, dtype=bool)
    sq_all[(z * z) % m] = True
    sq_unit = np.zeros(m, dtype=bool)
    sq_unit[(z[z % p != 0] ** 2) % m] = True
    X, Y = np.meshgrid(z, z, indexing="ij")
    vals = (A * X * X + B * Y * Y) % m
    prim = (X % p != 0) | (Y % p != 0)
    hit = (prim & sq_all[vals]) | sq_unit[vals]
    return 1 if hit.any() else -1


# ---------------------------------------------------------------------------
# cyclotomic fields

@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    r = n
    for q in factorint(n):
        r = r // q * (q - 1)
    return r


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (low to high) of the n-th cyclotomic polynomial."""
    rad = 1
    for q in factorint(n):
        rad *= q
    if rad != n:
        # Phi_n(x) = Phi_rad(x^(n/rad))
        base, e = cyclotomic_poly(rad), n // rad
        out = [0] * ((len(base) - 1) * e + 1)
        for i, c in enumerate(base):
            out[i * e] = c
        return tuple(out)
    num = [1]
    den = [1]

    def mul(P, R):
        out = [0] * (len(P) + len(R) - 1)
        for i, x in enumerate(P):
            if x:
                for j, y in enumerate(R):
                    out[i + j] += x * y
        return out

    for d in divisors(n):
        mu = moebius(n // d)
        f = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = mul(num, f)
        elif mu == -1:
            den = mul(den, f)
    # exact division num / den
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, y in enumerate(den):
            num[i + j] -= c * y
    assert not any(num), "cyclotomic division not exact"
    return tuple(out)


def _reduce(poly: list[int], n: int) -> list[int]:
    """Reduce an integer polynomial in zeta_n to the power basis of length phi(n)."""
    deg = len(cyclotomic_poly(n)) - 1
    support = _phi_support(n)
    high = {}
    out = [0] * deg
    items = poly.items() if isinstance(poly, dict) else enumerate(poly)
    for i, c in items:
        if c:
            i %= n
            if i < deg:
                out[i] += c
            else:
                high[i] = high.get(i, 0) + c
    # x^i = -sum_j a_j x^(i - deg + j); process exponents from the top down
    heap = [-i for i in high]
    heapq.heapify(heap)
    while heap:
        i = -heapq.heappop(heap)
        c = high.pop(i)
        if not c:
            continue
        base = i - deg
        for j, a in support:
            k = base + j
            if k < deg:
                out[k] -= c * a
            else:
                if k not in high:
                    high[k] = 0
                    heapq.heappush(heap, -k)
                high[k] -= c * a
    return out


@lru_cache(maxsize=None)
def _phi_support(n: int):
    phi = cyclotomic_poly(n)
    return tuple((j, a) for j, a in enumerate(phi[:-1]) if a)


class Cyclo:
    """Exact element of Q(zeta_n); zeta_n = exp(2 pi i / n)."""

    __slots__ = ("n", "num", "den")

    def __init__(self, n: int, num, den: int = 1):
        if den < 0:
            num, den = [-x for x in num], -den
        g = den
        for x in num:
            if x:
                g = math.gcd(g, x)
                if g == 1:
                    break
        if g > 1:
            num = [x // g for x in num]
            den //= g
        self.n = n
        self.num = tuple(num)
        self.den = den

    # constructors -------------------------------------------------------
    @classmethod
    def rational(cls, q) -> "Cyclo":
        q = as_fraction(q)
        return cls(1, [q.numerator], q.denominator)

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "Cyclo":
        poly = [0] * n
        poly[k % n] = 1
        return cls(n, _reduce(poly, n))

    @classmethod
    def from_exponents(cls, n: int, terms) -> "Cyclo":
        """sum of q_j zeta_n^{k_j} from an iterable of (k, q)."""
        terms = [(k, as_fraction(q)) for k, q in terms]
        den = 1
        for _, q in terms:
            den = den * q.denominator // math.gcd(den, q.denominator)
        poly = [0] * n
        for k, q in terms:
            poly[k % n] += q.numerator * (den // q.denominator)
        return cls(n, _reduce(poly, n), den)

    # structure ----------------------------------------------------------
    def promote(self, m: int) -> "Cyclo":
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"cannot promote Q(zeta_{self.n}) into Q(zeta_{m})")
        step = m // self.n
        poly = {i * step: c for i, c in enumerate(self.num) if c}
        return Cyclo(m, _reduce(poly, m), self.den)

    @staticmethod
    def _coerce(x) -> "Cyclo":
        if isinstance(x, Cyclo):
            return x
        if isinstance(x, Mono):
            return x.to_cyclo()
        return Cyclo.rational(x)

    def _common(self, other):
        other = Cyclo._coerce(other)
        m = self.n * other.n // math.gcd(self.n, other.n)
        return self.promote(m), other.promote(m), m

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            a, b, m = self._common(other)
        except TypeError:
            return NotImplemented
        L = max(len(a.num), len(b.num))
        an = list(a.num) + [0] * (L - len(a.num))
        bn = list(b.num) + [0] * (L - len(b.num))
        den = a.den * b.den // math.gcd(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return Cyclo(m, [x * fa + y * fb for x, y in zip(an, bn)], den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.n, [-x for x in self.num], self.den)

    def __sub__(self, other):
        return self + (-Cyclo._coerce(other))

    def __rsub__(self, other):
        return Cyclo._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = as_fraction(other)
            return Cyclo(self.n, [x * q.numerator for x in self.num], self.den * q.denominator)
        other = Cyclo._coerce(other)
        if other.n == 1:
            return self * Fraction(other.num[0] if other.num else 0, other.den)
        if self.n == 1:
            return other * Fraction(self.num[0] if self.num else 0, self.den)
        m = self.n * other.n // math.gcd(self.n, other.n)
        sa, sb = m // self.n, m // other.n
        bi = [(j * sb, y) for j, y in enumerate(other.num) if y]
        prod = {}
        for i, x in enumerate(self.num):
            if x:
                ia = i * sa
                for jb, y in bi:
                    k = (ia + jb) % m
                    prod[k] = prod.get(k, 0) + x * y
        return Cyclo(m, _reduce(prod, m), self.den * other.den)

    def times_zeta(self, m: int, k: int) -> "Cyclo":
        """self * zeta_m^k without dense promotion."""
        L = self.n * m // math.gcd(self.n, m)
        sa, shift = L // self.n, (k * (L // m)) % L
        poly = {}
        for i, x in enumerate(self.num):
            if x:
                j = (i * sa + shift) % L
                poly[j] = poly.get(j, 0) + x
        return Cyclo(L, _reduce(poly, L), self.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = as_fraction(other)
            if q == 0:
                raise ZeroDivisionError
            return Cyclo(self.n, [x * q.denominator for x in self.num], self.den * q.numerator)
        return self * Cyclo._coerce(other).inverse()

    def __rtruediv__(self, other):
        return Cyclo._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = Cyclo.rational(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def galois(self, a: int) -> "Cyclo":
        """Image under zeta_n -> zeta_n^a (gcd(a, n) = 1)."""
        n = self.n
        poly = [0] * n
        for i, c in enumerate(self.num):
            if c:
                poly[(i * a) % n] += c
        return Cyclo(n, _reduce(poly, n), self.den)

    def conj(self) -> "Cyclo":
        return self.galois(-1)

    def inverse(self) -> "Cyclo":
        if not self:
            raise ZeroDivisionError("inverse of 0 in cyclotomic field")
        if self.is_rational():
            return Cyclo.rational(1 / self.to_fraction())
        n = self.n
        others = Cyclo.rational(1)
        for a in range(2, n):
            if math.gcd(a, n) == 1:
                others = others * self.galois(a)
        norm = (self * others).to_fraction()
        return others / norm

    # predicates and conversion -------------------------------------------
    def __bool__(self):
        return any(self.num)

    def is_rational(self) -> bool:
        return all(x == 0 for x in self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"not rational: {self!r}")
        return Fraction(self.num[0] if self.num else 0, self.den)

    def __complex__(self):
        z = complex(math.cos(2 * math.pi / self.n), math.sin(2 * math.pi / self.n))
        acc = 0j
        w = 1 + 0j
        for c in self.num:
            acc += c * w
            w *= z
        return acc / self.den

    def __eq__(self, other):
        try:
            a, b, _ = self._common(other)
        except TypeError:
            return NotImplemented
        return a.den == b.den and a.num == b.num

    __hash__ = None

    def __repr__(self):
        if self.is_rational():
            return f"Cyclo({self.to_fraction()})"
        terms = [f"{Fraction(c, self.den)}*z^{i}" for i, c in enumerate(self.num) if c]
        return f"Cyclo[{self.n}](" + " + ".join(terms) + ")"


def psi_p(x, p: int) -> Cyclo:
    """Standard local character psi_p(x) = exp(-2 pi i {x}_p) as an exact root of unity."""
    x = as_fraction(x)
    if x == 0 or ord_p(x, p) >= 0:
        return Cyclo.rational(1)
    e = -ord_p(x, p)
    m = p ** e
    a = residue(x * m, m)
    return Cyclo.zeta(m, -a)


def psi_exponent(x, p: int) -> Fraction:
    """t in Q/Z with psi_p(x) = exp(2 pi i t)."""
    x = as_fraction(x)
    if x == 0 or ord_p(x, p) >= 0:
        return Fraction(0)
    e = -ord_p(x, p)
    m = p ** e
    return Fraction(-residue(x * m, m), m) % 1


@lru_cache(maxsize=None)
def sqrt_int(r: int) -> Cyclo:
    """The positive square root of a positive integer inside a cyclotomic field."""
    if r <= 0:
        raise ValueError("sqrt_int needs r > 0")
    out = Cyclo.rational(1)
    for q, e in factorint(r).items():
        if e // 2:
            out = out * (q ** (e // 2))
        if e % 2:
            out = out * _sqrt_prime(q)
    return out


def _sqrt_prime(p: int) -> Cyclo:
    if p == 2:
        return Cyclo.zeta(8, 1) + Cyclo.zeta(8, -1)
    g = gauss_quadratic(1, p)
    if p % 4 == 1:
        return g
    return Cyclo.zeta(4, -1) * g


def gauss_quadratic(a: int, p: int) -> Cyclo:
    """G(a, p) = sum over j mod p of zeta_p^(a j^2)."""
    if p == 2 or not is_prime(p):
        raise ValueError("gauss_quadratic needs an odd prime")
    if a % p == 0:
        raise ValueError("a must be prime to p")
    counts = [0] * p
    for j in range(p):
        counts[(a * j * j) % p] += 1
    return Cyclo(p, _reduce(counts, p))


# ---------------------------------------------------------------------------
# monomials for fast accumulation

class Mono:
    """q * exp(2 pi i t) * sqrt(r) with q rational, t in [0,1), r squarefree."""

    __slots__ = ("q", "t", "r")

    def __init__(self, q, t=Fraction(0), r: int = 1):
        self.q = as_fraction(q)
        self.t = Fraction(t) % 1
        self.r = r

    @classmethod
    def p_power(cls, p: int, half: int) -> "Mono":
        """p^(half/2)."""
        if half % 2 == 0:
            return cls(Fraction(p) ** (half // 2))
        return cls(Fraction(p) ** ((half - 1) // 2), 0, p)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Mono(self.q * other, self.t, self.r)
        g = math.gcd(self.r, other.r)
        return Mono(self.q * other.q * g, self.t + other.t, (self.r // g) * (other.r // g))

    __rmul__ = __mul__

    def __neg__(self):
        return Mono(-self.q, self.t, self.r)

    def conj(self):
        return Mono(self.q, -self.t, self.r)

    def key(self):
        return (self.t, self.r)

    def to_cyclo(self) -> Cyclo:
        if self.q == 0:
            return Cyclo.rational(0)
        out = Cyclo.zeta(self.t.denominator, self.t.numerator) * self.q
        if self.r != 1:
            out = out * sqrt_int(self.r)
        return out

    def __repr__(self):
        return f"Mono({self.q}, t={self.t}, sqrt={self.r})"


class MonoSum:
    """Accumulator of Mono values keyed by (phase, radical)."""

    def __init__(self):
        self.terms: dict = {}

    def add(self, m: Mono, weight=1):
        if m is None or m.q == 0:
            return
        k = m.key()
        self.terms[k] = self.terms.get(k, Fraction(0)) + m.q * weight

    def merge(self, other: "MonoSum", weight=1):
        for k, v in other.terms.items():
            self.terms[k] = self.terms.get(k, Fraction(0)) + v * weight

    def to_cyclo(self) -> Cyclo:
        out = Cyclo.rational(0)
        for (t, r), q in self.terms.items():
            if q:
                out = out + Mono(q, t, r).to_cyclo()
        return out


# ---------------------------------------------------------------------------
# real quadratic surds

class Surd:
    """a + b sqrt(r), with a, b rational and r a fixed squarefree integer > 1."""

    __slots__ = ("a", "b", "r")

    def __init__(self, a, b=0, r: int = 1):
        self.a, self.b, self.r = as_fraction(a), as_fraction(b), r
        if self.b == 0:
            self.r = 1

    def _r(self, other):
        if self.r == 1:
            return other.r
        if other.r in (1, self.r):
            return self.r
        raise ValueError("surds over different quadratic fields")

    @staticmethod
    def _c(x):
        return x if isinstance(x, Surd) else Surd(as_fraction(x))

    def __add__(self, o):
        o = Surd._c(o)
        return Surd(self.a + o.a, self.b + o.b, self._r(o))

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.r)

    def __sub__(self, o):
        return self + (-Surd._c(o))

    def __rsub__(self, o):
        return Surd._c(o) - self

    def __mul__(self, o):
        o = Surd._c(o)
        r = self._r(o)
        return Surd(self.a * o.a + self.b * o.b * r, self.a * o.b + self.b * o.a, r)

    __rmul__ = __mul__

    def conjugate(self):
        return Surd(self.a, -self.b, self.r)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.r

    def __truediv__(self, o):
        o = Surd._c(o)
        n = o.norm()
        return self * o.conjugate() * Surd(1 / n)

    def __pow__(self, e: int):
        out = Surd(1)
        for _ in range(abs(e)):
            out = out * self
        return out if e >= 0 else Surd(1) / out

    @classmethod
    def sqrt_p_power(cls, p: int, half: int) -> "Surd":
        """p^(half/2) as a surd."""
        if half % 2 == 0:
            return cls(Fraction(p) ** (half // 2))
        return cls(0, Fraction(p) ** ((half - 1) // 2), p)

    def is_rational(self):
        return self.b == 0

    def to_fraction(self):
        if self.b:
            raise TypeError(f"surd {self} has an uncancelled square root")
        return self.a

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.r)

    def __eq__(self, o):
        o = Surd._c(o)
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.r == o.r)

    __hash__ = None

    def __repr__(self):
        return f"Surd({self.a} + {self.b}*sqrt({self.r}))"


# ---------------------------------------------------------------------------
# characters of (Z/p^c)^x

class LocalChar:
    """Character of Z_p^x factoring through (Z/p^c Z)^x, p odd.

    Determined by its value on a fixed generator g of the cyclic group
    (Z/p^c)^x: chi(g) = zeta_order^index where order = phi(p^c).
    ``cond`` is the exponent c (0 for the trivial character).
    """

    def __init__(self, p: int, c: int, index: int):
        if p == 2:
            raise ValueError("LocalChar supports odd p only")
        self.p, self.c = p, c
        self.order = euler_phi(p ** c) if c else 1
        self.index = index % self.order
        if c:
            self.gen = primitive_root(p ** c)
            m = p ** c
            self._log = {}
            x = 1
            for j in range(self.order):
                self._log[x] = j
                x = x * self.gen % m
        if c and self.index == 0:
            raise ValueError("index 0 gives the trivial character; use c = 0")
        if c and p ** (c - 1) > 1 and self.index % self.p == 0:
            raise ValueError("character is not primitive of the stated conductor")

    @classmethod
    def trivial(cls, p: int):
        return cls(p, 0, 0)

    def is_trivial(self):
        return self.c == 0

    def exponent(self, u) -> Fraction:
        """t with chi(u) = exp(2 pi i t), u a p-adic unit."""
        if self.c == 0:
            return Fraction(0)
        r = residue(u, self.p ** self.c)
        if r % self.p == 0:
            raise ValueError("character evaluated at a non-unit")
        return Fraction(self.index * self._log[r], self.order) % 1

    def __call__(self, u) -> Cyclo:
        t = self.exponent(u)
        return Cyclo.zeta(t.denominator, t.numerator)

    def mono(self, u) -> Mono:
        return Mono(1, self.exponent(u))

    def inverse(self) -> "LocalChar":
        return LocalChar(self.p, self.c, -self.index) if self.c else self

    def is_odd(self) -> bool:
        return self.exponent(-1) == Fraction(1, 2)


class DirichletCharacter:
    """Dirichlet character mod N as a product of factors.

    Each factor is either a ``LocalChar`` (odd p, read on n mod p^c) or a
    Kronecker symbol n -> (D/n).  ``chi(n) = 0`` whenever gcd(n, N) > 1.
    """

    def __init__(self, modulus: int, locals_=(), kron=()):
        self.modulus = modulus
        self.locals_ = tuple(locals_)
        self.kron = tuple(kron)
        for mu in self.locals_:
            if modulus % mu.p ** mu.c:
                raise ValueError("local component does not divide the modulus")
        for D in self.kron:
            if modulus % abs(D):
                raise ValueError("Kronecker factor does not divide the modulus")

    @classmethod
    def trivial(cls, modulus: int = 1):
        return cls(modulus)

    @classmethod
    def quadratic(cls, D: int, modulus: int | None = None):
        return cls(modulus or abs(D), kron=(D,))

    @classmethod
    def from_locals(cls, comps, modulus: int | None = None):
        comps = [mu for mu in comps if not mu.is_trivial()]
        N = modulus or math.prod(mu.p ** mu.c for mu in comps)
        return cls(N, locals_=comps)

    def exponent(self, n: int) -> Fraction | None:
        """t with chi(n) = exp(2 pi i t), or None if chi(n) = 0."""
        if math.gcd(n, self.modulus) != 1:
            return None
        t = Fraction(0)
        for mu in self.locals_:
            t += mu.exponent(n)
        for D in self.kron:
            if kronecker(D, n) == -1:
                t += Fraction(1, 2)
        return t % 1

    def __call__(self, n: int):
        t = self.exponent(n)
        if t is None:
            return 0
        if t == 0:
            return 1
        if t == Fraction(1, 2):
            return -1
        return Cyclo.zeta(t.denominator, t.numerator)

    def __mul__(self, other: "DirichletCharacter"):
        N = self.modulus * other.modulus // math.gcd(self.modulus, other.modulus)
        return DirichletCharacter(N, self.locals_ + other.locals_, self.kron + other.kron)

    def __pow__(self, e: int):
        out = DirichletCharacter.trivial(self.modulus)
        for _ in range(e):
            out = out * self
        return out

    def is_real(self) -> bool:
        return all(self.exponent(n) in (None, 0, Fraction(1, 2)) for n in range(1, self.modulus + 1))

    def is_trivial(self) -> bool:
        return all(self.exponent(n) in (None, 0) for n in range(1, self.modulus + 1))

    def is_even(self) -> bool:
        return self.exponent(self.modulus - 1) == 0 if self.modulus > 2 else True

    def local_is_odd(self, p: int) -> bool:
        """chi_(p)(-1) = -1, the per-prime oddness condition."""
        return any(mu.p == p and mu.is_odd() for mu in self.locals_)

    def conductor(self) -> int:
        N = self.modulus
        for d in divisors(N):
            if all(self.exponent(n) in (None, 0) for n in range(1, N + 1, d)):
                return d
        return N

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, conductor {self.conductor()})"


def eps_half(mu: LocalChar) -> Cyclo:
    """Local root number eps(1/2, mu) = p^(-c/2) sum_x psi(x / p^c) mu^{-1}(x).

    This is the normalization fixed by the product rule
    eps(1/2, mu) eps(1/2, mu^{-1}) = mu(-1).
    """
    p, c = mu.p, mu.c
    if c == 0:
        return Cyclo.rational(1)
    m = p ** c
    inv = mu.inverse()
    terms = []
    L = m * inv.order
    for x in range(1, m):
        if x % p:
            t = psi_exponent(Fraction(x, m), p) + inv.exponent(x)
            terms.append((int((t * L) % L), 1))
    s = Cyclo.from_exponents(L, terms)
    return s / (sqrt_int(p) ** c)


def gauss_mult(a, mu: LocalChar) -> Cyclo:
    """The Gauss integral  G(a, mu) = int_{Z_p^x} psi(a x) mu(x) dx  (vol Z_p = 1).

    Implemented from the five-case closed form; ``gauss_mult_bruteforce``
    evaluates the integral directly as an oracle.  mu^{-1}(a) means
    mu^{-1} of the unit part of a.
    """
    p = mu.p
    a = as_fraction(a)
    v = ord_p(a, p)
    if mu.is_trivial():
        if v >= 0:
            return Cyclo.rational(1 - Fraction(1, p))
        if v == -1:
            return Cyclo.rational(Fraction(-1, p))
        return Cyclo.rational(0)
    if v != -mu.c:
        return Cyclo.rational(0)
    absa_m12 = sqrt_int(p) ** (-v) / (p ** (-v))  # |a|^{-1/2} = p^{v/2}
    return absa_m12 * eps_half(mu.inverse()) * mu.inverse()(unit_part(a, p))


def gauss_mult_bruteforce(a, mu: LocalChar, depth: int | None = None) -> Cyclo:
    p = mu.p
    a = as_fraction(a)
    v = ord_p(a, p)
    e = max(-v, mu.c, 1) if depth is None else depth
    m = p ** e
    L = m * (mu.order if mu.c else 1)
    terms = []
    for x in range(1, m):
        if x % p:
            t = psi_exponent(a * x, p) + mu.exponent(x)
            terms.append((int((t * L) % L), Fraction(1, m)))
    return Cyclo.from_exponents(L, terms)


# ---------------------------------------------------------------------------
# discriminants and Cohen H

class DiscriminantSplit:
    __slots__ = ("d", "f")

    def __init__(self, d: int, f: Fraction):
        self.d, self.f = d, f

    def __iter__(self):
        return iter((self.d, self.f))

    def __repr__(self):
        return f"DiscriminantSplit(d={self.d}, f={self.f})"


def fundamental_discriminant(n: int) -> int:
    """Discriminant of Q(sqrt n) for a non-square integer n."""
    s = squarefree_part(n)
    if s == 1:
        raise ValueError("square argument has no quadratic field")
    return s if s % 4 == 1 else 4 * s


def discriminant_split(xi) -> DiscriminantSplit:
    """xi = d f^2 with -d the discriminant of Q(sqrt(-xi))."""
    xi = as_fraction(xi)
    if xi <= 0:
        raise ValueError("xi must be positive")
    D = fundamental_discriminant(-xi.numerator * xi.denominator)
    d = -D
    f2 = xi / d
    fn, fd = math.isqrt(f2.numerator), math.isqrt(f2.denominator)
    assert fn * fn == f2.numerator and fd * fd == f2.denominator
    return DiscriminantSplit(d, Fraction(fn, fd))


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    try:
        return fundamental_discriminant(D) == D
    except ValueError:
        return False


def bernoulli(n: int) -> Fraction:
    b = _sym_bernoulli(n)
    q = Fraction(int(b.p), int(b.q))
    # sympy >= 1.12 uses B_1 = +1/2
    return Fraction(-1, 2) if n == 1 else q


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    return sum(Fraction(math.comb(n, j)) * bernoulli(j) * x ** (n - j) for j in range(n + 1))


@lru_cache(maxsize=None)
def generalized_bernoulli(r: int, D: int) -> Fraction:
    """B_{r, chi_D} for a fundamental discriminant D."""
    f = abs(D)
    s = sum(kronecker(D, a) * bernoulli_poly(r, Fraction(a, f)) for a in range(1, f + 1))
    return Fraction(f) ** (r - 1) * s


def cohen_h(r: int, N: int) -> Fraction:
    """Cohen's H(r, N).

    H(r, 0) = zeta(1 - 2r); for N > 0 with (-1)^r N = D f^2, D fundamental,
    H(r, N) = L(1 - r, chi_D) * sum_{d | f} mu(d) chi_D(d) d^(r-1) sigma_{2r-1}(f/d),
    and H(r, N) = 0 when (-1)^r N is not 0 or 1 mod 4.
    """
    if r < 1:
        raise ValueError("r must be positive")
    if N == 0:
        return -bernoulli(2 * r) / (2 * r)
    M = (-1) ** r * N
    if M % 4 not in (0, 1):
        return Fraction(0)
    if squarefree_part(M) == 1:
        # (-1)^r N is a square: D = 1, L(1-r, 1) = zeta(1-r)
        D = 1
        f = math.isqrt(M)
        L = -bernoulli(r) / r if r > 1 else Fraction(-1, 2)
    else:
        D = fundamental_discriminant(M)
        f = math.isqrt(M // D)
        L = -generalized_bernoulli(r, D) / r
    s = sum(moebius(d) * kronecker(D, d) * d ** (r - 1) * sigma(f // d, 2 * r - 1) for d in divisors(f))
    return L * s
