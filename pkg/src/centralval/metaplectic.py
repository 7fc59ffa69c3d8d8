"""The metaplectic double cover of SL2(Q_p), the Weil representation on
finite Schwartz tables, and exact integration over SL2(Z_p).

p-adic numbers are exact rationals; every query made of them (valuation,
residue of the unit part) is decidable.  Group elements are 2x2 tuples
of Fractions.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import (Cyclo, Mono, MonoSum, _reduce, as_fraction, hilbert_symbol,
                    legendre, ord_p, psi_exponent, residue, sqrt_int, unit_part)

F = Fraction


# ---------------------------------------------------------------------------
# SL2 over Q

class SL2(tuple):
    """Immutable 2x2 matrix (a, b, c, d) over Q; det is not forced to 1 so
    that GL2 elements can share the type, but ``check_sl2`` asserts it."""

    def __new__(cls, a, b, c, d):
        return super().__new__(cls, (F(a), F(b), F(c), F(d)))

    a = property(lambda s: s[0])
    b = property(lambda s: s[1])
    c = property(lambda s: s[2])
    d = property(lambda s: s[3])

    def __mul__(self, o):
        a, b, c, d = self
        e, f, g, h = o
        return SL2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def det(self):
        return self[0] * self[3] - self[1] * self[2]

    def inv(self):
        a, b, c, d = self
        D = a * d - b * c
        return SL2(d / D, -b / D, -c / D, a / D)

    def check_sl2(self):
        if self.det() != 1:
            raise ValueError(f"determinant {self.det()} != 1")
        return self

    def __repr__(self):
        return "[[{}, {}], [{}, {}]]".format(*self)


def t_el(a):
    a = F(a)
    return SL2(a, 0, 0, 1 / a)


def u_el(b):
    return SL2(1, b, 0, 1)


def n_el(x):
    return SL2(1, 0, x, 1)


S = SL2(0, 1, -1, 0)
I2 = SL2(1, 0, 0, 1)
MINUS_I = SL2(-1, 0, 0, -1)


def alpha(n: int, p: int) -> SL2:
    return t_el(F(p) ** n)


def beta(m: int, p: int) -> SL2:
    return S * alpha(m, p)


def nu(gamma, p: int) -> SL2:
    return n_el(F(gamma) * p)


# ---------------------------------------------------------------------------
# cocycle and splitting

@lru_cache(maxsize=1 << 18)
def hs(a: Fraction, b: Fraction, p: int) -> int:
    return hilbert_symbol(a, b, p)


def x_of(g: SL2) -> Fraction:
    return g[2] if g[2] != 0 else g[3]


def s_p(g: SL2, p: int) -> int:
    c, d = g[2], g[3]
    if c != 0 and d != 0 and ord_p(c, p) % 2:
        return hs(c, d, p)
    return 1


def cocycle(g1: SL2, g2: SL2, p: int) -> int:
    x3 = x_of(g1 * g2)
    return hs(x_of(g1) * x3, x_of(g2) * x3, p)


class Meta(tuple):
    """Element [g, eps] of the metaplectic cover of SL2(Q_p)."""

    def __new__(cls, g: SL2, eps: int = 1, p: int = 3):
        return super().__new__(cls, (g, eps, p))

    g = property(lambda s: s[0])
    eps = property(lambda s: s[1])
    p = property(lambda s: s[2])

    def __mul__(self, o):
        if self.p != o.p:
            raise ValueError("different primes")
        return Meta(self.g * o.g, cocycle(self.g, o.g, self.p) * self.eps * o.eps, self.p)

    def inv(self):
        gi = self.g.inv()
        # [g,e][g^-1,e'] = [1, eps(g,g^-1) e e'] = [1,1]
        return Meta(gi, cocycle(self.g, gi, self.p) * self.eps, self.p)

    @classmethod
    def split(cls, k: SL2, p: int):
        """Image of k in SL2(Z_p) under the canonical splitting."""
        return cls(k, s_p(k, p), p)

    def __repr__(self):
        return f"[{self.g!r}, {self.eps:+d}]"


def word(p: int, *gens: SL2) -> Meta:
    """Metaplectic product of the lifts [g, 1] of the given SL2 elements."""
    out = Meta(I2, 1, p)
    for g in gens:
        out = out * Meta(g, 1, p)
    return out


# ---------------------------------------------------------------------------
# Weil index and chi_psi.  A psi-descriptor is (p, t): x -> psi_p(t x).

def _root_mono(z: complex, order: int = 8) -> Mono:
    k = round(cmath.phase(z) / (2 * math.pi) * order) % order
    if abs(z / abs(z) - cmath.exp(2j * math.pi * k / order)) > 1e-9:
        raise ArithmeticError(f"{z} is not a root of unity of order {order}")
    return Mono(1, F(k, order))


def weil_index_numeric(t, p: int) -> Mono:
    """gamma(psi_t) as the phase of a normalized quadratic Gauss integral.

    The integral of psi(t x^2) over p^-n Z_p stabilizes in phase; it is
    evaluated as a finite exponential sum and the phase is snapped to an
    eighth root of unity.
    """
    t = as_fraction(t)
    j = ord_p(t, p)
    # shells beyond p^-n Z_p integrate to zero once ord(t x^2) <= -3 (p odd), -5 (p = 2)
    n = -((-(j + (5 if p == 2 else 3))) // 2)
    E = 2 * n - j
    m = p ** E
    if m > 1 << 18:
        raise ValueError("weil_index_numeric: modulus too large")
    tt = t / F(p) ** (2 * n)
    vals = [psi_exponent(tt * k * k, p) for k in range(m)]
    z = sum(cmath.exp(2j * math.pi * float(v)) for v in vals)
    return _root_mono(z)


def weil_index(t, p: int) -> Mono:
    """gamma(psi_t); closed form at odd p, Gauss-sum phase table at p = 2."""
    t = as_fraction(t)
    if p == 2:
        return _weil_index_2(t)
    j = ord_p(t, p)
    if j % 2 == 0:
        return Mono(1)
    u = unit_part(t, p)
    # G(-u, p) / sqrt(p) = (-u/p) * (1 if p = 1 mod 4 else i)
    ph = F(0) if p % 4 == 1 else F(1, 4)
    if legendre(-u, p) < 0:
        ph += F(1, 2)
    return Mono(1, ph)


@lru_cache(maxsize=None)
def _weil_index_2_cached(j_mod2: int, u8: int) -> Mono:
    return weil_index_numeric(F(2) ** j_mod2 * u8, 2)


def _weil_index_2(t: Fraction) -> Mono:
    j = ord_p(t, 2)
    u8 = residue(unit_part(t, 2), 8)
    return _weil_index_2_cached(j % 2, u8)


def chi_psi(a, t, p: int) -> Mono:
    """chi_psi(a) = (a, -1)_p gamma(psi^a) / gamma(psi) for psi = psi_t."""
    a, t = as_fraction(a), as_fraction(t)
    g1 = weil_index(a * t, p)
    g0 = weil_index(t, p)
    return g1 * g0.conj() * hs(a, F(-1), p)


# ---------------------------------------------------------------------------
# Schwartz tables

class TableTooLarge(RuntimeError):
    pass


class SchwartzTable:
    """Function on Q_p supported on p^-L Z_p and constant on cosets of p^m Z_p.

    values[k] is the value at x = k / p^L for k in range(p^(L+m)).
    Negative L or m are allowed as long as L + m >= 0.
    """

    MAX_SIZE = 1 << 17

    def __init__(self, p: int, L: int, m: int, values):
        if L + m < 0:
            raise ValueError("need L + m >= 0")
        if p ** (L + m) != len(values):
            raise ValueError("table size mismatch")
        if len(values) > self.MAX_SIZE:
            raise TableTooLarge(f"table of size {len(values)} exceeds the guard")
        self.p, self.L, self.m = p, L, m
        self.values = [v if isinstance(v, Cyclo) else Cyclo._coerce(v) for v in values]

    @classmethod
    def indicator(cls, p: int, j: int = 0) -> "SchwartzTable":
        """1 on p^j Z_p."""
        return cls(p, -j, j, [Cyclo.rational(1)])

    @classmethod
    def from_function(cls, p: int, L: int, m: int, fn) -> "SchwartzTable":
        return cls(p, L, m, [fn(F(k, 1) / F(p) ** L) for k in range(p ** (L + m))])

    def __call__(self, x) -> Cyclo:
        x = as_fraction(x)
        p = self.p
        if x != 0 and ord_p(x, p) < -self.L:
            return Cyclo.rational(0)
        N = p ** (self.L + self.m)
        k = residue(x * F(p) ** self.L, N) if N > 1 else 0
        return self.values[k]

    def refine(self, L: int, m: int) -> "SchwartzTable":
        if L < self.L or m < self.m:
            raise ValueError("refine only enlarges")
        if (L, m) == (self.L, self.m):
            return self
        p = self.p
        scale = F(p) ** L
        return SchwartzTable(p, L, m, [self(F(k) / scale) for k in range(p ** (L + m))])

    def scale(self, c) -> "SchwartzTable":
        c = Cyclo._coerce(c)
        return SchwartzTable(self.p, self.L, self.m, [v * c for v in self.values])

    def __add__(self, o):
        L, m = max(self.L, o.L), max(self.m, o.m)
        a, b = self.refine(L, m), o.refine(L, m)
        return SchwartzTable(self.p, L, m, [x + y for x, y in zip(a.values, b.values)])

    def __sub__(self, o):
        return self + o.scale(-1)

    def reflect(self) -> "SchwartzTable":
        p = self.p
        return SchwartzTable.from_function(p, self.L, self.m, lambda x: self(-x))

    def conj(self):
        return SchwartzTable(self.p, self.L, self.m, [v.conj() for v in self.values])

    def is_zero(self):
        return not any(self.values)

    def __eq__(self, o):
        L, m = max(self.L, o.L), max(self.m, o.m)
        return self.refine(L, m).values == o.refine(L, m).values

    __hash__ = None

    def __repr__(self):
        return f"SchwartzTable(p={self.p}, L={self.L}, m={self.m}, size={len(self.values)})"


def schwartz_inner(f1: SchwartzTable, f2: SchwartzTable, vol_Zp=1) -> Cyclo:
    """int f1 conj(f2) dx with vol(Z_p) = vol_Zp (default 1)."""
    L, m = max(f1.L, f2.L), max(f1.m, f2.m)
    a, b = f1.refine(L, m), f2.refine(L, m)
    acc = Cyclo.rational(0)
    for x, y in zip(a.values, b.values):
        if x and y:
            acc = acc + x * y.conj()
    cell = Cyclo._coerce(vol_Zp) * (F(a.p) ** (-m))
    return acc * cell


def _measure_factor(t: Fraction, p: int) -> Cyclo:
    """|2t|_p^(1/2): the self-dual measure for (x, y) -> psi_t(2xy) relative to vol(Z_p)=1."""
    v = ord_p(2 * t, p)
    return (sqrt_int(p) ** (-v)) if v else Cyclo.rational(1)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _as_entries(values, M: int):
    """Nonzero coefficients of the values written as polynomials in zeta_M
    over a common denominator: arrays (row, position, coefficient), and D."""
    D = 1
    for v in values:
        D = _lcm(D, v.den)
    rows, pos, coef = [], [], []
    for i, v in enumerate(values):
        step = M // v.n
        f = D // v.den
        for e, c in enumerate(v.num):
            if c:
                rows.append(i)
                pos.append(e * step)
                coef.append(c * f)
    return np.array(rows, dtype=np.int64), np.array(pos, dtype=np.int64), coef, D


def fourier(phi: SchwartzTable, t) -> SchwartzTable:
    """x -> int phi(y) psi_t(2xy) dy with the self-dual measure (no gamma factor)."""
    t = as_fraction(t)
    p = phi.p
    v = ord_p(2 * t, p)
    L, m = phi.L, phi.m
    L2, m2 = m + v, L - v
    N = p ** (L + m)
    U = unit_part(2 * t, p)
    Ures = residue(U, N) if N > 1 else 0
    M = N
    for val in phi.values:
        M = _lcm(M, val.n)
    rows, pos, coef, D = _as_entries(phi.values, M)
    small = sum(abs(c) for c in coef) < 1 << 62
    coef = np.array(coef, dtype=np.int64 if small else object)
    # psi_t(2 x y) for x = k2/p^L2, y = k/p^L equals zeta_N^(-U k k2)
    step = M // N
    base = _measure_factor(t, p) * (F(p) ** (-m))
    out = []
    for k2 in range(N):
        shift = ((-Ures * k2 * rows) % N) * step
        acc = np.zeros(M, dtype=coef.dtype)
        np.add.at(acc, (pos + shift) % M, coef)
        out.append(Cyclo(M, _reduce([int(x) for x in acc], M), D) * base)
    return SchwartzTable(p, L2, m2, out)


def _act_t(phi: SchwartzTable, a: Fraction, t: Fraction) -> SchwartzTable:
    p = phi.p
    j = ord_p(a, p)
    L2, m2 = phi.L + j, phi.m - j
    scale = F(p) ** L2
    vals = [phi(a * F(k) / scale) for k in range(p ** (L2 + m2))]
    c = chi_psi(a, t, p) * Mono.p_power(p, -j)
    return SchwartzTable(p, L2, m2, vals).scale(c.to_cyclo())


def _act_u(phi: SchwartzTable, b: Fraction, t: Fraction) -> SchwartzTable:
    if b == 0:
        return phi
    p = phi.p
    ob = ord_p(b * t, p)
    m2 = max(phi.m, phi.L - ob, -ob)
    ph = phi.refine(phi.L, m2)
    scale = F(p) ** ph.L
    vals = []
    for k, val in enumerate(ph.values):
        if val:
            x = F(k) / scale
            e = psi_exponent(t * b * x * x, p)
            val = val.times_zeta(e.denominator, e.numerator)
        vals.append(val)
    return SchwartzTable(p, ph.L, m2, vals)


def _act_s(phi: SchwartzTable, t: Fraction) -> SchwartzTable:
    return fourier(phi, t).scale(weil_index(t, phi.p).to_cyclo())


def bruhat(g: SL2):
    """Factor g as a list of generator tags whose [.,1]-lifts multiply to [g, eps'].

    Returns (gens, sl2_list) with gens in {('t', a), ('u', b), ('s',)}.
    """
    a, b, c, d = g
    if c == 0:
        return [("t", a), ("u", b / a)]
    # g = u(a/c) t(-1/c) s u(d/c)
    return [("u", a / c), ("t", -1 / c), ("s",), ("u", d / c)]


def _gen_matrix(gen) -> SL2:
    if gen[0] == "t":
        return t_el(gen[1])
    if gen[0] == "u":
        return u_el(gen[1])
    return S


def weil_act(gt: Meta, phi: SchwartzTable, t) -> SchwartzTable:
    """omega_psi(gt) phi for psi = psi_t, via the rules on [t(a),1], [u(b),1], [s,1]."""
    t = as_fraction(t)
    p = gt.p
    gens = bruhat(gt.g)
    prod = Meta(I2, 1, p)
    for gen in gens:
        prod = prod * Meta(_gen_matrix(gen), 1, p)
    assert prod.g == gt.g
    sign = prod.eps * gt.eps
    out = phi
    for gen in reversed(gens):
        if gen[0] == "t":
            out = _act_t(out, F(gen[1]), t)
        elif gen[0] == "u":
            out = _act_u(out, F(gen[1]), t)
        else:
            out = _act_s(out, t)
    return out if sign == 1 else out.scale(-1)


def weil_inner(gt: Meta, phi: SchwartzTable, t, phi2: SchwartzTable | None = None,
               vol_Zp=1) -> Cyclo:
    """<omega_psi(gt) phi, phi2>, folding the last unipotent factor into the sum.

    omega(u(b)) only multiplies by psi_t(b x^2), so its fine-resolution
    table never needs to exist: the products are accumulated as exponents
    of roots of unity and reduced once.
    """
    t = as_fraction(t)
    p = gt.p
    phi2 = phi if phi2 is None else phi2
    gens = bruhat(gt.g)
    if gens[0][0] != "u" or len(gens) == 1:
        return schwartz_inner(weil_act(gt, phi, t), phi2, vol_Zp)
    prod = Meta(I2, 1, p)
    for gen in gens:
        prod = prod * Meta(_gen_matrix(gen), 1, p)
    sign = prod.eps * gt.eps
    X = phi
    for gen in reversed(gens[1:]):
        if gen[0] == "t":
            X = _act_t(X, F(gen[1]), t)
        elif gen[0] == "u":
            X = _act_u(X, F(gen[1]), t)
        else:
            X = _act_s(X, t)
    b = F(gens[0][1])
    L = max(X.L, phi2.L)
    m = max(X.m, phi2.m)
    if b != 0:
        ob = ord_p(b * t, p)
        m = max(m, L - ob, -ob)
    scale = F(p) ** L
    acc = {}
    for k in range(p ** (L + m)):
        x = F(k) / scale
        y = phi2(x)
        if not y:
            continue
        xv = X(x)
        if not xv:
            continue
        e = psi_exponent(t * b * x * x, p) if b else F(0)
        val = xv * y.conj()
        for j, c in enumerate(val.num):
            if c:
                key = (F(j, val.n) + e) % 1
                acc[key] = acc.get(key, 0) + F(c, val.den)
    if not acc:
        return Cyclo.rational(0)
    n = 1
    for key in acc:
        n = _lcm(n, key.denominator)
    total = Cyclo.from_exponents(n, [(int(key * n), q) for key, q in acc.items()])
    return total * (sign * F(p) ** (-m)) * Cyclo._coerce(vol_Zp)


# ---------------------------------------------------------------------------
# exact integration over SL2(Z_p)

class NotCellConstant(RuntimeError):
    pass


class TailNotGeometric(RuntimeError):
    pass


def _units(p: int, r: int):
    m = p ** r
    return [u for u in range(1, m) if u % p]


def _level_sum(f, p: int, i: int, j: int, r: int) -> MonoSum:
    """Sum of f over cells with ord(c) = i, ord(d) = j at residue depth r."""
    acc = MonoSum()
    vol = F(1, p ** (i + j + 2 * r))
    cp, dp = p ** i, p ** j
    U = _units(p, r)
    for u in U:
        c = F(cp * u)
        for w in U:
            val = f(c, F(dp * w))
            if val is not None:
                acc.add(val, vol)
    return acc


def _same(a: MonoSum, b: MonoSum) -> bool:
    ka = {k: v for k, v in a.terms.items() if v}
    kb = {k: v for k, v in b.terms.items() if v}
    if ka == kb:
        return True
    return a.to_cyclo() == b.to_cyclo()


def _scaled(a: MonoSum, q) -> MonoSum:
    out = MonoSum()
    out.merge(a, q)
    return out


def integrate_K(f, p: int, r: int = 1, cutoff: int = 8, period: int = 2,
                ratio=None, check_depth: bool = False) -> Cyclo:
    """Exact integral over SL2(Z_p) (total volume 1 - p^-2) of a bottom-row function.

    f(c, d) receives integer representatives of a primitive pair and
    returns a Mono (or None for zero).  The pushforward of Haar measure
    to bottom rows is the additive measure on primitive pairs, so cells
    {ord c = i, c/p^i = u mod p^r} x {ord d = j, d/p^j = w mod p^r} with
    min(i, j) = 0 have volume p^(-i-j-2r).  Valuations up to ``cutoff``
    are summed; beyond that each branch is a geometric series with
    ratio ``ratio`` (default p^-period) over ``period`` steps, which is
    checked on the extra levels.
    """
    total = _integrate(f, p, r, cutoff, period, ratio)
    if check_depth:
        other = _integrate(f, p, r + 1, cutoff, period, ratio)
        if total != other:
            raise NotCellConstant(f"depth {r} and {r + 1} disagree: {total} vs {other}")
    return total


def _integrate(f, p, r, cutoff, period, ratio):
    if ratio is None:
        ratio = F(1, p ** period)
    acc = _level_sum(f, p, 0, 0, r)
    for branch in (0, 1):
        levels = []
        for v in range(1, cutoff + 3 * period):
            i, j = (v, 0) if branch == 0 else (0, v)
            levels.append(_level_sum(f, p, i, j, r))
        # levels[v-1] is valuation v
        head = levels[:cutoff - 1]
        for lv in head:
            acc.merge(lv)
        tail_start = levels[cutoff - 1: cutoff - 1 + period]
        for q in range(period):
            a = levels[cutoff - 1 + q]
            b = levels[cutoff - 1 + q + period]
            c = levels[cutoff - 1 + q + 2 * period] if cutoff - 1 + q + 2 * period < len(levels) else None
            if not _same(_scaled(a, ratio), b) or (c is not None and not _same(_scaled(b, ratio), c)):
                raise TailNotGeometric(f"branch {branch}: level {cutoff + q} -> {cutoff + q + period} "
                                       f"is not geometric with ratio {ratio}")
        geo = 1 / (1 - F(ratio))
        for lv in tail_start:
            acc.merge(lv, geo)
    return acc.to_cyclo()


# ---------------------------------------------------------------------------
# slow oracle: full enumeration of SL2(Z/p^e)

def enumerate_sl2(p: int, e: int):
    """All elements of SL2(Z/p^e Z) as int64 arrays (a, b, c, d)."""
    m = p ** e
    r = np.arange(m, dtype=np.int64)
    C, D = np.meshgrid(r, r, indexing="ij")
    C, D = C.ravel(), D.ravel()
    prim = (C % p != 0) | (D % p != 0)
    C, D = C[prim], D[prim]
    # particular solution (a0, b0) of a d - b c = 1
    a0 = np.zeros_like(C)
    b0 = np.zeros_like(C)
    dunit = D % p != 0
    inv_d = np.array([pow(int(x), -1, m) if x % p else 0 for x in D], dtype=np.int64)
    inv_c = np.array([pow(int(x), -1, m) if x % p else 0 for x in C], dtype=np.int64)
    a0[dunit] = inv_d[dunit]
    b0[~dunit] = (-inv_c[~dunit]) % m
    T = r
    A = (a0[:, None] + T[None, :] * C[:, None]) % m
    B = (b0[:, None] + T[None, :] * D[:, None]) % m
    Cc = np.repeat(C[:, None], m, axis=1)
    Dd = np.repeat(D[:, None], m, axis=1)
    return A.ravel(), B.ravel(), Cc.ravel(), Dd.ravel()


def enumeration_volume(p: int, e: int, predicate) -> Fraction:
    """Haar volume (vol SL2(Z_p) = 1 - p^-2) of a set defined mod p^e."""
    A, B, C, D = enumerate_sl2(p, e)
    mask = predicate(A, B, C, D, p ** e)
    return F(int(mask.sum()), len(A)) * (1 - F(1, p * p))
