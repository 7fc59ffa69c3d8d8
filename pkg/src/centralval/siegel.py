"""Saito-Kurokawa Fourier coefficients and the diagonal pullback.

A degree-2 Siegel form has Fourier coefficients A(B) indexed by
half-integral B = [[n, r/2], [r/2, m]].  The Saito-Kurokawa lift of a
plus-space form h of weight k + 1/2 has

    A(n, r, m) = sum_{a | gcd(n, r, m), gcd(a, N) = 1} a^k chi(a) c((4nm - r^2)/a^2),

and its restriction to diag(tau, tau') has the two-variable expansion
sum_{n,m} b(n, m) q^n q'^m with b(n, m) = sum_{r^2 < 4nm} A(n, r, m).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import Cyclo, DirichletCharacter, divisors
from .halfint import PlusForm
from .qexp import EllipticForm, QSeries, TruncationError


@dataclass(frozen=True)
class HalfIntegralMatrix:
    n: int
    r: int
    m: int

    @property
    def disc(self) -> int:
        return 4 * self.n * self.m - self.r * self.r

    def is_positive_definite(self) -> bool:
        return self.n > 0 and self.disc > 0

    def content(self) -> int:
        return math.gcd(self.n, self.r, self.m)


@dataclass
class SKLift:
    source: PlusForm
    k: int
    N: int = 1
    M: int = 1
    chi: DirichletCharacter = field(default_factory=DirichletCharacter.trivial)

    def __post_init__(self):
        if self.source.k != self.k:
            raise ValueError("source weight must be k + 1/2")
        if self.N % self.chi.conductor():
            raise ValueError("character conductor must divide N")

    def chi_val(self, a: int):
        return self.chi(a) if self.chi.modulus > 1 else 1


def sk_coefficient(lift: SKLift, B: HalfIntegralMatrix) -> Fraction:
    if not B.is_positive_definite():
        raise ValueError(f"{B} is not positive definite")
    if B.disc > lift.source.T:
        raise TruncationError(f"need c({B.disc}), truncation {lift.source.T}")
    out = Fraction(0)
    for a in divisors(B.content()):
        if math.gcd(a, lift.N) == 1:
            out += Fraction(a) ** lift.k * lift.chi_val(a) * lift.source.coeff(B.disc // (a * a))
    return out


class BiSeries:
    """sum_{0 <= n <= T1, 0 <= m <= T2} b(n, m) q^n q'^m, exact coefficients."""

    def __init__(self, T1: int, T2: int, coeffs=None):
        self.T1, self.T2 = T1, T2
        self.b = coeffs if coeffs is not None else [[Fraction(0)] * (T2 + 1) for _ in range(T1 + 1)]

    def __getitem__(self, nm):
        n, m = nm
        if n > self.T1 or m > self.T2:
            raise TruncationError(f"({n}, {m}) beyond truncation ({self.T1}, {self.T2})")
        if n < 0 or m < 0:
            return Fraction(0)
        return self.b[n][m]

    def __eq__(self, other):
        return isinstance(other, BiSeries) and (self.T1, self.T2) == (other.T1, other.T2) and self.b == other.b

    def scale(self, c) -> "BiSeries":
        return BiSeries(self.T1, self.T2, [[x * c for x in row] for row in self.b])

    def is_symmetric(self) -> bool:
        T = min(self.T1, self.T2)
        return all(self.b[n][m] == self.b[m][n] for n in range(T + 1) for m in range(T + 1))

    def items(self):
        for n in range(self.T1 + 1):
            for m in range(self.T2 + 1):
                yield (n, m), self.b[n][m]


def pullback(lift: SKLift, T1: int, T2: int) -> BiSeries:
    """b(n, m) = sum over r^2 < 4nm of A(n, r, m)."""
    if 4 * T1 * T2 > lift.source.T:
        raise TruncationError(f"need c up to {4 * T1 * T2}, truncation {lift.source.T}")
    out = BiSeries(T1, T2)
    for n in range(1, T1 + 1):
        for m in range(1, T2 + 1):
            R = math.isqrt(4 * n * m - 1)
            out.b[n][m] = sum((sk_coefficient(lift, HalfIntegralMatrix(n, r, m)) for r in range(-R, R + 1)),
                              Fraction(0))
    return out


def apply_second_variable(op: str, series: BiSeries, d: int = 1) -> BiSeries:
    """U_d, V_d (with the factor d) or V_d U_d in the second variable only."""
    T1, T2 = series.T1, series.T2
    if op == "U":
        T = T2 // d
        return BiSeries(T1, T, [[series.b[n][d * m] for m in range(T + 1)] for n in range(T1 + 1)])
    if op == "V":
        T = T2 * d
        return BiSeries(T1, T, [[d * series.b[n][m // d] if m % d == 0 else Fraction(0) for m in range(T + 1)]
                                for n in range(T1 + 1)])
    if op == "VU":
        U = apply_second_variable("U", series, d)
        V = apply_second_variable("V", U, d)
        return BiSeries(T1, min(V.T2, T2), [row[: min(V.T2, T2) + 1] for row in V.b])
    raise ValueError(f"unknown operator {op!r}")


def rp_filtered_pullback(lift: SKLift, p: int, T1: int, T2: int) -> BiSeries:
    """Pullback of R_p F = (1/p) sum_j F(tau, z, tau' + j/p).

    On Fourier coefficients the average keeps A(n, r, m) exactly when
    p | m (the b_3 entry), so the pullback is assembled from the surviving
    coefficients only.
    """
    out = BiSeries(T1, T2)
    # (1/p) sum_j e(m j / p) as an exact cyclotomic sum, per residue of m
    avgs = [(Cyclo.from_exponents(p, [((m * j) % p, 1) for j in range(p)]) / p).to_fraction()
            for m in range(p)]
    for n in range(1, T1 + 1):
        for m in range(1, T2 + 1):
            R = math.isqrt(4 * n * m - 1)
            s = Fraction(0)
            for r in range(-R, R + 1):
                B = HalfIntegralMatrix(n, r, m)
                avg = avgs[m % p]
                if avg:
                    s += avg * sk_coefficient(lift, B)
            out.b[n][m] = s
    return out


@dataclass
class RpWitness:
    holds: bool
    literal_holds: bool
    factor: Fraction | None
    rp_side: BiSeries
    vu_side: BiSeries


def rp_pullback_check(lift: SKLift, p: int, T: int) -> RpWitness:
    """(R_p F)|_{H x H} against (id x V_p U_p) F|_{H x H}.

    ``literal_holds`` compares with V_p carrying its factor p; ``holds``
    compares with V_p U_p divided by p (the classical V_p), which is the
    identity the coefficient rule supports.  ``factor`` is the constant
    ratio vu_side / rp_side when one exists.
    """
    rp = rp_filtered_pullback(lift, p, T, T)
    vu = apply_second_variable("VU", pullback(lift, T, T), p)
    literal = rp == vu
    holds = rp == vu.scale(Fraction(1, p))
    ratios = {vu[nm] / x for nm, x in rp.items() if x}
    if any(vu[nm] != 0 for nm, x in rp.items() if x == 0):
        ratios.add(None)
    factor = ratios.pop() if len(ratios) == 1 else None
    return RpWitness(holds, literal, factor, rp, vu)


def synthetic_plus_form(k: int, T: int, seed: int = 0) -> PlusForm:
    """Random integer coefficients on the plus-space support (for bookkeeping tests)."""
    rng = random.Random(seed)
    s = (-1) ** k
    c = [rng.randint(-50, 50) if m and (s * m) % 4 in (0, 1) else 0 for m in range(T + 1)]
    return PlusForm(k, QSeries(c))


@dataclass
class Projection:
    lam: Fraction
    residual: Fraction


def project_level1(series: BiSeries, g: EllipticForm) -> Projection:
    """lambda with b = lambda g x g; the residual must vanish exactly."""
    a1 = g.a(1)
    if a1 == 0:
        raise ValueError("g must have a(1) != 0")
    lam = series[1, 1] / (a1 * a1)
    res = Fraction(0)
    for (n, m), x in series.items():
        d = abs(x - lam * g.a(n) * g.a(m))
        res = max(res, d)
    if res != 0:
        raise ArithmeticError(f"pullback is not proportional to g x g (residual {res})")
    return Projection(lam, res)
