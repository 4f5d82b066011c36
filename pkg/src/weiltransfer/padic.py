"""Exact p-adic utilities on rational numbers, for odd primes p.

Rationals stand in for elements of Q_p.  The additive character psi has
conductor Z_p: psi(x) = exp(2*pi*i*{x}_p) where {x}_p is the p-power
fractional part.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import BadPrime
from .exactnum import CycNum, CYC_ONE

_PRIME_CACHE: set[int] = set()


def check_odd_prime(p: int) -> None:
    if p in _PRIME_CACHE:
        return
    if p < 3 or p % 2 == 0:
        raise BadPrime("p must be an odd prime, got %s" % (p,))
    d = 3
    while d * d <= p:
        if p % d == 0:
            raise BadPrime("p must be an odd prime, got %s" % (p,))
        d += 2
    _PRIME_CACHE.add(p)


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero rational; raises on 0."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero is undefined")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def abs_p(x, p: int) -> Fraction:
    """|x|_p as an exact rational; |0|_p = 0."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    v = valuation(x, p)
    return Fraction(1, p ** v) if v >= 0 else Fraction(p ** (-v))


def unit_part(x, p: int) -> Fraction:
    """x / p^val(x), a p-adic unit."""
    x = Fraction(x)
    return x / Fraction(p) ** valuation(x, p)


def frac_part(x, p: int) -> Fraction:
    """The p-power fractional part {x}_p in [0,1): x - {x}_p is in Z_(p)."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    den = x.denominator
    k = 0
    while den % p == 0:
        den //= p
        k += 1
    if k == 0:
        return Fraction(0)
    pk = p ** k
    # x = num / (den * p^k) with den prime to p
    a = (x.numerator * pow(den, -1, pk)) % pk
    return Fraction(a, pk)


def cell_rep(x, level: int, p: int) -> Fraction:
    """Canonical representative of x mod p^level * Z_(p), in [0, p^level).

    The representative lies in Z[1/p]: it is the truncation of the p-adic
    digit expansion of x below p^level.
    """
    pk = Fraction(p) ** level
    return frac_part(Fraction(x) / pk, p) * pk


def psi_char(x, p: int) -> CycNum:
    """The additive character psi(x) = e^{2 pi i {x}_p} as an exact scalar."""
    check_odd_prime(p)
    f = frac_part(x, p)
    if f == 0:
        return CYC_ONE
    return CycNum.zeta(f.denominator, f.numerator)


def legendre(u: int, p: int) -> int:
    """Legendre symbol (u|p) for u prime to p."""
    check_odd_prime(p)
    u = int(u) % p
    if u == 0:
        raise ValueError("legendre symbol of a non-unit")
    s = pow(u, (p - 1) // 2, p)
    return 1 if s == 1 else -1


def legendre_frac(x, p: int) -> int:
    """Legendre symbol of the mod-p reduction of a p-adic unit rational."""
    x = Fraction(x)
    if valuation(x, p) != 0:
        raise ValueError("not a p-adic unit: %s" % (x,))
    return legendre(x.numerator * pow(x.denominator, -1, p) % p, p)


def hilbert_symbol(x, y, p: int) -> int:
    """Hilbert symbol (x, y)_p for an odd prime p.

    (x,y) = (-1)^{alpha*beta*(p-1)/2} * (u|p)^beta * (v|p)^alpha
    for x = p^alpha u, y = p^beta v.
    """
    check_odd_prime(p)
    x, y = Fraction(x), Fraction(y)
    if x == 0 or y == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    a, b = valuation(x, p), valuation(y, p)
    u, v = unit_part(x, p), unit_part(y, p)
    out = 1
    if (a * b) % 2 == 1 and (p - 1) // 2 % 2 == 1:
        out = -out
    if b % 2 == 1:
        out *= legendre_frac(u, p)
    if a % 2 == 1:
        out *= legendre_frac(v, p)
    return out


def ball_volume(level: int, n: int, p: int) -> Fraction:
    """Additive volume of a coset c + p^level * Z_p^n (self-dual measure)."""
    return Fraction(1, 1) * Fraction(p) ** (-level * n)


def p_power_half(p: int, k: int) -> CycNum:
    """p^{k/2} as an exact scalar: rational for even k, rational*sqrt(p) else."""
    if k % 2 == 0:
        return CycNum.rational(Fraction(p) ** (k // 2))
    return CycNum.sqrtp(p, Fraction(p) ** ((k - 1) // 2))
