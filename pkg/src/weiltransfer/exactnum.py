"""Exact scalars: rational combinations of roots of unity with a formal sqrt(p).

A value is a finite sum  sum_i  c_i * zeta^{a_i} * sqrt(p)^{d_i}  with c_i
rational, zeta^{a_i} = exp(2*pi*i*a_i) for a rational exponent a_i in [0,1),
and d_i in {0,1}.  sqrt(p) is formal: it is never rewritten as a cyclotomic
sum, but sqrt(p)*sqrt(p) = p.  Exponents are kept in the canonical tensor
basis of the cyclotomic field, one power basis per prime-power factor of the
order, so equality of values is equality of term dictionaries.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _factorize(n: int) -> dict[int, int]:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def _reduce_prime_power(q: int, e: int, j: int) -> tuple[tuple[int, int], ...]:
    """Write zeta_{q^e}^j in the power basis {zeta_{q^e}^k : k < phi(q^e)}.

    Returns ((exponent, sign_coeff), ...). Uses the relation
    zeta^{phi} = -(1 + zeta^{m} + ... + zeta^{(q-2)m}), m = q^(e-1).
    """
    qe = q ** e
    j %= qe
    phi = qe - qe // q
    if j < phi:
        return ((j, 1),)
    m = qe // q
    out: dict[int, int] = {}
    for k in range(q - 1):
        for jj, c in _reduce_prime_power(q, e, j - phi + k * m):
            out[jj] = out.get(jj, 0) - c
            if out[jj] == 0:
                del out[jj]
    return tuple(sorted(out.items()))


@lru_cache(maxsize=None)
def _basis_expand(exp: Fraction) -> tuple[tuple[Fraction, int], ...]:
    """Expand zeta^{exp} as a combination of canonical-basis roots of unity.

    Returns ((exponent, integer_coeff), ...) with each exponent a reduced
    fraction in [0,1) whose prime-power components all lie in the power basis.
    """
    exp = exp % 1
    n = exp.denominator
    if n == 1:
        return ((_ZERO, 1),)
    a = exp.numerator
    # split a/n into prime-power components a_q / q^e
    comps = []
    for q, e in _factorize(n).items():
        qe = q ** e
        aq = (a * pow(n // qe, -1, qe)) % qe
        comps.append((q, e, aq))
    # reduce each component, then take the product of the sums
    terms: dict[Fraction, int] = {_ZERO: 1}
    for q, e, aq in comps:
        qe = q ** e
        reduced = _reduce_prime_power(q, e, aq)
        new: dict[Fraction, int] = {}
        for base_exp, base_c in terms.items():
            for jj, c in reduced:
                key = (base_exp + Fraction(jj, qe)) % 1
                new[key] = new.get(key, 0) + base_c * c
                if new[key] == 0:
                    del new[key]
        terms = new
    return tuple(sorted(terms.items()))


class CycNum:
    """Immutable exact scalar."""

    __slots__ = ("_terms", "_p", "_hash")

    def __init__(self, terms=None, p=None, _reduced=False):
        # terms: mapping {(Fraction exponent, int sqrt_degree): Fraction coeff}
        if terms is None:
            terms = {}
        if not _reduced:
            terms = _canonical(terms)
        self._terms = terms
        self._p = p
        if p is None and any(d for (_, d) in terms):
            raise ValueError("sqrt terms require p")
        self._hash = None

    # ---- constructors ----

    @staticmethod
    def rational(x) -> "CycNum":
        x = Fraction(x)
        if x == 0:
            return CycNum({}, _reduced=True)
        return CycNum({(_ZERO, 0): x}, _reduced=True)

    @staticmethod
    def zeta(order: int, exp: int = 1) -> "CycNum":
        if order <= 0:
            raise ValueError("order must be positive")
        return CycNum({(Fraction(exp % order, order), 0): _ONE})

    @staticmethod
    def sqrtp(p: int, coeff=1) -> "CycNum":
        c = Fraction(coeff)
        if c == 0:
            return CycNum({}, _reduced=True)
        return CycNum({(_ZERO, 1): c}, p=p, _reduced=True)

    # ---- basic predicates ----

    @property
    def p(self):
        return self._p

    @property
    def terms(self):
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(k == (_ZERO, 0) for k in self._terms)

    def as_fraction(self) -> Fraction:
        if not self._terms:
            return _ZERO
        if not self.is_rational():
            raise ValueError("not a rational value: %r" % self)
        return self._terms[(_ZERO, 0)]

    # ---- arithmetic ----

    def _merge_p(self, other) -> int | None:
        if self._p is None:
            return other._p
        if other._p is not None and other._p != self._p:
            raise ValueError("mixing sqrt(p) for different p: %s vs %s"
                             % (self._p, other._p))
        return self._p

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self._merge_p(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, _ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return CycNum(out, p=p, _reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CycNum({k: -c for k, c in self._terms.items()},
                      p=self._p, _reduced=True)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self._merge_p(other)
        out: dict[tuple[Fraction, int], Fraction] = {}
        for (e1, d1), c1 in self._terms.items():
            for (e2, d2), c2 in other._terms.items():
                c = c1 * c2
                d = d1 + d2
                if d == 2:
                    if p is None:
                        raise ValueError("sqrt(p)*sqrt(p) without p")
                    c *= p
                    d = 0
                k = ((e1 + e2) % 1, d)
                s = out.get(k, _ZERO) + c
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return CycNum(out, p=p)

    __rmul__ = __mul__

    def scale(self, x) -> "CycNum":
        x = Fraction(x)
        if x == 0:
            return CycNum({}, _reduced=True)
        return CycNum({k: c * x for k, c in self._terms.items()},
                      p=self._p, _reduced=True)

    def conjugate(self) -> "CycNum":
        out = {}
        for (e, d), c in self._terms.items():
            out[((-e) % 1, d)] = c
        return CycNum(out, p=self._p)

    def abs2(self) -> "CycNum":
        return self * self.conjugate()

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._terms != other._terms:
            return False
        if any(d for (_, d) in self._terms):
            return self._p == other._p
        return True

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        if not self._terms:
            return "CycNum(0)"
        bits = []
        for (e, d), c in sorted(self._terms.items()):
            s = str(c)
            if e:
                s += "*zeta(%d)^%d" % (e.denominator, e.numerator)
            if d:
                s += "*sqrt(%s)" % (self._p,)
            bits.append(s)
        return "CycNum(%s)" % " + ".join(bits)

    # ---- numeric rendering ----

    def to_complex(self, precision_bits: int = 53):
        """Complex approximation, accurate to about 2**-precision_bits."""
        if precision_bits < 24:
            raise ValueError("precision_bits must be >= 24")
        with mpmath.workprec(precision_bits + 16):
            total = mpmath.mpc(0)
            sq = mpmath.sqrt(self._p) if self._p is not None else None
            for (e, d), c in self._terms.items():
                z = mpmath.expjpi(2 * mpmath.mpf(e.numerator) / e.denominator)
                term = z * mpmath.mpf(c.numerator) / c.denominator
                if d:
                    term *= sq
                total += term
            return complex(total)

    # ---- JSON wire format ----

    def to_json(self) -> dict:
        terms = []
        for (e, d), c in sorted(self._terms.items()):
            terms.append({
                "order": e.denominator,
                "exp": e.numerator,
                "num": c.numerator,
                "den": c.denominator,
                "sqrtp": d,
            })
        z = self.to_complex(53) if self._terms else 0j
        return {"terms": terms, "float": [z.real, z.imag]}

    @staticmethod
    def from_json(obj, p=None) -> "CycNum":
        out = {}
        for t in obj["terms"]:
            e = Fraction(t["exp"] % t["order"], t["order"])
            c = Fraction(t["num"], t["den"])
            k = (e, int(t.get("sqrtp", 0)))
            out[k] = out.get(k, _ZERO) + c
        return CycNum(out, p=p)


def _coerce(x):
    if isinstance(x, CycNum):
        return x
    if isinstance(x, (int, Fraction)):
        return CycNum.rational(x)
    return NotImplemented


def _canonical(terms) -> dict:
    out: dict[tuple[Fraction, int], Fraction] = {}
    for (e, d), c in terms.items():
        c = Fraction(c)
        if not c:
            continue
        if d not in (0, 1):
            raise ValueError("sqrt degree must be 0 or 1")
        for be, bc in _basis_expand(Fraction(e)):
            k = (be, d)
            s = out.get(k, _ZERO) + c * bc
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


CYC_ZERO = CycNum.rational(0)
CYC_ONE = CycNum.rational(1)
