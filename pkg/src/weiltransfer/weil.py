"""Oscillator-type SL2 action on Schwartz functions of a quadratic space.

The three generators act by a quadratic phase (unipotent), a scaled dilation
twisted by the discriminant character (torus), and a normalized Fourier
transform (Weyl element).  General rational SL2 elements act through an
exact Bruhat factorization into those generators.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import (MetaplecticAmbiguity, NonStabilizing,
                     NormalizationFailure, NotSelfDual)
from .exactnum import CycNum, CYC_ONE
from .padic import p_power_half, valuation
from .quadspace import QuadSpace
from .schwartz import (SchwartzFn, _canon_center, fourier,
                       phase_mul_quadratic)


class SL2Elt:
    """A rational 2x2 matrix of determinant 1."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b = Fraction(a), Fraction(b)
        self.c, self.d = Fraction(c), Fraction(d)
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant is not 1")

    def __mul__(self, other: "SL2Elt") -> "SL2Elt":
        return SL2Elt(self.a * other.a + self.b * other.c,
                      self.a * other.b + self.b * other.d,
                      self.c * other.a + self.d * other.c,
                      self.c * other.b + self.d * other.d)

    def __eq__(self, other):
        if not isinstance(other, SL2Elt):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == \
            (other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __repr__(self):
        return "SL2Elt(%s, %s, %s, %s)" % (self.a, self.b, self.c, self.d)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b),
                "c": str(self.c), "d": str(self.d)}

    @staticmethod
    def from_json(data) -> "SL2Elt":
        return SL2Elt(*(Fraction(data[k]) for k in "abcd"))

    @staticmethod
    def identity() -> "SL2Elt":
        return SL2Elt(1, 0, 0, 1)


def elt_n(b) -> SL2Elt:
    return SL2Elt(1, b, 0, 1)


def elt_t(a) -> SL2Elt:
    return SL2Elt(a, 0, 0, Fraction(1) / Fraction(a))


ELT_W = SL2Elt(0, 1, -1, 0)


def bruhat_factor(g: SL2Elt):
    """Factor g into torus/unipotent/Weyl atoms, left to right.

    c = 0: g = t(a) n(b/a).  c != 0: g = n(a/c) w t(-c) n(d/c); the torus
    entry is -c, not 1/c, which is what actually recomposes to g with
    w = [[0,1],[-1,0]].
    """
    a, b, c, d = g.entries()
    if c == 0:
        return [("t", a), ("n", b / a)]
    return [("n", a / c), ("w",), ("t", -c), ("n", d / c)]


def recompose(factors) -> SL2Elt:
    out = SL2Elt.identity()
    for f in factors:
        if f[0] == "n":
            out = out * elt_n(f[1])
        elif f[0] == "t":
            out = out * elt_t(f[1])
        elif f[0] == "w":
            out = out * ELT_W
        else:
            raise ValueError("unknown factor %r" % (f[0],))
    return out


# ---- Weil index ----


def diagonalize_unimodular(Q: QuadSpace):
    """Unit diagonal entries d_i with the form equivalent to (1/2) sum d_i
    x_i^2 over the p-adic integers; symmetric Gaussian elimination, using
    x_i += x_j to create a unit pivot when the diagonal has none."""
    p, n = Q.p, Q.n
    S = [[Fraction(x) for x in row] for row in Q.gram]
    diag = []
    idx = list(range(n))
    while idx:
        piv = None
        for i in idx:
            if S[i][i] != 0 and valuation(S[i][i], p) == 0:
                piv = i
                break
        if piv is None:
            # some off-diagonal entry is a unit (det is a unit)
            found = None
            for i in idx:
                for j in idx:
                    if i != j and S[i][j] != 0 and \
                            valuation(S[i][j], p) == 0:
                        found = (i, j)
                        break
                if found:
                    break
            if found is None:
                raise NotSelfDual("no unit pivot available")
            i, j = found
            # x_i -> x_i + x_j: S[i][i] += 2 S[i][j] + S[j][j], a unit
            for k in range(n):
                S[i][k] += S[j][k]
            for k in range(n):
                S[k][i] += S[k][j]
            piv = i
        d = S[piv][piv]
        diag.append(d)
        idx.remove(piv)
        for i in idx:
            r = S[i][piv] / d
            if r == 0:
                continue
            for k in range(n):
                S[i][k] -= r * S[piv][k]
            for k in range(n):
                S[k][i] -= r * S[k][piv]
    return diag


@lru_cache(maxsize=None)
def _gauss_sum_sq(p: int, unum: int, uden: int, e: int) -> CycNum:
    """sum over x mod p^e of psi(u x^2 / p^e); closed two-step recursion."""
    u = Fraction(unum, uden)
    if e == 0:
        return CYC_ONE
    if e == 1:
        total = CycNum.rational(0)
        for x in range(p):
            a = Fraction(u * x * x, p) % 1
            total = total + CycNum.zeta(a.denominator, a.numerator)
        return total
    return CycNum.rational(p) * _gauss_sum_sq(p, unum, uden, e - 2)


def _lattice_gauss_integral(Q: QuadSpace, k: int) -> CycNum:
    """g_k = integral over p^{-k} L of psi(q(x)) dx, exactly."""
    p, n = Q.p, Q.n
    diag = diagonalize_unimodular(Q)
    total = CycNum.rational(Fraction(1, p ** (k * n)))
    for d in diag:
        u = Fraction(d, 2)
        total = total * _gauss_sum_sq(p, u.numerator, u.denominator, 2 * k)
    return total


def weil_index(Q: QuadSpace, k_max: int = 6) -> CycNum:
    """Stabilized normalized Gauss integral gamma over growing lattices.

    gamma = g_k / sqrt(abs2(g_k)) once g_k stops moving; the modulus must be
    a p-power (half-powers use the formal sqrt(p) symbol).
    """
    prev = None
    for k in range(1, k_max + 1):
        cur = _lattice_gauss_integral(Q, k)
        if prev is not None and cur == prev:
            g = cur
            a2 = g.abs2().as_fraction()
            if a2 == 0:
                raise NormalizationFailure("vanishing Gauss integral")
            m = valuation(a2, Q.p)
            if a2 != Fraction(Q.p) ** m:
                raise NormalizationFailure(
                    "modulus %s is not a p-power" % (a2,))
            gamma = g * CycNum.rational(Fraction(1, Q.p ** m)) \
                * p_power_half(Q.p, m)
            sq = gamma * gamma
            want = CycNum.rational(Q.chi(-1))
            if sq != want:
                raise NormalizationFailure(
                    "gamma^2 = %r, expected chi(-1)" % (sq,))
            return gamma
        prev = cur
    raise NonStabilizing("Gauss integrals g_k did not stabilize", k_max)


# ---- generator actions ----


def act_unipotent(phi: SchwartzFn, b, Q: QuadSpace) -> SchwartzFn:
    """(n(b) phi)(v) = psi(b q(v)) phi(v)."""
    return phase_mul_quadratic(phi, b, Q.gram)


def act_torus(phi: SchwartzFn, a, Q: QuadSpace) -> SchwartzFn:
    """(t(a) phi)(v) = |a|^{n/2} chi(a) phi(a v)."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("torus entry must be nonzero")
    n = Q.n
    scale = p_power_half(Q.p, -n * valuation(a, Q.p))
    if Q.chi(a) == -1:
        scale = scale.scale(-1)
    return phi.dilate(a).scalar_mul(scale)


def act_weyl(phi: SchwartzFn, Q: QuadSpace) -> SchwartzFn:
    """(w phi) = gamma * Fourier transform of phi."""
    gamma = weil_index(Q)
    return fourier(phi, Q.gram).scalar_mul(gamma)


def act_factors(phi: SchwartzFn, factors, Q: QuadSpace) -> SchwartzFn:
    """Apply a left-to-right atom word: the leftmost atom acts last."""
    for f in reversed(factors):
        if f[0] == "n":
            phi = act_unipotent(phi, f[1], Q)
        elif f[0] == "t":
            phi = act_torus(phi, f[1], Q)
        elif f[0] == "w":
            phi = act_weyl(phi, Q)
        else:
            raise ValueError("unknown factor %r" % (f[0],))
    return phi


def apply_isometry(phi: SchwartzFn, h, Q: QuadSpace) -> SchwartzFn:
    """phi composed with h^{-1} for an integer matrix h with h^T S h = S and
    unit determinant; such h preserves every lattice cell structure, so the
    cells just get moved."""
    n = Q.n
    S = Q.gram
    for i in range(n):
        for j in range(n):
            lhs = sum(Fraction(h[k][i]) * S[k][m] * h[m][j]
                      for k in range(n) for m in range(n))
            if lhs != S[i][j]:
                raise ValueError("h is not an isometry of the form")
    out = {}
    for (c, k), coeff in phi.cells.items():
        hc = tuple(sum(Fraction(h[i][j]) * c[j] for j in range(n))
                   for i in range(n))
        out[(_canon_center(hc, k, phi.p), k)] = coeff
    return SchwartzFn(phi.p, n, out)


def act_element(phi: SchwartzFn, g: SL2Elt, Q: QuadSpace,
                allow_metaplectic_choice: bool = False) -> SchwartzFn:
    """Act by g through its Bruhat factorization.

    For odd-dimensional spaces the result depends on the chosen
    factorization up to a sign, so the caller must opt in.
    """
    if Q.n % 2 == 1 and not allow_metaplectic_choice:
        raise MetaplecticAmbiguity(
            "odd-dimensional action is only defined up to sign; "
            "pass allow_metaplectic_choice=True to use the Bruhat word")
    return act_factors(phi, bruhat_factor(g), Q)
