"""Unramified local L-factors at a Satake parameter, kept as formal Euler
products so identities between them can be checked by syntactic cancellation
before any evaluation."""

from __future__ import annotations

from fractions import Fraction

from .errors import PoleAtS
from .exactnum import CycNum
from .padic import check_odd_prime, hilbert_symbol, p_power_half
from .quadspace import QuadSpace


class SatakeData:
    """Unramified tempered SL2 parameter: a unit-modulus alpha, exact when
    given as a root of unity (order, exp), numeric when given as a complex.

    twist is a square class; its value at p twists the standard factor.
    """

    __slots__ = ("p", "order", "exp", "alpha_num", "twist")

    def __init__(self, p: int, alpha=None, order=None, exp=None, twist=1):
        check_odd_prime(p)
        self.p = p
        self.twist = Fraction(twist)
        if self.twist == 0:
            raise ValueError("twist must be a nonzero square class")
        if order is not None:
            order = int(order)
            if order <= 0:
                raise ValueError("order must be positive")
            self.order, self.exp = order, int(exp or 0) % order
            self.alpha_num = None
        else:
            if alpha is None:
                raise ValueError("give alpha or (order, exp)")
            alpha = complex(alpha)
            if abs(abs(alpha) - 1) > 1e-9:
                raise ValueError("alpha must have modulus 1")
            self.order = None
            self.exp = None
            self.alpha_num = alpha

    @property
    def exact(self) -> bool:
        return self.order is not None

    def chi(self) -> int:
        """The twist character evaluated at p."""
        return hilbert_symbol(self.p, self.twist, self.p)

    def alpha_pow(self, k: int):
        """alpha^k as a CycNum (exact mode) or complex."""
        if self.exact:
            return CycNum.zeta(self.order, self.exp * k)
        return self.alpha_num ** k


class EulerProduct:
    """A formal product prod(num atoms) / prod(den atoms); each atom is a
    scalar of the form 1 - c p^{-s}.  Equal atoms cancel syntactically, so
    rational-function identities can be certified without division."""

    __slots__ = ("num", "den")

    def __init__(self, num=(), den=()):
        num = list(num)
        den = list(den)
        for atom in den:
            if _is_zero(atom):
                raise PoleAtS("vanishing Euler atom in a denominator")
        self.num, self.den = _cancel(num, den)

    def __mul__(self, other: "EulerProduct") -> "EulerProduct":
        return EulerProduct(self.num + other.num, self.den + other.den)

    def inverse(self) -> "EulerProduct":
        return EulerProduct(self.den, self.num)

    def is_one(self) -> bool:
        return not self.num and not self.den

    def equals(self, other: "EulerProduct") -> bool:
        """Exact equality by cross-multiplication (exact atoms only)."""
        lhs = _prodc(self.num + other.den)
        rhs = _prodc(other.num + self.den)
        return lhs == rhs

    def as_fraction(self) -> Fraction:
        num = _prodc(self.num)
        den = _prodc(self.den)
        if not (num.is_rational() and den.is_rational()):
            raise ValueError("product is not rational")
        return num.as_fraction() / den.as_fraction()

    def to_complex(self) -> complex:
        num = complex(1)
        for a in self.num:
            num *= a.to_complex() if isinstance(a, CycNum) else complex(a)
        den = complex(1)
        for a in self.den:
            den *= a.to_complex() if isinstance(a, CycNum) else complex(a)
        return num / den

    def __repr__(self):
        return "EulerProduct(num=%r, den=%r)" % (self.num, self.den)


def _prodc(atoms) -> CycNum:
    out = CycNum.rational(1)
    for a in atoms:
        if not isinstance(a, CycNum):
            raise ValueError("exact comparison needs exact atoms")
        out = out * a
    return out


def _is_zero(atom) -> bool:
    if isinstance(atom, CycNum):
        return atom.is_zero()
    return abs(complex(atom)) < 1e-12


def _cancel(num, den):
    out_den = list(den)
    out_num = []
    for a in num:
        for i, b in enumerate(out_den):
            if _atom_eq(a, b):
                del out_den[i]
                break
        else:
            out_num.append(a)
    return out_num, out_den


def _atom_eq(a, b) -> bool:
    if isinstance(a, CycNum) and isinstance(b, CycNum):
        return a == b
    if isinstance(a, CycNum) or isinstance(b, CycNum):
        return False
    return abs(complex(a) - complex(b)) < 1e-12


def _q_pow(p: int, s) -> CycNum:
    """p^{-s} for half-integral s, exact (formal sqrt(p) when s is odd/2)."""
    s2 = Fraction(s) * 2
    if s2.denominator != 1:
        raise ValueError("only half-integral s is supported exactly")
    return p_power_half(p, -int(s2))


def _atom(c, x):
    """1 - c * x with c a CycNum/complex and x a CycNum/complex."""
    if isinstance(c, CycNum) and isinstance(x, CycNum):
        return CycNum.rational(1) - c * x
    cc = c.to_complex() if isinstance(c, CycNum) else complex(c)
    xx = x.to_complex() if isinstance(x, CycNum) else complex(x)
    return 1 - cc * xx


def zeta_factor(p: int, s) -> EulerProduct:
    """zeta_F(s) = (1 - p^{-s})^{-1}."""
    check_odd_prime(p)
    return EulerProduct(den=[_atom(CycNum.rational(1), _q_pow(p, s))])


def dirichlet_factor(p: int, s, chi: int) -> EulerProduct:
    """L(s, chi) = (1 - chi(p) p^{-s})^{-1} for a quadratic character."""
    check_odd_prime(p)
    return EulerProduct(den=[_atom(CycNum.rational(chi), _q_pow(p, s))])


def std_lfactor(sigma: SatakeData, s, chi: int = 1) -> EulerProduct:
    """L(s, sigma x chi, std) for the 3-dimensional standard (= adjoint)
    representation of the dual SO_3: Satake eigenvalues alpha^2, 1,
    alpha^{-2}, each twisted by chi(p)."""
    p = sigma.p
    x = _q_pow(p, s)
    csign = CycNum.rational(chi)
    if sigma.exact:
        cs = [csign * sigma.alpha_pow(2), csign, csign * sigma.alpha_pow(-2)]
    else:
        cs = [chi * sigma.alpha_pow(2), complex(chi), chi * sigma.alpha_pow(-2)]
    return EulerProduct(den=[_atom(c, x) for c in cs])


def adjoint_lfactor(sigma: SatakeData, s) -> EulerProduct:
    return std_lfactor(sigma, s, chi=1)


def chi_perp(Q: QuadSpace) -> int:
    """For odd dim 2n+1, the character of the even-dimensional complement
    of v1: its discriminant square class is (-1)^n det(S)/2.  This is the
    character governing the residue point count of the unit hyperboloid,
    hence the one entering the volume and filtered L-value formulas."""
    n = (Q.n - 1) // 2
    disc = Fraction((-1) ** n) * Q.det / 2
    return hilbert_symbol(Q.p, disc, Q.p)


def lx_sharp(Q: QuadSpace, sigma: SatakeData) -> EulerProduct:
    """The squared-norm factor of the spherical functional on the
    hyperboloid, as a function of the Satake parameter.

    Even dim 2n:  L(n-1, sigma x chi, std) L(n, chi) /
                  (L(1, sigma, Ad) zeta(2n-2)).
    Odd dim 2n+1: L(n-1/2, sigma x chi, std) L(1/2, sigma, std) zeta(2n) /
                  (L(1, sigma, Ad) L(n, chi)^2); the half-integral factors
    use the same Euler shape in the given parameter.
    """
    p = Q.p
    if sigma.p != p:
        raise ValueError("Satake parameter is at a different prime")
    chi = Q.chi(p)
    if Q.n % 2 == 0:
        n = Q.n // 2
        out = std_lfactor(sigma, n - 1, chi)
        out = out * dirichlet_factor(p, n, chi)
        out = out * adjoint_lfactor(sigma, 1).inverse()
        out = out * zeta_factor(p, 2 * n - 2).inverse()
        return out
    n = (Q.n - 1) // 2
    chi = chi_perp(Q)
    out = std_lfactor(sigma, Fraction(2 * n - 1, 2), chi)
    out = out * std_lfactor(sigma, Fraction(1, 2), 1)
    out = out * zeta_factor(p, 2 * n)
    out = out * adjoint_lfactor(sigma, 1).inverse()
    out = out * dirichlet_factor(p, n, chi).inverse()
    out = out * dirichlet_factor(p, n, chi).inverse()
    return out


def orth_group_order(kind: str, m: int, q: int) -> int:
    """Order of an orthogonal group over F_q: O_{2m}^{+-} or O_{2m+1}."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if kind == "odd":
        out = 2 * q ** (m * m)
        for i in range(1, m + 1):
            out *= q ** (2 * i) - 1
        return out
    if kind in ("even+", "even-"):
        eps = 1 if kind == "even+" else -1
        out = 2 * q ** (m * (m - 1)) * (q ** m - eps)
        for i in range(1, m - 1 + 1):
            out *= q ** (2 * i) - 1
        return out
    raise ValueError("kind must be odd, even+ or even-")


def volume_x(Q: QuadSpace, method: str = "count") -> Fraction:
    """Vol of the unit hyperboloid's integral points, p^{-(dim-1)} times the
    residue point count; "closed" uses the L-value form instead:
    1 - chi(p) p^{-m} for dim 2m, (1 - p^{-2m})/(1 - chi(p) p^{-m}) for
    dim 2m+1."""
    p = Q.p
    if method == "count":
        cnt = Q.point_count_residue(Fraction(1), 1)
        return Fraction(cnt, p ** (Q.n - 1))
    if method != "closed":
        raise ValueError("method must be count or closed")
    if Q.n % 2 == 0:
        m = Q.n // 2
        return 1 - Fraction(Q.chi(p), p ** m)
    m = (Q.n - 1) // 2
    return (1 - Fraction(1, p ** (2 * m))) / (1 - Fraction(chi_perp(Q), p ** m))


def assembly_check(Q: QuadSpace, sigma: SatakeData):
    """Cross-check: the spherical-norm product formula assembled from its
    three ingredients (norm of the Whittaker functional, doubling value,
    hyperboloid volume from the residue point count) against the folded
    closed form.  Returns (passed, residual); residual is 0 for exact
    parameters, a float otherwise.
    """
    p = Q.p
    chi = Q.chi(p)
    vol = volume_x(Q, method="count")
    if Q.n % 2 == 0:
        n = Q.n // 2
        # |ell_sigma|^2 = zeta(2)/L(1,Ad); doubling = Vol(K) L(n-1, std x
        # chi)/(zeta(2n-2) L(n,chi)); Vol(K) = zeta(2)^{-1}
        rhs = std_lfactor(sigma, n - 1, chi)
        rhs = rhs * zeta_factor(p, 2 * n - 2).inverse()
        rhs = rhs * dirichlet_factor(p, n, chi).inverse()
        rhs = rhs * adjoint_lfactor(sigma, 1).inverse()
    else:
        n = (Q.n - 1) // 2
        chi = chi_perp(Q)
        rhs = std_lfactor(sigma, Fraction(1, 2), 1)
        rhs = rhs * std_lfactor(sigma, Fraction(2 * n - 1, 2), chi)
        rhs = rhs * zeta_factor(p, 2 * n).inverse()
        rhs = rhs * adjoint_lfactor(sigma, 1).inverse()
    vol_sq = EulerProduct(num=[CycNum.rational(vol * vol)])
    rhs = rhs * vol_sq.inverse()
    lhs = lx_sharp(Q, sigma)
    if sigma.exact:
        ok = lhs.equals(rhs)
        return ok, Fraction(0) if ok else None
    residual = abs(lhs.to_complex() - rhs.to_complex())
    return residual < 1e-12, residual
