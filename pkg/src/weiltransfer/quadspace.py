"""Self-dual quadratic spaces over Q_p and their local fiber measures.

q(v) = (1/2) v^T S v with S integral symmetric and det(S) a p-adic unit,
together with a base vector v1 with q(v1) = 1.  The fiber measure on
X_a = {q = a} is the stabilized residue density

    vol(f; X_a) = lim_m  p^{-m(n-1)} * #{x mod p^m in supp f : q(x) = a mod p^m}

weighted by the cell coefficients of f, and similarly with one more linear
constraint for the fibers of x -> <v1, x>/<v1, v1>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .counting import quad_residue_sum
from .errors import (DimensionMismatch, NonStabilizing, NotSelfDual,
                     SingularFiber)
from .exactnum import CycNum, CYC_ZERO
from .padic import (check_odd_prime, frac_part, hilbert_symbol, legendre,
                    psi_char, valuation)
from .schwartz import SchwartzFn

DEFAULT_CAP = 12


@dataclass(frozen=True)
class DensityResult:
    value: CycNum
    stabilized_at: int
    certified: bool


def _det(mat) -> Fraction:
    n = len(mat)
    m = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                for cx in range(col, n):
                    m[r][cx] -= f * m[col][cx]
    return det


class QuadSpace:
    """A self-dual quadratic space (V, q) with a unit base vector v1."""

    def __init__(self, p: int, gram, v1):
        check_odd_prime(p)
        self.p = p
        n = len(gram)
        for row in gram:
            if len(row) != n:
                raise DimensionMismatch("gram matrix must be square")
        S = tuple(tuple(int(x) for x in row) for row in gram)
        for i in range(n):
            for j in range(n):
                if S[i][j] != S[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        det = _det(S)
        if det == 0 or valuation(det, p) != 0:
            raise NotSelfDual("det(S) = %s is not a unit at %d" % (det, p))
        self.gram = S
        self.n = n
        self.det = det
        v1 = tuple(Fraction(x) for x in v1)
        if len(v1) != n:
            raise DimensionMismatch("v1 has wrong length")
        self.v1 = v1
        if self.quad(v1) != 1:
            raise ValueError("q(v1) must equal 1, got %s" % (self.quad(v1),))

    # ---- basic algebra ----

    def pairing(self, u, v) -> Fraction:
        """<u, v> = u^T S v (so <v, v> = 2 q(v))."""
        S = self.gram
        n = self.n
        u = [Fraction(x) for x in u]
        v = [Fraction(x) for x in v]
        return sum(u[i] * S[i][j] * v[j] for i in range(n) for j in range(n))

    def quad(self, v) -> Fraction:
        return self.pairing(v, v) / 2

    def gram_times(self, v):
        S = self.gram
        n = self.n
        v = [Fraction(x) for x in v]
        return tuple(sum(Fraction(S[j][i]) * v[j] for j in range(n))
                     for i in range(n))

    @property
    def disc(self) -> Fraction:
        """(-1)^{n(n-1)/2} det(S), the discriminant square class."""
        sign = -1 if (self.n * (self.n - 1) // 2) % 2 else 1
        return sign * self.det

    def chi(self, a) -> int:
        """The quadratic character chi_disc(a) = (a, disc)_p."""
        return hilbert_symbol(a, self.disc, self.p)

    def basic_schwartz(self) -> SchwartzFn:
        return SchwartzFn.basic(self.p, self.n)

    # ---- residue counting primitives ----

    def _scaled_cell(self, center, level, a, extra=0):
        """Scale x = y / p^s so that the cell, target and level are integral."""
        p = self.p
        s = max(0, -level, extra)
        for x in center:
            if x != 0:
                s = max(s, -valuation(x, p))
        if a != 0:
            va = valuation(Fraction(a), p)
            if va < 0:
                s = max(s, (-va + 1) // 2)
        ps = Fraction(p) ** s
        c2 = tuple(Fraction(x) * ps for x in center)
        return s, c2, level + s

    def _cell_density(self, center, level, a, phase_u=None, cap=DEFAULT_CAP):
        """Stabilized density of {q = a} inside one cell, with an optional
        analytic phase psi(<phase_u, x>)."""
        p, n = self.p, self.n
        a = Fraction(a)
        s, c2, l2 = self._scaled_cell(center, level, a)
        # engine works with F(y) = y^T S y = 2 q(y), target 2 a p^{2s}
        target = 2 * a * Fraction(p) ** (2 * s)
        w = None
        if phase_u is not None:
            ps = Fraction(p) ** s
            w = [x / ps for x in self.gram_times(phase_u)]
        val, deep = quad_residue_sum(
            p, self.gram, [0] * n, 0, target, c2, l2,
            mode="density", phase=w, cap=cap)
        # |omega_a| scales by p^{s(n-2)} under x = y/p^s: Haar gives p^{sn},
        # the target tube |q - a| <= eps shrinks by p^{-2s} in y-coordinates
        return val.scale(Fraction(p) ** (s * (n - 2))), deep

    def _cell_finite(self, center, level, a, ncons, phase_u=None,
                     cap=DEFAULT_CAP):
        """Exact integral over {x in cell : q(x) = a mod p^ncons} of
        psi(<phase_u, x>) dx (plain additive measure)."""
        p, n = self.p, self.n
        a = Fraction(a)
        s, c2, l2 = self._scaled_cell(center, level, a)
        target = 2 * a * Fraction(p) ** (2 * s)
        w = None
        if phase_u is not None:
            ps = Fraction(p) ** s
            w = [x / ps for x in self.gram_times(phase_u)]
        val, deep = quad_residue_sum(
            p, self.gram, [0] * n, 0, target, c2, l2,
            mode="finite", ncons=ncons + 2 * s, phase=w, cap=cap)
        return val.scale(Fraction(p) ** (s * n)), deep

    # ---- public fiber integrals ----

    def fiber_volume(self, f: SchwartzFn, a, phase_u=None,
                     cap=DEFAULT_CAP) -> DensityResult:
        """int_{X_a} f |omega_a| as a stabilized residue density."""
        self._check_fn(f)
        if Fraction(a) == 0:
            raise SingularFiber("the zero fiber is singular")
        total = CYC_ZERO
        deepest = 0
        for (c, k), coeff in f.cells.items():
            val, deep = self._cell_density(c, k, a, phase_u=phase_u, cap=cap)
            total = total + coeff * val
            deepest = max(deepest, deep)
        return DensityResult(total, deepest, True)

    def joint_fiber_volume(self, f: SchwartzFn, a, xi,
                           cap=DEFAULT_CAP) -> DensityResult:
        """Fiber measure of {q = a, gamma = xi}, gamma(x) = <v1,x>/<v1,v1>.

        The fiber is singular at xi^2 = a; then f must vanish near the two
        singular points +-xi*v1.
        """
        self._check_fn(f)
        a, xi = Fraction(a), Fraction(xi)
        if xi * xi == a:
            for sgn in (1, -1):
                pt = tuple(sgn * xi * x for x in self.v1)
                if not f.evaluate(pt).is_zero():
                    raise SingularFiber(
                        "support meets the singular point %s" % (pt,))
        total = CYC_ZERO
        deepest = 0
        for (c, k), coeff in f.cells.items():
            val, deep = self._cell_joint_density(c, k, a, xi, cap=cap)
            total = total + coeff * val
            deepest = max(deepest, deep)
        return DensityResult(total, deepest, True)

    def _cell_joint_density(self, center, level, a, xi, phase_w=None,
                            cap=DEFAULT_CAP):
        """Joint density for one cell: constraints q = a and <v1, x> = 2 xi.

        Eliminates the (unit-coefficient) linear constraint exactly and runs
        the quadratic engine in n-1 variables.  phase_w, if given, is a
        rational vector with phase psi(phase_w . x).
        """
        p, n = self.p, self.n
        a, xi = Fraction(a), Fraction(xi)
        tau = 2 * xi
        extra = 0
        if tau != 0:
            extra = max(0, -valuation(tau, p))
        s, c2, l2 = self._scaled_cell(center, level, a, extra=extra)
        ps = Fraction(p) ** s
        tau2 = tau * ps
        target2 = 2 * a * ps * ps
        svec = self.gram_times(self.v1)
        # pivot with unit coefficient (exists: <v1,v1> = 2 is a unit)
        i0 = None
        for i in range(n):
            if svec[i] != 0 and valuation(svec[i], p) == 0:
                i0 = i
                break
        if i0 is None:
            raise NotSelfDual("S v1 has no unit coordinate")
        # y_{i0} = alpha * (tau2 - sum_{i != i0} svec_i y_i)
        alpha = 1 / svec[i0]
        free = [i for i in range(n) if i != i0]
        # pivot coordinate of any solution in the cell must match the cell
        pl = Fraction(p) ** l2
        piv_at_center = alpha * (tau2 - sum(svec[i] * c2[i] for i in free))
        if frac_part((piv_at_center - c2[i0]) / pl, p) != 0:
            return CYC_ZERO, l2
        # substitute into F(y) = y^T S y
        S = self.gram
        d = n - 1
        A2 = [[Fraction(0)] * d for _ in range(d)]
        b2 = [Fraction(0)] * d
        c0 = Fraction(0)
        # y = E yfree + g, with E the embedding and g the affine shift
        # row i0 of (E, g): y_{i0} = -alpha*svec_i yfree_i + alpha*tau2
        def row(i):
            if i == i0:
                return ([-alpha * svec[jj] for jj in free], alpha * tau2)
            e = [Fraction(0)] * d
            e[free.index(i)] = Fraction(1)
            return (e, Fraction(0))
        rows = [row(i) for i in range(n)]
        for i in range(n):
            ei, gi = rows[i]
            for jj in range(n):
                ej, gj = rows[jj]
                sij = Fraction(S[i][jj])
                if sij == 0:
                    continue
                for u in range(d):
                    if ei[u]:
                        for v in range(d):
                            if ej[v]:
                                A2[u][v] += sij * ei[u] * ej[v]
                        if gj:
                            b2[u] += sij * ei[u] * gj
                for v in range(d):
                    if gi and ej[v]:
                        b2[v] += sij * gi * ej[v]
                if gi and gj:
                    c0 += sij * gi * gj
        # symmetrize A2 (it already is, by symmetry of S)
        wfree = None
        if phase_w is not None:
            wr = [Fraction(x) / ps for x in phase_w]
            wfree = []
            const = Fraction(0)
            ei0, gi0 = rows[i0]
            for u in range(d):
                wu = wr[free[u]] + wr[i0] * ei0[u]
                wfree.append(wu)
            const = wr[i0] * gi0
        else:
            const = Fraction(0)
        cfree = [c2[i] for i in free]
        val, deep = quad_residue_sum(
            p, A2, b2, c0, target2, cfree, l2,
            mode="density", phase=wfree, cap=cap)
        if phase_w is not None and const != 0:
            val = psi_char(const, p) * val
        # codim-2 measure scales by p^{s(n-3)}: Haar p^{sn}, quadratic tube
        # p^{-2s}, linear tube p^{-s}
        return val.scale(Fraction(p) ** (s * (n - 3))), deep

    def meets_fiber(self, center, level, a, cap=DEFAULT_CAP):
        """Does the cell meet X_a?  Returns (answer, certified_level);
        answer is True/False, or None if undetermined at the cap."""
        try:
            val, deep = self._cell_density(tuple(Fraction(x) for x in center),
                                           level, a, cap=cap)
        except NonStabilizing as exc:
            return None, exc.level
        return (not val.is_zero()), deep

    # ---- brute force counting (oracle-grade, small sizes) ----

    def count_solutions_mod(self, m: int, constraints, center=None,
                            level: int = 0) -> int:
        """#{x mod p^m in the cell satisfying all constraints mod p^m}.

        constraints: list of ("quad", a) or ("linear", vec, t); plain
        enumeration, exact, only for small p^{(m-level)*n}.
        """
        p, n = self.p, self.n
        if center is None:
            center = (Fraction(0),) * n
        center = tuple(Fraction(x) for x in center)
        if level < 0 or any(x != int(x) for x in center):
            raise ValueError("count_solutions_mod needs an integral cell")
        pm = p ** m
        count = 0
        reps = p ** (m - level)
        if reps ** n > 40_000_000:
            raise ValueError("cell too large for brute enumeration")
        pl = p ** level
        for idx in iproduct(range(reps), repeat=n):
            x = tuple(int(center[i]) + pl * idx[i] for i in range(n))
            ok = True
            for cons in constraints:
                if cons[0] == "quad":
                    val = self.quad(x) - Fraction(cons[1])
                elif cons[0] == "linear":
                    val = self.pairing(cons[1], x) - Fraction(cons[2])
                else:
                    raise ValueError("unknown constraint %r" % (cons[0],))
                if val != 0 and valuation(val, p) < m:
                    ok = False
                    break
            if ok:
                count += 1
        return count

    def point_count_residue(self, a, m: int = 1) -> int:
        """#{x in (Z/p^m)^n : q(x) = a mod p^m} by direct enumeration."""
        return self.count_solutions_mod(m, [("quad", Fraction(a))])

    def _check_fn(self, f: SchwartzFn):
        if f.p != self.p or f.n != self.n:
            raise DimensionMismatch("Schwartz function does not match space")


# ---- catalog of standard spaces ----


def hyperbolic_block():
    return [[0, 1], [1, 0]]


def catalog_space(p: int, dim: int, kind: str = "split") -> QuadSpace:
    """Standard spaces: hyperbolic planes padded with unit diagonal entries.

    kind = "split": maximal number of hyperbolic planes, diagonal padding
    with entries 2 (q += x^2 terms).
    kind = "nonsplit-disc": same but the last diagonal entry is 2*u for a
    non-residue u, twisting the discriminant character (even dim only here).
    """
    check_odd_prime(p)
    if dim < 2:
        raise DimensionMismatch("dim >= 2 required")
    if kind not in ("split", "nonsplit-disc"):
        raise ValueError("unknown kind %r" % (kind,))
    blocks = (dim - 1) // 2
    if dim % 2 == 0:
        blocks = dim // 2 if kind == "split" else dim // 2 - 1
    gram = [[0] * dim for _ in range(dim)]
    for b in range(blocks):
        gram[2 * b][2 * b + 1] = 1
        gram[2 * b + 1][2 * b] = 1
    for i in range(2 * blocks, dim):
        gram[i][i] = 2
    if kind == "nonsplit-disc":
        # twist the last entry only if the discriminant class is still a
        # square; e.g. for p = 3 mod 4 the padded block diag(2,2) already
        # has non-square disc and must be left alone
        sign = (-1) ** (dim * (dim - 1) // 2) * (-1) ** blocks
        det_pad = 2 ** (dim - 2 * blocks)
        if legendre(sign * det_pad, p) == 1:
            gram[dim - 1][dim - 1] = 2 * non_residue(p)
    if blocks:
        v1 = [Fraction(0)] * dim
        v1[0] = Fraction(1)
        v1[1] = Fraction(1)
    else:
        v1 = [Fraction(0)] * dim
        v1[0] = Fraction(1)
    return QuadSpace(p, gram, v1)


def non_residue(p: int) -> int:
    from .padic import legendre
    for u in range(2, p):
        if legendre(u, p) == -1:
            return u
    raise ValueError("no non-residue found (p not prime?)")
