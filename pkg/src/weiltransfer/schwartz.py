"""Locally constant compactly supported functions on Q_p^n, exactly.

A SchwartzFn is a finite disjoint union of cells c + p^level * Z_p^n with
scalar (CycNum) coefficients.  Cell centers are kept in canonical form: each
coordinate is the truncated p-adic expansion of the coordinate below
p^level, so equal cells have equal keys.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch
from .exactnum import CycNum, CYC_ZERO
from .padic import cell_rep, check_odd_prime, frac_part, psi_char, valuation

Vector = tuple[Fraction, ...]


def _vec(v) -> Vector:
    return tuple(Fraction(x) for x in v)


def _canon_center(c, level: int, p: int) -> Vector:
    return tuple(cell_rep(x, level, p) for x in c)


def _cells_overlap(c1: Vector, k1: int, c2: Vector, k2: int, p: int) -> bool:
    k = min(k1, k2)
    pk = Fraction(p) ** k
    return all(frac_part((a - b) / pk, p) == 0 for a, b in zip(c1, c2))


class SchwartzFn:
    """Exact Schwartz-Bruhat function on Q_p^n."""

    __slots__ = ("p", "n", "cells")

    def __init__(self, p: int, n: int, cells=None, _trusted=False):
        check_odd_prime(p)
        self.p = p
        self.n = n
        if cells is None:
            cells = {}
        if not _trusted:
            canon: dict[tuple[Vector, int], CycNum] = {}
            items = [( _canon_center(c, k, p), k, coeff)
                     for (c, k), coeff in cells.items()]
            for c, k, coeff in items:
                if len(c) != n:
                    raise DimensionMismatch("cell center has wrong length")
                key = (c, k)
                canon[key] = canon.get(key, CYC_ZERO) + coeff
            keys = list(canon)
            for i, (c1, k1) in enumerate(keys):
                for c2, k2 in keys[i + 1:]:
                    if k1 != k2 and _cells_overlap(c1, k1, c2, k2, p):
                        raise ValueError("cells overlap: %s" % ((c1, k1, c2, k2),))
            cells = {k: v for k, v in canon.items() if v}
        self.cells = cells

    # ---- constructors ----

    @staticmethod
    def zero(p: int, n: int) -> "SchwartzFn":
        return SchwartzFn(p, n, {}, _trusted=True)

    @staticmethod
    def indicator(p: int, center, level: int, coeff=None) -> "SchwartzFn":
        center = _vec(center)
        n = len(center)
        if coeff is None:
            coeff = CycNum.rational(1)
        c = _canon_center(center, level, p)
        return SchwartzFn(p, n, {(c, level): coeff}, _trusted=True)

    @staticmethod
    def basic(p: int, n: int) -> "SchwartzFn":
        """Indicator of the standard lattice Z_p^n."""
        return SchwartzFn.indicator(p, (Fraction(0),) * n, 0)

    def _check_compat(self, other: "SchwartzFn"):
        if self.p != other.p or self.n != other.n:
            raise DimensionMismatch("incompatible Schwartz functions")

    # ---- cell surgery ----

    def _split_cell(self, c: Vector, k: int):
        """All p^n children of a cell at level k+1 (canonical centers)."""
        from itertools import product
        p, n = self.p, self.n
        pk = Fraction(p) ** k
        out = []
        for idx in product(range(p), repeat=n):
            child = tuple(cell_rep(c[i] + idx[i] * pk, k + 1, p) for i in range(n))
            out.append(child)
        return out

    def refine(self, level: int) -> "SchwartzFn":
        """Represent with all cells at level >= `level` (coarser cells split)."""
        p, n = self.p, self.n
        out: dict[tuple[Vector, int], CycNum] = {}
        stack = list(self.cells.items())
        while stack:
            (c, k), coeff = stack.pop()
            if k >= level:
                out[(c, k)] = coeff
            else:
                for child in self._split_cell(c, k):
                    stack.append(((child, k + 1), coeff))
        return SchwartzFn(p, n, out, _trusted=True)

    def simplify(self) -> "SchwartzFn":
        """Merge complete families of equal-coefficient sibling cells."""
        p, n = self.p, self.n
        cells = dict(self.cells)
        full = p ** n
        changed = True
        while changed:
            changed = False
            groups: dict[tuple[Vector, int], list] = {}
            for (c, k), coeff in cells.items():
                parent = (_canon_center(c, k - 1, p), k)
                groups.setdefault(parent, []).append(((c, k), coeff))
            for (pc, k), members in groups.items():
                if len(members) == full:
                    c0 = members[0][1]
                    if all(coeff == c0 for _, coeff in members):
                        for key, _ in members:
                            del cells[key]
                        cells[(pc, k - 1)] = c0
                        changed = True
        return SchwartzFn(p, n, cells, _trusted=True)

    # ---- algebra ----

    def __add__(self, other):
        if not isinstance(other, SchwartzFn):
            return NotImplemented
        self._check_compat(other)
        p, n = self.p, self.n
        acc: dict[tuple[Vector, int], CycNum] = {}
        below: dict[tuple[Vector, int], int] = {}  # ancestor key -> #cells under it
        kmin = min((k for (_, k) in self.cells), default=0)
        kmin = min(kmin, min((k for (_, k) in other.cells), default=0))

        def add_key(c, k, coeff):
            if (c, k) in acc:
                s = acc[(c, k)] + coeff
                if s:
                    acc[(c, k)] = s
                else:
                    del acc[(c, k)]
                    bump(c, k, -1)
            else:
                acc[(c, k)] = coeff
                bump(c, k, +1)

        def bump(c, k, d):
            for j in range(kmin, k):
                key = (_canon_center(c, j, p), j)
                below[key] = below.get(key, 0) + d
                if below[key] == 0:
                    del below[key]

        def split_into_acc(c, k):
            coeff = acc.pop((c, k))
            bump(c, k, -1)
            for child in self._split_cell(c, k):
                add_key(child, k + 1, coeff)

        def insert(c, k, coeff):
            stack = [(c, k, coeff)]
            while stack:
                c, k, coeff = stack.pop()
                if (c, k) in acc:
                    add_key(c, k, coeff)
                    continue
                # an accumulated cell strictly containing this one?
                anc = None
                for j in range(kmin, k):
                    key = (_canon_center(c, j, p), j)
                    if key in acc:
                        anc = key
                        break
                if anc is not None:
                    split_into_acc(*anc)
                    stack.append((c, k, coeff))
                    continue
                # accumulated cells strictly inside this one?
                if below.get((c, k), 0) > 0:
                    for child in self._split_cell(c, k):
                        stack.append((child, k + 1, coeff))
                    continue
                add_key(c, k, coeff)

        for (c, k), coeff in self.cells.items():
            add_key(c, k, coeff)
        for (c, k), coeff in other.cells.items():
            insert(c, k, coeff)
        return SchwartzFn(p, n, acc, _trusted=True)

    def __neg__(self):
        return SchwartzFn(self.p, self.n,
                          {k: -v for k, v in self.cells.items()}, _trusted=True)

    def __sub__(self, other):
        if not isinstance(other, SchwartzFn):
            return NotImplemented
        return self + (-other)

    def scalar_mul(self, coeff) -> "SchwartzFn":
        if isinstance(coeff, (int, Fraction)):
            coeff = CycNum.rational(coeff)
        if coeff.is_zero():
            return SchwartzFn.zero(self.p, self.n)
        return SchwartzFn(self.p, self.n,
                          {k: coeff * v for k, v in self.cells.items()},
                          _trusted=True)

    def is_zero(self) -> bool:
        return not self.cells

    def equals_ae(self, other: "SchwartzFn") -> bool:
        """Equality as functions (locally constant, so a.e. equality)."""
        return (self - other).is_zero()

    def __eq__(self, other):
        if not isinstance(other, SchwartzFn):
            return NotImplemented
        return self.p == other.p and self.n == other.n and self.equals_ae(other)

    def __hash__(self):
        raise TypeError("SchwartzFn is not hashable")

    # ---- evaluation and integration ----

    def evaluate(self, v) -> CycNum:
        v = _vec(v)
        p = self.p
        for (c, k), coeff in self.cells.items():
            pk = Fraction(p) ** k
            if all(frac_part((a - b) / pk, p) == 0 for a, b in zip(v, c)):
                return coeff
        return CYC_ZERO

    def integrate(self) -> CycNum:
        """Integral against the self-dual additive Haar measure (vol(L)=1)."""
        p, n = self.p, self.n
        total = CYC_ZERO
        for (c, k), coeff in self.cells.items():
            total = total + coeff.scale(Fraction(p) ** (-k * n))
        return total

    def support_levels(self) -> tuple[int, int]:
        """(min coordinate valuation over support, max cell level)."""
        if not self.cells:
            return (0, 0)
        vmin = 0
        kmax = 0
        for (c, k), _ in self.cells.items():
            kmax = max(kmax, k)
            for x in c:
                if x != 0:
                    vmin = min(vmin, valuation(x, self.p))
            vmin = min(vmin, k)
        return (vmin, kmax)

    # ---- geometric operations ----

    def dilate(self, a) -> "SchwartzFn":
        """v |-> f(a*v)."""
        a = Fraction(a)
        if a == 0:
            raise ValueError("dilation by zero")
        p, n = self.p, self.n
        va = valuation(a, p)
        out = {}
        for (c, k), coeff in self.cells.items():
            nc = _canon_center(tuple(x / a for x in c), k - va, p)
            out[(nc, k - va)] = coeff
        return SchwartzFn(p, n, out, _trusted=True)

    def translate(self, t) -> "SchwartzFn":
        """v |-> f(v - t)."""
        t = _vec(t)
        p, n = self.p, self.n
        out = {}
        for (c, k), coeff in self.cells.items():
            nc = _canon_center(tuple(x + y for x, y in zip(c, t)), k, p)
            out[(nc, k)] = coeff
        return SchwartzFn(p, n, out, _trusted=True)


# ---- phase multiplications and Fourier transform ----


def _pairing_vec(S, u) -> Vector:
    """S^T u = S u for symmetric S; the linear form v -> <u, v> = u^T S v."""
    n = len(S)
    u = _vec(u)
    return tuple(sum(Fraction(S[i][j]) * u[i] for i in range(n)) for j in range(n))


def phase_mul_linear(f: SchwartzFn, u, S) -> SchwartzFn:
    """psi(<u, v>) * f(v) with <u, v> = u^T S v, refined until exact."""
    w = _pairing_vec(S, u)
    p, n = f.p, f.n
    kappa = 0
    for x in w:
        if x != 0:
            kappa = max(kappa, -valuation(x, p))
    g = f.refine(kappa)
    out = {}
    # the phase takes few distinct values; cache the scalar products
    cache: dict = {}
    for (c, k), coeff in g.cells.items():
        fr = frac_part(sum(a * b for a, b in zip(w, c)), p)
        key = (fr, id(coeff))
        val = cache.get(key)
        if val is None:
            val = psi_char(fr, p) * coeff
            cache[key] = val
        out[(c, k)] = val
    return SchwartzFn(p, n, out, _trusted=True)


def _quad_value(S, v) -> Fraction:
    n = len(S)
    tot = Fraction(0)
    for i in range(n):
        for j in range(n):
            tot += Fraction(S[i][j]) * v[i] * v[j]
    return tot / 2


def phase_mul_quadratic(f: SchwartzFn, b, S) -> SchwartzFn:
    """psi(b * q(v)) * f(v) with q(v) = (1/2) v^T S v, refined until exact."""
    b = Fraction(b)
    p, n = f.p, f.n
    if b == 0:
        return f
    vb = valuation(b, p)
    out = {}
    cache: dict = {}
    stack = list(f.cells.items())
    while stack:
        (c, k), coeff = stack.pop()
        # b*q constant on cell iff val(b)+2k >= 0 and val(b)+k+val(Sc) >= 0
        ok = vb + 2 * k >= 0
        if ok:
            sc = _pairing_vec(S, c)
            for x in sc:
                if x != 0 and vb + k + valuation(x, p) < 0:
                    ok = False
                    break
        if ok:
            fr = frac_part(b * _quad_value(S, c), p)
            ckey = (fr, id(coeff))
            val = cache.get(ckey)
            if val is None:
                val = psi_char(fr, p) * coeff
                cache[ckey] = val
            key = (c, k)
            out[key] = out.get(key, CYC_ZERO) + val
        else:
            helper = SchwartzFn(p, n, {}, _trusted=True)
            for child in helper._split_cell(c, k):
                stack.append(((child, k + 1), coeff))
    return SchwartzFn(p, n, {k: v for k, v in out.items() if v}, _trusted=True)


def fourier(f: SchwartzFn, S) -> SchwartzFn:
    """Fourier transform with kernel psi(<v, xi>) = psi(v^T S xi).

    Requires S unimodular at p (self-dual lattice), so that the standard
    lattice indicator is fixed.  F(F(f))(v) = f(-v) exactly.
    """
    p, n = f.p, f.n
    if not f.cells:
        return SchwartzFn.zero(p, n)
    # every piece is a phase on the ball (0, -k); refine them all to one
    # common level K and merge into a single dict, rather than repeatedly
    # re-unifying supports with __add__ (quadratic in the cell count)
    pieces = []
    K = 0
    for (c, k), coeff in f.cells.items():
        w = _pairing_vec(S, c)
        kap = 0
        for x in w:
            if x != 0:
                kap = max(kap, -valuation(x, p))
        K = max(K, -k, kap)
        pieces.append((k, w, coeff.scale(Fraction(p) ** (-k * n))))
    by_k: dict = {}
    for k, w, scaled in pieces:
        by_k.setdefault(k, []).append((w, scaled))
    out: dict = {}
    for k, plist in by_k.items():
        # all pieces with the same k share the same level-K child grid;
        # enumerate it once and batch the phase residues with numpy
        side = p ** (K + k)
        grid = np.stack(np.meshgrid(*([np.arange(side)] * n), indexing="ij"),
                        axis=-1).reshape(-1, n)
        step = Fraction(1, p ** k) if k >= 0 else Fraction(p ** (-k))
        keys = [(tuple(int(m) * step for m in row), K) for row in grid]
        for w, scaled in plist:
            e = 0
            for x in w:
                if x != 0:
                    e = max(e, -valuation(x, p))
            if e + k <= 0:
                # w . c is integral on every child: trivial phase
                for key in keys:
                    cur = out.get(key)
                    out[key] = scaled if cur is None else cur + scaled
                continue
            # c = m / p^k componentwise, so w . c = (u . m) / p^(e+k) mod 1
            denom = p ** (e + k)
            pe = p ** e
            u = np.array([int(x * pe) % denom for x in w], dtype=np.int64)
            res = (grid @ u) % denom
            table = {}
            for rv in np.unique(res):
                table[int(rv)] = psi_char(Fraction(int(rv), denom), p) * scaled
            for i, rv in enumerate(res.tolist()):
                key = keys[i]
                val = table[rv]
                cur = out.get(key)
                out[key] = val if cur is None else cur + val
    return SchwartzFn(p, n, {key: v for key, v in out.items() if v},
                      _trusted=True)
