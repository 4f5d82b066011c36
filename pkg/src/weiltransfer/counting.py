"""Certified counting/summation over residue classes of a quadratic congruence.

The central routine computes, for an integral quadratic polynomial
f(x) = x^T A x + b.x + c on a cell of Z_p^d and a phase character
psi(<w, x>), either

  * density mode:  lim_m  p^{-m(d-1)} * sum_{x mod p^m, f(x) = T mod p^m} psi(w.x)
  * finite mode:   sum_{x mod p^m, f(x) = T mod p^{ncons}} psi(w.x) * p^{-m d}
                   (independent of m once m is large enough, hence exact)

by a breadth-first walk over residue classes.  A class x0 mod p^j with
t = val_p(grad f(x0)) is closed in exact form once j >= 2t+1 (Hensel: the
solutions above x0 form a sheet with p^t * p^{(m-j)(d-1)} points mod p^m)
and once j is at least the phase conductor, so the phase is constant on the
class.  Classes that cannot yet be certified are expanded one level.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import NonStabilizing
from .exactnum import CycNum
from .padic import valuation

_CHUNK_ROWS = 1 << 21


def _int_mod(x, modulus: int) -> int:
    """Reduce a rational with p-unit denominator into Z/modulus."""
    x = Fraction(x)
    den = x.denominator
    return (x.numerator * pow(den, -1, modulus)) % modulus


def _max_exponent(p: int) -> int:
    """Largest M with d * p^(2M) safely inside int64 for d <= 8."""
    M = 1
    while 8 * p ** (2 * (M + 1)) < 2 ** 62:
        M += 1
    return M


def quad_residue_sum(p, A, bv, c0, target, center, level, *,
                     mode="density", ncons=None, phase=None, cap=12):
    """Phase-weighted residue sum for one cell.  All data rational with
    p-unit denominators; center integral, level >= 0.

    Returns (CycNum value, deepest_closed_level).
    Raises NonStabilizing if open classes remain at the level cap.
    """
    d = len(center)
    if mode == "finite":
        if ncons is None:
            raise ValueError("finite mode needs ncons")
        ncons = max(int(ncons), 0)
    elif mode != "density":
        raise ValueError("unknown mode %r" % (mode,))

    # phase conductor
    if phase is not None:
        e = 0
        for x in phase:
            x = Fraction(x)
            if x != 0:
                e = max(e, -valuation(x, p))
    else:
        e = 0
    kappa = e

    Mmax = _max_exponent(p)
    M = max(cap + 1, (ncons or 0), kappa, level) + 1
    if M > Mmax:
        M = Mmax
        cap = min(cap, M - 1)
    pM = p ** M

    Amat = np.array([[_int_mod(A[i][j], pM) for j in range(d)]
                     for i in range(d)], dtype=np.int64)
    bvec = np.array([_int_mod(bv[i], pM) for i in range(d)], dtype=np.int64)
    cc = _int_mod(c0, pM)
    T = _int_mod(target, pM)
    if phase is not None and e > 0:
        pe = p ** e
        w = np.array([_int_mod(Fraction(x) * pe, pe) for x in phase],
                     dtype=np.int64)
    else:
        pe = 1
        w = np.zeros(d, dtype=np.int64)

    Z = None  # expansion offsets, built lazily

    def fvals(X):
        Y = (X @ Amat) % pM
        out = (Y * X % pM).sum(axis=1) % pM
        out = (out + X @ bvec % pM + cc) % pM
        return out

    def tvals(X, j):
        G = (2 * (X @ Amat) % pM + bvec) % pM
        t = np.zeros(len(X), dtype=np.int64)
        mod = 1
        for k in range(1, j + 1):
            mod *= p
            mask = (G % mod == 0).all(axis=1)
            t += mask
            if not mask.any():
                break
        return t

    ppow = [1]
    for _ in range(M + 1):
        ppow.append(ppow[-1] * p)

    acc: dict[int, Fraction] = {}
    deepest = level

    def close_rows(X, t, j):
        nonlocal deepest
        if len(X) == 0:
            return
        deepest = max(deepest, j)
        R = (fvals(X) - T) % pM
        # a sheet above x0 is nonempty iff f(x0) = T to order j + t
        # (to order ncons in finite mode, whichever is smaller)
        if mode == "density":
            need = np.minimum(j + t, M)
        else:
            need = np.minimum(np.minimum(j + t, ncons), M)
        keep = np.ones(len(X), dtype=bool)
        for tv in np.unique(need):
            sel = need == tv
            keep[sel] = (R[sel] % ppow[int(tv)]) == 0
        X, t = X[keep], t[keep]
        if len(X) == 0:
            return
        if mode == "density":
            wexp = t - j * (d - 1)
        else:
            wexp = np.full(len(X), -j * d, dtype=np.int64)
            extra = ncons - j - t
            deeper = extra > 0
            wexp[deeper] -= extra[deeper]
        pr = (X @ w) % pe if pe > 1 else np.zeros(len(X), dtype=np.int64)
        for exp in np.unique(wexp):
            sel = wexp == exp
            weight = Fraction(p) ** int(exp)
            counts = np.bincount(pr[sel], minlength=pe)
            for res, cnt in enumerate(counts):
                if cnt:
                    acc[res] = acc.get(res, Fraction(0)) + weight * int(cnt)

    def filter_rows(X, j):
        if mode == "finite":
            need = min(j, ncons)
        else:
            need = j
        need = min(need, M)
        if need <= 0:
            return X
        r = (fvals(X) - T) % ppow[need]
        return X[r == 0]

    def sieve(X, j):
        """Filter to the congruence, close every certifiable row, return
        the still-open remainder."""
        X = filter_rows(X, j)
        if len(X) == 0:
            return X
        t = tvals(X, j)
        smooth = (2 * t + 1 <= j) & (j >= kappa)
        if mode == "finite":
            smooth |= (j >= ncons) & (j >= kappa)
        close_rows(X[smooth], t[smooth], j)
        return X[~smooth]

    if level < 0:
        raise ValueError("engine cells must have level >= 0 (pre-scale first)")
    X = np.array([[int(x) % ppow[level] for x in center]], dtype=np.int64)
    j = level
    X = sieve(X, j)

    while len(X):
        if j >= cap:
            raise NonStabilizing(
                "residue classes still open at level %d" % j, level=j)
        if Z is None:
            grids = np.meshgrid(*([np.arange(p)] * d), indexing="ij")
            Z = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
        pj = ppow[j]
        chunks = []
        # expand and sieve chunkwise so the open frontier, not the raw
        # p^d-fold expansion, bounds the memory footprint
        step = max(1, _CHUNK_ROWS // len(Z))
        for i in range(0, len(X), step):
            kids = (X[i:i + step, None, :] + pj * Z[None, :, :]).reshape(-1, d)
            kids = sieve(kids, j + 1)
            if len(kids):
                chunks.append(kids)
        X = np.concatenate(chunks) if chunks else np.empty((0, d), dtype=np.int64)
        j += 1

    terms = {}
    for res, weight in acc.items():
        if weight:
            key = (Fraction(res, pe) % 1, 0)
            terms[key] = terms.get(key, Fraction(0)) + weight
    return CycNum(terms), deepest


def brute_residue_sum(p, A, bv, c0, target, center, level, m, ncons,
                      phase=None):
    """Reference implementation: enumerate the cell mod p^m directly and
    return sum over {f(x) = T mod p^ncons} of psi(w.x) * p^{-m d}.

    Exact for m >= max(level, ncons, phase conductor).  Small cases only.
    """
    from itertools import product as iproduct
    d = len(center)
    pm = p ** m
    total = CycNum.rational(0)
    vol = Fraction(1, pm ** d)
    pl = p ** (m - level)
    for idx in iproduct(range(pl), repeat=d):
        x = tuple(int(center[i]) + p ** level * idx[i] for i in range(d))
        fx = Fraction(0)
        for i in range(d):
            for jj in range(d):
                fx += Fraction(A[i][jj]) * x[i] * x[jj]
            fx += Fraction(bv[i]) * x[i]
        fx += Fraction(c0)
        diff = fx - Fraction(target)
        ok = diff == 0 or valuation(diff, p) >= ncons
        if not ok:
            continue
        if phase is not None:
            from .padic import psi_char
            ph = psi_char(sum(Fraction(phase[i]) * x[i] for i in range(d)), p)
        else:
            ph = CycNum.rational(1)
        total = total + ph.scale(vol)
    return total
