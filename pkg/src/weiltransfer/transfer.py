"""Orbital-integral transfer between SL2 Whittaker data and hyperboloid data.

A Schwartz function Phi on V maps two ways: to a Whittaker-type function on
SL2 via g -> (g.Phi)(v1), and to its restriction to the hyperboloid {q = 1}.
The transfer identity says the stabilized twisted orbital integral of the
first equals a phase-weighted fiber volume of the second; everything here is
computed exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (CosetEnumerationFailure, MetaplecticAmbiguity,
                     NeedsRefinement, NonStabilizing)
from .exactnum import CycNum, CYC_ZERO
from .padic import p_power_half, psi_char, valuation
from .quadspace import DEFAULT_CAP, DensityResult, QuadSpace
from .schwartz import SchwartzFn
from .weil import (SL2Elt, act_element, act_factors, bruhat_factor,
                   elt_n, elt_t, weil_index)

_GAMMA_CACHE = {}


def _gamma(Q: QuadSpace) -> CycNum:
    key = (Q.p, Q.gram, tuple(Q.v1))
    if key not in _GAMMA_CACHE:
        _GAMMA_CACHE[key] = weil_index(Q)
    return _GAMMA_CACHE[key]


def _torus_prefactor(Q: QuadSpace, a) -> CycNum:
    """gamma * chi(a) * |a|^{-n/2} as an exact scalar."""
    a = Fraction(a)
    out = _gamma(Q) * p_power_half(Q.p, Q.n * valuation(a, Q.p))
    if Q.chi(a) == -1:
        out = out.scale(-1)
    return out


# ---- the two sides ----


def p_value(phi: SchwartzFn, g: SL2Elt, Q: QuadSpace,
            factors=None) -> CycNum:
    """(g.phi)(v1); for odd dimension pass an explicit factor word."""
    if factors is None:
        if Q.n % 2 == 1:
            raise MetaplecticAmbiguity(
                "odd dimension: supply the factored word for g")
        factors = bruhat_factor(g)
    out = act_factors(phi, factors, Q)
    return out.evaluate(tuple(Q.v1))


def basic_f_value(Q: QuadSpace, g: SL2Elt, factors=None) -> CycNum:
    return p_value(Q.basic_schwartz(), g, Q, factors=factors)


class XTestFn:
    """A Schwartz function considered only through its restriction to the
    unit hyperboloid X_1 = {q = 1}."""

    def __init__(self, ambient: SchwartzFn, Q: QuadSpace,
                 cap: int = DEFAULT_CAP):
        Q._check_fn(ambient)
        self.ambient = ambient
        self.Q = Q
        self.cap = cap

    def _restriction_support(self, f: SchwartzFn):
        """Cells of f that meet X_1, with certified verdicts."""
        out = {}
        for (c, k), coeff in f.simplify().cells.items():
            verdict, _ = self.Q.meets_fiber(c, k, 1, cap=self.cap)
            if verdict is None:
                raise NeedsRefinement(
                    "cell %s level %d undetermined against X_1" % (c, k))
            if verdict:
                out[(c, k)] = coeff
        return out

    def is_zero(self) -> bool:
        return not self._restriction_support(self.ambient)

    def __eq__(self, other):
        if not isinstance(other, XTestFn):
            return NotImplemented
        if self.Q is not other.Q and \
                (self.Q.p, self.Q.gram) != (other.Q.p, other.Q.gram):
            return False
        diff = self.ambient - other.ambient
        return not self._restriction_support(diff)

    def __hash__(self):
        raise TypeError("XTestFn is not hashable")


def restrict_x(phi: SchwartzFn, Q: QuadSpace) -> XTestFn:
    return XTestFn(phi, Q)


def x_transfer_value(phi: SchwartzFn, a, Q: QuadSpace,
                     cap: int = DEFAULT_CAP) -> CycNum:
    """gamma * chi(a) * |a|^{-n/2} * int_{X_1} phi(x) psi(<v1,x>/a) |omega|.

    The phase is folded into the residue engine rather than materialized
    with phase_mul_linear; the two routes agree and the folded one does not
    refine cells.
    """
    a = Fraction(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    u = tuple(x / a for x in Q.v1)
    vol = Q.fiber_volume(phi, 1, phase_u=u, cap=cap)
    return _torus_prefactor(Q, a) * vol.value


def orbital_truncation(phi: SchwartzFn, a, Q: QuadSpace, n: int):
    """Depth-n truncation of the twisted orbital integral at t(a).

    Integrating psi(-b) (w t(a) n(b) phi)(v1) over b in p^{-n} Z_p collapses
    exactly, by the b-integral, to

        gamma chi(a) |a|^{-n/2} p^n int_{val(q - 1) >= n}
            phi(x) psi(<v1, x> / a) dx.

    Returns (value, deepest residue level used).
    """
    a = Fraction(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    u = tuple(x / a for x in Q.v1)
    total = CYC_ZERO
    deepest = 0
    for (c, k), coeff in phi.cells.items():
        val, deep = Q._cell_finite(c, k, Fraction(1), n, phase_u=u)
        total = total + coeff * val
        deepest = max(deepest, deep)
    total = total.scale(Fraction(Q.p) ** n)
    return _torus_prefactor(Q, a) * total, deepest


def whittaker_orbital(phi: SchwartzFn, a, Q: QuadSpace,
                      n_max: int = 16) -> DensityResult:
    """Stabilized twisted orbital integral of g -> (g.phi)(v1) at t(a);
    stabilization is agreement of two consecutive truncation depths."""
    prev = None
    prev_deep = 0
    for n in range(1, n_max + 1):
        total, deepest = orbital_truncation(phi, a, Q, n)
        if prev is not None and total == prev:
            return DensityResult(total, max(deepest, prev_deep), True)
        prev, prev_deep = total, deepest
    raise NonStabilizing("orbital integral did not stabilize", n_max)


def transfer_transform(xfn: XTestFn, a, Q: QuadSpace,
                       m_max: int = 10) -> CycNum:
    """Fourier-type transform of the fibered orbital values.

    J(xi) = fiber measure of phi on {q = 1, <v1,x> = 2 xi}; the transform is
    gamma chi(a) |a|^{-n/2} int J(tau/2) psi(tau/a) dtau, computed as a
    stabilized Riemann sum over tau-cells.  Requires the ambient function to
    avoid the critical points +-v1 (propagates SingularFiber otherwise).
    """
    a = Fraction(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    phi = xfn.ambient
    # tau = <v1,x> over the support is p-integral up to p^R
    R = 0
    for (c, k), _ in phi.cells.items():
        tau_c = Q.pairing(Q.v1, c)
        if tau_c != 0:
            R = max(R, -valuation(tau_c, Q.p))
        R = max(R, -k)
    prev = None
    for m in range(max(1, valuation(a, Q.p)), m_max + 1):
        total = CYC_ZERO
        pm = Q.p ** m
        pr = Q.p ** R
        for t in range(pm * pr):
            tau = Fraction(t, pr)
            j = Q.joint_fiber_volume(phi, 1, tau / 2)
            if j.value.is_zero():
                continue
            total = total + psi_char(tau / a, Q.p) * j.value
        total = total.scale(Fraction(1, pm))
        if prev is not None and total == prev:
            return _torus_prefactor(Q, a) * total
        prev = total
    raise NonStabilizing("xi-transform did not stabilize", m_max)


# ---- Hecke translate at t(p) ----


def _is_integral(g: SL2Elt, p: int) -> bool:
    return all(x == 0 or valuation(x, p) >= 0 for x in g.entries())


def hecke_cosets(p: int):
    """Left-coset representatives of the double coset K t(p) K.

    These mirror the cyclic-index-p^2 sublattices: t(p) n(j/p^2) for j mod
    p^2, n(j/p) for j a unit mod p, and t(1/p).  Certified: each
    representative has minimal entry valuation -1 (Cartan cell membership),
    the cosets are pairwise distinct, and the count is p^2 + p.
    """
    reps = [elt_t(p) * elt_n(Fraction(j, p * p)) for j in range(p * p)]
    reps += [elt_n(Fraction(j, p)) for j in range(1, p)]
    reps.append(elt_t(Fraction(1, p)))
    if len(reps) != p * p + p:
        raise CosetEnumerationFailure("wrong count")
    for g in reps:
        if min(valuation(x, p) for x in g.entries() if x != 0) != -1:
            raise CosetEnumerationFailure(
                "representative %r is not in the depth-one cell" % (g,))
    inv = [SL2Elt(g.d, -g.b, -g.c, g.a) for g in reps]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if _is_integral(inv[i] * reps[j], p):
                raise CosetEnumerationFailure(
                    "representatives %d and %d give the same coset" % (i, j))
    return reps


def _split_by_q_valuation(phi: SchwartzFn, Q: QuadSpace, thresh: int):
    """Split the support until each cell is decided against val(q) >= thresh
    (kept), thresh-3 <= val(q) < thresh (dropped: the j mod p^2 character
    sum vanishes there), or val(q) < thresh-3 (returned separately for the
    literal route)."""
    p, n = Q.p, Q.n
    keep, deep = {}, {}
    stack = list(phi.cells.items())
    helper = SchwartzFn.zero(p, n)
    while stack:
        (c, k), coeff = stack.pop()
        qc = Q.quad(c)
        vq = valuation(qc, p) if qc != 0 else None
        sc = Q.gram_times(c)
        vlin = min((valuation(x, p) for x in sc if x != 0), default=None)
        # q(c + d) - q(c) = <Sc, d> + q(d) has valuation >= vmove on the cell
        vmove = 2 * k
        if vlin is not None:
            vmove = min(vmove, vlin + k)
        if vmove >= thresh and (vq is None or vq >= thresh):
            keep[(c, k)] = keep.get((c, k), CYC_ZERO) + coeff
            continue
        if vq is not None and vq < vmove:
            if vq < thresh - 3:
                deep[(c, k)] = deep.get((c, k), CYC_ZERO) + coeff
            continue
        for child in helper._split_cell(c, k):
            stack.append(((child, k + 1), coeff))
    return (SchwartzFn(p, n, keep, _trusted=True),
            SchwartzFn(p, n, deep, _trusted=True))


def hecke_translate(phi: SchwartzFn, Q: QuadSpace,
                    method: str = "auto") -> SchwartzFn:
    """Sum of the coset actions for the depth-one Hecke operator at t(p).

    method "literal" applies act_element per coset; "fast" collapses the
    p^2 upper cosets analytically (summing psi(j q / p^2) over j mod p^2
    leaves p^2 times the q-integral locus) and only the p + 1 remaining
    cosets act one by one.  Both routes agree exactly.
    """
    if Q.n % 2 == 1:
        raise MetaplecticAmbiguity("Hecke translate needs even dimension")
    p = Q.p
    reps = hecke_cosets(p)
    if method == "auto":
        method = "literal" if p == 3 and Q.n <= 4 else "fast"
    if method == "literal":
        total = None
        for g in reps:
            term = act_element(phi, g, Q)
            total = term if total is None else total + term
        return total.simplify()
    # fast: summing psi(j q(x)/p^2) over j mod p^2 collapses the upper
    # family to p^2 * 1_{val(q) >= 2}, except where val(q) <= -1 (there the
    # geometric sum does not vanish and the literal route is used)
    from .weil import act_torus
    integral, nonintegral = _split_by_q_valuation(phi, Q, 2)
    total = act_torus(integral.scalar_mul(p * p), p, Q)
    if nonintegral.cells:
        for j in range(p * p):
            g = elt_t(p) * elt_n(Fraction(j, p * p))
            total = total + act_element(nonintegral, g, Q)
    for g in reps[p * p:]:
        total = total + act_element(phi, g, Q)
    return total.simplify()


def eval_weyl_pointwise(h: SchwartzFn, v, Q: QuadSpace) -> CycNum:
    """(w.h)(v) = gamma * sum over cells of the closed-form cell Fourier
    integral; exact, no materialization."""
    p, n = Q.p, Q.n
    v = tuple(Fraction(x) for x in v)
    sv = Q.gram_times(v)
    total = CYC_ZERO
    for (c, k), coeff in h.cells.items():
        if any(x != 0 and valuation(x, p) < -k for x in sv):
            continue
        phase = psi_char(sum(sv[i] * c[i] for i in range(n)), p)
        total = total + coeff * phase * CycNum.rational(
            Fraction(1, Fraction(p) ** (k * n)))
    return _gamma(Q) * total


def eval_word_pointwise(factors, phi: SchwartzFn, v, Q: QuadSpace) -> CycNum:
    """Evaluate (word.phi)(v) exactly, materializing only the part of the
    word to the right of the last Weyl atom."""
    from .weil import act_torus, act_unipotent
    widx = max((i for i, f in enumerate(factors) if f[0] == "w"), default=-1)
    h = phi
    for f in reversed(factors[widx + 1:]):
        if f[0] == "n":
            h = act_unipotent(h, f[1], Q)
        else:
            h = act_torus(h, f[1], Q)
    if widx == -1:
        return h.evaluate(v)
    # the left part acts pointwise: walk it left to right, moving the
    # evaluation point through torus atoms and collecting scalar phases
    v = tuple(Fraction(x) for x in v)
    scl = CycNum.rational(1)
    for f in factors[:widx]:
        if f[0] == "n":
            scl = scl * psi_char(Fraction(f[1]) * Q.quad(v), Q.p)
        elif f[0] == "t":
            a = Fraction(f[1])
            atom = p_power_half(Q.p, -Q.n * valuation(a, Q.p))
            if Q.chi(a) == -1:
                atom = atom.scale(-1)
            scl = scl * atom
            v = tuple(a * x for x in v)
        else:
            raise ValueError("only one Weyl atom is supported pointwise")
    return scl * eval_weyl_pointwise(h, v, Q)
