"""Ideals with cached reduced Groebner bases and the ideal-level toolbox.

Normal forms, elimination, colon/saturation/intersection, dimension and
height, and windowed bigraded Hilbert functions all live here.
"""

from __future__ import annotations

import math
from functools import lru_cache

from . import kernel
from .kernel import KernelCtx, ResourceAbort, module_gb, autoreduce
from .ring import (Polynomial, RingSpec, RingError, mon_div, mon_divides,
                   mon_lcm, mon_mul)


class IdealGB:
    """An ideal plus a cached reduced Groebner basis under ring.order."""

    def __init__(self, ring: RingSpec, generators, _basis=None):
        self.ring = ring
        gens = []
        for g in generators:
            if isinstance(g, str):
                g = ring.poly(g)
            if g.ring != ring:
                raise RingError("generator not in the ambient ring")
            gens.append(g)
        self.generators = tuple(gens)
        self._basis = tuple(_basis) if _basis is not None else None
        self._gbdata = None
        self._dim = None

    # -- basis ---------------------------------------------------------------

    @property
    def basis(self):
        """The reduced Groebner basis (computed lazily, cached)."""
        if self._basis is None:
            self._compute()
        return self._basis

    def _compute(self, **limits):
        ctx = KernelCtx(self.ring)
        vecs = [ctx.poly_to_vec(g) for g in self.generators if g]
        try:
            data = module_gb(ctx, vecs, **limits)
        except ResourceAbort as exc:
            exc.diagnostics["ring"] = repr(self.ring)
            raise
        reduced = autoreduce(data)
        self._basis = tuple(ctx.vec_to_poly(v) for v in reduced)
        self._gbdata = None

    def _reducer(self):
        """GBData over the reduced basis, for normal forms and membership."""
        if self._gbdata is None:
            basis = self.basis
            ctx = KernelCtx(self.ring)
            data = kernel.GBData(ctx)
            for g in basis:
                data._add(ctx.poly_to_vec(g), 0)
            self._gbdata = data
        return self._gbdata

    @property
    def lead_ideal(self):
        """Leading monomials of the reduced basis."""
        return tuple(g.lead_monomial for g in self.basis)

    # -- membership / normal form ---------------------------------------------

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f.ring != self.ring:
            raise RingError("polynomial not in the ambient ring")
        if not self.basis:
            return f
        red = self._reducer()
        nf = red.nf(red.ctx.poly_to_vec(f))
        return red.ctx.vec_to_poly(nf)

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def contains_ideal(self, other: "IdealGB") -> bool:
        return all(self.contains(g) for g in other.generators)

    def equals(self, other: "IdealGB") -> bool:
        """Ideal equality through the unique reduced bases."""
        return self.basis == other.basis

    def is_zero(self) -> bool:
        return not self.basis

    # -- derived ideals ---------------------------------------------------------

    def with_ring(self, ring: RingSpec) -> "IdealGB":
        return IdealGB(ring, [g.map_ring(ring) for g in self.generators])

    def to_json(self):
        return {"ring": self.ring.to_json(),
                "generators": [str(g) for g in self.generators]}

    @staticmethod
    def from_json(data) -> "IdealGB":
        ring = RingSpec.from_json(data["ring"])
        return IdealGB(ring, data["generators"])

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators[:4])
        more = ", ..." if len(self.generators) > 4 else ""
        return f"IdealGB({gens}{more})"


# ---------------------------------------------------------------------------
# Spec operations
# ---------------------------------------------------------------------------

def groebner_basis(I: IdealGB, **limits):
    """Reduced Groebner basis of I (optionally with resource limits)."""
    if limits:
        I._compute(**limits)
    return I.basis


def normal_form(f: Polynomial, I: IdealGB) -> Polynomial:
    return I.normal_form(f)


def spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    """S-polynomial of two nonzero polynomials (used by the post-hoc checks)."""
    lm_f, lm_g = f.lead_monomial, g.lead_monomial
    lcm = mon_lcm(lm_f, lm_g)
    F = f.ring.field
    uf = mon_div(lcm, lm_f)
    ug = mon_div(lcm, lm_g)
    return f.mul_monomial(uf, F.inv(f.lead_coeff)) - g.mul_monomial(ug, F.inv(g.lead_coeff))


def buchberger_criterion_holds(I: IdealGB) -> bool:
    """Post-hoc check: every S-polynomial of basis pairs reduces to zero."""
    basis = I.basis
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            if not I.normal_form(spoly(basis[i], basis[j])).is_zero():
                return False
    return True


def eliminate(I: IdealGB, block: str, **limits) -> IdealGB:
    """I intersected with the subring without the named block.

    The block-free part of the block-order basis is already the reduced
    basis of the elimination ideal under the small ring's default order,
    so it is installed directly instead of being recomputed.
    """
    ring = I.ring
    lo, hi = ring.block_range(block)
    elim_ring = ring.with_order(("elim", block))
    ctx = KernelCtx(elim_ring)
    vecs = [ctx.poly_to_vec(g.map_ring(elim_ring)) for g in I.generators if g]
    try:
        data = module_gb(ctx, vecs, **limits)
    except ResourceAbort as exc:
        exc.diagnostics["ring"] = repr(elim_ring)
        raise
    reduced = autoreduce(data, component=_blockfree_filter(ctx, lo, hi))
    small = ring.without_block(block)
    var_map = {elim_ring.var_index(name): small.var_index(name)
               for name in small.names}
    kept = [ctx.vec_to_poly(v).map_ring(small, var_map) for v in reduced]
    return IdealGB(small, kept, _basis=kept)


def _blockfree_filter(ctx, lo, hi):
    table = ctx.table
    mask = 0
    for i in range(lo, hi):
        mask |= ((1 << kernel.FIELD_BITS) - 1) << (kernel.FIELD_BITS * i)

    def keep(lead_packed):
        return not (lead_packed & mask)

    return keep


def ideal_sum(A: IdealGB, B: IdealGB) -> IdealGB:
    return IdealGB(A.ring, list(A.generators) + list(B.generators))


def ideal_product(A: IdealGB, B: IdealGB) -> IdealGB:
    gens = [f * g for f in A.generators for g in B.generators]
    return IdealGB(A.ring, gens)


def ideal_power(A: IdealGB, k: int) -> IdealGB:
    if k == 0:
        return IdealGB(A.ring, [A.ring.one])
    out = A
    for _ in range(k - 1):
        out = ideal_product(out, A)
    return out


def intersect(A: IdealGB, B: IdealGB, **limits) -> IdealGB:
    """Intersection via the auxiliary-variable construction t*A + (1-t)*B."""
    ring = A.ring
    aux = "t" if "t" not in ring.names else "zt"
    big = ring.with_extra_block(aux, 1)
    t = big.variable(aux)
    one = big.one
    gens = [t * f.map_ring(big) for f in A.generators]
    gens += [(one - t) * g.map_ring(big) for g in B.generators]
    J = IdealGB(big, gens)
    return eliminate(J, aux, **limits)


def colon(A: IdealGB, f, **limits) -> IdealGB:
    """A : f for a polynomial f, or A : J for an ideal J (via syzygies)."""
    if isinstance(f, IdealGB):
        return _colon_ideal(A, f, **limits)
    ring = A.ring
    if f.is_zero():
        return IdealGB(ring, [ring.one])
    gens = [f] + [g for g in A.generators if g]
    ctx = KernelCtx(ring)
    vecs = [ctx.poly_to_vec(g) for g in gens]
    data = module_gb(ctx, vecs, track=True, **limits)
    syz = kernel.syzygies_over_gens(vecs, data)
    out = {}
    for s in syz:
        d = {ctx.table.unpack(m): c for (comp, m), c in s.items() if comp == 0}
        d = {m: c for m, c in d.items() if c}
        if d:
            g = Polynomial.from_dict(ring, d).monic()
            out[g.terms] = g
    return IdealGB(ring, sorted(out.values(),
                                key=lambda g: ring.order_obj.key(g.lead_monomial)))


def _colon_ideal(A: IdealGB, J: IdealGB, **limits) -> IdealGB:
    """A : J as the kernel trick over one syzygy computation per generator."""
    out = None
    for h in J.generators:
        if h.is_zero():
            continue
        Q = colon(A, h, **limits)
        out = Q if out is None else intersect(out, Q, **limits)
    if out is None:
        return IdealGB(A.ring, [A.ring.one])
    return out


def saturate(A: IdealGB, J, **limits):
    """(A : J^infinity, stabilization exponent), by iterated colon."""
    if isinstance(J, Polynomial):
        J = IdealGB(A.ring, [J])
    prev = A
    k = 0
    while True:
        nxt = colon(prev, J, **limits)
        if nxt.basis == prev.basis:
            return prev, k
        prev = nxt
        k += 1


def ideal_ops(op: str, A: IdealGB, B=None, **kw):
    """Dispatcher matching the spec op surface."""
    if op == "sum":
        return ideal_sum(A, B)
    if op == "product":
        return ideal_product(A, B)
    if op == "power":
        return ideal_power(A, kw.get("k", B))
    if op == "intersect":
        return intersect(A, B)
    if op == "colon":
        return colon(A, B)
    if op == "saturate":
        return saturate(A, B)
    raise ValueError(f"unknown ideal op {op!r}")


# ---------------------------------------------------------------------------
# Dimension, height, Hilbert functions
# ---------------------------------------------------------------------------

def _independent_sets_dim(leads, nvars) -> int:
    """dim of B/L for the monomial ideal L: size of a maximal independent set.

    A variable subset V is independent iff no minimal generator of L has its
    support inside V.  Found by branch and bound over the generators.
    """
    supports = []
    for m in leads:
        supports.append(frozenset(i for i, e in enumerate(m) if e))
    if frozenset() in supports:
        return -1  # unit ideal
    best = 0

    def search(idx, excluded):
        nonlocal best
        if nvars - len(excluded) <= best:
            return
        if idx == len(supports):
            best = max(best, nvars - len(excluded))
            return
        sup = supports[idx]
        if sup & excluded:
            search(idx + 1, excluded)
            return
        for v in sorted(sup):
            search(idx + 1, excluded | {v})

    search(0, frozenset())
    return best


def dim_quotient(I: IdealGB) -> int:
    """Krull dimension of ring/I (combinatorial, from the lead ideal)."""
    if I._dim is None:
        if any(not g.is_zero() and sum(g.lead_monomial) == 0 for g in I.basis):
            I._dim = -1
        else:
            I._dim = _independent_sets_dim(I.lead_ideal, I.ring.nvars)
    return I._dim


def height(I: IdealGB) -> int:
    return I.ring.nvars - dim_quotient(I)


def _compositions(total, parts):
    """All exponent tuples of length `parts` summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class HFTable:
    """Map from bidegree to k-dimension over an explicitly computed window."""

    def __init__(self, entries: dict, window):
        self.entries = dict(entries)
        self.window = window

    def __call__(self, a, b):
        if (a, b) not in self.entries:
            if not (self.window[0][0] <= a <= self.window[0][1]
                    and self.window[1][0] <= b <= self.window[1][1]):
                raise KeyError(f"bidegree ({a},{b}) outside the computed window")
        return self.entries.get((a, b), 0)

    def __eq__(self, other):
        return isinstance(other, HFTable) and self.entries == other.entries

    def to_json(self):
        return {f"({a},{b})": v for (a, b), v in sorted(self.entries.items())}


def hf_quotient(I: IdealGB, xmax: int, ymax: int, xmin=0, ymin=0) -> HFTable:
    """Bigraded Hilbert function of ring/I on the window [xmin..xmax]x[ymin..ymax].

    Standard monomials are counted by splitting each monomial into its x-part
    and y+extras part; the ideal must be in a two-block ring (no extras).
    """
    ring = I.ring
    if ring.blocks[-1][0] not in ("x", "y"):
        raise RingError("hilbert window requires a plain bigraded ring")
    xlo, xhi = ring.block_range("x")
    ylo, yhi = ring.block_range("y")
    leads = I.lead_ideal
    return _hf_from_leads(ring, leads, xmax, ymax, xmin, ymin)


def _hf_from_leads(ring, leads, xmax, ymax, xmin=0, ymin=0):
    xlo, xhi = ring.block_range("x")
    ylo, yhi = ring.block_range("y")
    d = xhi - xlo
    n = yhi - ylo
    split = [(m[xlo:xhi], m[ylo:yhi]) for m in leads]
    entries = {}
    for a in range(max(xmin, 0), xmax + 1):
        for xm in _compositions(a, d):
            applicable = [ym for (gm, ym) in split if mon_divides(gm, xm)]
            minimal = _minimalize_monomials(applicable)
            counts = _count_std_column(minimal, n, ymax)
            for b in range(max(ymin, 0), ymax + 1):
                entries[(a, b)] = entries.get((a, b), 0) + counts[b]
    for a in range(xmin, xmax + 1):
        for b in range(ymin, ymax + 1):
            entries.setdefault((a, b), 0)
    return HFTable(entries, ((xmin, xmax), (ymin, ymax)))


def _minimalize_monomials(mons):
    out = []
    for m in sorted(set(mons), key=sum):
        if not any(mon_divides(o, m) for o in out):
            out.append(m)
    return out


def _count_std_column(leads, n, ymax):
    """Counts of degree-b monomials in n vars outside the monomial ideal."""
    if any(sum(m) == 0 for m in leads):
        return [0] * (ymax + 1)
    counts = []
    for b in range(ymax + 1):
        counts.append(_num_std(tuple(sorted(leads)), n, b))
    return counts


@lru_cache(maxsize=200000)
def _num_std(leads, n, b):
    """Number of standard monomials of degree b for a monomial ideal (n vars)."""
    if b < 0:
        return 0
    if not leads:
        return math.comb(b + n - 1, n - 1)
    # Recursion: N(L + (m)) = N(L) - N(L : m) shifted by deg m.
    m = leads[-1]
    rest = leads[:-1]
    colon = _minimalize_monomials([mon_div(mon_lcm(g, m), m) for g in rest])
    return (_num_std(rest, n, b)
            - _num_std(tuple(sorted(colon)), n, b - sum(m)))


def numerics(I: IdealGB, window=None) -> dict:
    """{dim, height, hf over the requested window (bigraded rings only)}."""
    out = {"dim": dim_quotient(I), "height": height(I)}
    if window is not None:
        (xmax, ymax) = window
        cost = (xmax + 1) * (ymax + 1) * math.comb(xmax + I.ring.x_count - 1,
                                                   I.ring.x_count - 1)
        if cost > 5_000_000:
            raise ResourceAbort("hilbert window too large",
                                {"estimated_cells": cost})
        out["hf"] = hf_quotient(I, xmax, ymax)
    return out
