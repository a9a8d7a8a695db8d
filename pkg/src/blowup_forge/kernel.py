"""Buchberger kernel shared by ideal and module computations.

Monomials are packed into single integers (10 bits per variable plus a total
degree field), so monomial product is integer addition and divisibility is a
guard-bit test.  Every supported monomial order is an integer linear
functional K of the exponent vector: comparing K compares monomials, and
K(u*v) = K(u) + K(v), so term priorities inside reductions are maintained by
integer additions alone.

Module terms are (priority, mm, coeff) with mm = (packed_mon << 24) | comp;
ideals are the one-component case.  The engine implements the sugar selection
strategy, the Gebauer-Moeller pair update (realizing both Buchberger
criteria), optional degree truncation, and optional cofactor tracking from
which syzygies are read off (Schreyer).
"""

from __future__ import annotations

import heapq
import time

from .ring import Polynomial, RingSpec, DegRevLex, BlockElim, BiDegRevLex

FIELD_BITS = 10
FIELD_MAX = (1 << (FIELD_BITS - 1)) - 1  # 511, guard bit reserved
COMP_BITS = 24
COMP_MASK = (1 << COMP_BITS) - 1


class ResourceAbort(RuntimeError):
    """A Groebner computation hit a resource limit; carries partial state."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class MonTable:
    """Packing, guard masks, and order functionals for one ring."""

    def __init__(self, ring: RingSpec):
        self.ring = ring
        n = ring.nvars
        self.nvars = n
        self.degshift = FIELD_BITS * n
        self.pack_w = [(1 << (FIELD_BITS * i)) + (1 << self.degshift)
                       for i in range(n)]
        guard = 1 << (self.degshift + 20)
        for i in range(n):
            guard |= 1 << (FIELD_BITS * i + FIELD_BITS - 1)
        self.guard = guard
        self._order_w = {}

    def pack(self, mon) -> int:
        p = 0
        for e, w in zip(mon, self.pack_w):
            if e > FIELD_MAX:
                raise ResourceAbort("exponent overflow in packed monomial",
                                    {"exponent": e})
            p += e * w
        return p

    def unpack(self, packed: int):
        return tuple((packed >> (FIELD_BITS * i)) & ((1 << FIELD_BITS) - 1)
                     for i in range(self.nvars))

    def deg(self, packed: int) -> int:
        return packed >> self.degshift

    def divides(self, v: int, u: int) -> bool:
        g = self.guard
        return ((u | g) - v) & g == g

    def lcm(self, u: int, v: int) -> int:
        a, b = self.unpack(u), self.unpack(v)
        return self.pack(tuple(x if x > y else y for x, y in zip(a, b)))

    def coprime(self, u: int, v: int) -> bool:
        a, b = self.unpack(u), self.unpack(v)
        return all(not (x and y) for x, y in zip(a, b))

    def wdeg(self, packed: int, weights) -> int:
        if weights is None:
            return packed >> self.degshift
        mon = self.unpack(packed)
        return sum(w * e for w, e in zip(weights, mon))

    # -- order functionals ---------------------------------------------------

    def order_weights(self, order) -> list:
        """Per-variable weights W with K(mon) = dot(W, mon) realizing order."""
        key = id(order)
        w = self._order_w.get(key)
        if w is not None:
            return w
        n = self.nvars
        w = [0] * n
        segments = []  # (kind, data) from least significant upward
        if isinstance(order, DegRevLex):
            segments = [("revlex", order.sig), ("deg", range(n))]
        elif isinstance(order, BlockElim):
            segments = [("revlex", order.rest_sig), ("deg", order.rest_sig),
                        ("revlex", order.block_sig), ("deg", order.block_sig)]
        elif isinstance(order, BiDegRevLex):
            segments = [("revlex", order.sig), ("deg", range(n)),
                        ("deg", order.y_idx), ("deg", order.x_idx)]
        else:
            raise TypeError(f"unsupported order {order!r}")
        shift = 0
        for kind, data in segments:
            if kind == "revlex":
                sig = list(data)
                # the most significant variable's field sits lowest
                for j, var in enumerate(sig):
                    w[var] -= 1 << shift
                    if j < len(sig) - 1:
                        shift += FIELD_BITS
                shift += FIELD_BITS + 4
            else:
                for var in data:
                    w[var] += 1 << shift
                shift += FIELD_BITS + 8
        self._order_w[id(order)] = w
        return w


class KernelCtx:
    """Packed-term context: one ring, one module order, fixed component count.

    module_order is "POT" (position over term, lower component wins) or
    ("schreyer", leads) with leads a list of (comp, mon_tuple) of a previous
    basis.  Terms are (P, mm, coeff); smaller P means larger module monomial.
    """

    def __init__(self, ring: RingSpec, order=None, module_order="POT",
                 table: MonTable | None = None):
        self.ring = ring
        self.p = ring.characteristic
        self.order = order if order is not None else ring.order_obj
        self.table = table if table is not None else MonTable(ring)
        self.K = self.table.order_weights(self.order)
        self.pbits = self.table.degshift + 24
        if module_order == "POT":
            self._schreyer = None
        else:
            kind, leads = module_order
            assert kind == "schreyer"
            self._schreyer = [((lc << self.pbits) - self.kval_mon(lm))
                              for lc, lm in leads]

    # -- K and priorities ------------------------------------------------------

    def kval_mon(self, mon) -> int:
        return sum(w * e for w, e in zip(self.K, mon) if e)

    def priority(self, comp: int, kval: int) -> int:
        if self._schreyer is None:
            return (comp << self.pbits) - kval
        return ((self._schreyer[comp] - kval) << COMP_BITS) + comp

    # -- conversions -------------------------------------------------------------

    def vec_from_items(self, items):
        """items: iterable of ((comp, mon_tuple), coeff) -> internal vec."""
        p = self.p
        acc = {}
        for (comp, mon), c in items:
            mm = (self.table.pack(mon) << COMP_BITS) | comp
            nc = (acc.get(mm, 0) + c) % p if p else acc.get(mm, 0) + c
            if nc:
                acc[mm] = nc
            else:
                acc.pop(mm, None)
        return self.vec_from_packed_dict(acc)

    def vec_from_packed_dict(self, acc: dict):
        out = []
        for mm, c in acc.items():
            comp = mm & COMP_MASK
            kv = self.kval_mon(self.table.unpack(mm >> COMP_BITS))
            out.append((self.priority(comp, kv), mm, c))
        out.sort()
        return out

    def poly_to_vec(self, f: Polynomial, comp=0):
        return self.vec_from_items((((comp, m), c) for m, c in f.terms))

    def vec_to_items(self, vec):
        """-> list of ((comp, mon_tuple), coeff) in descending order."""
        t = self.table
        return [((mm & COMP_MASK, t.unpack(mm >> COMP_BITS)), c)
                for _, mm, c in vec]

    def vec_to_poly(self, vec) -> Polynomial:
        t = self.table
        return Polynomial.from_dict(
            self.ring, {t.unpack(mm >> COMP_BITS): c for _, mm, c in vec})

    def dict_to_items(self, d):
        """{(comp, mon): coeff} or {(comp, packed): ...} helper for reps."""
        t = self.table
        return [((comp, t.unpack(pk)), c) for (comp, pk), c in d.items()]

    def vec_monic(self, vec):
        if not vec:
            return vec
        lc = vec[0][2]
        if lc == 1:
            return vec
        p = self.p
        if p:
            inv = pow(lc, -1, p)
            return [(P, mm, c * inv % p) for P, mm, c in vec]
        return [(P, mm, c / lc) for P, mm, c in vec]

    def vec_sugar(self, vec, weights=None, comp_sugar=None):
        if not vec:
            return 0
        t = self.table
        best = None
        for _, mm, _ in vec:
            s = t.wdeg(mm >> COMP_BITS, weights)
            if comp_sugar is not None:
                s += comp_sugar[mm & COMP_MASK]
            if best is None or s > best:
                best = s
        return best


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------

def reduce_vec(ctx: KernelCtx, work: dict, buckets, weights=None, sugars=None,
               sugar=0, track=False, divcache=None):
    """Fully reduce work (dict mm -> coeff, with priorities dict) into NF.

    ``work`` maps mm -> (P, coeff).  buckets: comp -> list of
    (lead_packed, lead_P, tail_terms, index); reducers are monic.
    ``divcache`` memoizes divisor lookups across calls; entries are
    (bucket_position or -1, bucket_length_checked) and are rescanned from
    the recorded position when the bucket has grown.
    Returns (vec, cofactors or None, sugar).
    """
    p = ctx.p
    table = ctx.table
    guard = table.guard
    out = []
    cof = {} if track else None
    heap = [(pc[0], mm) for mm, pc in work.items()]
    heapq.heapify(heap)
    while heap:
        P, mm = heapq.heappop(heap)
        entry = work.get(mm)
        if entry is None:
            continue
        _, c = entry
        del work[mm]
        comp = mm & COMP_MASK
        packed = mm >> COMP_BITS
        bucket = buckets.get(comp, ())
        red = None
        if divcache is None:
            for red2 in bucket:
                if ((packed | guard) - red2[0]) & guard == guard:
                    red = red2
                    break
        else:
            cached = divcache.get(mm)
            start = 0
            if cached is not None:
                pos, upto = cached
                if pos >= 0:
                    red = bucket[pos]
                elif upto == len(bucket):
                    pass
                else:
                    start = upto
                    cached = None
            if red is None and cached is None:
                found = -1
                for k in range(start, len(bucket)):
                    red2 = bucket[k]
                    if ((packed | guard) - red2[0]) & guard == guard:
                        red = red2
                        found = k
                        break
                divcache[mm] = (found, len(bucket))
        if red is None:
            out.append((P, mm, c))
            continue
        lead_packed, lead_P, tail, idx = red
        u = packed - lead_packed
        DP = P - lead_P
        if sugars is not None:
            s = table.wdeg(u, weights) + sugars[idx]
            if s > sugar:
                sugar = s
        if track:
            ku = (idx, u)
            nc = cof.get(ku, 0) + c
            if nc:
                cof[ku] = nc
            else:
                cof.pop(ku, None)
        ushift = u << COMP_BITS
        if p:
            for tP, tmm, tc in tail:
                nm = tmm + ushift
                old = work.get(nm)
                if old is None:
                    nc = (-c * tc) % p
                    if nc:
                        nP = tP + DP
                        work[nm] = (nP, nc)
                        heapq.heappush(heap, (nP, nm))
                else:
                    nc = (old[1] - c * tc) % p
                    if nc:
                        work[nm] = (old[0], nc)
                    else:
                        del work[nm]
        else:
            for tP, tmm, tc in tail:
                nm = tmm + ushift
                old = work.get(nm)
                if old is None:
                    nc = -c * tc
                    if nc:
                        nP = tP + DP
                        work[nm] = (nP, nc)
                        heapq.heappush(heap, (nP, nm))
                else:
                    nc = old[1] - c * tc
                    if nc:
                        work[nm] = (old[0], nc)
                    else:
                        del work[nm]
    out.sort()
    return out, cof, sugar


def _vec_to_work(vec):
    return {mm: (P, c) for P, mm, c in vec}


# ---------------------------------------------------------------------------
# Groebner data
# ---------------------------------------------------------------------------

class GBData:
    """Result of a module Groebner computation (packed representation)."""

    def __init__(self, ctx: KernelCtx):
        self.ctx = ctx
        self.basis = []       # monic vecs, insertion order
        self.lt = []          # (comp, packed) leads
        self.sugars = []
        self.reps = None      # {(gen_index, packed_mon): coeff} per element
        self.syz_basis = None
        self.zero_gens = []
        self.truncated = False
        self.stats = {"pairs_processed": 0, "zero_reductions": 0}
        self.buckets = {}
        self.divcache = {}

    def _add(self, vec, sugar, rep=None):
        idx = len(self.basis)
        self.basis.append(vec)
        P, mm, _ = vec[0]
        comp = mm & COMP_MASK
        packed = mm >> COMP_BITS
        self.lt.append((comp, packed))
        self.sugars.append(sugar)
        self.buckets.setdefault(comp, []).append((packed, P, vec[1:], idx))
        if self.reps is not None:
            self.reps.append(rep)
        return idx

    def nf(self, vec):
        items, _, _ = reduce_vec(self.ctx, _vec_to_work(vec), self.buckets,
                                 divcache=self.divcache)
        return items

    def nf_cof(self, vec):
        items, cof, _ = reduce_vec(self.ctx, _vec_to_work(vec), self.buckets,
                                   track=True, divcache=self.divcache)
        return items, cof

    def contains(self, vec) -> bool:
        return not self.nf(vec)

    def basis_polys(self):
        return [self.ctx.vec_to_poly(v) for v in self.basis]


# ---------------------------------------------------------------------------
# Buchberger main loop
# ---------------------------------------------------------------------------

def module_gb(ctx: KernelCtx, gens, *, track=False, max_pairs=None,
              timeout_s=None, trunc_sugar=None, weights=None, comp_sugar=None):
    """Groebner basis of the span of ``gens`` (vecs in ctx representation)."""
    p = ctx.p
    table = ctx.table
    data = GBData(ctx)
    if track:
        data.reps = []
        data.syz_basis = []
    # the product criterion is only valid for polynomial ideals (rank one)
    use_product = all((term[1] & COMP_MASK) == 0
                      for v in gens if v for term in v)
    t0 = time.monotonic()

    pairs = []          # heap of (sugar, lcm_priority, i, j)
    pair_lcm = {}
    koszul_skips = []

    def push_pair(i, j):
        ci, pi = data.lt[i]
        cj, pj = data.lt[j]
        lcm = table.lcm(pi, pj)
        s = max(data.sugars[i] + table.wdeg(lcm - pi, weights),
                data.sugars[j] + table.wdeg(lcm - pj, weights))
        heapq.heappush(pairs, (s, ctx.priority(ci, ctx.kval_mon(table.unpack(lcm))), i, j))
        pair_lcm[(i, j)] = lcm

    def gm_update(t):
        ct, mt = data.lt[t]
        cand = {}
        for i in range(t):
            if data.lt[i][0] != ct:
                continue
            cand[i] = table.lcm(data.lt[i][1], mt)
        drop = set()
        items = sorted(cand.items())
        for i, li in items:
            for j, lj in items:
                if i == j or j in drop:
                    continue
                if li != lj and table.divides(lj, li):
                    drop.add(i)
                    break
        groups = {}
        for i, li in items:
            if i not in drop:
                groups.setdefault(li, []).append(i)
        new_pairs = []
        for lcm_mon in sorted(groups):
            members = groups[lcm_mon]
            if use_product:
                coprime = [i for i in members if table.coprime(data.lt[i][1], mt)]
                if coprime:
                    if track:
                        koszul_skips.extend((i, t) for i in coprime)
                    continue
            new_pairs.append((members[0], t))
        removed = []
        for (i, j), lcm_ij in pair_lcm.items():
            if j >= t or data.lt[i][0] != ct:
                continue
            if (table.divides(mt, lcm_ij)
                    and cand.get(i) != lcm_ij and cand.get(j) != lcm_ij):
                removed.append((i, j))
        for ij in removed:
            del pair_lcm[ij]
        for i, j in new_pairs:
            push_pair(i, j)

    for i, g in enumerate(gens):
        if not g:
            data.zero_gens.append(i)
            continue
        lc = g[0][2]
        gm = ctx.vec_monic(g)
        s = ctx.vec_sugar(gm, weights, comp_sugar)
        rep = None
        if track:
            inv = pow(lc, -1, p) if p else 1 / lc
            rep = {(i, 0): inv}
        gm_update(data._add(gm, s, rep))

    limit_pairs = max_pairs if max_pairs is not None else 5_000_000

    while pairs:
        s, lk, i, j = heapq.heappop(pairs)
        if (i, j) not in pair_lcm:
            continue
        lcm = pair_lcm.pop((i, j))
        if trunc_sugar is not None and s > trunc_sugar:
            data.truncated = True
            continue
        data.stats["pairs_processed"] += 1
        if data.stats["pairs_processed"] > limit_pairs:
            raise ResourceAbort(
                "pair limit exceeded",
                {"pairs": data.stats["pairs_processed"],
                 "basis": len(data.basis), "partial": data})
        if timeout_s is not None and time.monotonic() - t0 > timeout_s:
            raise ResourceAbort(
                "timeout", {"pairs": data.stats["pairs_processed"],
                            "basis": len(data.basis), "partial": data})
        ci, pi = data.lt[i]
        _, pj = data.lt[j]
        ui, uj = lcm - pi, lcm - pj
        gi, gj = data.basis[i], data.basis[j]
        kui = ctx.kval_mon(table.unpack(ui))
        kuj = ctx.kval_mon(table.unpack(uj))
        # priorities are affine in K, so a monomial shift is a constant bump
        dP_i = ctx.priority(0, kui) - ctx.priority(0, 0)
        dP_j = ctx.priority(0, kuj) - ctx.priority(0, 0)
        ushift = ui << COMP_BITS
        ushift_j = uj << COMP_BITS
        work = {}
        for P, mm, c in gi:
            work[mm + ushift] = (P + dP_i, c)
        for P, mm, c in gj:
            nm = mm + ushift_j
            old = work.get(nm)
            if old is None:
                work[nm] = (P + dP_j, (-c) % p if p else -c)
            else:
                nc = (old[1] - c) % p if p else old[1] - c
                if nc:
                    work[nm] = (old[0], nc)
                else:
                    del work[nm]
        nf, cof, s2 = reduce_vec(ctx, work, data.buckets, weights,
                                 data.sugars, s, track=track,
                                 divcache=data.divcache)
        if not nf:
            data.stats["zero_reductions"] += 1
            if track:
                syz = {(i, ui): 1, (j, uj): (-1) % p if p else -1}
                for (k, u), c in cof.items():
                    nc = (syz.get((k, u), 0) - c) % p if p else syz.get((k, u), 0) - c
                    if nc:
                        syz[(k, u)] = nc
                    else:
                        syz.pop((k, u), None)
                data.syz_basis.append(syz)
            continue
        lc = nf[0][2]
        nf_m = ctx.vec_monic(nf)
        rep = None
        if track:
            inv = pow(lc, -1, p) if p else 1 / lc
            minv = (-inv) % p if p else -inv
            rep = {}

            def acc_rep(base_rep, umon, scale):
                for (gidx, m), c in base_rep.items():
                    kk = (gidx, m + umon)
                    nc = rep.get(kk, 0) + scale * c
                    nc = nc % p if p else nc
                    if nc:
                        rep[kk] = nc
                    else:
                        rep.pop(kk, None)

            acc_rep(data.reps[i], ui, inv)
            acc_rep(data.reps[j], uj, minv)
            for (k, u), c in cof.items():
                acc_rep(data.reps[k], u, (minv * c) % p if p else -inv * c)
        gm_update(data._add(nf_m, s2, rep))

    if track:
        for i, j in koszul_skips:
            gi, gj = data.basis[i], data.basis[j]
            syz = {}
            for _, mm, c in gj:
                syz[(i, mm >> COMP_BITS)] = c
            for _, mm, c in gi:
                k = (j, mm >> COMP_BITS)
                nc = (syz.get(k, 0) - c) % p if p else syz.get(k, 0) - c
                if nc:
                    syz[k] = nc
                else:
                    syz.pop(k, None)
            data.syz_basis.append(syz)
    return data


# ---------------------------------------------------------------------------
# Reduced bases and syzygies
# ---------------------------------------------------------------------------

def autoreduce(data: GBData, component=None):
    """Minimalize and tail-reduce; returns new vecs sorted by ascending lead.

    ``component`` optionally filters by lead packed monomial (used by
    elimination to restrict to the block-free part before interreducing).
    """
    ctx = data.ctx
    table = ctx.table
    idxs = range(len(data.lt)) if component is None else \
        [i for i in range(len(data.lt)) if component(data.lt[i][1])]
    keep = []
    for i in idxs:
        ci, mi = data.lt[i]
        dominated = False
        for j in idxs:
            if i == j:
                continue
            cj, mj = data.lt[j]
            if ci != cj:
                continue
            if table.divides(mj, mi):
                if mj == mi and j > i:
                    continue
                dominated = True
                break
        if not dominated:
            keep.append(i)
    keep.sort(key=lambda i: -data.basis[i][0][0])  # ascending lead order
    reduced = []
    for pos, i in enumerate(keep):
        buckets = {}
        for pos2, j in enumerate(keep):
            if pos2 == pos:
                continue
            cj, pj = data.lt[j]
            buckets.setdefault(cj, []).append(
                (pj, data.basis[j][0][0], data.basis[j][1:], j))
        nf, _, _ = reduce_vec(ctx, _vec_to_work(data.basis[i]), buckets)
        reduced.append(ctx.vec_monic(nf))
    reduced.sort(key=lambda v: -v[0][0])
    return reduced


def syzygies_over_gens(gens, data: GBData):
    """Syzygies of the original gens, as dicts {(gen_index, packed): coeff}."""
    assert data.syz_basis is not None, "module_gb must be run with track=True"
    p = data.ctx.p
    out = []

    def mul_acc(target, poly_dict, umon, scale):
        for (gidx, m), c in poly_dict.items():
            kk = (gidx, m + umon)
            nc = target.get(kk, 0) + scale * c
            nc = nc % p if p else nc
            if nc:
                target[kk] = nc
            else:
                target.pop(kk, None)

    for syz in data.syz_basis:
        acc = {}
        for (k, u), c in syz.items():
            mul_acc(acc, data.reps[k], u, c)
        if acc:
            out.append(acc)
    for i, g in enumerate(gens):
        if i in data.zero_gens:
            out.append({(i, 0): 1})
            continue
        nf, cof = data.nf_cof(g)
        assert not nf, "input generator does not reduce to zero over its basis"
        acc = {(i, 0): 1}
        for (k, u), c in cof.items():
            mul_acc(acc, data.reps[k], u, (-c) % p if p else -c)
        if acc:
            out.append(acc)
    seen = set()
    final = []
    for s in out:
        items = tuple(sorted(s.items()))
        if items and items not in seen:
            seen.add(items)
            final.append(s)
    return final
