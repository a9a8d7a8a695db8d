"""Exact scalar arithmetic, monomials, monomial orders, and bigraded polynomials.

A ring is a polynomial ring over QQ or GF(p) whose variables are split into
an x-block, a y-block, and optional named extra blocks (an elimination
variable ``t``, the primed block ``xp`` of an enveloping algebra, ...).
Monomials are dense exponent tuples.  Polynomials are immutable sorted term
lists under the ring's active monomial order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

DEFAULT_PRIME = 32003


class RingError(ValueError):
    pass


class ParseError(RingError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------

class Field:
    """Arithmetic in QQ (char 0) or GF(p) for an odd prime p < 2^31."""

    def __init__(self, char: int):
        if char != 0:
            if char <= 2 or char >= 2 ** 31 or not _is_prime(char):
                raise RingError(f"characteristic must be 0 or a prime in (2, 2^31): {char}")
        self.char = char

    def __call__(self, value) -> Union[int, Fraction]:
        """Coerce an int, Fraction, or 'a/b' string into the field."""
        p = self.char
        if isinstance(value, str):
            value = Fraction(value)
        if p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % p == 0:
                raise RingError(f"denominator not invertible mod {p}")
            return value.numerator * pow(value.denominator, -1, p) % p
        return int(value) % p

    def add(self, a, b):
        return (a + b) % self.char if self.char else a + b

    def sub(self, a, b):
        return (a - b) % self.char if self.char else a - b

    def mul(self, a, b):
        return (a * b) % self.char if self.char else a * b

    def neg(self, a):
        return -a % self.char if self.char else -a

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("division by the zero scalar")
        return pow(a, -1, self.char) if self.char else 1 / Fraction(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    @property
    def zero(self):
        return 0 if self.char else Fraction(0)

    @property
    def one(self):
        return 1 if self.char else Fraction(1)

    def __eq__(self, other):
        return isinstance(other, Field) and other.char == self.char

    def __hash__(self):
        return hash(("Field", self.char))

    def __repr__(self):
        return f"GF({self.char})" if self.char else "QQ"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Monomial orders
# ---------------------------------------------------------------------------
#
# An order exposes key(mon) -> tuple; larger key means larger monomial, so
# built-in max()/sorted() work directly.  Keys are cached per order instance
# because the same monomials are compared over and over inside Buchberger.

def _drl_key(mon, sig):
    """Degrevlex key for the significance sequence sig (most significant first).

    The degree component only counts the variables in sig, so block orders
    built from these keys compare block degrees first.
    """
    return (sum(mon[i] for i in sig),) + tuple(-mon[i] for i in reversed(sig))


class MonomialOrder:
    name = "order"

    def key(self, mon):  # pragma: no cover - interface
        raise NotImplementedError

    def greater(self, u, v):
        return self.key(u) > self.key(v)


class DegRevLex(MonomialOrder):
    """Degrevlex with an explicit variable significance sequence."""

    name = "degrevlex"

    def __init__(self, sig):
        self.sig = tuple(sig)
        self._cache = {}

    def key(self, mon):
        k = self._cache.get(mon)
        if k is None:
            k = _drl_key(mon, self.sig)
            self._cache[mon] = k
        return k


class BlockElim(MonomialOrder):
    """Eliminate one named block: compare the block part first, degrevlex within."""

    name = "elim"

    def __init__(self, block_sig, rest_sig):
        self.block_sig = tuple(block_sig)
        self.rest_sig = tuple(rest_sig)
        self._cache = {}

    def key(self, mon):
        k = self._cache.get(mon)
        if k is None:
            k = _drl_key(mon, self.block_sig) + _drl_key(mon, self.rest_sig)
            self._cache[mon] = k
        return k


class BiDegRevLex(MonomialOrder):
    """Degrevlex refined by (xdeg, ydeg) compared lexicographically."""

    name = "bigraded"

    def __init__(self, x_idx, y_idx, sig):
        self.x_idx = tuple(x_idx)
        self.y_idx = tuple(y_idx)
        self.sig = tuple(sig)
        self._cache = {}

    def key(self, mon):
        k = self._cache.get(mon)
        if k is None:
            xd = sum(mon[i] for i in self.x_idx)
            yd = sum(mon[i] for i in self.y_idx)
            k = (xd, yd) + _drl_key(mon, self.sig)
            self._cache[mon] = k
        return k


# ---------------------------------------------------------------------------
# Ring specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RingSpec:
    """A bigraded polynomial ring k[x_1..x_d, y_1..y_n, extras].

    ``extra_blocks`` is an ordered tuple of (name, count) pairs; a block of
    count 1 contributes a bare variable name (e.g. ``t``), larger blocks are
    indexed (``xp1``, ``xp2``, ...).  ``order`` names the active monomial
    order: "degrevlex", "bigraded", or ("elim", block_name).
    """

    characteristic: int = DEFAULT_PRIME
    x_count: int = 1
    y_count: int = 0
    extra_blocks: tuple = ()
    order: Union[str, tuple] = "degrevlex"

    def __post_init__(self):
        Field(self.characteristic)
        if self.x_count < 1:
            raise RingError("x_count must be >= 1")
        if self.y_count < 0:
            raise RingError("y_count must be >= 0")
        names = [f"x{i+1}" for i in range(self.x_count)]
        names += [f"y{i+1}" for i in range(self.y_count)]
        blocks = [("x", 0, self.x_count), ("y", self.x_count, self.x_count + self.y_count)]
        pos = self.x_count + self.y_count
        for bname, count in self.extra_blocks:
            if count == 1:
                names.append(bname)
            else:
                names.extend(f"{bname}{i+1}" for i in range(count))
            blocks.append((bname, pos, pos + count))
            pos += count
        if len(set(names)) != len(names):
            raise RingError(f"variable names are not unique: {names}")
        object.__setattr__(self, "names", tuple(names))
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "nvars", pos)
        object.__setattr__(self, "field", Field(self.characteristic))
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})
        object.__setattr__(self, "_order_obj", self._build_order(self.order))
        object.__setattr__(self, "_zero_mon", (0,) * pos)

    # -- order construction -------------------------------------------------

    def _default_sig(self):
        # y-block most significant, then x-block, then extras; this makes the
        # x-variables smallest among the main blocks, which the saturation
        # tricks and the bigraded conventions expect.
        x0, x1 = self.blocks[0][1], self.blocks[0][2]
        y0, y1 = self.blocks[1][1], self.blocks[1][2]
        sig = list(range(y0, y1)) + list(range(x0, x1))
        sig += list(range(self.x_count + self.y_count, self.nvars))
        return tuple(sig)

    def _build_order(self, spec):
        if isinstance(spec, MonomialOrder):
            return spec
        if spec == "degrevlex":
            return DegRevLex(self._default_sig())
        if spec == "bigraded":
            x0, x1 = self.blocks[0][1], self.blocks[0][2]
            y0, y1 = self.blocks[1][1], self.blocks[1][2]
            return BiDegRevLex(range(x0, x1), range(y0, y1), self._default_sig())
        if isinstance(spec, tuple) and len(spec) == 2 and spec[0] == "elim":
            bname = spec[1]
            for name, lo, hi in self.blocks:
                if name == bname:
                    rest = [i for i in self._default_sig() if not lo <= i < hi]
                    return BlockElim(range(lo, hi), rest)
            raise RingError(f"no block named {bname!r}")
        raise RingError(f"unknown order spec {spec!r}")

    @property
    def order_obj(self) -> MonomialOrder:
        return self._order_obj

    def with_order(self, spec) -> "RingSpec":
        return RingSpec(self.characteristic, self.x_count, self.y_count,
                        self.extra_blocks, spec)

    def without_block(self, bname) -> "RingSpec":
        if bname == "x":
            raise RingError("cannot drop the x-block")
        if bname == "y":
            return RingSpec(self.characteristic, self.x_count, 0,
                            self.extra_blocks, "degrevlex")
        extras = tuple(b for b in self.extra_blocks if b[0] != bname)
        if extras == self.extra_blocks:
            raise RingError(f"no block named {bname!r}")
        return RingSpec(self.characteristic, self.x_count, self.y_count,
                        extras, "degrevlex")

    def with_extra_block(self, bname, count) -> "RingSpec":
        return RingSpec(self.characteristic, self.x_count, self.y_count,
                        self.extra_blocks + ((bname, count),), self.order)

    # -- block bookkeeping ---------------------------------------------------

    def block_range(self, bname):
        for name, lo, hi in self.blocks:
            if name == bname:
                return lo, hi
        raise RingError(f"no block named {bname!r}")

    def block_degrees(self, mon):
        """Degree of mon in each block, in block order (x, y, extras...)."""
        return tuple(sum(mon[lo:hi]) for _, lo, hi in self.blocks)

    def bidegree_mon(self, mon):
        bd = self.block_degrees(mon)
        return (bd[0], bd[1])

    def var_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise RingError(f"unknown variable {name}") from None

    # -- element construction -------------------------------------------------

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, ())

    @property
    def one(self) -> "Polynomial":
        return Polynomial(self, ((self._zero_mon, self.field.one),))

    def constant(self, c) -> "Polynomial":
        c = self.field(c)
        if not c:
            return self.zero
        return Polynomial(self, ((self._zero_mon, c),))

    def variable(self, name_or_index) -> "Polynomial":
        i = name_or_index if isinstance(name_or_index, int) else self.var_index(name_or_index)
        mon = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Polynomial(self, ((mon, self.field.one),))

    def gens(self):
        return [self.variable(i) for i in range(self.nvars)]

    def monomial(self, mon, coeff=1) -> "Polynomial":
        c = self.field(coeff)
        if not c:
            return self.zero
        return Polynomial(self, ((tuple(mon), c),))

    def from_dict(self, d: dict) -> "Polynomial":
        return Polynomial.from_dict(self, d)

    def poly(self, text: str) -> "Polynomial":
        return parse(text, self)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "char": self.characteristic,
            "x_count": self.x_count,
            "y_count": self.y_count,
            "extra_blocks": [[n, c] for n, c in self.extra_blocks],
            "order": list(self.order) if isinstance(self.order, tuple) else self.order,
        }

    @staticmethod
    def from_json(data: dict) -> "RingSpec":
        order = data.get("order", "degrevlex")
        if isinstance(order, list):
            order = tuple(order)
        return RingSpec(
            characteristic=data.get("char", DEFAULT_PRIME),
            x_count=data["x_count"],
            y_count=data.get("y_count", 0),
            extra_blocks=tuple((n, c) for n, c in data.get("extra_blocks", [])),
            order=order,
        )

    def __repr__(self):
        base = f"GF({self.characteristic})" if self.characteristic else "QQ"
        return f"RingSpec({base}[{', '.join(self.names)}], order={self.order})"


# ---------------------------------------------------------------------------
# Monomial helpers (exponent tuples)
# ---------------------------------------------------------------------------

def mon_mul(u, v):
    return tuple(a + b for a, b in zip(u, v))


def mon_div(u, v):
    """u / v, assuming divisibility."""
    return tuple(a - b for a, b in zip(u, v))


def mon_divides(v, u):
    for a, b in zip(v, u):
        if a > b:
            return False
    return True


def mon_lcm(u, v):
    return tuple(a if a > b else b for a, b in zip(u, v))


def mon_gcd_is_one(u, v):
    for a, b in zip(u, v):
        if a and b:
            return False
    return True


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Immutable sparse polynomial: descending-sorted ((mon, coeff), ...)."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms):
        self.ring = ring
        self.terms = tuple(terms)

    @staticmethod
    def from_dict(ring: RingSpec, d: dict) -> "Polynomial":
        key = ring.order_obj.key
        items = [(m, c) for m, c in d.items() if c]
        items.sort(key=lambda t: key(t[0]), reverse=True)
        return Polynomial(ring, items)

    # -- predicates / accessors -----------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    @property
    def lead_monomial(self):
        if not self.terms:
            raise RingError("zero polynomial has no leading term")
        return self.terms[0][0]

    @property
    def lead_coeff(self):
        if not self.terms:
            raise RingError("zero polynomial has no leading term")
        return self.terms[0][1]

    def as_dict(self) -> dict:
        return dict(self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m, _ in self.terms)

    def bidegree(self) -> Optional[tuple]:
        """Common (xdeg, ydeg) of all terms, or None if not bihomogeneous."""
        if not self.terms:
            return None
        ring = self.ring
        bd = ring.bidegree_mon(self.terms[0][0])
        for m, _ in self.terms[1:]:
            if ring.bidegree_mon(m) != bd:
                return None
        return bd

    def block_degree(self) -> Optional[tuple]:
        """Common per-block degree vector, or None if not multihomogeneous."""
        if not self.terms:
            return None
        ring = self.ring
        bd = ring.block_degrees(self.terms[0][0])
        for m, _ in self.terms[1:]:
            if ring.block_degrees(m) != bd:
                return None
        return bd

    def degree_in_block(self, bname) -> int:
        lo, hi = self.ring.block_range(bname)
        if not self.terms:
            return -1
        return max(sum(m[lo:hi]) for m, _ in self.terms)

    def uses_block(self, bname) -> bool:
        lo, hi = self.ring.block_range(bname)
        return any(any(m[lo:hi]) for m, _ in self.terms)

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other):
        if self.ring is not other.ring and self.ring != other.ring:
            raise RingError("operands must share the ring")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        self._check(other)
        d = dict(self.terms)
        F = self.ring.field
        for m, c in other.terms:
            nc = F.add(d.get(m, F.zero), c)
            if nc:
                d[m] = nc
            else:
                d.pop(m, None)
        return Polynomial.from_dict(self.ring, d)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        F = self.ring.field
        return Polynomial(self.ring, tuple((m, F.neg(c)) for m, c in self.terms))

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scalar_mul(other)
        self._check(other)
        F = self.ring.field
        p = F.char
        d = {}
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        for m1, c1 in a:
            for m2, c2 in b:
                m = mon_mul(m1, m2)
                prev = d.get(m)
                nc = c1 * c2 if prev is None else prev + c1 * c2
                d[m] = nc % p if p else nc
        return Polynomial.from_dict(self.ring, d)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scalar_mul(other)
        return NotImplemented

    def scalar_mul(self, c) -> "Polynomial":
        F = self.ring.field
        c = F(c)
        if not c:
            return self.ring.zero
        return Polynomial(self.ring, tuple((m, F.mul(cc, c)) for m, cc in self.terms))

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scalar_mul(self.ring.field.inv(self.lead_coeff))

    def __pow__(self, e: int):
        if e < 0:
            raise RingError("negative powers are not polynomials")
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def mul_monomial(self, mon, coeff=None) -> "Polynomial":
        F = self.ring.field
        c = F.one if coeff is None else coeff
        terms = tuple((mon_mul(m, mon), F.mul(cc, c)) for m, cc in self.terms)
        return Polynomial(self.ring, terms)

    def exact_divide(self, divisor: "Polynomial") -> "Polynomial":
        """Quotient self/divisor; raises RingError when a remainder is nonzero."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        F = self.ring.field
        key = self.ring.order_obj.key
        rem = dict(self.terms)
        q = {}
        dm, dc = divisor.terms[0]
        dtail = divisor.terms[1:]
        dcinv = F.inv(dc)
        while rem:
            m = max(rem, key=key)
            c = rem.pop(m)
            if not mon_divides(dm, m):
                raise RingError("not divisible")
            u = mon_div(m, dm)
            cc = F.mul(c, dcinv)
            q[u] = cc
            for m2, c2 in dtail:
                mm = mon_mul(u, m2)
                nc = F.sub(rem.get(mm, F.zero), F.mul(cc, c2))
                if nc:
                    rem[mm] = nc
                else:
                    rem.pop(mm, None)
        return Polynomial.from_dict(self.ring, q)

    def substitute(self, assignment: dict) -> "Polynomial":
        """Substitute polynomials (or scalars) for variables, by name or index."""
        ring = self.ring
        sub = {}
        for k, v in assignment.items():
            i = k if isinstance(k, int) else ring.var_index(k)
            if not isinstance(v, Polynomial):
                v = ring.constant(v)
            sub[i] = v
        out = ring.zero
        pow_cache = {}
        for m, c in self.terms:
            part = ring.constant(c)
            plain = [0] * ring.nvars
            for i, e in enumerate(m):
                if not e:
                    continue
                if i in sub:
                    pe = pow_cache.get((i, e))
                    if pe is None:
                        pe = sub[i] ** e
                        pow_cache[(i, e)] = pe
                    part = part * pe
                else:
                    plain[i] = e
            if any(plain):
                part = part.mul_monomial(tuple(plain))
            out = out + part
        return out

    def map_ring(self, new_ring: RingSpec, var_map=None) -> "Polynomial":
        """Reinterpret in another ring; var_map sends old index -> new index."""
        if var_map is None:
            var_map = {self.ring.var_index(n): new_ring.var_index(n)
                       for n in self.ring.names}
        d = {}
        F = new_ring.field
        for m, c in self.terms:
            nm = [0] * new_ring.nvars
            for i, e in enumerate(m):
                if e:
                    j = var_map.get(i)
                    if j is None:
                        raise RingError(f"variable {self.ring.names[i]} has no image")
                    nm[j] = e
            d[tuple(nm)] = F(c)
        return Polynomial.from_dict(new_ring, d)

    # -- comparisons --------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, self.terms))

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"<{render(self)}>"


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[a-zA-Z]+\d*)|(?P<op>[-+*/^()]))")


def parse(text: str, ring: RingSpec) -> Polynomial:
    """Parse the signed-sum-of-terms grammar into a polynomial."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        if m.lastgroup:
            tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("end", "", len(text)))

    idx = 0

    def peek():
        return tokens[idx]

    def take(kind=None, value=None):
        nonlocal idx
        tk, tv, tp = tokens[idx]
        if kind and tk != kind or value and tv != value:
            raise ParseError(f"expected {value or kind}, found {tv!r}", tp)
        idx += 1
        return tv, tp

    F = ring.field

    def parse_coeff(tp_start):
        num, _ = take("num")
        if peek()[1] == "/":
            take("op", "/")
            den, dp = take("num")
            if ring.characteristic:
                if int(den) % ring.characteristic == 0:
                    raise ParseError("denominator divisible by the characteristic", dp)
                return F(Fraction(int(num), int(den)))
            return F(Fraction(int(num), int(den)))
        return F(int(num))

    def parse_term():
        coeff = F.one
        mon = [0] * ring.nvars
        saw_factor = False
        while True:
            tk, tv, tp = peek()
            if tk == "num":
                c = parse_coeff(tp)
                coeff = F.mul(coeff, c)
                saw_factor = True
            elif tk == "name":
                take("name")
                try:
                    vi = ring.var_index(tv)
                except RingError:
                    raise ParseError(f"unknown variable {tv}", tp) from None
                e = 1
                if peek()[1] == "^":
                    take("op", "^")
                    es, _ = take("num")
                    e = int(es)
                mon[vi] += e
                saw_factor = True
            else:
                raise ParseError(f"expected a coefficient or variable, found {tv!r}", tp)
            if peek()[1] == "*":
                take("op", "*")
                continue
            break
        if not saw_factor:
            raise ParseError("empty term", peek()[2])
        return tuple(mon), coeff

    d = {}
    sign = 1
    tk, tv, tp = peek()
    if tv in "+-":
        take()
        sign = -1 if tv == "-" else 1
    while True:
        mon, coeff = parse_term()
        if sign < 0:
            coeff = F.neg(coeff)
        nc = F.add(d.get(mon, F.zero), coeff)
        if nc:
            d[mon] = nc
        else:
            d.pop(mon, None)
        tk, tv, tp = peek()
        if tk == "end":
            break
        if tv not in "+-":
            raise ParseError(f"expected + or -, found {tv!r}", tp)
        take()
        sign = -1 if tv == "-" else 1
    return Polynomial.from_dict(ring, d)


def render(poly: Polynomial) -> str:
    """Canonical text form; parse(render(f)) == f."""
    if poly.is_zero():
        return "0"
    ring = poly.ring
    out = []
    for i, (mon, coeff) in enumerate(poly.terms):
        neg = coeff < 0 if ring.characteristic == 0 else False
        c = -coeff if neg else coeff
        factors = []
        for vi, e in enumerate(mon):
            if e == 1:
                factors.append(ring.names[vi])
            elif e > 1:
                factors.append(f"{ring.names[vi]}^{e}")
        body = "*".join(factors)
        if not body:
            cs = str(c)
        elif c == 1:
            cs = body
        else:
            cs = f"{c}*{body}"
        if i == 0:
            out.append(f"-{cs}" if neg else cs)
        else:
            out.append(f" - {cs}" if neg else f" + {cs}")
    return "".join(out)
