"""The rational function field F_q(s): polynomials, rational functions,
finite places with their valuations and residue maps, and the Gauss
extension of a valuation to polynomials in t.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import NotIntegral, ZeroInput
from .fields import FieldCtx, FieldElem, SmallField, build_extension

INF = math.inf


class Poly:
    """Polynomial over a :class:`SmallField`, coefficients little-endian."""

    __slots__ = ("F", "c", "var")

    def __init__(self, F: SmallField, coeffs: Sequence[int] = (), var: str = "s"):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.F, self.c, self.var = F, tuple(c), var

    @classmethod
    def const(cls, F, a, var="s"):
        return cls(F, (a,), var)

    @classmethod
    def x(cls, F, var="s"):
        return cls(F, (0, 1), var)

    @property
    def deg(self) -> int:
        return len(self.c) - 1  # -1 for zero

    def is_zero(self):
        return not self.c

    def lead(self):
        return self.c[-1] if self.c else 0

    def __eq__(self, o):
        return isinstance(o, Poly) and self.c == o.c and self.F is o.F

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"Poly({self.var}: {list(self.c)})"

    def _new(self, c):
        return Poly(self.F, c, self.var)

    def __add__(self, o):
        F = self.F
        a, b = self.c, o.c
        if len(a) < len(b):
            a, b = b, a
        return self._new([F.add(x, b[i]) if i < len(b) else x for i, x in enumerate(a)])

    def __neg__(self):
        return self._new([self.F.neg(x) for x in self.c])

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, int):
            return self._new([self.F.mul(o, x) for x in self.c])
        F = self.F
        if not self.c or not o.c:
            return self._new(())
        out = [0] * (len(self.c) + len(o.c) - 1)
        mt, at = F.mul_t, F.add_t
        for i, x in enumerate(self.c):
            if x:
                row = mt[x]
                for j, y in enumerate(o.c):
                    if y:
                        out[i + j] = at[out[i + j]][row[y]]
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        r = self._new((1,))
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def divmod(self, o):
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.F
        r = list(self.c)
        dq = len(r) - len(o.c)
        if dq < 0:
            return self._new(()), self
        inv = F.inv(o.lead())
        quo = [0] * (dq + 1)
        for i in range(dq, -1, -1):
            coef = r[i + len(o.c) - 1]
            if coef:
                f = F.mul(coef, inv)
                quo[i] = f
                for j, y in enumerate(o.c):
                    r[i + j] = F.sub(r[i + j], F.mul(f, y))
        return self._new(quo), self._new(r[: len(o.c) - 1])

    def __floordiv__(self, o):
        return self.divmod(o)[0]

    def __mod__(self, o):
        return self.divmod(o)[1]

    def monic(self):
        if not self.c:
            return self
        inv = self.F.inv(self.lead())
        return self * inv

    def gcd(self, o):
        a, b = self, o
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __call__(self, x):
        """Evaluate at an F_q code (int) or at a FieldElem of an extension."""
        if isinstance(x, FieldElem):
            ctx = x.ctx
            emb = ctx.embedding(self.F.ctx)
            coeffs = emb(self.F.elements[list(self.c)]) if self.c else ctx.zeros((0,))
            acc = ctx.zeros()
            xa = x.array
            for c in coeffs[::-1]:
                acc = ctx.add(ctx.mul(acc, xa), c)
            return FieldElem(ctx, acc)
        acc = 0
        for c in reversed(self.c):
            acc = self.F.add(self.F.mul(acc, x), c)
        return acc

    def compose_power(self, m: int):
        """``f(var^m)``; for m a power of q this is the q-Frobenius since F_q is fixed."""
        out = [0] * (m * max(self.deg, 0) + 1) if self.c else []
        for i, x in enumerate(self.c):
            out[i * m] = x
        return self._new(out)

    def substitute(self, g: "Poly"):
        acc = self._new(())
        for c in reversed(self.c):
            acc = acc * g + self._new((c,))
        return acc

    def lex_key(self):
        return tuple(reversed(self.c))

    def to_json(self):
        return [self.F.to_json(x) for x in self.c]


def is_irreducible(f: Poly) -> bool:
    """Irreducibility over F_q via gcd(f, x^(q^j) - x) = 1 for j <= deg/2."""
    d = f.deg
    if d <= 0:
        return False
    if d == 1:
        return True
    F = f.F
    x = Poly.x(F, f.var)
    cur = x
    for j in range(1, d // 2 + 1):
        cur = _powmod(cur, F.q, f)
        if (cur - x).gcd(f).deg > 0:
            return False
    return True


def _powmod(a: Poly, n: int, m: Poly) -> Poly:
    r = Poly(a.F, (1,), a.var)
    b = a % m
    while n:
        if n & 1:
            r = (r * b) % m
        b = (b * b) % m
        n >>= 1
    return r


def monic_polys(F: SmallField, d: int, var: str = "s"):
    """All monic polynomials of degree d in lex order (high coefficients first)."""
    for tail in itertools.product(range(F.q), repeat=d):
        yield Poly(F, tuple(reversed(tail)) + (1,), var)


class RatFunc:
    """Element of F_q(s) in canonical form: coprime, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, _canonical=False):
        if den is None:
            den = Poly(num.F, (1,), num.var)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            g = num.gcd(den)
            if g.deg > 0:
                num, den = num // g, den // g
            lc = den.lead()
            if lc != 1:
                inv = num.F.inv(lc)
                num, den = num * inv, den * inv
            if num.is_zero():
                den = Poly(num.F, (1,), num.var)
        self.num, self.den = num, den

    @property
    def F(self):
        return self.num.F

    @classmethod
    def const(cls, F, a, var="s"):
        return cls(Poly(F, (a,), var))

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, o):
        if isinstance(o, RatFunc):
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num.c, self.den.c))

    def __repr__(self):
        return f"RatFunc({list(self.num.c)} / {list(self.den.c)})"

    def __add__(self, o):
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, int):
            return RatFunc(self.num * o, self.den)
        return RatFunc(self.num * o.num, self.den * o.den)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, o):
        return self * o.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num**n, self.den**n, _canonical=True)

    def phi(self, i: int = 1):
        """Apply the q-Frobenius i times: s -> s^(q^i), F_q coefficients fixed."""
        m = self.F.q**i
        return RatFunc(self.num.compose_power(m), self.den.compose_power(m), _canonical=True)

    def __call__(self, x):
        return self.num(x) / self.den(x) if isinstance(x, FieldElem) else self.F.div(self.num(x), self.den(x))


def _multiplicity(f: Poly, pi: Poly) -> int:
    if f.is_zero():
        return 0
    n = 0
    while True:
        q, r = f.divmod(pi)
        if not r.is_zero():
            return n
        f, n = q, n + 1


@functools.lru_cache(maxsize=None)
def residue_ctx(p: int, e: int, d: int) -> FieldCtx:
    return build_extension(p, e, d, max_degree=max(64, e * d))


@dataclass(frozen=True, eq=False)
class PlaceFin:
    """Finite place of F_q(s): a monic irreducible ``pi`` of degree d."""

    pi: Poly
    d: int
    ctx: FieldCtx = field(repr=False)
    root: FieldElem = field(repr=False)

    def __eq__(self, o):
        return isinstance(o, PlaceFin) and self.pi == o.pi

    def __hash__(self):
        return hash(self.pi.c)

    @property
    def F(self):
        return self.pi.F

    def label(self) -> str:
        return poly_str(self.pi)

    def to_json(self):
        return {"pi": self.pi.to_json(), "d": self.d}


def make_place(pi: Poly) -> PlaceFin:
    """Build a place from a monic irreducible, choosing the smallest root."""
    F = pi.F
    if pi.lead() != 1:
        raise ValueError("place polynomial must be monic")
    d = pi.deg
    ctx = residue_ctx(F.p, F.ctx.e, d)
    if ctx.order > 1 << 20:
        raise ValueError("residue field too large to scan for roots")
    els = ctx.all_elements()
    emb = ctx.embedding(F.ctx)
    coeffs = emb(F.elements[list(pi.c)])
    acc = ctx.zeros((len(els),))
    for c in coeffs[::-1]:
        acc = ctx.add(ctx.mul(acc, els), c)
    roots = els[ctx.is_zero(acc)]
    if len(roots) != d:
        raise ValueError(f"{pi} is not irreducible of degree {d}")
    alpha = min(roots, key=ctx.lex_key)
    return PlaceFin(pi, d, ctx, FieldElem(ctx, alpha))


def place_count(q: int, d: int) -> int:
    """Number of monic irreducibles of degree d over F_q (necklace formula)."""
    total = 0
    for m in range(1, d + 1):
        if d % m == 0:
            total += _mobius(m) * q ** (d // m)
    return total // d


def _mobius(n: int) -> int:
    res, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            res = -res
        k += 1
    return -res if n > 1 else res


def enumerate_places(F: SmallField, d: int, var: str = "s") -> list[PlaceFin]:
    if d < 1:
        raise ValueError("degree must be >= 1")
    return [make_place(f) for f in monic_polys(F, d, var) if is_irreducible(f)]


def places_up_to(F: SmallField, d_max: int) -> list[PlaceFin]:
    return [pl for d in range(1, d_max + 1) for pl in enumerate_places(F, d)]


def place_from_poly(F: SmallField, coeffs: Sequence[int]) -> PlaceFin:
    pi = Poly(F, coeffs)
    if not is_irreducible(pi):
        raise ValueError(f"{pi} is not irreducible")
    return make_place(pi)


def valuation_at(place: PlaceFin, f: RatFunc) -> float:
    if f.is_zero():
        return INF
    return _multiplicity(f.num, place.pi) - _multiplicity(f.den, place.pi)


def reduce_at(place: PlaceFin, f: RatFunc) -> FieldElem:
    """Residue class of f in F_{q^d}; requires nonnegative valuation."""
    if valuation_at(place, f) < 0:
        raise NotIntegral(f"{f} has a pole at {place.label()}")
    return f.num(place.root) / f.den(place.root)


@dataclass
class TPoly:
    """Polynomial in t with coefficients in F_q(s)."""

    coeffs: list[RatFunc]

    def __post_init__(self):
        while self.coeffs and self.coeffs[-1].is_zero():
            self.coeffs.pop()

    def is_zero(self):
        return not self.coeffs


def gauss_valuation(place: PlaceFin, g: TPoly) -> float:
    if g.is_zero():
        raise ZeroInput("Gauss valuation of the zero polynomial")
    return min(valuation_at(place, c) for c in g.coeffs)


def poly_str(f: Poly) -> str:
    """Human-readable form such as ``s^2+3*s+1``."""
    if f.is_zero():
        return "0"
    terms = []
    for i in range(f.deg, -1, -1):
        c = f.c[i]
        if not c:
            continue
        cs = str(f.F.to_json(c)).replace(" ", "")
        if i == 0:
            terms.append(cs)
        else:
            mono = f.var if i == 1 else f"{f.var}^{i}"
            terms.append(mono if c == 1 else f"{cs}*{mono}")
    return "+".join(terms)
