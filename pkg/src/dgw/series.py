"""Truncated power series in t over a finite field, matrices of them, and
bivariate rational entries in (s, t) that get expanded at a place.
"""
from __future__ import annotations

import itertools
import re

import numpy as np

from .errors import NonUnitDenominator, NotIntegral, SingularConstantTerm
from .fields import FieldCtx, FieldElem, SmallField
from .funcfield import PlaceFin, Poly, RatFunc, reduce_at, valuation_at
from .gfmatrix import identity, mat_inv


# --- raw array kernels ------------------------------------------------------

def series_matmul(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of series matrices shaped (n, m, N, k) and (m, r, N, k)."""
    n, m, N, k = a.shape
    r = b.shape[1]
    width = max(2 * k - 1, 1)
    if k > 32 and k * m * N * (ctx.p - 1) ** 2 < 2**50:
        # transform once; the t-convolution and the sums happen on spectra
        size = 1 << (2 * k - 1).bit_length()
        fa = np.fft.rfft(a.astype(np.float64), size)
        fb = np.fft.rfft(b.astype(np.float64), size)
        facc = np.zeros((n, r, N, fa.shape[-1]), dtype=np.complex128)
        for i in range(N):
            if a[:, :, i].any():
                facc[:, :, i:] += np.einsum("nmf,mrjf->nrjf", fa[:, :, i], fb[:, :, : N - i])
        raw = np.rint(np.fft.irfft(facc, size)[..., :width]).astype(np.int64) % ctx.p
        return ctx.reduce_raw(raw)
    acc = np.zeros((n, r, N, width), dtype=np.int64)
    for i in range(N):
        lhs = a[:, :, i]
        if not lhs.any():
            continue
        prod = ctx._conv(lhs[:, :, None, None, :], b[None, :, :, : N - i, :])
        acc[:, :, i:] += prod.sum(axis=1)
    acc %= ctx.p
    return ctx.reduce_raw(acc)


def _series_det(ctx: FieldCtx, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    N = a.shape[2]
    if n == 1:
        return a[0, 0]
    total = np.zeros((N, ctx.k), dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        term = a[0, perm[0]][None, None]
        for i in range(1, n):
            term = series_matmul(ctx, term, a[i, perm[i]][None, None])
        total = ctx.add(total, term[0, 0]) if sign > 0 else ctx.sub(total, term[0, 0])
    return total


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class TruncSeriesMatrix:
    """n×n matrix of power series in t truncated at precision N."""

    __slots__ = ("ctx", "data")

    def __init__(self, ctx: FieldCtx, data: np.ndarray):
        data = np.asarray(data, dtype=np.int64) % ctx.p
        if data.ndim != 4 or data.shape[0] != data.shape[1] or data.shape[3] != ctx.k:
            raise ValueError(f"bad series matrix shape {data.shape}")
        self.ctx, self.data = ctx, data

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def prec(self) -> int:
        return self.data.shape[2]

    @classmethod
    def identity(cls, ctx, n, N):
        d = ctx.zeros((n, n, N))
        d[:, :, 0] = identity(ctx, n)
        return cls(ctx, d)

    @classmethod
    def constant(cls, ctx, mat: np.ndarray, N: int):
        d = ctx.zeros(mat.shape[:2] + (N,))
        d[:, :, 0] = mat
        return cls(ctx, d)

    def __matmul__(self, o: "TruncSeriesMatrix") -> "TruncSeriesMatrix":
        return TruncSeriesMatrix(self.ctx, series_matmul(self.ctx, self.data, o.data))

    def __add__(self, o):
        return TruncSeriesMatrix(self.ctx, self.ctx.add(self.data, o.data))

    def __sub__(self, o):
        return TruncSeriesMatrix(self.ctx, self.ctx.sub(self.data, o.data))

    def __eq__(self, o):
        return (isinstance(o, TruncSeriesMatrix) and self.ctx is o.ctx
                and self.data.shape == o.data.shape and bool(np.array_equal(self.data, o.data)))

    def __repr__(self):
        return f"TruncSeriesMatrix(n={self.n}, N={self.prec}, {self.ctx})"

    def constant_term(self) -> np.ndarray:
        return self.data[:, :, 0]

    def truncate(self, N: int) -> "TruncSeriesMatrix":
        return TruncSeriesMatrix(self.ctx, self.data[:, :, :N])

    def phi(self, j: int = 1) -> "TruncSeriesMatrix":
        return apply_phi(self, j)

    def is_invertible(self) -> bool:
        from .gfmatrix import is_invertible
        return is_invertible(self.ctx, self.constant_term())

    def inverse(self) -> "TruncSeriesMatrix":
        return invert(self)

    def det(self) -> "TruncSeries":
        return TruncSeries(self.ctx, _series_det(self.ctx, self.data))

    def embed(self, sup: FieldCtx) -> "TruncSeriesMatrix":
        if sup is self.ctx:
            return self
        return TruncSeriesMatrix(sup, sup.embedding(self.ctx)(self.data))

    def is_phi_fixed(self) -> bool:
        return bool(np.array_equal(self.ctx.frob(self.data, 1), self.data))

    def entry(self, i, j) -> "TruncSeries":
        return TruncSeries(self.ctx, self.data[i, j])


class TruncSeries:
    """Power series in t over a finite field, truncated at precision N."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=np.int64) % ctx.p
        if coeffs.ndim != 2 or coeffs.shape[1] != ctx.k:
            raise ValueError("bad series shape")
        self.ctx, self.coeffs = ctx, coeffs

    @property
    def prec(self):
        return self.coeffs.shape[0]

    @classmethod
    def from_elems(cls, ctx, elems):
        return cls(ctx, np.array([ctx.zeros() if e is None else np.asarray(e) for e in elems]))

    def _m(self):
        return TruncSeriesMatrix(self.ctx, self.coeffs[None, None])

    def __mul__(self, o):
        return TruncSeries(self.ctx, (self._m() @ o._m()).data[0, 0])

    def __add__(self, o):
        return TruncSeries(self.ctx, self.ctx.add(self.coeffs, o.coeffs))

    def __sub__(self, o):
        return TruncSeries(self.ctx, self.ctx.sub(self.coeffs, o.coeffs))

    def inverse(self):
        return TruncSeries(self.ctx, invert(self._m()).data[0, 0])

    def phi(self, j=1):
        return TruncSeries(self.ctx, self.ctx.frob(self.coeffs, j))

    def __eq__(self, o):
        return isinstance(o, TruncSeries) and self.ctx is o.ctx and np.array_equal(self.coeffs, o.coeffs)

    def coeff(self, i) -> FieldElem:
        return FieldElem(self.ctx, self.coeffs[i])

    def __repr__(self):
        return f"TruncSeries({[FieldElem(self.ctx, c) for c in self.coeffs]})"


def apply_phi(m: TruncSeriesMatrix, k: int = 1) -> TruncSeriesMatrix:
    """Coefficient-wise ``x -> x^(q^k)``; t is fixed."""
    return TruncSeriesMatrix(m.ctx, m.ctx.frob(m.data, k))


def invert(m: TruncSeriesMatrix) -> TruncSeriesMatrix:
    """Newton iteration X <- X(2I - mX) from the inverse of the constant term."""
    ctx, n, N = m.ctx, m.n, m.prec
    try:
        x0 = mat_inv(ctx, m.constant_term())
    except ZeroDivisionError:
        raise SingularConstantTerm("constant-term matrix is singular") from None
    x = TruncSeriesMatrix.constant(ctx, x0, N)
    two = TruncSeriesMatrix.constant(ctx, ctx.smul(2, identity(ctx, n)), N)
    prec = 1
    while prec < N:
        x = x @ (two - m @ x)
        prec *= 2
    return x


# --- bivariate entries ----------------------------------------------------------

class BivarPoly:
    """Polynomial in s and t over F_q stored as t-coefficients in F_q[s]."""

    __slots__ = ("F", "tc", "var")

    def __init__(self, F: SmallField, tcoeffs, var: str | None = None):
        tc = list(tcoeffs)
        while tc and tc[-1].is_zero():
            tc.pop()
        if var is None:
            var = tc[0].var if tc else "s"
        self.F, self.tc, self.var = F, tuple(tc), var

    @classmethod
    def const(cls, F, a, var="s"):
        return cls(F, [Poly(F, (a,), var)], var)

    @classmethod
    def from_poly_s(cls, f: Poly):
        return cls(f.F, [f], f.var)

    @classmethod
    def from_terms(cls, F, terms, var="s"):
        """``terms``: iterable of (coeff, s_exp, t_exp)."""
        grid: dict[int, dict[int, int]] = {}
        for c, a, b in terms:
            row = grid.setdefault(b, {})
            row[a] = F.add(row.get(a, 0), c)
        tmax = max(grid, default=-1)
        tc = []
        for b in range(tmax + 1):
            row = grid.get(b, {})
            smax = max(row, default=-1)
            tc.append(Poly(F, [row.get(a, 0) for a in range(smax + 1)], var))
        return cls(F, tc, var)

    def is_zero(self):
        return not self.tc

    def coeff(self, b) -> Poly:
        return self.tc[b] if b < len(self.tc) else Poly(self.F, (), self.var)

    def __eq__(self, o):
        return isinstance(o, BivarPoly) and self.tc == o.tc

    def __hash__(self):
        return hash(self.tc)

    def __add__(self, o):
        L = max(len(self.tc), len(o.tc))
        return BivarPoly(self.F, [self.coeff(i) + o.coeff(i) for i in range(L)], self.var)

    def __neg__(self):
        return BivarPoly(self.F, [-c for c in self.tc], self.var)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, int):
            return BivarPoly(self.F, [c * o for c in self.tc], self.var)
        if self.is_zero() or o.is_zero():
            return BivarPoly(self.F, [], self.var)
        out = [Poly(self.F, (), self.var) for _ in range(len(self.tc) + len(o.tc) - 1)]
        for i, a in enumerate(self.tc):
            for j, b in enumerate(o.tc):
                out[i + j] = out[i + j] + a * b
        return BivarPoly(self.F, out, self.var)

    def phi(self, i=1):
        m = self.F.q**i
        return BivarPoly(self.F, [c.compose_power(m) for c in self.tc], self.var)

    def terms(self):
        for b, c in enumerate(self.tc):
            for a, x in enumerate(c.c):
                if x:
                    yield x, a, b

    def to_str(self) -> str:
        parts = []
        for c, a, b in self.terms():
            cs = str(self.F.to_json(c)).replace(" ", "")
            f = [cs]
            if a:
                f.append(self.var if a == 1 else f"{self.var}^{a}")
            if b:
                f.append("t" if b == 1 else f"t^{b}")
            parts.append("*".join(f))
        return "+".join(parts) if parts else "0"


def parse_bivar(F: SmallField, text: str, var: str = "s") -> BivarPoly:
    """Parse ``c*s^a*t^b`` terms joined by ``+``; c is an int or ``[c0,c1,..]``.

    ``var`` renames the first variable (``theta`` for exported modules).
    """
    factor = re.compile(rf"^({re.escape(var)}|t)(?:\^(\d+))?$")
    text = text.replace(" ", "")
    if not text:
        raise ValueError("empty polynomial")
    terms = []
    for term in text.split("+"):
        if not term:
            raise ValueError(f"malformed polynomial {text!r}")
        c, a, b = 1, 0, 0
        for fac in term.split("*"):
            m = factor.match(fac)
            if m:
                e = int(m.group(2) or 1)
                if m.group(1) == var:
                    a += e
                else:
                    b += e
            elif fac.startswith("["):
                vals = [int(v) for v in fac.strip("[]").split(",") if v]
                c = F.mul(c, F.from_json(vals))
            elif re.fullmatch(r"-?\d+", fac):
                c = F.mul(c, F.from_json(int(fac)))
            else:
                raise ValueError(f"bad factor {fac!r} in {text!r}")
        terms.append((c, a, b))
    return BivarPoly.from_terms(F, terms, var)


class BivarEntry:
    """num/den with num, den ∈ F_q[s, t]; den(s, 0) must be nonzero."""

    __slots__ = ("num", "den", "_exp")

    def __init__(self, num: BivarPoly, den: BivarPoly | None = None):
        if den is None:
            den = BivarPoly.const(num.F, 1, num.var)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = num, den
        self._exp: list[RatFunc] | None = None

    @property
    def F(self):
        return self.num.F

    @classmethod
    def const(cls, F, a, var="s"):
        return cls(BivarPoly.const(F, a, var))

    @classmethod
    def from_ratfunc(cls, f: RatFunc):
        return cls(BivarPoly.from_poly_s(f.num), BivarPoly.from_poly_s(f.den))

    def is_t_unit_den(self) -> bool:
        return not self.den.coeff(0).is_zero()

    def __add__(self, o):
        if self.den == o.den:
            return BivarEntry(self.num + o.num, self.den)
        return BivarEntry(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        return self + BivarEntry(-o.num, o.den)

    def __mul__(self, o):
        if isinstance(o, int):
            return BivarEntry(self.num * o, self.den)
        return BivarEntry(self.num * o.num, self.den * o.den)

    def inverse(self):
        return BivarEntry(self.den, self.num)

    def phi(self, i=1):
        return BivarEntry(self.num.phi(i), self.den.phi(i))

    def is_zero(self):
        return self.num.is_zero()

    def t_expansion(self, N: int) -> list[RatFunc]:
        """First N coefficients of the t-adic expansion, in F_q(s)."""
        if not self.is_t_unit_den():
            raise NonUnitDenominator("denominator vanishes at t = 0")
        if self._exp is None or len(self._exp) < N:
            b0 = RatFunc(self.den.coeff(0))
            inv0 = b0.inverse()
            dens = [RatFunc(self.den.coeff(j)) for j in range(1, len(self.den.tc))]
            out: list[RatFunc] = []
            for l in range(N):
                acc = RatFunc(self.num.coeff(l))
                for j, bj in enumerate(dens, start=1):
                    if j > l:
                        break
                    if not bj.is_zero() and not out[l - j].is_zero():
                        acc = acc - bj * out[l - j]
                out.append(acc * inv0)
            self._exp = out
        return self._exp[:N]

    def to_json(self):
        return {"num": self.num.to_str(), "den": self.den.to_str()}

    @classmethod
    def from_json(cls, F, obj, var="s"):
        if isinstance(obj, str):
            return cls(parse_bivar(F, obj, var), BivarPoly.const(F, 1, var))
        return cls(parse_bivar(F, obj["num"], var), parse_bivar(F, obj.get("den", "1"), var))

    def __repr__(self):
        return f"({self.num.to_str()})/({self.den.to_str()})"


def expand_at_place(e: BivarEntry, place: PlaceFin, N: int) -> TruncSeries:
    """Reduce the t-expansion of ``e`` at ``place`` to F_{q^d}[[t]]/(t^N)."""
    coeffs = e.t_expansion(N)
    for l, c in enumerate(coeffs):
        if valuation_at(place, c) < 0:
            raise NotIntegral(f"t^{l} coefficient has a pole at {place.label()}")
    return TruncSeries(place.ctx, np.array([reduce_at(place, c).array for c in coeffs]))


def expand_matrix_at_place(entries, place: PlaceFin, N: int) -> TruncSeriesMatrix:
    n = len(entries)
    data = place.ctx.zeros((n, n, N))
    for i in range(n):
        for j in range(n):
            data[i, j] = expand_at_place(entries[i][j], place, N).coeffs
    return TruncSeriesMatrix(place.ctx, data)


def series_to_json(ctx: FieldCtx, coeffs: np.ndarray, fq_codes: SmallField | None = None):
    """``{prec, coeffs}``; coefficients as F_q values when ``fq_codes`` is given."""
    if fq_codes is not None:
        emb = ctx.embedding(fq_codes.ctx)
        vals = [fq_codes.to_json(fq_codes.code(emb.pullback(c))) for c in coeffs]
    else:
        vals = [[int(x) for x in c] for c in coeffs]
    return {"prec": int(coeffs.shape[0]), "coeffs": vals}


def series_charpoly(m: TruncSeriesMatrix) -> list[TruncSeries]:
    """det(X·I - m) as series coefficients, constant term first, leading 1 last."""
    ctx, n, N = m.ctx, m.n, m.prec
    one = ctx.zeros((N,))
    one[0] = ctx.ones()
    coeffs = [one]
    for size in range(1, n + 1):
        acc = ctx.zeros((N,))
        for idx in itertools.combinations(range(n), size):
            sub = m.data[np.ix_(idx, idx)]
            acc = ctx.add(acc, _series_det(ctx, sub))
        coeffs.append(acc if size % 2 == 0 else ctx.neg(acc))
    return [TruncSeries(ctx, c) for c in coeffs[::-1]]
