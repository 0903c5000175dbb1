"""Finite fields F_p ⊆ F_q ⊆ F_{q^M} as a single flat extension of F_p.

An element of F_{q^M} is a length-``k`` coefficient vector (``k = e*M``)
over F_p in the power basis of ``F_p[x]/(modulus)``, little-endian.
Arithmetic is vectorized: every :class:`FieldCtx` method accepts arrays
whose last axis has length ``k`` and broadcasts over the leading axes.
:class:`FieldElem` is the scalar wrapper used by the symbolic layers.
"""
from __future__ import annotations

import functools
import json
import itertools
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeOverflow, NotPrime
from .gflinalg import AffineSolver, matmul_mod, matmul_mod_fixed, nullspace, rref

DEFAULT_MAX_DEGREE = 64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over F_p as int64 arrays, little-endian -------------------

def _trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    return a[: nz[-1] + 1] if nz.size else a[:0]


def _poly_mod(a: np.ndarray, f: np.ndarray, p: int) -> np.ndarray:
    """Remainder of ``a`` modulo the nonzero polynomial ``f``."""
    a = _trim(np.asarray(a, dtype=np.int64) % p).copy()
    f = _trim(f)
    df = len(f) - 1
    lead_inv = pow(int(f[-1]), p - 2, p)
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i]
        if c:
            c = (c * lead_inv) % p
            a[i - df : i + 1] = (a[i - df : i + 1] - c * f) % p
    return _trim(a[:df]) if len(a) > df else a


def _poly_gcd(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a, b = _trim(np.asarray(a) % p), _trim(np.asarray(b) % p)
    while len(b):
        a, b = b, _poly_mod(a, b, p)
    if len(a):
        a = (a * pow(int(a[-1]), p - 2, p)) % p
    return a


def _frobenius_matrix(f: np.ndarray, p: int) -> np.ndarray:
    """Rows ``x^(p*i) mod f`` for ``i < deg f``: the matrix of ``y -> y^p``."""
    k = len(f) - 1
    q = np.zeros((k, k), dtype=np.int64)
    if k == 0:
        return q
    low = (-f[:k]) % p
    v = np.zeros(k, dtype=np.int64)
    v[0] = 1
    q[0] = v
    w = np.empty(k, dtype=np.int64)
    for j in range(1, p * (k - 1) + 1):
        top = v[-1]
        w[0] = 0
        w[1:] = v[:-1]
        if top:
            w += top * low
            w %= p
        v, w = w, v
        if j % p == 0:
            q[j // p] = v
    return q


def _x_minus(v: np.ndarray, p: int) -> np.ndarray:
    w = np.zeros(max(len(v), 2), dtype=np.int64)
    w[: len(v)] = v
    w[1] = (w[1] - 1) % p
    return w


def is_irreducible_fp(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p (little-endian coeffs)."""
    f = np.asarray(f, dtype=np.int64) % p
    k = len(f) - 1
    if k <= 0:
        return False
    if k == 1:
        return True
    if f[0] == 0:
        return False
    # linear factors: evaluate at every element of F_p at once
    pts = np.arange(p, dtype=np.int64)
    val = np.ones(p, dtype=np.int64)
    for c in f[-2::-1]:
        val = (val * pts + c) % p
    if not val.all():
        return False
    # sieve small-degree factors while x^(p^j) mod f is cheap to form directly
    j = 1
    while j <= k // 2 and p**j <= 4 * k:
        mono = np.zeros(p**j + 1, dtype=np.int64)
        mono[-1] = 1
        if len(_poly_gcd(f, _x_minus(_poly_mod(mono, f, p), p), p)) > 1:
            return False
        j += 1
    fr = _frobenius_matrix(f, p)
    x = np.zeros(k, dtype=np.int64)
    x[1] = 1
    cur = x
    need = {k // r for r in _prime_factors(k)}
    for i in range(1, k + 1):
        cur = matmul_mod(cur, fr, p)
        if (j <= i <= min(6, k // 2)) or i in need:
            if len(_poly_gcd(f, _x_minus(cur, p), p)) > 1:
                return False
    return bool(np.array_equal(cur, x))


@functools.lru_cache(maxsize=None)
def _moduli_table() -> dict:
    path = Path(__file__).with_name("data") / "moduli.json"
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        return {}


def smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree k over F_p.

    The order compares the coefficient of x^(k-1) first, down to the
    constant term; the leading 1 is implicit.  Results of earlier searches
    are shipped in ``data/moduli.json``.
    """
    hit = _moduli_table().get(f"{p}:{k}")
    if hit is not None:
        return tuple(int(c) for c in hit) + (1,)
    return _search_smallest_irreducible(p, k)


def _search_smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    for idx in itertools.count():
        low = []
        n = idx
        for _ in range(k):
            low.append(n % p)
            n //= p
        if n:
            raise AssertionError("exhausted candidates")  # impossible: irreducibles exist
        f = low + [1]
        if is_irreducible_fp(f, p):
            return tuple(f)


class FieldCtx:
    """The field F_{q^M} with q = p^e, as F_p[x]/(modulus)."""

    def __init__(self, p: int, e: int, M: int, modulus: Sequence[int]):
        self.p, self.e, self.M = p, e, M
        self.k = e * M
        self.q = p**e
        self.order = p**self.k
        self.modulus = tuple(int(c) for c in modulus)
        f = np.array(self.modulus, dtype=np.int64)
        k = self.k
        # rows x^(k+j) mod f, j < k-1
        high = np.zeros((max(k - 1, 0), k), dtype=np.int64)
        v = np.zeros(k, dtype=np.int64)
        low = (-f[:k]) % p
        if k:
            v = low.copy()
            for j in range(k - 1):
                high[j] = v
                top = v[-1]
                v = np.concatenate([[0], v[:-1]])
                if top:
                    v = (v + top * low) % p
        self._high = high
        self._high_f = high.astype(np.float64)
        self._frob_float: dict[int, np.ndarray] = {}
        self._frob_p = _frobenius_matrix(f, p)
        self._frob_cache: dict[int, np.ndarray] = {0: np.eye(k, dtype=np.int64)}
        self._as_solver = None
        self._embeddings: dict = {}
        self._presentations: dict = {}

    def __repr__(self):
        return f"FieldCtx(p={self.p}, e={self.e}, M={self.M})"

    def __reduce__(self):
        return (build_extension, (self.p, self.e, self.M, max(self.k, DEFAULT_MAX_DEGREE)))

    # --- construction helpers ---------------------------------------------
    def zeros(self, shape=()) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.k,), dtype=np.int64)

    def ones(self, shape=()) -> np.ndarray:
        a = self.zeros(shape)
        if self.k:
            a[..., 0] = 1
        return a

    def scalar(self, c: int) -> np.ndarray:
        a = self.zeros()
        a[0] = c % self.p
        return a

    def from_int(self, n: int) -> np.ndarray:
        a = self.zeros()
        for i in range(self.k):
            a[i] = n % self.p
            n //= self.p
        return a

    def to_int(self, a: np.ndarray) -> int:
        n = 0
        for c in reversed([int(x) for x in a]):
            n = n * self.p + c
        return n

    def all_elements(self) -> np.ndarray:
        """All field elements ordered by :meth:`to_int`."""
        idx = np.arange(self.order)
        out = np.empty((self.order, self.k), dtype=np.int64)
        for i in range(self.k):
            out[:, i] = idx % self.p
            idx = idx // self.p
        return out

    def generator(self) -> np.ndarray:
        """The class of x, which generates the flat extension over F_p."""
        a = self.zeros()
        if self.k > 1:
            a[1] = 1
        else:
            a[0] = (-self.modulus[0]) % self.p
        return a

    # --- arithmetic -----------------------------------------------------------
    def add(self, a, b):
        return (np.asarray(a) + np.asarray(b)) % self.p

    def sub(self, a, b):
        return (np.asarray(a) - np.asarray(b)) % self.p

    def neg(self, a):
        return (-np.asarray(a)) % self.p

    def smul(self, c, a):
        """Multiply by an F_p scalar (or array of them, broadcast on leading axes)."""
        c = np.asarray(c, dtype=np.int64)
        return (c[..., None] * np.asarray(a)) % self.p

    def is_zero(self, a):
        return ~np.any(np.asarray(a), axis=-1)

    def _conv(self, a, b):
        k, p = self.k, self.p
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        if k <= 32:
            out = np.zeros(shape + (2 * k - 1,), dtype=np.int64)
            for i in range(k):
                out[..., i : i + k] += a[..., i : i + 1] * b
                if (i & 7) == 7:
                    out %= p
            return out % p
        if k * (p - 1) ** 2 < 2**50:
            n = 1 << (2 * k - 1).bit_length()
            fa = np.fft.rfft(a.astype(np.float64), n)
            fb = np.fft.rfft(b.astype(np.float64), n)
            c = np.fft.irfft(fa * fb, n)[..., : 2 * k - 1]
            return np.rint(c).astype(np.int64) % p
        out = np.zeros(shape + (2 * k - 1,), dtype=object)
        for i in range(k):
            out[..., i : i + k] += a[..., i : i + 1].astype(object) * b.astype(object)
        return (out % p).astype(np.int64)

    def reduce_raw(self, c):
        """Reduce a product polynomial of length ``2k-1`` modulo the modulus."""
        k = self.k
        if k <= 1:
            return c[..., :k] % self.p
        return (c[..., :k] + matmul_mod_fixed(c[..., k:], self._high, self._high_f, self.p)) % self.p

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a * b) % self.p
        return self.reduce_raw(self._conv(a, b))

    def frob_p(self, a, m: int = 1):
        """``a ** (p**m)``; m is taken modulo k."""
        a = np.asarray(a, dtype=np.int64)
        if self.k == 0:
            return a
        m %= self.k
        if m == 0:
            return a % self.p
        mat = self._frob_power(m)
        flt = self._frob_float.get(m)
        if flt is None:
            flt = self._frob_float[m] = mat.astype(np.float64)
        return matmul_mod_fixed(a, mat, flt, self.p)

    def _frob_power(self, m: int) -> np.ndarray:
        mat = self._frob_cache.get(m)
        if mat is None:
            if m == 1:
                mat = self._frob_p
            elif m % 2 == 0:
                half = self._frob_power(m // 2)
                mat = matmul_mod(half, half, self.p)
            else:
                mat = matmul_mod(self._frob_power(m - 1), self._frob_p, self.p)
            self._frob_cache[m] = mat
        return mat

    def frob(self, a, j: int = 1):
        """``a ** (q**j)``, the j-th power of the q-Frobenius."""
        return self.frob_p(a, self.e * j)

    def inv(self, a):
        """Multiplicative inverse (Itoh-Tsujii); raises ZeroDivisionError on 0."""
        a = np.asarray(a, dtype=np.int64)
        p, k = self.p, self.k
        if np.any(self.is_zero(a)):
            raise ZeroDivisionError("inverse of zero in finite field")
        if k == 1:
            return np.vectorize(lambda c: pow(int(c), p - 2, p), otypes=[np.int64])(a)
        # s(m) = a^(1 + p + ... + p^(m-1)); need a^(p + ... + p^(k-1)) = frob(s(k-1))
        def s(m):
            if m == 1:
                return a
            if m % 2 == 0:
                h = s(m // 2)
                return self.mul(h, self.frob_p(h, m // 2))
            return self.mul(s(m - 1), self.frob_p(a, m - 1))

        r1 = self.frob_p(s(k - 1), 1)
        norm = self.mul(a, r1)[..., 0]
        ninv = np.vectorize(lambda c: pow(int(c), p - 2, p), otypes=[np.int64])(norm)
        return self.smul(ninv, r1)

    def power(self, a, n: int):
        a = np.asarray(a, dtype=np.int64)
        if n < 0:
            a, n = self.inv(a), -n
        result = np.broadcast_to(self.ones(), a.shape).copy()
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def trace_to_fq(self, a):
        """Relative trace F_{q^M} -> F_q, returned inside F_{q^M}."""
        acc = np.asarray(a) % self.p
        cur = acc
        for _ in range(self.M - 1):
            cur = self.frob(cur, 1)
            acc = (acc + cur) % self.p
        return acc

    # --- subfields and embeddings -------------------------------------------
    def lex_key(self, a) -> tuple:
        return tuple(int(c) for c in np.asarray(a)[::-1])

    def embedding(self, sub: "FieldCtx") -> "Embedding":
        """Canonical embedding of ``sub`` into this field.

        The generator of ``sub`` goes to the lexicographically smallest root
        of ``sub.modulus`` in this field, so the map is reproducible.
        """
        key = (sub.p, sub.e, sub.M, sub.modulus)
        emb = self._embeddings.get(key)
        if emb is None:
            if sub.p != self.p or self.k % sub.k:
                raise ValueError(f"{sub} does not embed in {self}")
            emb = Embedding(sub, self)
            self._embeddings[key] = emb
        return emb

    def subfield_basis(self, deg: int) -> np.ndarray:
        """F_p-basis (rows) of the unique subfield of F_p-degree ``deg``.

        The subfield is the fixed space of ``y -> y^(p^deg)``.
        """
        if self.k % deg:
            raise ValueError("degree does not divide")
        if deg == self.k:
            return np.eye(self.k, dtype=np.int64)
        fixed = (self._frob_power(deg) - np.eye(self.k, dtype=np.int64)) % self.p
        # row-vector convention: y @ fixed = 0
        basis = nullspace(fixed.T, self.p)
        if basis.shape[0] != deg:
            raise AssertionError("fixed space has the wrong dimension")
        return basis

    def subfield_presentation(self, M_sub: int, seed: int = 0) -> tuple["FieldCtx", "Embedding"]:
        """F_{q^M_sub} inside this field, presented by the minimal polynomial
        of one of its generators.

        Scanning for the smallest root of the canonical modulus is hopeless
        for large subfields; this only needs linear algebra.  The returned
        context does not use the canonical modulus.
        """
        cached = self._presentations.get((M_sub, seed))
        if cached is not None:
            return cached
        m = self.e * M_sub
        if self.k % m:
            raise ValueError("degree does not divide")
        basis = self.subfield_basis(m)
        coords = AffineSolver(basis.T, self.p)
        rng = np.random.default_rng(seed)
        for attempt in range(64):
            if attempt == 0 and m > 1:
                z = basis[1]
            else:
                z = matmul_mod(rng.integers(0, self.p, m), basis, self.p)
            powers = [self.ones()]
            for _ in range(m):
                powers.append(self.mul(powers[-1], z))
            powers = np.array(powers)
            c = coords.solve(powers)
            r, piv = rref(c[:m].T, self.p)
            if len(piv) < m:
                continue
            a = AffineSolver(c[:m].T, self.p).solve(c[m])
            modulus = tuple(int(x) for x in (-a) % self.p) + (1,)
            sub = FieldCtx(self.p, self.e, M_sub, modulus)
            emb = Embedding(sub, self, matrix=powers[:m])
            self._embeddings[(sub.p, sub.e, sub.M, sub.modulus)] = emb
            self._presentations[(M_sub, seed)] = (sub, emb)
            return sub, emb
        raise AssertionError("no generator found for the subfield")

    def fq_basis(self) -> np.ndarray:
        return self.subfield_basis(self.e)

    def artin_schreier_solver(self) -> AffineSolver:
        """Factored linear map ``z -> z^q - z`` (acting on row vectors)."""
        if self._as_solver is None:
            fq = self._frob_power(self.e % self.k) if self.k else np.zeros((0, 0), dtype=np.int64)
            lin = (fq - np.eye(self.k, dtype=np.int64)) % self.p
            # row-vector convention: z @ lin; as a column system it is lin.T @ z
            self._as_solver = AffineSolver(lin.T, self.p)
        return self._as_solver

    def elem(self, coeffs) -> "FieldElem":
        return FieldElem(self, coeffs)


class Embedding:
    """F_p-linear field embedding ``sub -> sup`` fixed by the image of x."""

    def __init__(self, sub: FieldCtx, sup: FieldCtx, matrix: np.ndarray | None = None):
        self.sub, self.sup = sub, sup
        p = sup.p
        if matrix is not None:
            self.matrix = np.asarray(matrix, dtype=np.int64) % p
        elif sub.k == sup.k and sub.modulus == sup.modulus:
            self.matrix = np.eye(sup.k, dtype=np.int64)
        else:
            root = _smallest_root(sub, sup)
            rows = [sup.ones()]
            for _ in range(1, sub.k):
                rows.append(sup.mul(rows[-1], root))
            self.matrix = np.array(rows, dtype=np.int64).reshape(sub.k, sup.k)
        self._back = AffineSolver(self.matrix.T, p)

    def __call__(self, a):
        return matmul_mod(np.asarray(a, dtype=np.int64), self.matrix, self.sup.p)

    def pullback(self, b):
        """Inverse image; raises Inconsistent when ``b`` is not in the subfield."""
        return self._back.solve(b)

    def contains(self, b):
        return self._back.consistent(b)


def _smallest_root(sub: FieldCtx, sup: FieldCtx) -> np.ndarray:
    basis = sup.subfield_basis(sub.k)
    p = sup.p
    combos = np.array(list(itertools.product(range(p), repeat=sub.k)), dtype=np.int64)
    cands = matmul_mod(combos, basis, p)
    # Horner evaluation of sub.modulus at every candidate
    val = np.broadcast_to(sup.scalar(sub.modulus[-1]), cands.shape).copy()
    for c in reversed(sub.modulus[:-1]):
        val = sup.add(sup.mul(val, cands), sup.scalar(c))
    roots = cands[sup.is_zero(val)]
    if len(roots) != sub.k:
        raise AssertionError(f"expected {sub.k} roots, found {len(roots)}")
    return min(roots, key=sup.lex_key)


@functools.lru_cache(maxsize=None)
def _build(p: int, e: int, M: int) -> FieldCtx:
    return FieldCtx(p, e, M, smallest_irreducible(p, e * M))


def build_extension(p: int, e: int = 1, M: int = 1, max_degree: int = DEFAULT_MAX_DEGREE) -> FieldCtx:
    """F_{q^M} with q = p^e, using the lexicographically smallest modulus."""
    if not is_prime(p):
        raise NotPrime(p)
    if e < 1 or M < 1:
        raise ValueError("extension degrees must be positive")
    if e * M > max_degree:
        raise DegreeOverflow(f"e*M = {e * M} exceeds {max_degree}")
    return _build(p, e, M)


class FieldElem:
    """Immutable scalar element of a :class:`FieldCtx`."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FieldCtx, coeffs):
        if isinstance(coeffs, (int, np.integer)):
            arr = ctx.scalar(int(coeffs))
        else:
            arr = np.zeros(ctx.k, dtype=np.int64)
            vals = np.asarray(coeffs, dtype=np.int64).ravel()
            if len(vals) > ctx.k:
                raise ValueError("too many coefficients")
            arr[: len(vals)] = vals
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "c", tuple(int(v) for v in arr % ctx.p))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElem is immutable")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.c, dtype=np.int64)

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx:
                raise ValueError("elements from different fields")
            return other.array
        if isinstance(other, (int, np.integer)):
            return self.ctx.scalar(int(other))
        return NotImplemented

    def _wrap(self, arr):
        return FieldElem(self.ctx, arr)

    def __add__(self, o):
        b = self._coerce(o)
        return NotImplemented if b is NotImplemented else self._wrap(self.ctx.add(self.array, b))

    __radd__ = __add__

    def __sub__(self, o):
        b = self._coerce(o)
        return NotImplemented if b is NotImplemented else self._wrap(self.ctx.sub(self.array, b))

    def __rsub__(self, o):
        b = self._coerce(o)
        return NotImplemented if b is NotImplemented else self._wrap(self.ctx.sub(b, self.array))

    def __mul__(self, o):
        b = self._coerce(o)
        return NotImplemented if b is NotImplemented else self._wrap(self.ctx.mul(self.array, b))

    __rmul__ = __mul__

    def __truediv__(self, o):
        b = self._coerce(o)
        if b is NotImplemented:
            return NotImplemented
        return self._wrap(self.ctx.mul(self.array, self.ctx.inv(b)))

    def __rtruediv__(self, o):
        b = self._coerce(o)
        return NotImplemented if b is NotImplemented else self._wrap(self.ctx.mul(b, self.ctx.inv(self.array)))

    def __neg__(self):
        return self._wrap(self.ctx.neg(self.array))

    def __pow__(self, n: int):
        return self._wrap(self.ctx.power(self.array, n))

    def inverse(self) -> "FieldElem":
        return self._wrap(self.ctx.inv(self.array))

    def __eq__(self, o):
        if isinstance(o, FieldElem):
            return self.ctx is o.ctx and self.c == o.c
        if isinstance(o, (int, np.integer)):
            return self.c == tuple(int(v) for v in self.ctx.scalar(int(o)))
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ctx), self.c))

    def __bool__(self):
        return any(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def lex_key(self) -> tuple:
        return self.c[::-1]

    def to_int(self) -> int:
        return self.ctx.to_int(self.c)

    def __repr__(self):
        if self.ctx.k == 1:
            return str(self.c[0])
        return "[" + ",".join(map(str, self.c)) + "]"

    def to_json(self):
        return list(self.c)


def frobenius(x: FieldElem, k: int = 1) -> FieldElem:
    """``x ** (q**k)`` for ``x`` in F_{q^M}."""
    return FieldElem(x.ctx, x.ctx.frob(x.array, k))


def elements(ctx: FieldCtx) -> Iterable[FieldElem]:
    for row in ctx.all_elements():
        yield FieldElem(ctx, row)


class SmallField:
    """Table-driven F_q with elements encoded as ints ``0..q-1``.

    The code of an element is its coefficient vector read in base p, so
    for a prime field the code is the residue itself.
    """

    def __init__(self, ctx: FieldCtx):
        if ctx.order > 1 << 12:
            raise DegreeOverflow("table field too large")
        self.ctx = ctx
        self.p, self.q = ctx.p, ctx.order
        els = ctx.all_elements()
        self.elements = els
        q = self.q
        pw = ctx.p ** np.arange(ctx.k)

        def code(arr):
            return (np.asarray(arr) * pw).sum(axis=-1)

        self._code = code
        self.add_t = code(ctx.add(els[:, None, :], els[None, :, :])).tolist()
        self.mul_t = code(ctx.mul(els[:, None, :], els[None, :, :])).tolist()
        self.neg_t = code(ctx.neg(els)).tolist()
        self.sub_t = [[self.add_t[a][self.neg_t[b]] for b in range(q)] for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            row = self.mul_t[a]
            inv[a] = row.index(1)
        self.inv_t = inv
        self.frob_t = code(ctx.frob_p(els, 1)).tolist()

    def __repr__(self):
        return f"SmallField(q={self.q})"

    def add(self, a, b):
        return self.add_t[a][b]

    def sub(self, a, b):
        return self.sub_t[a][b]

    def mul(self, a, b):
        return self.mul_t[a][b]

    def neg(self, a):
        return self.neg_t[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.inv_t[a]

    def div(self, a, b):
        return self.mul_t[a][self.inv(b)]

    def pow(self, a, n):
        if n < 0:
            a, n = self.inv(a), -n
        r = 1
        while n:
            if n & 1:
                r = self.mul_t[r][a]
            a = self.mul_t[a][a]
            n >>= 1
        return r

    def from_int(self, c: int) -> int:
        """Image of the integer c under Z -> F_p -> F_q."""
        return c % self.p

    def to_array(self, a: int) -> np.ndarray:
        return self.elements[a]

    def code(self, arr) -> int:
        return int(self._code(np.asarray(arr)))

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        n, x = 1, a
        while x != 1:
            x = self.mul_t[x][a]
            n += 1
        return n

    def to_json(self, a: int):
        return a if self.ctx.k == 1 else [int(c) for c in self.elements[a]]

    def from_json(self, v) -> int:
        if isinstance(v, int):
            if self.ctx.k == 1:
                return v % self.p
            if 0 <= v < self.q:
                return v
            raise ValueError(f"element code {v} out of range")
        return self.code(np.array(list(v) + [0] * (self.ctx.k - len(v)), dtype=np.int64) % self.p)


@functools.lru_cache(maxsize=None)
def small_field(p: int, e: int = 1) -> SmallField:
    return SmallField(build_extension(p, e, 1))
