"""Finite matrix groups over a table field: closures, centralizers,
characteristic polynomials, torus density checks and generation reports.

Matrices are tuples of element codes in row-major order.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (BudgetExceeded, CapExceeded, ConstantTermNotOne, NotDistinct,
                     NotIrreducible)
from .fields import SmallField
from .funcfield import Poly, is_irreducible

Mat = tuple


# --- matrix helpers over a SmallField -------------------------------------------

def mat(F: SmallField, rows) -> Mat:
    return tuple(F.from_json(x) for r in rows for x in r)


def rows_of(m: Mat, n: int) -> list[list[int]]:
    return [list(m[i * n:(i + 1) * n]) for i in range(n)]


def dim_of(m: Mat) -> int:
    n = int(round(len(m) ** 0.5))
    if n * n != len(m):
        raise ValueError("matrix is not square")
    return n


def identity(F: SmallField, n: int) -> Mat:
    return tuple(1 if i == j else 0 for i in range(n) for j in range(n))


def mul(F: SmallField, a: Mat, b: Mat) -> Mat:
    n = dim_of(a)
    mt, at = F.mul_t, F.add_t
    out = []
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = at[acc][mt[a[i * n + k]][b[k * n + j]]]
            out.append(acc)
    return tuple(out)


def det(F: SmallField, a: Mat) -> int:
    n = dim_of(a)
    total = 0
    for perm in itertools.permutations(range(n)):
        term = 1
        for i in range(n):
            term = F.mul(term, a[i * n + perm[i]])
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        total = F.sub(total, term) if inversions % 2 else F.add(total, term)
    return total


def inverse(F: SmallField, a: Mat) -> Mat:
    n = dim_of(a)
    work = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows_of(a, n))]
    for c in range(n):
        piv = next((r for r in range(c, n) if work[r][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        work[c], work[piv] = work[piv], work[c]
        inv = F.inv(work[c][c])
        work[c] = [F.mul(inv, x) for x in work[c]]
        for r in range(n):
            if r != c and work[r][c]:
                f = work[r][c]
                work[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(work[r], work[c])]
    return tuple(x for r in work for x in r[n:])


def charpoly(F: SmallField, a: Mat) -> tuple:
    """det(X·I - a) as codes, constant term first, leading 1 last."""
    n = dim_of(a)
    coeffs = [1]
    for size in range(1, n + 1):
        acc = 0
        for idx in itertools.combinations(range(n), size):
            sub = tuple(a[i * n + j] for i in idx for j in idx)
            acc = F.add(acc, det(F, sub))
        coeffs.append(acc if size % 2 == 0 else F.neg(acc))
    return tuple(coeffs[::-1])


def charpoly_str(F: SmallField, cp: tuple) -> str:
    return str(Poly(F, cp, "X"))


def sl_order(q: int, n: int) -> int:
    order = 1
    for i in range(n):
        order *= q**n - q**i
    return order // (q - 1)


def gl_order(q: int, n: int) -> int:
    order = 1
    for i in range(n):
        order *= q**n - q**i
    return order


def enumerate_sl(F: SmallField, n: int, cap: int = 1 << 16) -> list[Mat]:
    if F.q ** (n * n) > cap * 64:
        raise BudgetExceeded(f"SL_{n}(F_{F.q}) is too large to enumerate")
    return [m for m in itertools.product(range(F.q), repeat=n * n) if det(F, m) == 1]


# --- generators and closures ----------------------------------------------------

@dataclass
class FqMatrixGroupGens:
    F: SmallField
    n: int
    generators: list
    special: bool = True

    def __post_init__(self):
        for g in self.generators:
            if len(g) != self.n * self.n:
                raise ValueError("generator has the wrong size")
            d = det(self.F, g)
            if d == 0:
                raise ValueError("generator is singular")
            if self.special and d != 1:
                raise ValueError("generator is not in SL_n")


def group_closure(gens: FqMatrixGroupGens, cap: int = 1 << 16) -> list[Mat]:
    """Breadth-first closure, in discovery order starting from the identity."""
    F, n = gens.F, gens.n
    e = identity(F, n)
    seen = {e: None}
    order = [e]
    queue = deque([e])
    gs = list(dict.fromkeys(gens.generators))
    while queue:
        x = queue.popleft()
        for g in gs:
            y = mul(F, x, g)
            if y not in seen:
                seen[y] = None
                order.append(y)
                if len(order) > cap:
                    raise CapExceeded(f"closure exceeds {cap} elements")
                queue.append(y)
    return order


def is_subgroup(F: SmallField, elems) -> bool:
    s = set(elems)
    return all(mul(F, a, b) in s for a in s for b in s)


def centralizer(F: SmallField, g: Mat, ambient) -> list[Mat]:
    return [x for x in ambient if mul(F, x, g) == mul(F, g, x)]


def is_diagonal(m: Mat) -> bool:
    n = dim_of(m)
    return all(m[i * n + j] == 0 for i in range(n) for j in range(n) if i != j)


# --- torus element with density certificate ------------------------------------

@dataclass
class TorusElement:
    diagonal: list          # Poly entries p_1..p_{n-1}
    dense: bool
    reason: str

    def series(self, ctx, N: int):
        """The diagonal matrix diag(p_1, ..., (p_1⋯p_{n-1})^{-1}) mod t^N."""
        from .series import TruncSeries, TruncSeriesMatrix

        n = len(self.diagonal) + 1
        data = ctx.zeros((n, n, N))
        prod = TruncSeries(ctx, ctx.zeros((N,)))
        prod.coeffs[0] = ctx.ones()
        for j, pj in enumerate(self.diagonal):
            emb = ctx.embedding(pj.F.ctx)
            s = ctx.zeros((N,))
            for i, c in enumerate(pj.c[:N]):
                s[i] = emb(pj.F.to_array(c))
            data[j, j] = s
            prod = prod * TruncSeries(ctx, s)
        data[n - 1, n - 1] = prod.inverse().coeffs
        return TruncSeriesMatrix(ctx, data)


def torus_element(F: SmallField, n: int, zeta: int, pj=None) -> TorusElement:
    """Check the factors of a diagonal torus element g ≡ I mod t.

    Default factors are 1 + zeta^j·t.  The density certificate rests on unique
    factorization: a character prod p_j^(m_j - m_n) is constant only when all
    exponents agree, which holds once the p_j are pairwise non-associate
    irreducibles.
    """
    if pj is None:
        pj = [Poly(F, (1, F.pow(zeta, j)), "t") for j in range(1, n)]
    if len(pj) != n - 1:
        raise ValueError(f"need {n - 1} factors")
    for f in pj:
        if not f.c or f.c[0] != 1:
            raise ConstantTermNotOne(f"{f} does not have constant term 1")
        if f.deg < 1 or not is_irreducible(f.monic()):
            raise NotIrreducible(f"{f} is not irreducible")
    # constant term 1 makes associates equal
    if len({f.c for f in pj}) != len(pj):
        raise NotDistinct("torus factors repeat")
    return TorusElement(list(pj), True,
                        "pairwise distinct irreducible factors with constant term 1")


# --- subgroup lattice oracle ---------------------------------------------------

class _Table:
    """Index-coded multiplication table of an enumerated group."""

    def __init__(self, F: SmallField, elems: list[Mat]):
        self.F, self.elems = F, elems
        self.index = {m: i for i, m in enumerate(elems)}
        size = len(elems)
        tab = np.empty((size, size), dtype=np.int32)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                tab[i, j] = self.index[mul(F, a, b)]
        self.tab = tab
        self.identity = self.index[identity(F, dim_of(elems[0]))]

    def closure(self, gens) -> frozenset:
        members = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.tab[x, g])
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(members)


@dataclass
class SubgroupLattice:
    F: SmallField
    elems: list
    subgroups: list  # frozensets of element indices

    @classmethod
    def build(cls, F: SmallField, n: int = 2, budget: int = 2000) -> "SubgroupLattice":
        if sl_order(F.q, n) > budget:
            raise BudgetExceeded(f"|SL_{n}(F_{F.q})| exceeds the budget {budget}")
        elems = enumerate_sl(F, n)
        table = _Table(F, elems)
        cyclic = sorted({table.closure([i]) for i in range(len(elems))}, key=lambda s: (len(s), sorted(s)))
        gens = [min(c) if len(c) == 1 else next(i for i in sorted(c) if table.closure([i]) == c)
                for c in cyclic]
        found = set(cyclic)
        for a, b in itertools.combinations(range(len(cyclic)), 2):
            if cyclic[a] <= cyclic[b] or cyclic[b] <= cyclic[a]:
                continue
            found.add(table.closure([gens[a], gens[b]]))
        subs = sorted(found, key=lambda s: (len(s), sorted(s)))
        lat = cls(F, elems, subs)
        lat._table = table
        return lat

    def closure_of(self, mats) -> frozenset:
        return self._table.closure([self._table.index[m] for m in mats])


_LATTICES: dict = {}


def subgroup_lattice(F: SmallField, n: int = 2, budget: int = 2000) -> SubgroupLattice:
    key = (F.p, F.ctx.e, n)
    if key not in _LATTICES:
        _LATTICES[key] = SubgroupLattice.build(F, n, budget)
    return _LATTICES[key]


def charpoly_subgroup_oracle(F: SmallField, charpolys, n: int = 2, budget: int = 2000) -> str:
    """"full" iff no proper subgroup of SL_n(F_q) meets every listed class."""
    if n != 2:
        raise ValueError("the oracle covers SL_2 only")
    lat = subgroup_lattice(F, n, budget)
    wanted = set(charpolys)
    cps = [charpoly(F, m) for m in lat.elems]
    full = len(lat.elems)
    for sub in lat.subgroups:
        if len(sub) == full:
            continue
        if wanted <= {cps[i] for i in sub}:
            return "proper"
    return "full"


def conjugacy_class_ids(F: SmallField, elems, n: int = 2) -> list[int]:
    """Label each element by its GL_n(F_q)-conjugacy class."""
    gl = [m for m in itertools.product(range(F.q), repeat=n * n) if det(F, m) != 0]
    gl_inv = [inverse(F, g) for g in gl]
    ids: dict = {}
    labels = []
    for m in elems:
        if m not in ids:
            cid = len(set(ids.values()))
            for g, gi in zip(gl, gl_inv):
                ids.setdefault(mul(F, mul(F, gi, m), g), cid)
        labels.append(ids[m])
    return labels


def class_subgroup_oracle(F: SmallField, witnesses, n: int = 2, budget: int = 2000) -> str:
    """Like the char-poly oracle but with GL_n(F_q)-conjugacy classes.

    A witness is only defined up to conjugation by GL_n(F_q), so its class is
    the finest invariant available; it separates unipotents from ±I, which
    char polys cannot.
    """
    if n != 2:
        raise ValueError("the oracle covers SL_2 only")
    lat = subgroup_lattice(F, n, budget)
    if not hasattr(lat, "_classes"):
        lat._classes = conjugacy_class_ids(F, lat.elems, n)
    cls = lat._classes
    wanted = {cls[lat._table.index[w]] for w in witnesses}
    full = len(lat.elems)
    for sub in lat.subgroups:
        if len(sub) != full and wanted <= {cls[i] for i in sub}:
            return "proper"
    return "full"


@dataclass
class GenerationReport:
    q: int
    n: int
    witnesses: list                      # h0 matrices
    closure_size: int
    target_size: int
    charpolys_seen: list
    oracle: str
    verdict: str
    places_used: list = field(default_factory=list)
    class_oracle: str = "inconclusive"

    def to_json(self, F: SmallField):
        return {
            "q": self.q, "n": self.n,
            "closure_size": self.closure_size,
            "target_size": self.target_size,
            "charpolys_seen": [[F.to_json(c) for c in cp] for cp in self.charpolys_seen],
            "oracle": self.oracle,
            "class_oracle": self.class_oracle,
            "verdict": self.verdict,
            "places_used": list(self.places_used),
            "witnesses": [[[F.to_json(x) for x in r] for r in rows_of(w, self.n)] for w in self.witnesses],
        }


def generation_report(F: SmallField, n: int, witnesses, places_used=(), cap: int = 1 << 16,
                      budget: int = 2000) -> GenerationReport:
    """Close the witnesses and ask the char-poly oracle; never overclaims."""
    target = sl_order(F.q, n)
    wits = list(witnesses)
    try:
        closure = group_closure(FqMatrixGroupGens(F, n, wits), cap)
        size = len(closure)
    except CapExceeded:
        size = -1
    if size > 0 and target % size:
        raise AssertionError("closure size does not divide the group order")
    seen = sorted({charpoly(F, w) for w in wits})
    try:
        oracle = charpoly_subgroup_oracle(F, seen, n, budget) if n == 2 else "inconclusive"
        class_oracle = class_subgroup_oracle(F, wits, n, budget) if n == 2 else "inconclusive"
    except BudgetExceeded:
        oracle = class_oracle = "inconclusive"
    # char polys cannot tell unipotents from ±I, so the verdict rests on the
    # finer class oracle; the char-poly answer is reported alongside
    if size == target and class_oracle == "full":
        verdict = "full"
    elif class_oracle == "proper" and 0 < size < target:
        verdict = "proper"
    else:
        verdict = "inconclusive"
    return GenerationReport(F.q, n, wits, size, target, seen, oracle, verdict,
                            list(places_used), class_oracle)
