"""Difference modules over F_q(s)((t)) given by a representing matrix D,
with the convention D·φ_q(Y) = Y for a fundamental matrix Y.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import DegreeNotOne, NotIntegral, SingularReduction
from .fields import SmallField, small_field
from .funcfield import INF, PlaceFin, Poly, RatFunc, make_place, valuation_at
from .gfmatrix import is_invertible
from .series import BivarEntry, BivarPoly, TruncSeriesMatrix, expand_matrix_at_place

SCHEMA = "dgw.module/1"


def _ratfunc_det(rows: list[list[RatFunc]]) -> RatFunc:
    n = len(rows)
    F = rows[0][0].F
    total = RatFunc.const(F, 0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = RatFunc.const(F, 1)
        for i in range(n):
            term = term * rows[i][perm[i]]
            if term.is_zero():
                break
        total = total - term if inv % 2 else total + term
    return total


def entry_matmul(a, b):
    """Product of square matrices of :class:`BivarEntry`."""
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                if a[i][k].is_zero() or b[k][j].is_zero():
                    continue
                term = a[i][k] * b[k][j]
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else BivarEntry.const(a[0][0].F, 0))
        out.append(row)
    return out


@dataclass(frozen=True, eq=False)
class FrobModule:
    """Representing matrix of a difference module; φ_{q^level} acts."""

    F: SmallField
    D: tuple
    level: int = 1

    def __post_init__(self):
        D = tuple(tuple(r) for r in self.D)
        object.__setattr__(self, "D", D)
        n = len(D)
        if n == 0 or any(len(r) != n for r in D):
            raise ValueError("representing matrix must be square")
        if self.level < 1:
            raise ValueError("level must be >= 1")
        for r in D:
            for e in r:
                if not e.is_t_unit_den():
                    raise ValueError(f"entry {e} has a denominator vanishing at t=0")
        if _ratfunc_det(self.at_t0()).is_zero():
            raise ValueError("representing matrix is singular at t=0")

    @property
    def q(self) -> int:
        return self.F.q

    @property
    def p(self) -> int:
        return self.F.p

    @property
    def e(self) -> int:
        return self.F.ctx.e

    @property
    def n(self) -> int:
        return len(self.D)

    def at_t0(self) -> list[list[RatFunc]]:
        return [[RatFunc(x.num.coeff(0)) / RatFunc(x.den.coeff(0)) for x in r] for r in self.D]

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "p": self.p, "e": self.e, "q": self.q, "n": self.n,
                "level": self.level, "D": [[x.to_json() for x in r] for r in self.D]}

    @classmethod
    def from_json(cls, obj: dict) -> "FrobModule":
        F = small_field(int(obj["p"]), int(obj.get("e", 1)))
        if "q" in obj and int(obj["q"]) != F.q:
            raise ValueError("q does not match p^e")
        D = [[BivarEntry.from_json(F, x) for x in r] for r in obj["D"]]
        if "n" in obj and int(obj["n"]) != len(D):
            raise ValueError("n does not match the matrix size")
        return cls(F, D, int(obj.get("level", 1)))


@dataclass(frozen=True, eq=False)
class ReducedModule:
    place: PlaceFin
    Dbar: TruncSeriesMatrix
    level: int = 1

    @property
    def prec(self) -> int:
        return self.Dbar.prec


def reduce_module_at(m: FrobModule, place: PlaceFin, N: int) -> ReducedModule:
    dbar = expand_matrix_at_place(m.D, place, N)
    if not is_invertible(place.ctx, dbar.constant_term()):
        raise SingularReduction(f"constant term is singular at {place.label()}")
    return ReducedModule(place, dbar, m.level)


def frobenius_product(r: ReducedModule) -> TruncSeriesMatrix:
    """Dbar·φ(Dbar)⋯φ^{d-1}(Dbar) with φ the acting Frobenius."""
    dbar, step = r.Dbar, r.level
    out = dbar
    for i in range(1, r.place.d):
        out = out @ dbar.phi(i * step)
    return out


def raise_level(m: FrobModule, i: int) -> FrobModule:
    if i < 1:
        raise ValueError("level factor must be >= 1")
    if i == 1:
        return m
    acc = [list(r) for r in m.D]
    for j in range(1, i):
        twisted = [[x.phi(j * m.level) for x in r] for r in m.D]
        acc = entry_matmul(acc, twisted)
    return FrobModule(m.F, acc, m.level * i)


@dataclass
class HypothesisReport:
    ok: bool
    first_failure: int | None
    table: list = field(default_factory=list)  # min valuation of the t^l coefficient

    def to_json(self):
        return {"ok": self.ok, "first_failure": self.first_failure,
                "min_valuations": [None if v == INF else int(v) for v in self.table]}


def check_existence_hypothesis(m: FrobModule, q_place: PlaceFin, N: int) -> HypothesisReport:
    """Check v(D_l) >= l for the t-coefficients D_l, l = 0..N-1, at ``q_place``."""
    exps = [[x.t_expansion(N) for x in r] for r in m.D]
    table, first = [], None
    for l in range(N):
        v = min(valuation_at(q_place, exps[i][j][l]) for i in range(m.n) for j in range(m.n))
        if v < 0:
            raise NotIntegral(f"t^{l} coefficient has a pole at {q_place.label()}")
        table.append(v)
        if first is None and v < l:
            first = l
    return HypothesisReport(first is None, first, table)


def _theta_poly(f: Poly, alpha: int, top: int) -> Poly:
    """theta^top · f(1/theta + alpha) as a polynomial in theta."""
    F = f.F
    one_plus = Poly(F, (1, alpha), "theta")
    out = Poly(F, (), "theta")
    for a, c in enumerate(f.c):
        if c:
            out = out + (one_plus**a) * Poly(F, (0,) * (top - a) + (c,), "theta")
    return out


def _theta_bivar(b: BivarPoly, alpha: int, top: int) -> BivarPoly:
    return BivarPoly(b.F, [_theta_poly(c, alpha, top) for c in b.tc], "theta")


def export_pre_t_motive(m: FrobModule, place: PlaceFin):
    """Rewrite D in theta = 1/(s - alpha) and describe the sign conventions."""
    if place.d != 1:
        raise DegreeNotOne("export needs a degree-1 place")
    F = m.F
    alpha = F.neg(place.pi.c[0]) if place.pi.c else 0
    rows = []
    for r in m.D:
        row = []
        for x in r:
            top = max([c.deg for c in x.num.tc + x.den.tc] + [0])
            row.append(BivarEntry(_theta_bivar(x.num, alpha, top), _theta_bivar(x.den, alpha, top)))
        rows.append(row)
    phi = FrobModule(F, rows, m.level)
    descriptor = {
        "variable": "theta",
        "substitution": "s = 1/theta + alpha",
        "alpha": F.to_json(alpha),
        "sigma": "inverse of phi_q",
        "Psi": "phi_q(Y)",
        "relation": "Phi*Psi = sigma(Psi), from D*phi_q(Y) = Y",
    }
    return phi, descriptor


def theta_to_s(x: BivarEntry, alpha: int) -> BivarEntry:
    """Inverse substitution theta = 1/(s - alpha), used to check exports."""
    F = x.F
    s_minus = Poly(F, (F.neg(alpha), 1))

    def conv(b: BivarPoly, top: int) -> BivarPoly:
        out = []
        for c in b.tc:
            acc = Poly(F, ())
            for a, v in enumerate(c.c):
                if v:
                    acc = acc + (s_minus ** (top - a)) * v
            out.append(acc)
        return BivarPoly(F, out, "s")

    top = max([c.deg for c in x.num.tc + x.den.tc] + [0])
    return BivarEntry(conv(x.num, top), conv(x.den, top))


def theta_place(place: PlaceFin, alpha: int) -> PlaceFin:
    """The place theta = 1/(beta - alpha) matching a degree-1 place (s - beta), beta != alpha."""
    if place.d != 1:
        raise DegreeNotOne("only degree-1 places have a simple theta image")
    F = place.F
    beta = F.neg(place.pi.c[0]) if place.pi.c else 0
    if beta == alpha:
        raise ValueError("(s - alpha) is the place at infinity in theta")
    theta0 = F.inv(F.sub(beta, alpha))
    return make_place(Poly(F, (F.neg(theta0), 1), "theta"))
