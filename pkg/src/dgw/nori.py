"""Explicit SL_n difference module with a prescribed Galois element at (s - alpha).

The module is D = D0 · x^{-1}·diag(p̃_1, …, p̃_{n-1}, (p̃_1⋯p̃_{n-1})^{-1})·x with
p̃_j = 1 + zeta^j·(s/alpha)·t, where D0 is a companion matrix over F_q[s] whose
value at s = alpha is conjugate to g0 = diag(zeta, …, zeta^{n-1}, zeta^{-n(n-1)/2}).
Conjugation is g^x = x^{-1}·g·x throughout.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import groups
from .errors import (BadAlpha, BudgetExhausted, ConjugationFailed, EigenvalueCollision,
                     InvariantViolated, NotPrimitiveRoot, PreconditionFailed)
from .fields import SmallField, small_field
from .funcfield import Poly, RatFunc, place_from_poly
from .module import FrobModule, check_existence_hypothesis
from .series import BivarEntry, BivarPoly, TruncSeriesMatrix, expand_matrix_at_place

log = logging.getLogger(__name__)


def build_g0(F: SmallField, n: int, zeta: int) -> groups.Mat:
    q = F.q
    if q <= n * (n + 1) // 2:
        raise PreconditionFailed(f"need q > n(n+1)/2, got q={q}, n={n}")
    if zeta == 0 or F.mult_order(zeta) != q - 1:
        raise NotPrimitiveRoot(f"{F.to_json(zeta)} does not generate F_{q}^*")
    diag = [F.pow(zeta, j) for j in range(1, n)] + [F.pow(zeta, -(n * (n - 1) // 2))]
    if len(set(diag)) != n:
        raise EigenvalueCollision(f"repeated eigenvalues {diag}")
    g0 = tuple(diag[i] if i == j else 0 for i in range(n) for j in range(n))
    assert groups.det(F, g0) == 1
    return g0


def companion(F: SmallField, first_row) -> groups.Mat:
    n = len(first_row)
    return tuple(first_row[j] if i == 0 else (1 if j == i - 1 else 0)
                 for i in range(n) for j in range(n))


def build_D0(F: SmallField, n: int, alpha: int, alphas, betas, g0: groups.Mat):
    """Companion matrix over F_q[s] (entries are Poly) with D0(alpha) ~ g0."""
    if alpha in (0, 1):
        raise BadAlpha("alpha must avoid 0 and 1")
    if len(alphas) != n - 1 or len(betas) != n - 1:
        raise ValueError(f"need {n - 1} alphas and betas")
    cp = groups.charpoly(F, g0)
    gammas = [F.neg(cp[n - i]) for i in range(1, n)]
    s = Poly.x(F)
    one = Poly.const(F, 1)
    scale = F.inv(F.mul(alpha, F.sub(alpha, 1)))
    bump = s * (s - one) * scale
    fs = []
    for a_i, b_i, g_i in zip(alphas, betas, gammas):
        corr = F.sub(F.sub(g_i, F.mul(alpha, a_i)), F.mul(F.sub(1, alpha), b_i))
        fs.append(s * a_i + (one - s) * b_i + bump * corr)
    last = Poly.const(F, F.from_int((-1) ** (n - 1)))
    zero = Poly(F, ())
    D0 = [[*fs, last]] + [[one if j == i - 1 else zero for j in range(n)] for i in range(1, n)]
    at_alpha = companion(F, [f(alpha) for f in D0[0]])
    if groups.charpoly(F, at_alpha) != cp:
        raise InvariantViolated("companion_charpoly", "D0(alpha) and g0 have different char polys")
    return D0


def build_conjugator(F: SmallField, g0: groups.Mat, D0bar: groups.Mat) -> groups.Mat:
    """x in SL_n(F_q) with x^{-1}·g0·x = D0bar.

    Row i of x is a left eigenvector of the companion matrix for the i-th
    eigenvalue of g0; the first row is then rescaled to make det x = 1.
    """
    n = groups.dim_of(g0)
    if not groups.is_diagonal(g0) or len({g0[i * n + i] for i in range(n)}) != n:
        raise PreconditionFailed("g0 must be diagonal with distinct eigenvalues")
    row0 = D0bar[:n]
    rows = []
    for i in range(n):
        lam = g0[i * n + i]
        v = [1]
        for j in range(n - 1):
            v.append(F.sub(F.mul(lam, v[j]), row0[j]))
        rows.append(v)
    x = tuple(c for r in rows for c in r)
    d = groups.det(F, x)
    if d == 0:
        raise ConjugationFailed("eigenvector matrix is singular")
    dinv = F.inv(d)
    x = tuple(F.mul(dinv, c) if i < n else c for i, c in enumerate(x))
    if groups.det(F, x) != 1 or groups.mul(F, g0, x) != groups.mul(F, x, D0bar):
        raise ConjugationFailed("g0^x differs from the companion matrix")
    return x


@dataclass
class SlInstance:
    F: SmallField
    n: int
    zeta: int
    alpha: int
    alphas: tuple
    betas: tuple
    g0: groups.Mat = field(repr=False, default=())
    x: groups.Mat = field(repr=False, default=())
    D0: list = field(repr=False, default_factory=list)
    module: FrobModule | None = field(repr=False, default=None)

    @property
    def q(self):
        return self.F.q

    @property
    def place_p(self):
        return place_from_poly(self.F, [self.F.neg(self.alpha), 1])

    @property
    def place_q(self):
        return place_from_poly(self.F, [0, 1])

    def D0bar(self) -> groups.Mat:
        return tuple(f(self.alpha) for r in self.D0 for f in r)

    def to_json(self) -> dict:
        F = self.F
        return {"schema": "dgw.instance/1", "p": F.p, "e": F.ctx.e, "q": F.q, "n": self.n,
                "zeta": F.to_json(self.zeta), "alpha": F.to_json(self.alpha),
                "alphas": [F.to_json(a) for a in self.alphas],
                "betas": [F.to_json(b) for b in self.betas]}

    @classmethod
    def from_json(cls, obj: dict, N: int = 8) -> "SlInstance":
        p, e = int(obj["p"]), int(obj.get("e", 1))
        F = small_field(p, e)
        if "q" in obj and int(obj["q"]) != F.q:
            raise ValueError("q does not match p^e")
        return build_instance(F, int(obj["n"]), F.from_json(obj["zeta"]), F.from_json(obj["alpha"]),
                              [F.from_json(a) for a in obj["alphas"]],
                              [F.from_json(b) for b in obj["betas"]], N=N)


def _entry(F, poly_s_by_t, den: BivarPoly) -> BivarEntry:
    return BivarEntry(BivarPoly(F, poly_s_by_t), den)


def build_module(inst: SlInstance, N: int = 8) -> FrobModule:
    """Assemble D = D0·diag(p̃)^x and assert its defining properties to precision N."""
    F, n, alpha, zeta = inst.F, inst.n, inst.alpha, inst.zeta
    if alpha == 0:
        raise BadAlpha("the places (s) and (s - alpha) must differ")
    xinv = groups.inverse(F, inst.x)
    x = inst.x
    ainv = F.inv(alpha)
    ptilde = [BivarPoly.from_terms(F, [(1, 0, 0), (F.mul(F.pow(zeta, j), ainv), 1, 1)])
              for j in range(1, n)]
    prod = BivarPoly.const(F, 1)
    for pt in ptilde:
        prod = prod * pt
    # x^{-1}·diag(p̃)·x over the common denominator prod
    conj = [[BivarPoly(F, []) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(n):
            acc = BivarPoly(F, [])
            for j in range(n):
                c = F.mul(xinv[i * n + j], x[j * n + k])
                if not c:
                    continue
                acc = acc + ((ptilde[j] * prod) * c if j < n - 1 else BivarPoly.const(F, c))
            conj[i][k] = acc
    D = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = BivarPoly(F, [])
            for m in range(n):
                if not inst.D0[i][m].is_zero():
                    acc = acc + BivarPoly.from_poly_s(inst.D0[i][m]) * conj[m][k]
            row.append(BivarEntry(acc, prod))
        D.append(row)
    mod = FrobModule(F, D)
    _assert_module(inst, mod, N)
    return mod


def _assert_module(inst: SlInstance, mod: FrobModule, N: int):
    F, n = inst.F, inst.n
    for i in range(n):
        for k in range(n):
            if mod.D[i][k].t_expansion(1)[0] != RatFunc(inst.D0[i][k]):
                raise InvariantViolated("D_equals_D0_mod_t", f"entry ({i},{k})")
    ctx = F.ctx
    torus = groups.torus_element(F, n, inst.zeta)
    g = torus.series(ctx, N)
    g0 = TruncSeriesMatrix.constant(ctx, _codes_to_array(F, inst.g0, n), N)
    xs = TruncSeriesMatrix.constant(ctx, _codes_to_array(F, inst.x, n), N)
    xinv = TruncSeriesMatrix.constant(ctx, _codes_to_array(F, groups.inverse(F, inst.x), n), N)
    expected = xinv @ (g0 @ g) @ xs
    got = expand_matrix_at_place(mod.D, inst.place_p, N)
    if got != expected:
        raise InvariantViolated("reduction_is_g0g_conjugate", f"at {inst.place_p.label()}")
    rep = check_existence_hypothesis(mod, inst.place_q, N)
    if not rep.ok:
        raise InvariantViolated("existence_hypothesis", f"fails at t^{rep.first_failure}")


def _codes_to_array(F: SmallField, m: groups.Mat, n: int) -> np.ndarray:
    return np.array([F.to_array(c) for c in m], dtype=np.int64).reshape(n, n, F.ctx.k)


def build_instance(F: SmallField, n: int, zeta: int, alpha: int, alphas, betas,
                   N: int = 8) -> SlInstance:
    g0 = build_g0(F, n, zeta)
    D0 = build_D0(F, n, alpha, alphas, betas, g0)
    inst = SlInstance(F, n, zeta, alpha, tuple(alphas), tuple(betas), g0=g0, D0=D0)
    inst.x = build_conjugator(F, g0, inst.D0bar())
    inst.module = build_module(inst, N)
    return inst


def default_zeta(F: SmallField) -> int:
    return next(a for a in range(1, F.q) if F.mult_order(a) == F.q - 1)


def candidate_parameters(F: SmallField, n: int):
    """All (alphas, betas) in lexicographic order of the code tuple."""
    for tup in itertools.product(range(F.q), repeat=2 * (n - 1)):
        yield tup[: n - 1], tup[n - 1:]


def search_nori_parameters(F: SmallField, n: int, budget: int, zeta: int | None = None,
                           alpha: int = 2, d_max: int = 3, threads: int = 1, M_max: int = 60):
    """First (alphas, betas) whose witnesses certify generation of SL_n(F_q).

    Returns ``(instance, report)``.  Raises BudgetExhausted after ``budget``
    candidates; the exception carries the reports seen so far.
    """
    from .pipeline import collect_witnesses

    if n != 2 or F.q > 9:
        raise PreconditionFailed("the search covers n = 2 and q <= 9")
    zeta = default_zeta(F) if zeta is None else zeta
    reports = []
    for count, (alphas, betas) in enumerate(candidate_parameters(F, n)):
        if count >= budget:
            break
        inst = build_instance(F, n, zeta, alpha, alphas, betas, N=2)
        witnesses = collect_witnesses(inst.module, d_max, N=1, M_max=M_max, threads=threads)
        report = groups.generation_report(F, n, [w.h0_codes() for w in witnesses],
                                          [w.place.label() for w in witnesses])
        log.info("alphas=%s betas=%s closure=%d oracle=%s", alphas, betas,
                 report.closure_size, report.oracle)
        reports.append(((alphas, betas), report))
        if report.verdict == "full":
            return inst, report
    exc = BudgetExhausted(f"no parameters certified within {budget} candidates")
    exc.reports = reports
    raise exc
