"""Truncated fundamental matrices and Galois witnesses at a place.

For a reduced representing matrix Dbar over F_{q^d}[[t]]/(t^N) we look for
Ybar over some F_{q^M} with Dbar·φ_q(Ybar) = Ybar.  The constant layer is a
Lang equation; every later layer is affine in Y_l and, after substituting
Y_l = Y_0·W, decouples into Artin-Schreier equations w^q - w = c.  Those
are solvable exactly when c has trace zero down to F_q, and passing from
F_{q^M} to F_{q^{Mp}} kills every trace, so M only ever grows by factors p.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import groups
from .errors import (CentralizerNotTorus, DeterminantNotPhiFixed, Inconsistent,
                     InvariantViolated, NoRationalDescent, PhiFixednessViolated,
                     SplittingDegreeExceeded)
from .fields import Embedding, FieldCtx, SmallField, build_extension
from .funcfield import PlaceFin
from .gfmatrix import (charpoly, is_invertible, mat_inv, mat_mul,
                       solve_affine_semilinear)
from .module import FrobModule, ReducedModule, frobenius_product, reduce_module_at
from .series import TruncSeriesMatrix

log = logging.getLogger(__name__)

DEFAULT_M_MAX = 1000
DEFAULT_MAX_DEGREE = 4096
SCAN_CAP = 4096
RANDOM_TRIES = 2000


@dataclass
class LangSolution:
    M: int
    ctx: FieldCtx
    Y0: np.ndarray
    homogeneous_dim: int


def _pick_invertible(ctx: FieldCtx, basis: np.ndarray, rng, cap: int = SCAN_CAP):
    """An invertible F_p-combination of ``basis``.

    Without ``rng`` the combinations are scanned in lexicographic order of the
    coefficient tuple, then random ones are tried from a fixed seed.
    """
    p, r = ctx.p, basis.shape[0]
    if r == 0:
        return None
    if rng is None:
        for count, coeffs in enumerate(itertools.product(range(p), repeat=r)):
            if count > cap:
                break
            if not any(coeffs):
                continue
            z = np.tensordot(np.array(coeffs, dtype=np.int64), basis, axes=1) % p
            if is_invertible(ctx, z):
                return z
        rng = np.random.default_rng(0)
    for _ in range(RANDOM_TRIES):
        z = np.tensordot(rng.integers(0, p, r), basis, axes=1) % p
        if is_invertible(ctx, z):
            return z
    return None


def _lang_in(ctx: FieldCtx, D0: np.ndarray, rng) -> tuple[np.ndarray | None, int]:
    n = D0.shape[0]
    sol = solve_affine_semilinear(ctx, D0, ctx.zeros((n, n)))
    dim = sol.homogeneous_dim
    # an invertible solution Y0 forces the solution space to be Y0·Mat_n(F_q)
    if dim < n * n * ctx.e:
        return None, dim
    return _pick_invertible(ctx, sol.basis, rng), dim


def _rng(seed):
    return None if seed is None else np.random.default_rng(seed)


def lang_solve(D0: np.ndarray, ctx_d: FieldCtx, M_max: int = DEFAULT_M_MAX, seed=None,
               max_degree: int = DEFAULT_MAX_DEGREE) -> LangSolution:
    """Smallest M in {d, 2d, ...} with an invertible Y0 over F_{q^M}, D0·Y0^(q) = Y0.

    ``seed=None`` picks Y0 deterministically; an integer seed picks a random one.
    """
    d = ctx_d.M
    if M_max < d:
        raise SplittingDegreeExceeded(f"M_max={M_max} is below the residue degree {d}")
    if not is_invertible(ctx_d, D0):
        raise ValueError("D0 must be invertible")
    rng = _rng(seed)
    for M in range(d, M_max + 1, d):
        ctx = build_extension(ctx_d.p, ctx_d.e, M, max_degree)
        y0, dim = _lang_in(ctx, ctx.embedding(ctx_d)(D0), rng)
        if y0 is not None:
            return LangSolution(M, ctx, y0, dim)
    raise SplittingDegreeExceeded(f"no invertible solution with M <= {M_max}")


@dataclass
class TruncatedSolution:
    M: int
    ctx: FieldCtx
    Ybar: TruncSeriesMatrix
    embedding: Embedding          # residue field -> F_{q^M}
    lang_M: int
    tried: list = field(default_factory=list)


def _lift_y0(ctx: FieldCtx, D0: np.ndarray, lang: LangSolution, rng) -> np.ndarray:
    """Y0 over the big field, re-solved inside its degree lang.M subfield."""
    if ctx.M == lang.M:
        return lang.Y0
    sub, emb = ctx.subfield_presentation(lang.M)
    y0, _ = _lang_in(sub, emb.pullback(D0), rng)
    if y0 is None:
        raise AssertionError("Lang equation lost its solution in a presentation change")
    return emb(y0)


def solve_truncated(r: ReducedModule, M_max: int = DEFAULT_M_MAX, seed=None,
                    max_degree: int = DEFAULT_MAX_DEGREE) -> TruncatedSolution:
    if r.level != 1:
        raise ValueError("the solver works at level 1; raise the level on the module instead")
    ctx_d, N = r.place.ctx, r.prec
    n = r.Dbar.n
    rng = _rng(seed)
    lang = lang_solve(r.Dbar.constant_term(), ctx_d, M_max, seed, max_degree)
    M, tried = lang.M, []
    while True:
        tried.append(M)
        ctx = build_extension(ctx_d.p, ctx_d.e, M, max_degree)
        emb = ctx.embedding(ctx_d)
        D = emb(r.Dbar.data)
        y0 = _lift_y0(ctx, D[:, :, 0], lang, rng)
        ys = [y0]
        failed_at = None
        for l in range(1, N):
            b = ctx.zeros((n, n))
            for j in range(1, l + 1):
                if D[:, :, j].any():
                    b = ctx.add(b, mat_mul(ctx, D[:, :, j], ctx.frob(ys[l - j], 1)))
            try:
                sol = solve_affine_semilinear(ctx, D[:, :, 0], b, fundamental=y0)
            except Inconsistent:
                failed_at = l
                break
            y = sol.particular
            if rng is not None and sol.homogeneous_dim:
                y = (y + np.tensordot(rng.integers(0, ctx.p, sol.homogeneous_dim),
                                      sol.basis, axes=1)) % ctx.p
            ys.append(y)
        if failed_at is None:
            break
        log.debug("layer %d inconsistent over M=%d at %s", failed_at, M, r.place.label())
        M *= ctx.p
        if M > M_max:
            raise SplittingDegreeExceeded(
                f"layer {failed_at} at {r.place.label()} needs M > {M_max}")
    ybar = TruncSeriesMatrix(ctx, np.stack(ys, axis=2))
    return TruncatedSolution(M, ctx, ybar, emb, lang.M, tried)


def fundamental_residual(Dbar: TruncSeriesMatrix, Ybar: TruncSeriesMatrix, j: int = 1):
    """Dbar·φ^j(Ybar) - Ybar; zero exactly for fundamental matrices."""
    return Dbar @ Ybar.phi(j) - Ybar


def normalize_to_sl(Ybar: TruncSeriesMatrix) -> TruncSeriesMatrix:
    """Rescale the first column so that det ≡ 1, keeping Ybar fundamental."""
    ctx, n, N = Ybar.ctx, Ybar.n, Ybar.prec
    det = Ybar.det()
    if not np.array_equal(ctx.frob(det.coeffs, 1), det.coeffs):
        raise DeterminantNotPhiFixed("det(Ybar) is not φ_q-fixed; det(Dbar) is not 1")
    one = np.zeros_like(det.coeffs)
    one[0] = ctx.ones()
    if np.array_equal(det.coeffs, one):
        return Ybar
    scale = TruncSeriesMatrix.identity(ctx, n, N).data
    scale[0, 0] = det.inverse().coeffs
    return Ybar @ TruncSeriesMatrix(ctx, scale)


def _is_one(series_coeffs: np.ndarray, ctx: FieldCtx) -> bool:
    one = np.zeros_like(series_coeffs)
    one[0] = ctx.ones()
    return bool(np.array_equal(series_coeffs, one))


@dataclass
class Witness:
    place: PlaceFin
    F: SmallField
    M: int
    N: int
    Ybar: TruncSeriesMatrix
    Dhat: TruncSeriesMatrix       # Frobenius product over the residue field
    h: TruncSeriesMatrix          # over F_{q^M}, φ_q-fixed
    embedding: Embedding          # residue field -> F_{q^M}
    sl: bool
    checks: dict = field(default_factory=dict)
    lang_M: int = 0

    def _to_fq(self, arr_d: np.ndarray) -> np.ndarray:
        """Residue-field values lying in F_q, as F_q coefficient arrays."""
        ctx_d = self.place.ctx
        return ctx_d.embedding(self.F.ctx).pullback(arr_d)

    def h_fq(self) -> np.ndarray:
        """h as an (n, n, N, e) array over F_q."""
        return self._to_fq(self.embedding.pullback(self.h.data))

    def h0_codes(self) -> groups.Mat:
        arr = self.h_fq()[:, :, 0]
        n = arr.shape[0]
        return tuple(self.F.code(arr[i, j]) for i in range(n) for j in range(n))

    def charpoly_h0(self) -> tuple:
        return groups.charpoly(self.F, self.h0_codes())

    def charpoly_Dhat0(self) -> tuple:
        cp = charpoly(self.place.ctx, self.Dhat.constant_term())
        return tuple(self.F.code(c) for c in self._to_fq(cp))

    def to_json(self) -> dict:
        F, n = self.F, self.h.n
        hf = self.h_fq()
        return {
            "place": self.place.to_json(),
            "place_label": self.place.label(),
            "M": self.M,
            "N": self.N,
            "h": {"prec": self.N,
                  "entries": [[[F.to_json(F.code(c)) for c in hf[i, j]] for j in range(n)]
                              for i in range(n)]},
            "h0": groups.rows_of(tuple(F.to_json(c) for c in self.h0_codes()), n),
            "charpoly_h0": [F.to_json(c) for c in self.charpoly_h0()],
            "checks": dict(self.checks),
        }


def extract_witness(m: FrobModule, place: PlaceFin, N: int = 8, M_max: int = DEFAULT_M_MAX,
                    seed=None, max_degree: int = DEFAULT_MAX_DEGREE) -> Witness:
    """h = Ybar^{-1}·D̂·Ybar for the Frobenius product D̂ at ``place``."""
    r = reduce_module_at(m, place, N)
    sl = _is_one(r.Dbar.det().coeffs, place.ctx)
    sol = solve_truncated(r, M_max, seed, max_degree)
    ctx = sol.ctx
    ybar = normalize_to_sl(sol.Ybar) if sl else sol.Ybar
    dhat = frobenius_product(r)
    dh = TruncSeriesMatrix(ctx, sol.embedding(dhat.data))
    h = ybar.inverse() @ dh @ ybar
    if not h.is_phi_fixed():
        raise PhiFixednessViolated(f"witness at {place.label()} is not φ_q-fixed")
    checks = {"phi_fixed": True, "fundamental": not fundamental_residual(
        TruncSeriesMatrix(ctx, sol.embedding(r.Dbar.data)), ybar).data.any()}
    if sl:
        checks["det_one"] = _is_one(h.det().coeffs, ctx)
        if not checks["det_one"]:
            raise InvariantViolated("det_one", f"det h != 1 at {place.label()}")
    w = Witness(place, m.F, sol.M, N, ybar, dhat, h, sol.embedding, sl, checks, sol.lang_M)
    checks["charpoly_matches"] = w.charpoly_h0() == w.charpoly_Dhat0()
    if not checks["charpoly_matches"]:
        raise InvariantViolated("charpoly_matches", f"at {place.label()}")
    return w


# --- rational descent of conjugators -------------------------------------------------

@dataclass
class Descent:
    A: TruncSeriesMatrix
    y0: np.ndarray


def _hilbert90(ctx: FieldCtx, c: np.ndarray) -> np.ndarray:
    """y with φ_q(y)·y^{-1} = c, given that c has norm 1 to F_q."""
    M = ctx.M
    for j in range(ctx.k):
        theta = ctx.zeros()
        theta[j] = 1
        b = ctx.zeros()
        coef = ctx.ones()
        cur = theta
        for i in range(M):
            b = ctx.add(b, ctx.mul(coef, cur))
            coef = ctx.mul(coef, ctx.frob(c, i))
            cur = ctx.frob(cur, 1)
        if not ctx.is_zero(b):
            y = ctx.inv(b)
            if np.array_equal(ctx.mul(ctx.frob(y, 1), ctx.inv(y)), c % ctx.p):
                return y
            break
    raise NoRationalDescent("norm of the twisting cocycle is not 1")


def descend_conjugator(F: SmallField, g: TruncSeriesMatrix, h: TruncSeriesMatrix,
                       A: TruncSeriesMatrix, ambient=None) -> Descent:
    """Replace A (with A^{-1}·g·A = h) by one whose constant term is F_q-rational.

    The correction y lies in the centralizer of g: its constant term solves a
    diagonal Lang equation by additive Hilbert 90, and y itself is the
    polynomial in g with that constant term.
    """
    ctx, n, N = g.ctx, g.n, g.prec
    if A.inverse() @ g @ A != h:
        raise ValueError("A does not conjugate g to h")
    g0 = g.constant_term()
    fq = ctx.embedding(F.ctx)
    g0_codes = tuple(F.code(fq.pullback(g0[i, j])) for i in range(n) for j in range(n))
    if not groups.is_diagonal(g0_codes):
        raise CentralizerNotTorus("constant term of g is not diagonal")
    ambient = groups.enumerate_sl(F, n) if ambient is None else ambient
    cent = groups.centralizer(F, g0_codes, ambient)
    if len(cent) != (F.q - 1) ** (n - 1) or not all(groups.is_diagonal(c) for c in cent):
        raise CentralizerNotTorus("centralizer of g0 is not the diagonal torus")
    a0 = A.constant_term()
    c0 = mat_mul(ctx, ctx.frob(a0, 1), mat_inv(ctx, a0))
    if any(not ctx.is_zero(c0[i, j]) for i in range(n) for j in range(n) if i != j):
        raise NoRationalDescent("twisting cocycle is not diagonal")
    ys = [_hilbert90(ctx, c0[i, i]) for i in range(n)]
    dety = ys[0]
    for y in ys[1:]:
        dety = ctx.mul(dety, y)
    ys[0] = ctx.mul(ys[0], ctx.inv(dety))
    # y = sum a_i g^i with constant term diag(ys)
    lam = [g0[i, i] for i in range(n)]
    V = ctx.zeros((n, n))
    for j in range(n):
        pw = ctx.ones()
        for i in range(n):
            V[j, i] = pw
            pw = ctx.mul(pw, lam[j])
    coeffs = mat_mul(ctx, mat_inv(ctx, V), np.array(ys)[:, None, :])[:, 0]
    acc = TruncSeriesMatrix(ctx, ctx.zeros((n, n, N)))
    power = TruncSeriesMatrix.identity(ctx, n, N)
    for i in range(n):
        acc = acc + TruncSeriesMatrix(ctx, ctx.mul(coeffs[i], power.data))
        power = power @ g
    A2 = acc.inverse() @ A
    if A2.inverse() @ g @ A2 != h:
        raise NoRationalDescent("corrected conjugator lost the conjugation")
    if not np.array_equal(ctx.frob(A2.constant_term(), 1), A2.constant_term()):
        raise NoRationalDescent("constant term is still not rational")
    return Descent(A2, np.array(ys))
