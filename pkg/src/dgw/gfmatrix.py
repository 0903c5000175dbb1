"""Small dense matrices over a :class:`~dgw.fields.FieldCtx`, and the
semilinear solver for ``A·Z^(q) + B = Z``.

A matrix is an int64 array of shape ``(n, m, k)``; the last axis holds
field coefficients.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .fields import FieldCtx
from .gflinalg import AffineSolver


def identity(ctx: FieldCtx, n: int) -> np.ndarray:
    out = ctx.zeros((n, n))
    for i in range(n):
        out[i, i] = ctx.ones()
    return out


def mat_mul(ctx: FieldCtx, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    prod = ctx.mul(a[:, :, None, :], b[None, :, :, :])
    return prod.sum(axis=1) % ctx.p


def mat_frob(ctx: FieldCtx, a: np.ndarray, j: int = 1) -> np.ndarray:
    return ctx.frob(a, j)


def mat_det(ctx: FieldCtx, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if n == 1:
        return a[0, 0] % ctx.p
    if n == 2:
        return ctx.sub(ctx.mul(a[0, 0], a[1, 1]), ctx.mul(a[0, 1], a[1, 0]))
    work = a.copy() % ctx.p
    det = ctx.ones()
    for c in range(n):
        piv = next((r for r in range(c, n) if not ctx.is_zero(work[r, c])), None)
        if piv is None:
            return ctx.zeros()
        if piv != c:
            work[[c, piv]] = work[[piv, c]]
            det = ctx.neg(det)
        det = ctx.mul(det, work[c, c])
        inv = ctx.inv(work[c, c])
        for r in range(c + 1, n):
            if not ctx.is_zero(work[r, c]):
                factor = ctx.mul(work[r, c], inv)
                work[r] = ctx.sub(work[r], ctx.mul(factor, work[c]))
    return det


def mat_inv(ctx: FieldCtx, a: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse; raises ZeroDivisionError if singular."""
    n = a.shape[0]
    work = np.concatenate([a % ctx.p, identity(ctx, n)], axis=1)
    for c in range(n):
        piv = next((r for r in range(c, n) if not ctx.is_zero(work[r, c])), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        if piv != c:
            work[[c, piv]] = work[[piv, c]]
        work[c] = ctx.mul(ctx.inv(work[c, c]), work[c])
        for r in range(n):
            if r != c and not ctx.is_zero(work[r, c]):
                work[r] = ctx.sub(work[r], ctx.mul(work[r, c], work[c]))
    return work[:, n:]


def is_invertible(ctx: FieldCtx, a: np.ndarray) -> bool:
    return not bool(ctx.is_zero(mat_det(ctx, a)))


def charpoly(ctx: FieldCtx, a: np.ndarray) -> np.ndarray:
    """Coefficients of det(X·I - a), constant term first, leading 1 last.

    Uses sums of principal minors, which is division-free and fine for n <= 5.
    """
    n = a.shape[0]
    coeffs = [ctx.ones()]
    for size in range(1, n + 1):
        acc = ctx.zeros()
        for idx in itertools.combinations(range(n), size):
            sub = a[np.ix_(idx, idx)]
            acc = ctx.add(acc, mat_det(ctx, sub))
        coeffs.append(acc if size % 2 == 0 else ctx.neg(acc))
    # coeffs[i] multiplies X^(n-i)
    return np.array(coeffs[::-1])


@dataclass
class SemilinearSolution:
    """Solutions of ``A·Z^(q) + B = Z``: ``particular + span_Fp(basis)``."""

    particular: np.ndarray
    basis: np.ndarray  # shape (r, n, n, k)

    @property
    def homogeneous_dim(self) -> int:
        return int(self.basis.shape[0])


def semilinear_residual(ctx: FieldCtx, a, b, z) -> np.ndarray:
    """``A·Z^(q) + B - Z``; zero exactly on solutions."""
    return ctx.sub(ctx.add(mat_mul(ctx, a, ctx.frob(z, 1)), b), z)


class SemilinearOperator:
    """The F_p-linear map ``Z -> A·Z^(q) - Z`` factored once for reuse.

    The map acts column by column with the same n·k × n·k matrix, so only
    that block is eliminated.
    """

    def __init__(self, ctx: FieldCtx, a: np.ndarray):
        self.ctx, self.a = ctx, a
        n, k = a.shape[0], ctx.k
        self.n = n
        fq = ctx.frob(np.eye(k, dtype=np.int64), 1)  # rows: (x^i)^q
        cols = np.zeros((n, k, n, k), dtype=np.int64)
        for r in range(n):
            img = ctx.mul(a[:, r, None, :], fq[None, :, :])  # (n, k, k): row i of A col r times (x^i)^q
            cols[r] = np.transpose(img, (1, 0, 2))
            for i in range(k):
                cols[r, i, r, i] = (cols[r, i, r, i] - 1) % ctx.p
        # column (r, i) of the linear map is cols[r, i].ravel()
        self.matrix = cols.reshape(n * k, n * k).T.copy()
        self.solver = AffineSolver(self.matrix, ctx.p)

    def solve(self, b: np.ndarray) -> SemilinearSolution:
        ctx, n, k = self.ctx, self.n, self.ctx.k
        rhs = ctx.neg(b)  # (n, n, k): column j is rhs[:, j]
        cols = np.transpose(rhs, (1, 0, 2)).reshape(n, n * k)
        x = self.solver.solve(cols).reshape(n, n, k)  # x[j] = column j
        part = np.transpose(x, (1, 0, 2)).copy()
        kern = self.solver.kernel.reshape(-1, n, k)
        basis = []
        for j in range(n):
            for v in kern:
                z = ctx.zeros((n, n))
                z[:, j] = v
                basis.append(z)
        basis = np.array(basis, dtype=np.int64).reshape(-1, n, n, k)
        return SemilinearSolution(part, basis)


def solve_affine_semilinear(ctx: FieldCtx, a: np.ndarray, b: np.ndarray,
                            fundamental: np.ndarray | None = None) -> SemilinearSolution:
    """All Z over F_{q^M} with ``A·Z^(q) + B = Z``.

    Without ``fundamental`` the system is linearized over F_p and eliminated.
    Given an invertible ``Y0`` with ``A·Y0^(q) = Y0``, the substitution
    ``Z = Y0·W`` turns it into entrywise ``w^q - w = c`` with
    ``C = -Y0^{-1}·B``, which only needs the k × k Artin-Schreier map.
    Raises :class:`Inconsistent` when no solution exists over this field.
    """
    a = np.asarray(a, dtype=np.int64) % ctx.p
    b = np.asarray(b, dtype=np.int64) % ctx.p
    if fundamental is None:
        return SemilinearOperator(ctx, a).solve(b)
    y0 = fundamental
    c = ctx.neg(mat_mul(ctx, mat_inv(ctx, y0), b))
    as_solver = ctx.artin_schreier_solver()
    w = as_solver.solve(c)
    part = mat_mul(ctx, y0, w)
    n = a.shape[0]
    basis = []
    for i in range(n):
        for j in range(n):
            for beta in as_solver.kernel:
                e = ctx.zeros((n, n))
                e[i, j] = beta
                basis.append(mat_mul(ctx, y0, e))
    return SemilinearSolution(part, np.array(basis, dtype=np.int64).reshape(-1, n, n, ctx.k))
