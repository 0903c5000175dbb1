"""Dense linear algebra over the prime field F_p.

Everything works on ``numpy.int64`` arrays with entries in ``[0, p)``.
Products go through float64 BLAS whenever the accumulated bound fits in
the 53-bit mantissa, which is the common case at desk scale.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Inconsistent

_FLOAT_EXACT = 2**52


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact ``a @ b mod p`` for integer arrays already reduced mod p."""
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
    if inner * (p - 1) ** 2 < _FLOAT_EXACT:
        out = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return np.rint(out).astype(np.int64) % p
    if inner * (p - 1) ** 2 < 2**62:
        return np.matmul(a, b) % p
    return (np.matmul(a.astype(object), b.astype(object)) % p).astype(np.int64)


def matmul_mod_fixed(a: np.ndarray, b: np.ndarray, b_float: np.ndarray | None, p: int) -> np.ndarray:
    """``matmul_mod`` with a precomputed float64 copy of the right factor."""
    if b_float is None or a.shape[-1] * (p - 1) ** 2 >= _FLOAT_EXACT:
        return matmul_mod(a, b, p)
    return np.rint(np.matmul(a.astype(np.float64), b_float)).astype(np.int64) % p


def _inv_mod(x: int, p: int) -> int:
    return pow(int(x), p - 2, p)


def rref(a: np.ndarray, p: int, transform: bool = False):
    """Reduced row echelon form of ``a`` over F_p.

    Returns ``(R, pivots)`` or ``(R, pivots, T)`` with ``T @ a == R``.
    Pivots are chosen as the first nonzero entry in each column, scanning
    rows top to bottom, so the result is deterministic.
    """
    a = np.asarray(a, dtype=np.int64) % p
    m, n = a.shape
    if transform:
        work = np.concatenate([a, np.eye(m, dtype=np.int64)], axis=1)
    else:
        work = a.copy()
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(work[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            work[[r, piv]] = work[[piv, r]]
        inv = _inv_mod(work[r, c], p)
        if inv != 1:
            work[r] = (work[r] * inv) % p
        col = work[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            work[rows] = (work[rows] - np.outer(col[rows], work[r])) % p
        pivots.append(c)
        r += 1
    if transform:
        return work[:, :n], pivots, work[:, n:]
    return work, pivots


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of ``{x : a @ x = 0}`` as the rows of the returned array."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[1]
    r, pivots = rref(a, p)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = (-r[row, f]) % p
    return basis


class AffineSolver:
    """Factor ``a`` once, then solve ``a @ x = b`` for many right-hand sides.

    The particular solution sets every free variable to zero.
    """

    def __init__(self, a: np.ndarray, p: int):
        a = np.asarray(a, dtype=np.int64) % p
        self.p = p
        self.shape = a.shape
        self.r, self.pivots, self.t = rref(a, p, transform=True)
        self.rank = len(self.pivots)
        self._kernel = None

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve for one RHS vector or a stack of them (last axis = rows of a).

        Raises :class:`Inconsistent` if any RHS lies outside the image.
        """
        b = np.asarray(b, dtype=np.int64) % self.p
        tb = matmul_mod(b, self.t.T, self.p)
        if np.any(tb[..., self.rank:]):
            raise Inconsistent("right-hand side not in the image")
        x = np.zeros(b.shape[:-1] + (self.shape[1],), dtype=np.int64)
        x[..., self.pivots] = tb[..., : self.rank]
        return x

    def consistent(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=np.int64) % self.p
        tb = matmul_mod(b, self.t.T, self.p)
        return ~np.any(tb[..., self.rank:], axis=-1)

    @property
    def kernel(self) -> np.ndarray:
        if self._kernel is None:
            n = self.shape[1]
            piv = set(self.pivots)
            free = [c for c in range(n) if c not in piv]
            basis = np.zeros((len(free), n), dtype=np.int64)
            for i, f in enumerate(free):
                basis[i, f] = 1
                for row, pc in enumerate(self.pivots):
                    basis[i, pc] = (-self.r[row, f]) % self.p
            self._kernel = basis
        return self._kernel


@dataclass
class LinSystem:
    """``matrix @ x = rhs`` over F_p."""

    matrix: np.ndarray
    rhs: np.ndarray
    p: int
    _solver: AffineSolver | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.int64) % self.p
        self.rhs = np.asarray(self.rhs, dtype=np.int64) % self.p
        if self.matrix.ndim != 2 or self.rhs.shape != (self.matrix.shape[0],):
            raise ValueError("inconsistent LinSystem dimensions")

    def solve(self):
        """Return ``(particular, kernel_basis)``; raise Inconsistent if unsolvable."""
        if self._solver is None:
            self._solver = AffineSolver(self.matrix, self.p)
        return self._solver.solve(self.rhs), self._solver.kernel
