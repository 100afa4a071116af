"""Dense linear algebra kernel: SVD, Moore-Penrose pseudoinverse, solve, rank.

Thin layer over numpy.linalg with one shared tolerance convention: a
singular value counts as zero when it is <= tol * sigma_max, where the
default tol is machine epsilon times max(rows, cols).
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class SvdResult(NamedTuple):
    U: np.ndarray
    s: np.ndarray
    Vt: np.ndarray


class SolveResult(NamedTuple):
    x: np.ndarray
    singular: bool


def default_tol(shape) -> float:
    """Relative singular-value cutoff: eps * max(rows, cols)."""
    return float(np.finfo(float).eps) * max(shape)


def svd(A) -> SvdResult:
    """Full SVD A = U diag(s) Vt with s sorted descending."""
    A = np.asarray(A, dtype=float)
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    return SvdResult(U, s, Vt)


def _cutoff(A, s, tol):
    if tol is None:
        tol = default_tol(A.shape)
    smax = s[0] if s.size else 0.0
    return tol * smax


def pseudoinverse(A, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse, zeroing singular values <= tol * sigma_max."""
    A = np.asarray(A, dtype=float)
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    cut = _cutoff(A, s, tol)
    inv = np.where(s > cut, np.divide(1.0, s, where=s > 0), 0.0)
    return (Vt.T * inv) @ U.T


def rank(A, tol: float | None = None) -> int:
    """Number of singular values above tol * sigma_max."""
    A = np.asarray(A, dtype=float)
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.count_nonzero(s > _cutoff(A, s, tol)))


def solve(A, b, tol: float | None = None) -> SolveResult:
    """Solve the square system A x = b.

    When every singular value clears the cutoff, the unique solution comes
    from a direct factorization.  Otherwise the system is flagged singular
    and the minimum-norm least-squares solution pinv(A) @ b is returned.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("solve expects a square matrix")
    s = np.linalg.svd(A, compute_uv=False)
    cut = _cutoff(A, s, tol)
    if s.size and s[-1] > cut:
        return SolveResult(np.linalg.solve(A, b), False)
    return SolveResult(pseudoinverse(A, tol) @ b, True)
