"""Small dense linear algebra in mpmath: nullspace and conversions.

Only setup-sized problems (dimension <= ~12) pass through here.
"""
from __future__ import annotations

import mpmath as mp
import numpy as np


def to_float_matrix(A: mp.matrix) -> np.ndarray:
    return np.array([[float(A[i, j]) for j in range(A.cols)] for i in range(A.rows)])


def to_float_vector(v) -> np.ndarray:
    return np.array([float(x) for x in v])


def mp_cond(A: mp.matrix) -> float:
    """1-norm condition estimate, returned as a float (inf if singular)."""
    try:
        return float(mp.mnorm(A, 1) * mp.mnorm(A ** -1, 1))
    except ZeroDivisionError:
        return float("inf")


def nullspace_vector(A: mp.matrix, rtol=None):
    """Nullvector of a square matrix via full-pivot Gaussian elimination.

    Returns (vector, rank).  The vector solves A v = 0 with the last pivot
    column treated as free; pivots below rtol * |largest pivot| terminate the
    elimination and define the numerical rank.
    """
    n = A.rows
    if rtol is None:
        rtol = mp.mpf(10) ** (-(mp.mp.dps - 10))
    M = A.copy()
    col_perm = list(range(n))
    rank = 0
    first_pivot = None
    for k in range(n):
        piv, pi, pj = mp.mpf(0), k, k
        for i in range(k, n):
            for j in range(k, n):
                if abs(M[i, j]) > piv:
                    piv, pi, pj = abs(M[i, j]), i, j
        if first_pivot is None:
            first_pivot = piv
        if piv == 0 or (first_pivot > 0 and piv < rtol * first_pivot):
            break
        if pi != k:
            for j in range(n):
                M[k, j], M[pi, j] = M[pi, j], M[k, j]
        if pj != k:
            for i in range(n):
                M[i, k], M[i, pj] = M[i, pj], M[i, k]
            col_perm[k], col_perm[pj] = col_perm[pj], col_perm[k]
        for i in range(k + 1, n):
            f = M[i, k] / M[k, k]
            for j in range(k, n):
                M[i, j] -= f * M[k, j]
        rank += 1
    x = mp.matrix(n, 1)
    for j in range(rank, n):
        x[j] = mp.mpf(1) if j == rank else mp.mpf(0)
    for k in range(rank - 1, -1, -1):
        s = mp.fsum(M[k, j] * x[j] for j in range(k + 1, n))
        x[k] = -s / M[k, k]
    out = mp.matrix(n, 1)
    for k in range(n):
        out[col_perm[k]] = x[k]
    nrm = mp.sqrt(mp.fsum(v * v for v in out))
    for k in range(n):
        out[k] /= nrm
    return out, rank
