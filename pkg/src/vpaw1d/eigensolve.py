"""Dense generalized symmetric-definite eigensolver behind the spec contract.

The production path runs LAPACK's Cholesky / Householder / implicit-shift
reduction through scipy.linalg.eigh, gated by an explicit SPD factorization
check that turns an indefinite overlap into NotSPD instead of garbage.
Raw LAPACK eigenvalues for these operators carry an absolute error of order
eps * ||H~|| (~1e-9 at M ~ 10^3 because of the (2 pi K)^2 kinetic diagonal),
which would swamp converged VPAW errors, so every eigenvalue is refined by a
Rayleigh quotient of its computed eigenvector; that restores absolute
accuracy of order eps * |E|.

A hand-rolled cyclic Jacobi solver on the Cholesky-reduced problem serves as
the independent cross-check oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import NoConvergence, NotSPD

_SIGN_TOL = 1e-12


@dataclass(frozen=True)
class EigResult:
    values: np.ndarray       # nondecreasing
    vectors: np.ndarray      # S-orthonormal columns
    residuals: np.ndarray    # ||H v - lambda S v|| / ||v||


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    v = vectors.copy()
    for i in range(v.shape[1]):
        col = v[:, i]
        nz = np.nonzero(np.abs(col) > _SIGN_TOL * np.abs(col).max())[0]
        lead = col[nz[0]] if nz.size else col[0]
        if lead < 0:
            v[:, i] = -col
    return v


def solve_lowest(Htilde: np.ndarray, Stilde: np.ndarray, n: int) -> EigResult:
    """Lowest n eigenpairs of H~ v = E S~ v.

    Raises NotSPD when S~ has no Cholesky factorization (the transformation
    is not invertible on the discrete space at this eta) and NoConvergence
    when the LAPACK iteration gives up.
    """
    M = Htilde.shape[0]
    if not (1 <= n <= M):
        raise ValueError("need 1 <= n <= M")
    try:
        np.linalg.cholesky(Stilde)
    except np.linalg.LinAlgError as exc:
        raise NotSPD("overlap matrix is not positive definite") from exc
    try:
        vals, vecs = sla.eigh(Htilde, Stilde, subset_by_index=[0, n - 1])
    except sla.LinAlgError as exc:
        msg = str(exc)
        if "converge" in msg.lower():
            raise NoConvergence(msg) from exc
        if "positive definite" in msg.lower():
            raise NotSPD(msg) from exc
        raise
    # Rayleigh-quotient refinement
    refined = np.empty(n)
    residuals = np.empty(n)
    for i in range(n):
        v = vecs[:, i]
        sv = Stilde @ v
        v = v / np.sqrt(v @ sv)
        vecs[:, i] = v
        hv = Htilde @ v
        sv = Stilde @ v
        lam = (v @ hv) / (v @ sv)
        refined[i] = lam
        residuals[i] = np.linalg.norm(hv - lam * sv) / np.linalg.norm(v)
    order = np.argsort(refined, kind="stable")
    return EigResult(values=refined[order], vectors=_fix_signs(vecs[:, order]),
                     residuals=residuals[order])


def jacobi_lowest(Htilde: np.ndarray, Stilde: np.ndarray, n: int,
                  tol: float = 1e-15, max_sweeps: int = 60) -> EigResult:
    """Cross-check oracle: Cholesky reduction + cyclic Jacobi rotations.

    Independent of LAPACK's tridiagonal path; intended for small matrices.
    """
    try:
        L = np.linalg.cholesky(Stilde)
    except np.linalg.LinAlgError as exc:
        raise NotSPD("overlap matrix is not positive definite") from exc
    C = sla.solve_triangular(L, Htilde, lower=True)
    C = sla.solve_triangular(L, C.T, lower=True).T
    C = 0.5 * (C + C.T)
    m = C.shape[0]
    J = np.eye(m)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(C, -1) ** 2))
        if off <= tol * np.linalg.norm(np.diag(C)):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                if abs(C[p, q]) <= 1e-300:
                    continue
                theta = (C[q, q] - C[p, p]) / (2 * C[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(1 + theta * theta))
                if theta == 0:
                    t = 1.0
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                C[:, [p, q]] = C[:, [p, q]] @ rot
                C[[p, q], :] = rot.T @ C[[p, q], :]
                J[:, [p, q]] = J[:, [p, q]] @ rot
    else:
        raise NoConvergence(f"Jacobi sweeps exceeded {max_sweeps}")
    vals = np.diag(C).copy()
    order = np.argsort(vals)[:n]
    vals = vals[order]
    vecs = sla.solve_triangular(L.T, J[:, order], lower=False)
    for i in range(n):
        vecs[:, i] /= np.sqrt(vecs[:, i] @ Stilde @ vecs[:, i])
    residuals = np.array([
        np.linalg.norm(Htilde @ vecs[:, i] - vals[i] * (Stilde @ vecs[:, i]))
        / np.linalg.norm(vecs[:, i]) for i in range(n)])
    return EigResult(values=vals, vectors=_fix_signs(vecs), residuals=residuals)
