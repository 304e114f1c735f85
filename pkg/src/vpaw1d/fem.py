"""P2 periodic finite-element reference solver for the (perturbed) model.

Quadratic Lagrange elements on a uniform mesh with the node nearest to `a`
snapped onto it, so both Dirac points sit on vertices and the eigenfunction
kinks are mesh-aligned (this restores the optimal fourth-order eigenvalue
rate).  Dirac terms are rank-1 vertex updates; a smooth W is integrated with
a 5-point Gauss rule per element.

The generalized problem is solved either sparsely (shift-invert Lanczos,
the default at production mesh sizes) or densely through the package
eigensolver; both paths are cross-checked in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .analytic import ModelParams
from .eigensolve import EigResult, solve_lowest, _fix_signs
from .errors import MeshError
from .quadrature import gl_rule

# reference-element matrices for P2 on [0, 1]: nodes (0, 1/2, 1)
_K_REF = np.array([[7.0, -8.0, 1.0],
                   [-8.0, 16.0, -8.0],
                   [1.0, -8.0, 7.0]]) / 3.0
_M_REF = np.array([[4.0, 2.0, -1.0],
                   [2.0, 16.0, 2.0],
                   [-1.0, 2.0, 4.0]]) / 30.0


def _shape(xi: np.ndarray) -> np.ndarray:
    return np.array([2 * (xi - 0.5) * (xi - 1), 4 * xi * (1 - xi), 2 * xi * (xi - 0.5)])


@dataclass(frozen=True)
class FemMesh:
    nodes: np.ndarray          # vertex coordinates in [0, 1), sorted, nodes[0] = 0
    h_max: float
    index_of_a: int

    @property
    def n_elems(self) -> int:
        return self.nodes.size

    def element_lengths(self) -> np.ndarray:
        ext = np.append(self.nodes, 1.0)
        return np.diff(ext)


def build_mesh(a: float, n_elems: int) -> FemMesh:
    """Uniform periodic mesh with the nearest vertex moved exactly to a."""
    if n_elems < 8:
        raise MeshError("need at least 8 elements")
    nodes = np.arange(n_elems) / n_elems
    j = int(round(a * n_elems))
    if j <= 0 or j >= n_elems:
        raise MeshError(f"a={a} cannot be snapped onto an interior vertex")
    h = 1.0 / n_elems
    if min(abs(a - (j - 1) * h), abs((j + 1) * h - a)) < h * 1e-9:
        raise MeshError("snapping would create a degenerate element")
    nodes = nodes.copy()
    nodes[j] = a
    return FemMesh(nodes=nodes, h_max=float(np.diff(np.append(nodes, 1.0)).max()),
                   index_of_a=j)


def _element_dofs(n: int) -> np.ndarray:
    ndof = 2 * n
    e = np.arange(n)
    return np.stack([2 * e, 2 * e + 1, (2 * e + 2) % ndof], axis=1)


def _quadratic_forms_longdouble(params: ModelParams, mesh: FemMesh, v: np.ndarray):
    """a(v, v) and <v, v> accumulated element-wise in extended precision.

    The assembled stiffness entries are O(1/h) while the quadratic form is
    O(1); their correlated rounding shifts eigenvalues by ~eps * n^2, which
    at production meshes exceeds the target accuracy.  Element-wise
    accumulation at longdouble pushes that floor to ~1e-19 * n^2.
    """
    ld = np.longdouble
    vl = v.astype(ld)
    n = mesh.n_elems
    dofs = _element_dofs(n)
    ve = vl[dofs]                                  # (n, 3)
    h = mesh.element_lengths().astype(ld)
    # rebuild the rational reference matrices at longdouble: reusing the
    # float64-rounded constants would keep the very floor being removed
    K = np.array([[7, -8, 1], [-8, 16, -8], [1, -8, 7]], dtype=ld) / ld(3)
    Ml = np.array([[4, 2, -1], [2, 16, 2], [-1, 2, 4]], dtype=ld) / ld(30)
    a_el = np.einsum("ep,pq,eq->e", ve, K, ve) / h
    m_el = np.einsum("ep,pq,eq->e", ve, Ml, ve) * h
    a_val = a_el.sum()
    m_val = m_el.sum()
    if params.W is not None:
        xi, wq = gl_rule(5)
        xi = (0.5 * (xi + 1)).astype(ld)
        wq = (0.5 * wq).astype(ld)
        shp = _shape(xi).astype(ld)                # (3, 5)
        xs = mesh.nodes.astype(ld)[:, None] + h[:, None] * xi[None, :]
        wv = (params.W.amplitude
              * np.sin(2 * np.pi * params.W.frequency * xs + ld(params.W.phase)))
        u_at_q = ve @ shp                          # (n, 5)
        a_val += (u_at_q**2 * wv * wq).sum(axis=1) @ h
    a_val -= ld(params.Z0) * vl[0] ** 2
    a_val -= ld(params.Za) * vl[2 * mesh.index_of_a] ** 2
    return a_val, m_val


def _assemble(params: ModelParams, mesh: FemMesh):
    n = mesh.n_elems
    ndof = 2 * n                       # vertex i -> 2i, midpoint of element i -> 2i+1
    lengths = mesh.element_lengths()
    xi, wq = gl_rule(5)
    xi = 0.5 * (xi + 1)
    wq = 0.5 * wq
    shp = _shape(xi)                   # (3, 5)

    rows, cols, a_vals, m_vals = [], [], [], []
    for e in range(n):
        h = lengths[e]
        dof = np.array([2 * e, 2 * e + 1, (2 * e + 2) % ndof])
        K = _K_REF / h
        Mm = _M_REF * h
        if params.W is not None:
            xs = mesh.nodes[e] + h * xi
            wv = params.W(xs)
            K = K + h * (shp * (wq * wv)) @ shp.T
        for p in range(3):
            for q in range(3):
                rows.append(dof[p])
                cols.append(dof[q])
                a_vals.append(K[p, q])
                m_vals.append(Mm[p, q])
    A = sp.coo_matrix((a_vals, (rows, cols)), shape=(ndof, ndof)).tocsr()
    Mmat = sp.coo_matrix((m_vals, (rows, cols)), shape=(ndof, ndof)).tocsr()
    d0 = 0
    da = 2 * mesh.index_of_a
    A = A.tolil()
    A[d0, d0] -= params.Z0
    A[da, da] -= params.Za
    return A.tocsr(), Mmat


def fem_solve(params: ModelParams, n_elems: int, n_eigs: int,
              solver: str = "auto") -> EigResult:
    """Lowest n_eigs eigenpairs of the P2 discretization.

    solver: "sparse" (shift-invert), "dense" (package eigensolver), or
    "auto" (dense below 600 dofs, sparse otherwise).
    """
    mesh = build_mesh(params.a, n_elems)
    A, Mmat = _assemble(params, mesh)
    ndof = A.shape[0]
    if solver == "auto":
        solver = "dense" if ndof <= 600 else "sparse"
    if solver == "dense":
        res = solve_lowest(A.toarray(), Mmat.toarray(), n_eigs)
        vecs = res.vectors
        residuals = res.residuals
    elif solver == "sparse":
        amp = abs(params.W.amplitude) if params.W is not None else 0.0
        sigma = -1.2 * ((params.Z0 + params.Za) / 2) ** 2 - amp - 5.0
        vals, vecs = spla.eigsh(A, k=n_eigs, M=Mmat, sigma=sigma, which="LM")
        vecs = vecs[:, np.argsort(vals)]
        residuals = np.empty(n_eigs)
        for i in range(n_eigs):
            v = vecs[:, i] / np.sqrt(vecs[:, i] @ (Mmat @ vecs[:, i]))
            vecs[:, i] = v
            hv = A @ v
            lam = v @ hv
            residuals[i] = np.linalg.norm(hv - lam * (Mmat @ v)) / np.linalg.norm(v)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    # extended-precision Rayleigh quotients beat the eps * n^2 rounding floor
    # of the assembled stiffness entries
    refined = np.empty(n_eigs)
    for i in range(n_eigs):
        a_val, m_val = _quadratic_forms_longdouble(params, mesh, vecs[:, i])
        refined[i] = float(a_val / m_val)
    order = np.argsort(refined, kind="stable")
    return EigResult(values=refined[order], vectors=_fix_signs(vecs[:, order]),
                     residuals=residuals[order])
