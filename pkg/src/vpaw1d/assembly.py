"""Galerkin assembly of H, H~ = (Id+T)* H (Id+T), S~ = (Id+T)*(Id+T).

With T b_m = sum_i g_i <p~_i, b_m> (g_i = phi_i - phi~_i over both sites),
the transformed matrices factor exactly as

    H~ = H + X Pt^T + Pt X^T + Pt G_H Pt^T
    S~ = I + D Pt^T + Pt D^T + Pt G_S Pt^T

with Pt[m,i] = <p~_i, b_m>, X[m,i] = a(b_m, g_i), D[m,i] = <g_i, b_m>, and
G_H/G_S the window Grams of the g_i under the bilinear form / L2 product.
Matrix elements are quadratures of the continuous bilinear form, not products
of truncated Fourier expansions, so no extra truncation error enters the
operator.  Cross-site G blocks vanish because the supports are disjoint;
assembling with overlapping windows (strict=False) silently breaks that
assumption, which is exactly what the SPD gate of the solver is for.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .analytic import ModelParams
from .basis import TrigBasis, potential_matrix
from .errors import OverlapError
from .quadrature import window_rule
from .vpaw_setup import (SiteVpawSetup, site_g_values, site_projector_values)

_NODE_CHUNK = 512


@dataclass(frozen=True)
class OperatorPair:
    """Dense transformed matrices plus the factors of the matrix-free path."""

    basis: TrigBasis
    model: ModelParams
    Htilde: Optional[np.ndarray]
    Stilde: Optional[np.ndarray]
    lowrank: dict = field(repr=False)

    @property
    def M(self) -> int:
        return self.basis.M


def _circ_dist(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


def _check_disjoint(setups: Sequence[SiteVpawSetup]):
    for i in range(len(setups)):
        for j in range(i + 1, len(setups)):
            si, sj = setups[i], setups[j]
            if _circ_dist(si.site, sj.site) < si.eta + sj.eta:
                raise OverlapError(
                    f"windows of sites {si.site} and {sj.site} intersect "
                    f"(eta {si.eta}, {sj.eta})")


def _w_values(model: ModelParams, x: np.ndarray) -> np.ndarray:
    return model.W(x) if model.W is not None else np.zeros(np.asarray(x).shape)


def assemble_H(model: ModelParams, basis: TrigBasis) -> np.ndarray:
    """Dense Galerkin matrix of H in the trig basis.

    Kinetic part is diagonal, each Dirac term a rank-1 update from point
    values, and the smooth W enters in closed form through its harmonics.
    """
    H = np.diag(basis.kinetic_diagonal()).copy()
    v0 = basis.point_vector(0.0)
    va = basis.point_vector(model.a)
    H -= model.Z0 * np.outer(v0, v0)
    H -= model.Za * np.outer(va, va)
    if model.W is not None:
        C, S = model.W.harmonics()
        H += potential_matrix(basis, C, S)
    return H


def _site_blocks(model: ModelParams, setup: SiteVpawSetup, basis: TrigBasis,
                 refine: int = 1):
    """Pt, D, X columns and G_H, G_S blocks for one site."""
    phi_freq = max(p.omega for p in setup.atomics) / (2 * np.pi)
    xq, wq = window_rule(setup.site, setup.eta, max_freq=basis.K + phi_freq,
                         refine=refine)
    pt = site_projector_values(setup, xq)
    g0 = site_g_values(setup, xq, 0)
    g1 = site_g_values(setup, xq, 1)
    wvals = _w_values(model, xq)

    N = setup.N
    M = basis.M
    Pt = np.zeros((M, N))
    D = np.zeros((M, N))
    X = np.zeros((M, N))
    for lo in range(0, xq.size, _NODE_CHUNK):
        sl = slice(lo, lo + _NODE_CHUNK)
        bv = basis.values(xq[sl])
        bd = basis.values(xq[sl], 1)
        Pt += (bv * wq[sl]) @ pt[:, sl].T
        D += (bv * wq[sl]) @ g0[:, sl].T
        X += (bd * wq[sl]) @ g1[:, sl].T + (bv * (wq[sl] * wvals[sl])) @ g0[:, sl].T

    # Dirac point terms: g vanishes at the other site when windows are disjoint
    g_at_0 = site_g_values(setup, np.array([0.0]))[:, 0]
    g_at_a = site_g_values(setup, np.array([model.a]))[:, 0]
    b0 = basis.point_vector(0.0)
    ba = basis.point_vector(model.a)
    X -= model.Z0 * np.outer(b0, g_at_0) + model.Za * np.outer(ba, g_at_a)

    GH = (g1 * wq) @ g1.T + (g0 * (wq * wvals)) @ g0.T
    GH -= model.Z0 * np.outer(g_at_0, g_at_0) + model.Za * np.outer(g_at_a, g_at_a)
    GS = (g0 * wq) @ g0.T
    return Pt, D, X, GH, GS


def assemble_vpaw(model: ModelParams, setups: Sequence[SiteVpawSetup],
                  basis: TrigBasis, build_dense: bool = True,
                  strict: bool = True, refine: int = 1) -> OperatorPair:
    """Assemble the transformed pair (H~, S~) and its low-rank factors.

    `setups` may be empty (T = 0: H~ = H, S~ = I).  With strict=True the
    site windows must be pairwise disjoint; strict=False assembles anyway
    with per-site block formulas, for stress tests that expect the SPD gate
    downstream to reject the result.
    """
    if strict:
        _check_disjoint(setups)
    M = basis.M
    cols_Pt, cols_D, cols_X, blocks_GH, blocks_GS = [], [], [], [], []
    for st in setups:
        Pt, D, X, GH, GS = _site_blocks(model, st, basis, refine=refine)
        cols_Pt.append(Pt)
        cols_D.append(D)
        cols_X.append(X)
        blocks_GH.append(GH)
        blocks_GS.append(GS)
    n_tot = sum(st.N for st in setups)
    Pt = np.hstack(cols_Pt) if cols_Pt else np.zeros((M, 0))
    D = np.hstack(cols_D) if cols_D else np.zeros((M, 0))
    X = np.hstack(cols_X) if cols_X else np.zeros((M, 0))
    GH = np.zeros((n_tot, n_tot))
    GS = np.zeros((n_tot, n_tot))
    at = 0
    for bh, bs in zip(blocks_GH, blocks_GS):
        n = bh.shape[0]
        GH[at:at + n, at:at + n] = bh
        GS[at:at + n, at:at + n] = bs
        at += n

    lowrank = {
        "Pt": Pt, "D": D, "X": X, "GH": GH, "GS": GS,
        "kinetic": basis.kinetic_diagonal(),
        "v0": basis.point_vector(0.0),
        "va": basis.point_vector(model.a),
        "w_grid": (model.W(basis.grid_points()) if model.W is not None else None),
    }
    Htilde = Stilde = None
    if build_dense:
        H = assemble_H(model, basis)
        Htilde = H + X @ Pt.T + Pt @ X.T + Pt @ GH @ Pt.T
        Stilde = np.eye(M) + D @ Pt.T + Pt @ D.T + Pt @ GS @ Pt.T
    return OperatorPair(basis=basis, model=model, Htilde=Htilde, Stilde=Stilde,
                        lowrank=lowrank)


def dense_from_factors(pair: OperatorPair) -> tuple[np.ndarray, np.ndarray]:
    """Recompute the dense pair from the stored factors (consistency oracle)."""
    f = pair.lowrank
    H = assemble_H(pair.model, pair.basis)
    Ht = H + f["X"] @ f["Pt"].T + f["Pt"] @ f["X"].T + f["Pt"] @ f["GH"] @ f["Pt"].T
    St = (np.eye(pair.M) + f["D"] @ f["Pt"].T + f["Pt"] @ f["D"].T
          + f["Pt"] @ f["GS"] @ f["Pt"].T)
    return Ht, St


def apply_htilde(pair: OperatorPair, x: np.ndarray) -> np.ndarray:
    """H~ x without the dense matrix: O(M log M + M N).

    Kinetic scaling and the two Dirac rank-1 updates are O(M); the smooth W
    multiply runs through the exact trig<->grid maps on a 2M grid
    (O(M log M), alias-free for trig-polynomial W of degree < M/2); the
    transformation itself enters through the low-rank factors (O(M N)).
    """
    f = pair.lowrank
    x = np.asarray(x, float)
    y = f["kinetic"] * x
    y -= pair.model.Z0 * f["v0"] * (f["v0"] @ x)
    y -= pair.model.Za * f["va"] * (f["va"] @ x)
    if f["w_grid"] is not None:
        y += pair.basis.from_grid(f["w_grid"] * pair.basis.to_grid(x))
    if f["Pt"].shape[1]:
        t = f["Pt"].T @ x
        y += f["X"] @ t + f["Pt"] @ (f["X"].T @ x) + f["Pt"] @ (f["GH"] @ t)
    return y
