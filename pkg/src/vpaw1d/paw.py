"""Classical truncated-PAW baseline with a mollified potential.

The comparison method replaces each Dirac term by -Z * chi_eps(. - site),
where chi_eps is the normalized smooth bump

    chi_eps(x) = (C / eps) exp(-1 / (1 - (x/eps)^2))   on [-eps, eps],

and solves the pseudized generalized problem

    H_paw = H_ps + sum_sites Pt D_H Pt^T,   S_paw = I + sum_sites Pt D_S Pt^T,

with window-truncated corrections

    D_H[i,j] = a_w(phi_i, phi_j) - a_w^ps(phi~_i, phi~_j)
    D_S[i,j] = <phi_i, phi_j>_w - <phi~_i, phi~_j>_w,

a_w the bilinear form restricted to [site-eta, site+eta] (symmetric-form
convention, which keeps H_paw symmetric) and a_w^ps its pseudized variant
with the mollifier in place of the Dirac term.  Unlike the exact
transformation, truncation at finite N makes the method converge to a
shifted eigenvalue; quantifying that plateau is this module's purpose.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analytic import ModelParams
from .basis import TrigBasis, potential_matrix
from .eigensolve import EigResult, solve_lowest
from .quadrature import composite_nodes, oscillatory_panel_rule, window_rule
from .vpaw_setup import SiteVpawSetup, site_phi_values, site_pseudo_values, site_projector_values
from .assembly import _check_disjoint


@dataclass(frozen=True)
class MollifiedPotential:
    """Normalized bump of width eps (unit integral)."""

    epsilon: float
    C: float = field(init=False)

    def __post_init__(self):
        if not (0 < self.epsilon < 0.5):
            raise ValueError("epsilon must lie in (0, 0.5)")
        xq, wq = composite_nodes(-1.0, 1.0, panels=32, n=16)
        mass = float(np.sum(wq * np.exp(-1.0 / (1.0 - xq**2))))
        object.__setattr__(self, "C", 1.0 / mass)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = (x + 0.5) % 1.0 - 0.5
        t = r / self.epsilon
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        out[inside] = (self.C / self.epsilon) * np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out

    def fourier_cos_coeffs(self, F: int) -> np.ndarray:
        """chi^_f = int chi(x) cos(2 pi f x) dx for f = 0..F (chi is even).

        The bump is smooth but has boundary layers at +-eps, so the panel
        count never drops below 32 regardless of the frequency range.
        """
        eps = self.epsilon
        xq, wq = oscillatory_panel_rule(-eps, eps, max_freq=F, n=16, min_panels=32)
        vals = self(xq)
        fs = np.arange(F + 1)
        return (np.cos(2 * np.pi * np.outer(fs, xq)) * (wq * vals)).sum(axis=1)


def _pseudized_harmonics(model: ModelParams, chi: MollifiedPotential, F: int):
    """Cos/sin coefficient arrays of -Z0 chi(x) - Za chi(x - a) (+ W)."""
    hat = chi.fourier_cos_coeffs(F)
    C = np.zeros(F + 1)
    S = np.zeros(F + 1)
    fs = np.arange(1, F + 1)
    C[0] = -(model.Z0 + model.Za) * hat[0]
    C[1:] = -2 * model.Z0 * hat[1:] - 2 * model.Za * hat[1:] * np.cos(2 * np.pi * fs * model.a)
    S[1:] = -2 * model.Za * hat[1:] * np.sin(2 * np.pi * fs * model.a)
    if model.W is not None:
        Cw, Sw = model.W.harmonics()
        C[:len(Cw)] += Cw
        S[:len(Sw)] += Sw
    return C, S


def _window_correction(model: ModelParams, setup: SiteVpawSetup,
                       chi: MollifiedPotential):
    """D_H and D_S for one site."""
    eta, site = setup.eta, setup.site
    eps = chi.epsilon
    pieces = [site - eta, site - eps, site, site + eps, site + eta]
    xs, ws = [], []
    freq = max(p.omega for p in setup.atomics) / (2 * np.pi) + 4.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        if hi - lo < 1e-15:
            continue
        x, w = oscillatory_panel_rule(lo, hi, max_freq=freq, n=16, min_panels=16)
        xs.append(x)
        ws.append(w)
    xq = np.concatenate(xs)
    wq = np.concatenate(ws)

    phi0 = site_phi_values(setup, xq, 0)
    phi1 = site_phi_values(setup, xq, 1)
    ps0 = site_pseudo_values(setup, xq, 0)
    ps1 = site_pseudo_values(setup, xq, 1)
    wv = model.W(xq) if model.W is not None else np.zeros_like(xq)
    chiv = chi(xq - site)

    phi_site = site_phi_values(setup, np.array([site]), 0)[:, 0]
    DH = (phi1 * wq) @ phi1.T - setup.Z * np.outer(phi_site, phi_site)
    DH += (phi0 * (wq * wv)) @ phi0.T
    DH -= (ps1 * wq) @ ps1.T + (ps0 * (wq * (wv - setup.Z * chiv))) @ ps0.T
    DS = (phi0 * wq) @ phi0.T - (ps0 * wq) @ ps0.T
    return DH, DS


def paw_solve(model: ModelParams, setups: Sequence[SiteVpawSetup], basis: TrigBasis,
              epsilon: float, n_eigs: int) -> EigResult:
    """Solve the truncated-PAW generalized problem for the lowest n_eigs."""
    for st in setups:
        if epsilon > st.eta:
            raise ValueError("mollifier width epsilon must not exceed eta")
    _check_disjoint(setups)
    chi = MollifiedPotential(epsilon)
    M = basis.M
    C, S = _pseudized_harmonics(model, chi, 2 * basis.K)
    H = np.diag(basis.kinetic_diagonal()) + potential_matrix(basis, C, S)
    Smat = np.eye(M)
    for st in setups:
        DH, DS = _window_correction(model, st, chi)
        xq, wq = window_rule(st.site, st.eta,
                             max_freq=basis.K + max(p.omega for p in st.atomics) / (2 * np.pi))
        pt = site_projector_values(st, xq)
        Pt = (basis.values(xq) * wq) @ pt.T
        H += Pt @ DH @ Pt.T
        Smat += Pt @ DS @ Pt.T
    return solve_lowest(H, Smat, n_eigs)
