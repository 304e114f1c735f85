"""Derivative jumps of the pseudo eigenfunction at the sites and window edges.

With c_i = <p~_i, psi~> the window expansion coefficients (obtained per site
from A~ c = <p~, psi>, the systems decouple because the windows are
disjoint), the transformed eigenfunction psi~ = psi - sum_i c_i (phi_i -
phi~_i) has closed-form jumps:

  at the site   [psi~^(2j+1)] = -Z ((-E)^j psi(site) - sum_k c_k (-eps_k)^j phi_k(site))
  at the edge   [psi~^(k)]    = sum_i c_i (phi_i^(k)(edge) - phi~_i^(k)(edge-)),
                                 d <= k <= 2d-2  (zero for k < d by matching)

Jumps follow the right-minus-left convention.  At the site the closed form
cancels to O(eta^{2N}); the whole pipeline therefore runs in extended
precision, where the conditioning of A~ (which grows like a power of 1/eta)
costs digits instead of producing noise.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .analytic import AnalyticEigenpair, ModelParams, mp_eval_atomic, mp_eval_pair
from .errors import NonPositiveValue, OrderOutOfRange
from .mplinalg import to_float_vector
from .quadrature import mp_gl_rule
from .vpaw_setup import SiteVpawSetup, VpawParams, build_vpaw_setup, mp_pseudo_poly_eval, rho_mp

_JUMP_DPS = 60
_RHS_NODES = 48
_MAX_J = 6


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    r2: float


@dataclass(frozen=True)
class JumpReport:
    """Jumps of one eigenpair for one (N, d, eta) transformation setup."""

    eta: float
    c: np.ndarray                      # 2N expansion coefficients, site 0 then site a
    coeff_residual: float              # max |A~ c - <p~, psi>| over both sites
    jumps_at_zero: dict                # order (2j+1) -> jump at site 0
    jumps_at_a: dict                   # order (2j+1) -> jump at site a
    jumps_at_eta: dict                 # order k -> jump at site0 right edge
    jumps_at_eta_a: dict               # order k -> jump at site-a right edge
    cond_Atilde: float                 # max over the two sites


def _mp_site_coeffs(pair: AnalyticEigenpair, setup: SiteVpawSetup):
    """Solve A~ c = <p~, psi> for one site, in extended precision."""
    N = setup.N
    eta = mp.mpf(setup.eta)
    site = mp.mpf(setup.site)
    x, w = mp_gl_rule(_RHS_NODES)
    Binv = setup.projectors._mp["Binv"]
    rhs_p = mp.matrix(N, 1)   # <p_j, psi>
    for half in (-1, 1):
        pts = [(xi + 1) / 2 * half for xi in x]
        wts = [wi / 2 for wi in w]
        psiv = [mp_eval_pair(pair, site + eta * t) for t in pts]
        for jfun in range(N):
            vals = [rho_mp(setup.projectors.rho_id, t)
                    * mp_pseudo_poly_eval(setup.pseudos[jfun], t) for t in pts]
            rhs_p[jfun] += eta * mp.fsum(wt * pv * fv
                                          for wt, pv, fv in zip(wts, vals, psiv))
    rhs = Binv * rhs_p
    At = setup.report._mp["Atilde"]
    c = mp.lu_solve(At, rhs)
    resid = max(abs(x) for x in (At * c - rhs))
    return c, float(resid)


def expansion_coeffs(pair: AnalyticEigenpair, setups) -> np.ndarray:
    """Expansion coefficients <p~, psi~> across both sites (length 2N)."""
    with mp.workdps(_JUMP_DPS):
        out = []
        for st in setups:
            c, _ = _mp_site_coeffs(pair, st)
            out.extend(float(v) for v in c)
    return np.array(out)


def _mp_jump_at_site(pair, setup, c, j: int):
    Z = mp.mpf(setup.Z)
    E = pair._mp["E"]
    site = mp.mpf(setup.site)
    psi_site = mp_eval_pair(pair, site)
    terms = [c[k] * (-setup.atomics[k]._mp["eps"]) ** j
             * mp_eval_atomic(setup.atomics[k], site) for k in range(setup.N)]
    return -Z * ((-E) ** j * psi_site - mp.fsum(terms))


def _mp_jump_at_edge(pair, setup, c, k: int):
    eta = mp.mpf(setup.eta)
    edge = mp.mpf(setup.site) + eta
    terms = []
    for i in range(setup.N):
        phi_k = mp_eval_atomic(setup.atomics[i], edge, k)
        poly_k = mp_pseudo_poly_eval(setup.pseudos[i], mp.mpf(1), k) / eta ** k
        terms.append(c[i] * (phi_k - poly_k))
    return mp.fsum(terms)


def jump_at_zero(pair: AnalyticEigenpair, setup: SiteVpawSetup, j: int) -> float:
    """[psi~^(2j+1)] at the setup's site (site 0 in the canonical usage)."""
    if j > _MAX_J:
        raise OrderOutOfRange(f"j={j} exceeds the double-precision sanity bound {_MAX_J}")
    with mp.workdps(_JUMP_DPS):
        c, _ = _mp_site_coeffs(pair, setup)
        return float(_mp_jump_at_site(pair, setup, c, j))


def jump_at_eta(pair: AnalyticEigenpair, setup: SiteVpawSetup, k: int) -> float:
    """[psi~^(k)] at the right window edge site + eta.

    Orders k < d vanish identically by the C^{d-1} matching and return an
    exact 0.0; orders beyond 2d-2 are outside the polynomial's range.
    The left-edge jump is (-1)^{k+1} times this value by evenness.
    """
    d = setup.params.d
    if k > 2 * d - 2:
        raise OrderOutOfRange(f"k={k} exceeds 2d-2={2 * d - 2}")
    if k < d:
        return 0.0
    with mp.workdps(_JUMP_DPS):
        c, _ = _mp_site_coeffs(pair, setup)
        return float(_mp_jump_at_edge(pair, setup, c, k))


def jump_report(pair: AnalyticEigenpair, setups, j_orders=None) -> JumpReport:
    """All site and edge jumps for one eigenpair under one transformation."""
    st0, sta = setups
    d = st0.params.d
    if j_orders is None:
        j_orders = range(0, max(1, d // 2))
    with mp.workdps(_JUMP_DPS):
        c0, r0 = _mp_site_coeffs(pair, st0)
        ca, ra = _mp_site_coeffs(pair, sta)
        jz = {2 * j + 1: float(_mp_jump_at_site(pair, st0, c0, j)) for j in j_orders}
        ja = {2 * j + 1: float(_mp_jump_at_site(pair, sta, ca, j)) for j in j_orders}
        je = {k: float(_mp_jump_at_edge(pair, st0, c0, k)) for k in range(d, 2 * d - 1)}
        jea = {k: float(_mp_jump_at_edge(pair, sta, ca, k)) for k in range(d, 2 * d - 1)}
        c = np.concatenate([to_float_vector(c0), to_float_vector(ca)])
    return JumpReport(eta=st0.eta, c=c, coeff_residual=max(r0, ra),
                      jumps_at_zero=jz, jumps_at_a=ja, jumps_at_eta=je,
                      jumps_at_eta_a=jea,
                      cond_Atilde=max(st0.report.cond_Atilde, sta.report.cond_Atilde))


# ---------------------------------------------------------------------------
# slope fitting and sweeps
# ---------------------------------------------------------------------------

def _ols_loglog(xs, ys):
    lx = np.log(np.asarray(xs, float))
    ly = np.log(np.asarray(ys, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(slope=float(coef[0]), r2=r2)


def fit_slope(points) -> SlopeFit:
    """Ordinary least squares on (log eta, log value).

    Requires at least 4 points with distinct eta and strictly positive values.
    """
    pts = list(points)
    if len(pts) < 4:
        raise ValueError("need at least 4 points for a slope fit")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("eta values must be distinct")
    if any(y <= 0 for y in ys):
        raise NonPositiveValue("slope fit needs strictly positive values")
    return _ols_loglog(xs, ys)


def default_eta_grid(n: int = 9, eta_max: float = 0.2) -> np.ndarray:
    """Geometric grid eta_max * 2^(-i/2), spanning [~0.0125, 0.2] for n=9."""
    return eta_max * 2.0 ** (-np.arange(n) / 2)


def eigenvalue_eta_grid(eta_max: float = 0.2) -> np.ndarray:
    """Grid for eigenvalue-error sweeps: geometric quarter steps spanning
    [0.0125, 0.2] (17 points), dense enough that both branches of the
    V-shaped error curves carry several points clear of the vertex."""
    return eta_max * 2.0 ** (-np.arange(17) / 4)


def jump_sweep(model: ModelParams, N: int, d: int, etas, pair: AnalyticEigenpair,
               rho_id: str = "poly", cond_guard: float = 1e30):
    """Jump reports over an eta grid, dropping points past the cond guard.

    The guard default is effectively off: the extended-precision pipeline has
    no noise floor at the grid scales used here.  Pass ~1e10 to reproduce a
    double-precision-style guard.
    """
    rows = []
    for eta in etas:
        params = VpawParams(N=N, d=d, eta=float(eta))
        setups = build_vpaw_setup(model, params, rho_id=rho_id)
        rep = jump_report(pair, setups)
        if rep.cond_Atilde <= cond_guard:
            rows.append(rep)
    return rows


def first_jump_slope(sweep_rows, n_fit: int = 5) -> SlopeFit:
    """Slope of |[psi~']_0| vs eta over the n_fit smallest kept eta."""
    pts = sorted(((r.eta, abs(r.jumps_at_zero[1])) for r in sweep_rows))[:n_fit]
    return fit_slope(pts)


def edge_jump_slope(sweep_rows, k: int, n_fit: int = 5) -> SlopeFit:
    """Slope of |[psi~^(k)]_eta| vs eta over the n_fit smallest kept eta.

    Both jump laws are small-eta asymptotics; the top of the grid bends
    visibly away from the power law, so the fit anchors at the bottom.
    """
    pts = sorted((r.eta, abs(r.jumps_at_eta[k])) for r in sweep_rows)
    if n_fit is not None:
        pts = pts[:n_fit]
    return fit_slope(pts)


# ---------------------------------------------------------------------------
# Fourier-side identities (oracle helpers for property tests and demos)
# ---------------------------------------------------------------------------

def psi_tilde_value(pair: AnalyticEigenpair, setups, c: np.ndarray, x: np.ndarray,
                    order: int = 0) -> np.ndarray:
    """psi~ = psi - sum c_i g_i evaluated in doubles on an array."""
    from .analytic import eval_eigenfunction
    from .vpaw_setup import site_g_values
    x = np.asarray(x, float)
    out = eval_eigenfunction(pair, x, order)
    at = 0
    for st in setups:
        g = site_g_values(st, x, order)
        out = out - c[at:at + st.N] @ g
        at += st.N
    return out


def fourier_coefficient_quadrature(pair: AnalyticEigenpair, setups, c: np.ndarray,
                                   m: int) -> complex:
    """m-th Fourier coefficient of psi~ by piecewise composite quadrature."""
    from .quadrature import oscillatory_panel_rule
    a = pair.params.a
    eta0, etaa = setups[0].eta, setups[1].eta
    pts = sorted({0.0, eta0, a - etaa, a, a + etaa, 1.0 - eta0, 1.0})
    total = 0.0 + 0.0j
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi - lo < 1e-14:
            continue
        xq, wq = oscillatory_panel_rule(lo, hi, max_freq=abs(m) + 4)
        vals = psi_tilde_value(pair, setups, c, xq)
        total += np.sum(wq * vals * np.exp(-2j * np.pi * m * xq))
    return complex(total)


def fourier_coefficient_expansion(pair: AnalyticEigenpair, setups, report: JumpReport,
                                  m: int) -> complex:
    """Jump expansion of the m-th Fourier coefficient, truncated at order 2d-2.

    Each jump [psi~^(r)]_{x0} contributes e^{-2 pi i m x0} [..] / (2 pi i m)^{r+1};
    the remainder integral of psi~^(2d-1) is not included.
    """
    a = pair.params.a
    eta0, etaa = setups[0].eta, setups[1].eta
    im = 2j * np.pi * m
    total = 0.0 + 0.0j
    for order, val in report.jumps_at_zero.items():
        total += val / im ** (order + 1)
    for order, val in report.jumps_at_a.items():
        total += np.exp(-im * a) * val / im ** (order + 1)
    for order, val in report.jumps_at_eta.items():
        left = (-1) ** (order + 1) * val
        total += np.exp(-im * eta0) * val / im ** (order + 1)
        total += np.exp(im * eta0) * left / im ** (order + 1)
    for order, val in report.jumps_at_eta_a.items():
        left = (-1) ** (order + 1) * val
        total += np.exp(-im * (a + etaa)) * val / im ** (order + 1)
        total += np.exp(-im * (a - etaa)) * left / im ** (order + 1)
    return complex(total)
