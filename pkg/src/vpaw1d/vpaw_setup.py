"""Construction of the VPAW transformation data for one site.

For each site the transformation needs, per atomic function phi_i:

  * a pseudo function phi~_i: an even polynomial of degree <= 2d-2 inside
    the cut-off window, written in the scaled variable t = (x - site)/eta so
    its coefficients stay O(1) as eta -> 0, matching phi_i and its first
    d-1 derivatives at the window edge, and equal to phi_i outside;
  * a projector p~_i, dual to the pseudo family (<p~_i, phi~_j> = delta_ij),
    supported in the window, built as weight * pseudo combinations through
    the inverse of the Gram matrix B_ij = <rho_eta phi~_i, phi~_j>.

B degenerates as eta -> 0 (the scaled pseudo family collapses towards a
constant), so the Gram, its inverse, and the well-posedness pairings
<p~_k, phi_l> are evaluated in extended precision and only then rounded to
doubles.  A double-only pipeline cannot meet the 1e-12 duality residual the
construction is specified to satisfy once cond(B) passes ~1e4.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .analytic import AtomicFunction, atomic_spectrum, ModelParams, mp_eval_atomic
from .errors import IllConditioned, SingularGram
from .mplinalg import mp_cond, to_float_matrix
from .quadrature import mp_gl_rule

RHO_POLY = "poly"      # rho(t) = 1 - t^2; polynomial integrands, exact rules
RHO_COS2 = "cos2"      # rho(t) = cos(pi t / 2)^2

_SETUP_DPS = 50
_GRAM_NODES = 64
_CHECK_NODES = 96
_MATCH_COND_LIMIT = 1e12
# Gram conditioning a working precision of `dps` digits can still invert with
# ~14 digits to spare; at double precision this is the familiar 1e14 figure.
_GRAM_COND_DIGITS = 14
_DUALITY_CERT = 1e-12
_INVERTIBLE_RTOL = 1e-12


def _gram_cond_limit() -> float:
    return 10.0 ** (mp.mp.dps - 16 + _GRAM_COND_DIGITS)


@dataclass(frozen=True)
class VpawParams:
    """Per-site transformation parameters: N functions, smoothness d, radius eta."""

    N: int
    d: int
    eta: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.d < self.N:
            raise ValueError("d must satisfy d >= N")
        if self.eta <= 0:
            raise ValueError("eta must be positive")

    def check_disjoint(self, a: float):
        """Window-disjointness bound eta <= min(a/2, (1-a)/2) for sites {0, a}.

        Windows touching at a single point (eta exactly at the bound, the top
        of the canonical sweep grid) keep all supports essentially disjoint
        and are admitted.
        """
        limit = min(a / 2, (1 - a) / 2)
        if self.eta > limit * (1 + 1e-12):
            raise ValueError(
                f"eta={self.eta} does not keep site windows disjoint (needs <= {limit})")


@dataclass(frozen=True)
class PseudoFunction:
    """Even polynomial window replacement of one atomic function.

    `poly[j]` multiplies t^(2j) in the scaled variable t = (x - site)/eta.
    """

    site: float
    index: int
    eta: float
    poly: np.ndarray
    source: AtomicFunction
    _mp: dict = field(repr=False, compare=False, default_factory=dict)


@dataclass(frozen=True)
class ProjectorSet:
    """Dual projector family for one site's pseudo functions."""

    site: float
    B: np.ndarray
    Binv: np.ndarray
    rho_id: str
    duality_residual: float
    _mp: dict = field(repr=False, compare=False, default_factory=dict)


@dataclass(frozen=True)
class WellPosednessReport:
    """Invertibility diagnostics of the transformation at one site."""

    Atilde: np.ndarray
    cond_Atilde: float
    cond_B: float
    invertible: bool
    _mp: dict = field(repr=False, compare=False, default_factory=dict)


@dataclass(frozen=True)
class SiteVpawSetup:
    """Everything the assembly and jump analysis need for one site."""

    site: float
    Z: float
    params: VpawParams
    atomics: tuple[AtomicFunction, ...]
    pseudos: tuple[PseudoFunction, ...]
    projectors: ProjectorSet
    report: WellPosednessReport

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def eta(self) -> float:
        return self.params.eta


def rho_mp(rho_id: str, t):
    if rho_id == RHO_POLY:
        return 1 - t * t
    if rho_id == RHO_COS2:
        return mp.cos(mp.pi * t / 2) ** 2
    raise ValueError(f"unknown rho_id {rho_id!r}")


def rho_np(rho_id: str, t: np.ndarray) -> np.ndarray:
    if rho_id == RHO_POLY:
        return 1.0 - t * t
    if rho_id == RHO_COS2:
        return np.cos(np.pi * t / 2) ** 2
    raise ValueError(f"unknown rho_id {rho_id!r}")


# ---------------------------------------------------------------------------
# pseudo functions
# ---------------------------------------------------------------------------

def _falling(p: int, m: int) -> int:
    out = 1
    for i in range(m):
        out *= (p - i)
    return out


def _matching_matrix_float(d: int) -> np.ndarray:
    """V[m, j] = d^m/dt^m t^(2j) at t = 1."""
    return np.array([[_falling(2 * j, m) for j in range(d)] for m in range(d)], float)


def build_pseudo(phi: AtomicFunction, params: VpawParams) -> PseudoFunction:
    """Solve the d x d matching system for the even coefficients in t.

    Conditions: j-th t-derivative of the polynomial at t = 1 equals
    eta^j phi^(j)(site + eta), j = 0..d-1.
    """
    d, eta = params.d, params.eta
    cond = np.linalg.cond(_matching_matrix_float(d))
    if cond > _MATCH_COND_LIMIT:
        raise IllConditioned(
            f"matching system condition {cond:.3e} exceeds {_MATCH_COND_LIMIT:.0e} (d={d})")
    with mp.workdps(_SETUP_DPS):
        V = mp.zeros(d, d)
        for m in range(d):
            for j in range(d):
                V[m, j] = mp.mpf(_falling(2 * j, m))
        eta_mp = mp.mpf(eta)
        edge = mp.mpf(phi.site) + eta_mp
        rhs = mp.matrix([eta_mp**m * mp_eval_atomic(phi, edge, m) for m in range(d)])
        alpha = mp.lu_solve(V, rhs)
    poly = np.array([float(c) for c in alpha])
    return PseudoFunction(site=phi.site, index=phi.index, eta=eta, poly=poly,
                          source=phi, _mp={"poly": list(alpha)})


def _poly_derivative_coeffs(poly: np.ndarray, order: int) -> np.ndarray:
    """Coefficients (ascending in t) of the order-th t-derivative."""
    full = np.zeros(2 * len(poly) - 1 if len(poly) else 1)
    for j, c in enumerate(poly):
        full[2 * j] = c
    for _ in range(order):
        full = full[1:] * np.arange(1, len(full))
        if full.size == 0:
            return np.zeros(1)
    return full


def pseudo_poly_eval(ps: PseudoFunction, t: np.ndarray, order: int = 0) -> np.ndarray:
    """order-th t-derivative of the window polynomial at scaled points t."""
    c = _poly_derivative_coeffs(ps.poly, order)
    return np.polynomial.polynomial.polyval(np.asarray(t, float), c)


def mp_pseudo_poly_eval(ps: PseudoFunction, t, order: int = 0):
    s = mp.mpf(0)
    t = mp.mpf(t)
    for j, c in enumerate(ps._mp["poly"]):
        p = 2 * j
        if p < order:
            continue
        s += c * _falling(p, order) * t ** (p - order)
    return s


# ---------------------------------------------------------------------------
# projectors
# ---------------------------------------------------------------------------

def _mp_gram(pseudos, rho_id: str, eta, nodes: int) -> mp.matrix:
    """B_ij = eta * int_-1^1 rho(t) poly_i(t) poly_j(t) dt, split at 0."""
    N = len(pseudos)
    x, w = mp_gl_rule(nodes)
    B = mp.zeros(N, N)
    for half in (-1, 1):
        # map [-1,1] -> [0,1] or [-1,0]
        pts = [(xi + 1) / 2 * half for xi in x]
        wts = [wi / 2 for wi in w]
        vals = [[mp_pseudo_poly_eval(p, t) for t in pts] for p in pseudos]
        rr = [rho_mp(rho_id, t) for t in pts]
        for i in range(N):
            for j in range(i, N):
                s = mp.fsum(wt * r * vi * vj
                            for wt, r, vi, vj in zip(wts, rr, vals[i], vals[j]))
                B[i, j] += eta * s
                B[j, i] = B[i, j]
    return B


def build_projectors(pseudos, params: VpawParams, rho_id: str = RHO_POLY) -> ProjectorSet:
    """Gram matrix of the weighted pseudo family and its inverse.

    The duality residual is measured against a fresh Gram computed with more
    nodes, so it reports genuine construction error rather than reuse of the
    same quadrature values.
    """
    if len(pseudos) != params.N:
        raise ValueError("expected exactly N pseudo functions")
    if len({p.site for p in pseudos}) != 1:
        raise ValueError("pseudo functions must share a site")
    with mp.workdps(_SETUP_DPS):
        eta = mp.mpf(params.eta)
        B = _mp_gram(pseudos, rho_id, eta, _GRAM_NODES)
        cond_B = mp_cond(B)
        limit = _gram_cond_limit()
        if not np.isfinite(cond_B) or cond_B > limit:
            raise SingularGram(
                f"projector Gram condition {cond_B:.3e} exceeds {limit:.0e} "
                f"at {mp.mp.dps} working digits")
        Binv = B ** -1
        Bcheck = _mp_gram(pseudos, rho_id, eta, _CHECK_NODES)
        R = Binv * Bcheck
        resid = max(abs(R[i, j] - (1 if i == j else 0))
                    for i in range(params.N) for j in range(params.N))
        if float(resid) > _DUALITY_CERT:
            raise SingularGram(
                f"duality condition certifies only to {float(resid):.2e} "
                f"(cond(B)={cond_B:.3e}); pseudo family effectively dependent")
        return ProjectorSet(
            site=pseudos[0].site, B=to_float_matrix(B), Binv=to_float_matrix(Binv),
            rho_id=rho_id, duality_residual=float(resid),
            _mp={"B": B, "Binv": Binv, "cond_B": cond_B})


def check_wellposed(pseudos, projectors: ProjectorSet, atomics) -> WellPosednessReport:
    """Pairings <p~_k, phi_l> and the invertibility flag of the transformation.

    The integrand has a kink at the site, so the quadrature is split there.
    """
    N = len(pseudos)
    eta = pseudos[0].eta
    with mp.workdps(_SETUP_DPS):
        eta_mp = mp.mpf(eta)
        site = mp.mpf(pseudos[0].site)
        x, w = mp_gl_rule(_GRAM_NODES)
        P = mp.zeros(N, N)  # <p_k, phi_l>
        for half in (-1, 1):
            pts = [(xi + 1) / 2 * half for xi in x]
            wts = [wi / 2 for wi in w]
            pvals = [[rho_mp(projectors.rho_id, t) * mp_pseudo_poly_eval(p, t) for t in pts]
                     for p in pseudos]
            fvals = [[mp_eval_atomic(phi, site + eta_mp * t, 0) for t in pts]
                     for phi in atomics]
            for k in range(N):
                for l in range(N):
                    P[k, l] += eta_mp * mp.fsum(
                        wt * pk * fl for wt, pk, fl in zip(wts, pvals[k], fvals[l]))
        At = projectors._mp["Binv"] * P
        At_f = to_float_matrix(At)
    sv = np.linalg.svd(At_f, compute_uv=False)
    invertible = bool(sv[-1] > _INVERTIBLE_RTOL * sv[0])
    cond_At = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    return WellPosednessReport(
        Atilde=At_f, cond_Atilde=cond_At, cond_B=projectors._mp["cond_B"],
        invertible=invertible, _mp={"Atilde": At})


# ---------------------------------------------------------------------------
# whole-site and whole-model construction
# ---------------------------------------------------------------------------

def build_site_setup(Z: float, site: float, params: VpawParams,
                     rho_id: str = RHO_POLY) -> SiteVpawSetup:
    atomics = tuple(atomic_spectrum(Z, params.N, site))
    pseudos = tuple(build_pseudo(phi, params) for phi in atomics)
    projectors = build_projectors(pseudos, params, rho_id)
    report = check_wellposed(pseudos, projectors, atomics)
    return SiteVpawSetup(site=site, Z=Z, params=params, atomics=atomics,
                         pseudos=pseudos, projectors=projectors, report=report)


def build_vpaw_setup(model: ModelParams, params: VpawParams, rho_id: str = RHO_POLY,
                     validate: bool = True) -> tuple[SiteVpawSetup, SiteVpawSetup]:
    """Setups for both sites of the double-Dirac model.

    `validate=False` skips the window-disjointness bound; that escape hatch
    exists for stress tests that deliberately push eta past the valid range
    and expect the downstream solver to fail loudly.
    """
    if validate:
        params.check_disjoint(model.a)
    return (build_site_setup(model.Z0, 0.0, params, rho_id),
            build_site_setup(model.Za, model.a, params, rho_id))


# ---------------------------------------------------------------------------
# vectorized float evaluation (assembly-facing)
# ---------------------------------------------------------------------------

def signed_distance(x: np.ndarray, site: float) -> np.ndarray:
    """Periodic signed distance to the site, in [-0.5, 0.5)."""
    return (np.asarray(x, float) - site + 0.5) % 1.0 - 0.5


def site_phi_values(setup: SiteVpawSetup, x: np.ndarray, order: int = 0) -> np.ndarray:
    """(N, len(x)) matrix of atomic function derivatives."""
    from .analytic import _atomic_raw
    u = (np.asarray(x, float) - setup.site) % 1.0
    return np.array([_atomic_raw(phi.omega, phi.branch, u, order)
                     for phi in setup.atomics])


def site_pseudo_values(setup: SiteVpawSetup, x: np.ndarray, order: int = 0) -> np.ndarray:
    """(N, len(x)) matrix of pseudo function derivatives (polynomial inside)."""
    x = np.asarray(x, float)
    r = signed_distance(x, setup.site)
    inside = np.abs(r) <= setup.eta
    out = site_phi_values(setup, x, order)
    t = r[inside] / setup.eta
    for k, ps in enumerate(setup.pseudos):
        out[k][inside] = pseudo_poly_eval(ps, t, order) / setup.eta**order
    return out


def site_g_values(setup: SiteVpawSetup, x: np.ndarray, order: int = 0) -> np.ndarray:
    """(N, len(x)) matrix of g_i = phi_i - phi~_i derivatives (0 outside window)."""
    x = np.asarray(x, float)
    r = signed_distance(x, setup.site)
    inside = np.abs(r) <= setup.eta
    out = np.zeros((setup.N, x.size))
    if inside.any():
        xi = x[inside]
        pv = site_phi_values(setup, xi, order)
        t = r[inside] / setup.eta
        for k, ps in enumerate(setup.pseudos):
            out[k][inside] = pv[k] - pseudo_poly_eval(ps, t, order) / setup.eta**order
    return out


# beyond this Gram conditioning the float contraction Binv @ (rho * pseudo)
# loses enough digits to bias assembled eigenvalue errors; switch to the
# extended-precision coefficients for the node values
_PROJ_VALUES_MP_COND = 1e8


def site_projector_values(setup: SiteVpawSetup, x: np.ndarray) -> np.ndarray:
    """(N, len(x)) matrix of projector values (0 outside window)."""
    x = np.asarray(x, float)
    r = signed_distance(x, setup.site)
    inside = np.abs(r) <= setup.eta
    out = np.zeros((setup.N, x.size))
    if not inside.any():
        return out
    t = r[inside] / setup.eta
    proj = setup.projectors
    if proj._mp["cond_B"] <= _PROJ_VALUES_MP_COND:
        base = np.array([pseudo_poly_eval(ps, t) for ps in setup.pseudos])
        out[:, inside] = proj.Binv @ (base * rho_np(proj.rho_id, t))
        return out
    with mp.workdps(_SETUP_DPS):
        Binv = proj._mp["Binv"]
        N = setup.N
        vals = np.empty((N, t.size))
        for j, tj in enumerate(t):
            tm = mp.mpf(float(tj))
            rho = rho_mp(proj.rho_id, tm)
            pcol = [rho * mp_pseudo_poly_eval(ps, tm) for ps in setup.pseudos]
            for i in range(N):
                vals[i, j] = float(mp.fsum(Binv[i, k] * pcol[k] for k in range(N)))
    out[:, inside] = vals
    return out


def scaled_derivative_matrix(atomics, d: int, eta: float) -> np.ndarray:
    """(N, d) matrix of eta^k phi_j^(k)(site + eta): the independence data."""
    from .analytic import _atomic_raw
    return np.array([[eta**k * _atomic_raw(phi.omega, phi.branch, np.array([eta]), k)[0]
                      for k in range(d)] for phi in atomics])
