"""Exact spectral solution of the 1D periodic double-Dirac Hamiltonian.

The operator is

    H = -d^2/dx^2 - Z0 * sum_k delta_k - Za * sum_k delta_{k+a}   on (0, 1),

with 1-periodic boundary conditions, plus the single-site variant H0 used to
generate the atomic functions of the transformation.  Eigenfunctions are
piecewise cosh/sinh (E = -omega^2) or cos/sin (E = +omega^2) on [0, a] and
[a, 1]; the spectral parameters are roots of scalar secular functions.

The secular function of the positive branch carries a minus sign on the
Z0*Za term: it is the analytic continuation (omega -> i*omega) of the
negative-branch function, and its zeros are exactly the values where the
4x4 continuity/jump system is rank deficient.

Roots and eigenfunction coefficients are polished in extended precision
(mpmath); public dataclass fields are doubles, the mp payload stays attached
for the derivative-jump analysis, which needs cancellation far below the
double-precision floor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import mpmath as mp
import numpy as np
import scipy.optimize as sopt

from .errors import DegenerateSystem, OrderOutOfRange, RootBracketFailure, SideRequired
from .mplinalg import nullspace_vector

NEGATIVE = "negative"
POSITIVE = "positive"
COSH_BRANCH = "cosh"
COS_BRANCH = "cos"

_SETUP_DPS = 50
_MAX_ORDER = 8
_SINGULAR_TOL = 1e-13


@dataclass(frozen=True)
class SmoothPotential:
    """W(x) = amplitude * sin(2*pi*frequency*x + phase), frequency >= 1."""

    amplitude: float
    frequency: int
    phase: float = 0.0

    def __post_init__(self):
        if self.frequency < 1 or self.frequency != int(self.frequency):
            raise ValueError("frequency must be a positive integer")
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")

    def __call__(self, x):
        return self.amplitude * np.sin(2 * np.pi * self.frequency * np.asarray(x) + self.phase)

    def harmonics(self):
        """Cosine/sine coefficient arrays (index = frequency)."""
        f = self.frequency
        C = np.zeros(f + 1)
        S = np.zeros(f + 1)
        C[f] = self.amplitude * np.sin(self.phase)
        S[f] = self.amplitude * np.cos(self.phase)
        return C, S


@dataclass(frozen=True)
class ModelParams:
    """Strengths and site of the double-Dirac model, optional smooth W."""

    Z0: float
    Za: float
    a: float
    W: Optional[SmoothPotential] = None

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ValueError("a must lie in (0, 1)")
        # zero strengths are admitted for the degenerate free-model checks;
        # the spectral routines that need bound states enforce Z > 0 themselves
        if self.Z0 < 0 or self.Za < 0:
            raise ValueError("Dirac strengths must be nonnegative")


@dataclass(frozen=True)
class AnalyticEigenpair:
    """One exact eigenpair of H in piecewise closed form.

    `coeffs` = (A1, B1, A2, B2) multiply cosh/sinh (negative branch) or
    cos/sin (positive branch) of omega*x on [0, a] and [a, 1].  The stored
    coefficients are already L2-normalized; `norm` is the factor that was
    divided out of the raw nullvector.
    """

    branch: str
    omega: float
    E: float
    coeffs: tuple[float, float, float, float]
    norm: float
    params: ModelParams
    _mp: dict = field(repr=False, compare=False, default_factory=dict)


@dataclass(frozen=True)
class AtomicFunction:
    """Even non-smooth eigenfunction of the single-site operator.

    cosh branch:  phi(x) = cosh(omega*(x - 1/2)) around its site, eps < 0;
    cos branch:   phi(x) = cos(omega*(x - 1/2)), one root of the jump
    condition per interval ((2k-1)*pi, 2k*pi).  Unnormalized closed forms.
    """

    omega: float
    eps: float
    branch: str
    site: float
    Z: float
    index: int
    value_at_site: float
    _mp: dict = field(repr=False, compare=False, default_factory=dict)


# ---------------------------------------------------------------------------
# secular functions
# ---------------------------------------------------------------------------

def secular_value(omega, params: ModelParams, branch: str):
    """Secular function whose zeros are the spectral parameters of H.

    Vectorized over `omega`.  Requires params.W is None: the closed-form
    secular functions exist for the pure Dirac model only.
    """
    if params.W is not None:
        raise ValueError("secular functions are defined for the pure Dirac model")
    w = np.asarray(omega, dtype=float)
    Z0, Za, a = params.Z0, params.Za, params.a
    if branch == NEGATIVE:
        val = (2 * w**2 * (1 - np.cosh(w)) + (Z0 + Za) * w * np.sinh(w)
               - Z0 * Za * np.sinh(a * w) * np.sinh((1 - a) * w))
    elif branch == POSITIVE:
        val = (2 * w**2 * (1 - np.cos(w)) + (Z0 + Za) * w * np.sin(w)
               - Z0 * Za * np.sin(a * w) * np.sin((1 - a) * w))
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return val if val.ndim else float(val)


def _mp_secular(w, params: ModelParams, branch: str):
    Z0, Za, a = mp.mpf(params.Z0), mp.mpf(params.Za), mp.mpf(params.a)
    if branch == NEGATIVE:
        return (2 * w**2 * (1 - mp.cosh(w)) + (Z0 + Za) * w * mp.sinh(w)
                - Z0 * Za * mp.sinh(a * w) * mp.sinh((1 - a) * w))
    return (2 * w**2 * (1 - mp.cos(w)) + (Z0 + Za) * w * mp.sin(w)
            - Z0 * Za * mp.sin(a * w) * mp.sin((1 - a) * w))


def _scan_sign_changes(f, lo: float, hi: float, step: float):
    xs = np.arange(lo, hi, step)
    if xs.size < 2:
        return []
    vals = f(xs)
    brackets = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        brackets.append((xs[i], xs[i + 1]))
    return brackets


def _refine_roots(f, brackets):
    roots = []
    for lo, hi in brackets:
        roots.append(sopt.brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16))
    return roots


# ---------------------------------------------------------------------------
# eigenfunction construction
# ---------------------------------------------------------------------------

def _mp_coeff_matrix(w, params: ModelParams, branch: str) -> mp.matrix:
    """4x4 homogeneous system: continuity at a and 1~0, jumps at a and 0.

    Unknowns (A1, B1, A2, B2).  For the negative branch d/dx cosh(wx) =
    w sinh(wx) and d/dx sinh = w cosh; for the positive branch
    d/dx cos(wx) = -w sin(wx) and d/dx sin = w cos.
    """
    Z0, Za, a = mp.mpf(params.Z0), mp.mpf(params.Za), mp.mpf(params.a)
    if branch == NEGATIVE:
        C, S, sgn = mp.cosh, mp.sinh, mp.mpf(1)
    else:
        C, S, sgn = mp.cos, mp.sin, mp.mpf(-1)
    ca, sa = C(w * a), S(w * a)
    c1, s1 = C(w), S(w)
    M = mp.zeros(4, 4)
    # continuity at a
    M[0, 0], M[0, 1], M[0, 2], M[0, 3] = ca, sa, -ca, -sa
    # psi'(a+) - psi'(a-) + Za psi(a) = 0
    M[1, 0] = -(sgn * w * sa) + Za * ca
    M[1, 1] = -(w * ca) + Za * sa
    M[1, 2] = sgn * w * sa
    M[1, 3] = w * ca
    # continuity at 1 ~ 0
    M[2, 0], M[2, 2], M[2, 3] = mp.mpf(-1), c1, s1
    # psi'(0+) - psi'(1-) + Z0 psi(0) = 0
    M[3, 0] = Z0
    M[3, 1] = w
    M[3, 2] = -sgn * w * s1
    M[3, 3] = -w * c1
    return M


def _mp_piece_l2(A, B, w, x0, x1, branch: str):
    """Integral of (A*C(w x) + B*S(w x))^2 over [x0, x1], closed form."""
    if branch == NEGATIVE:
        def F(x):
            return (A * A * (x / 2 + mp.sinh(2 * w * x) / (4 * w))
                    + 2 * A * B * mp.cosh(2 * w * x) / (4 * w)
                    + B * B * (-x / 2 + mp.sinh(2 * w * x) / (4 * w)))
    else:
        def F(x):
            return (A * A * (x / 2 + mp.sin(2 * w * x) / (4 * w))
                    - 2 * A * B * mp.cos(2 * w * x) / (4 * w)
                    + B * B * (x / 2 - mp.sin(2 * w * x) / (4 * w)))
    return F(x1) - F(x0)


def _build_eigenpair(w_float: float, params: ModelParams, branch: str) -> AnalyticEigenpair:
    with mp.workdps(_SETUP_DPS):
        w = mp.findroot(lambda t: _mp_secular(t, params, branch), mp.mpf(w_float))
        M = _mp_coeff_matrix(w, params, branch)
        # row scaling keeps the pivot ordering honest across magnitudes
        for i in range(4):
            r = max(abs(M[i, j]) for j in range(4))
            for j in range(4):
                M[i, j] /= r
        v, rank = nullspace_vector(M, rtol=mp.mpf(10) ** (-(_SETUP_DPS - 15)))
        if rank != 3:
            raise DegenerateSystem(
                f"coefficient system rank {rank} at omega={float(w):.12g} ({branch})")
        a = mp.mpf(params.a)
        nrm2 = (_mp_piece_l2(v[0], v[1], w, mp.mpf(0), a, branch)
                + _mp_piece_l2(v[2], v[3], w, a, mp.mpf(1), branch))
        nrm = mp.sqrt(nrm2)
        v = mp.matrix([v[0] / nrm, v[1] / nrm, v[2] / nrm, v[3] / nrm])
        # deterministic sign: psi(0) > 0, else psi'(0+) > 0
        psi0 = v[0]
        dpsi0 = w * v[1]
        ref = psi0 if abs(psi0) > mp.mpf("1e-25") else dpsi0
        if ref < 0:
            v = -v
        E = -w * w if branch == NEGATIVE else w * w
        payload = {"omega": w, "coeffs": (v[0], v[1], v[2], v[3]), "E": E}
        return AnalyticEigenpair(
            branch=branch, omega=float(w), E=float(E),
            coeffs=(float(v[0]), float(v[1]), float(v[2]), float(v[3])),
            norm=float(nrm), params=params, _mp=payload)


def solve_spectrum(params: ModelParams, n_eigs: int) -> list[AnalyticEigenpair]:
    """The n_eigs lowest eigenpairs of H, sorted by eigenvalue.

    Pure Dirac model only (W must be absent; perturbed models go through the
    finite-element reference instead).
    """
    if params.W is not None:
        raise ValueError("solve_spectrum handles the pure Dirac model; "
                         "use fem_solve for a smooth perturbation")
    if n_eigs < 1:
        raise ValueError("n_eigs must be >= 1")
    step = min(0.05, np.pi / 8)

    # At strong coupling the negative branch has two roots; at weak coupling
    # the antisymmetric state is pushed to E > 0 and only one remains (the
    # FEM oracle confirms the count either way).  Rescan finer until the
    # bracket count stabilizes, so closely spaced roots are not missed.
    f_neg = lambda w: secular_value(w, params, NEGATIVE)
    w_hi = params.Z0 + params.Za + 5.0
    trial = step
    neg_brackets = _scan_sign_changes(f_neg, 1e-8, w_hi, trial)
    while trial > 1e-4:
        finer = _scan_sign_changes(f_neg, 1e-8, w_hi, trial / 4)
        if len(finer) == len(neg_brackets):
            break
        neg_brackets, trial = finer, trial / 4
    if not neg_brackets:
        raise RootBracketFailure("could not isolate any negative-branch root")
    neg_roots = _refine_roots(f_neg, neg_brackets)

    f_pos = lambda w: secular_value(w, params, POSITIVE)
    need_pos = max(0, n_eigs - len(neg_roots)) + 2
    pos_roots: list[float] = []
    lo, block = 1e-8, 20.0
    while len(pos_roots) < need_pos:
        pos_roots.extend(_refine_roots(f_pos, _scan_sign_changes(f_pos, lo, lo + block, step)))
        lo += block
        if lo > 4000.0:
            raise RootBracketFailure("positive-branch scan window exhausted")

    pairs = [_build_eigenpair(w, params, NEGATIVE) for w in neg_roots]
    pairs += [_build_eigenpair(w, params, POSITIVE) for w in pos_roots]
    pairs.sort(key=lambda p: p.E)
    return pairs[:n_eigs]


# ---------------------------------------------------------------------------
# atomic functions
# ---------------------------------------------------------------------------

def atomic_spectrum(Z: float, N: int, site: float = 0.0) -> list[AtomicFunction]:
    """The cosh-branch function plus the N-1 lowest cos-branch ones.

    The spectral parameters solve the jump condition [phi']_site = -Z phi(site)
    applied to the closed forms, which reduces to

        cosh branch:  2 w tanh(w/2) = Z        (one root, eps = -w^2 < 0)
        cos branch:   2 w tan(w/2) = -Z        (one root per ((2k-1)pi, 2k pi))

    The smooth even eigenfunctions cos(2*pi*k*x) make the left side vanish,
    not equal -Z, so this selection automatically skips them.
    """
    if Z <= 0:
        raise ValueError("Z must be positive")
    if N < 1:
        raise ValueError("N must be >= 1")
    out = []
    with mp.workdps(_SETUP_DPS):
        Zm = mp.mpf(Z)
        hi = max(np.sqrt(Z), Z / 2) + 2.0
        f0 = lambda w: 2 * w * np.tanh(w / 2) - Z
        if f0(1e-8) * f0(hi) >= 0:
            raise RootBracketFailure("cosh-branch jump equation not bracketed")
        w0f = sopt.brentq(f0, 1e-8, hi, xtol=1e-14)
        w0 = mp.findroot(lambda w: 2 * w * mp.tanh(w / 2) - Zm, mp.mpf(w0f))
        out.append(AtomicFunction(
            omega=float(w0), eps=float(-w0 * w0), branch=COSH_BRANCH, site=site,
            Z=Z, index=0, value_at_site=float(mp.cosh(w0 / 2)),
            _mp={"omega": w0, "eps": -w0 * w0}))
        for k in range(1, N):
            fk = lambda w: 2 * w * np.tan(w / 2) + Z
            lo_k, hi_k = (2 * k - 1) * np.pi + 1e-9, 2 * k * np.pi - 1e-9
            wkf = sopt.brentq(fk, lo_k, hi_k, xtol=1e-14)
            wk = mp.findroot(lambda w: 2 * w * mp.tan(w / 2) + Zm, mp.mpf(wkf))
            out.append(AtomicFunction(
                omega=float(wk), eps=float(wk * wk), branch=COS_BRANCH, site=site,
                Z=Z, index=k, value_at_site=float(mp.cos(wk / 2)),
                _mp={"omega": wk, "eps": wk * wk}))
    return out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _atomic_raw(omega: float, branch: str, u, order: int):
    """order-th derivative of the closed form at u = (x - site) mod 1."""
    t = np.asarray(u, dtype=float) - 0.5
    w = omega
    if branch == COSH_BRANCH:
        fn = np.cosh(w * t) if order % 2 == 0 else np.sinh(w * t)
        return w**order * fn
    return w**order * np.cos(w * t + order * np.pi / 2)


def _pair_piece(pair: AnalyticEigenpair, piece: int, x, order: int):
    A, B = pair.coeffs[0:2] if piece == 0 else pair.coeffs[2:4]
    w = pair.omega
    x = np.asarray(x, dtype=float)
    if pair.branch == NEGATIVE:
        if order % 2 == 0:
            return w**order * (A * np.cosh(w * x) + B * np.sinh(w * x))
        return w**order * (A * np.sinh(w * x) + B * np.cosh(w * x))
    ph = order * np.pi / 2
    return w**order * (A * np.cos(w * x + ph) + B * np.sin(w * x + ph))


def eval_eigenfunction(obj, x, order: int = 0, side: Optional[int] = None):
    """order-th classical derivative of an eigenpair or atomic function.

    One-sided at singular points: pass side=+1 (limit from above) or -1
    (from below) when x collides with a derivative-jump location and
    order >= 1; otherwise SideRequired is raised.  Accepts scalars or arrays
    (arrays must stay away from singular points unless a side is given).
    """
    if order > _MAX_ORDER:
        raise OrderOutOfRange(f"order {order} exceeds supported maximum {_MAX_ORDER}")
    scalar = np.isscalar(x) or np.asarray(x).ndim == 0
    xr = np.atleast_1d(np.asarray(x, dtype=float)) % 1.0

    if isinstance(obj, AtomicFunction):
        u = (xr - obj.site) % 1.0
        at_site = np.minimum(u, 1.0 - u) < _SINGULAR_TOL
        if at_site.any():
            if order >= 1 and side is None:
                raise SideRequired("atomic function derivative at its site needs a side")
            u = u.copy()
            u[at_site] = 0.0 if (side is None or side > 0) else 1.0
        out = _atomic_raw(obj.omega, obj.branch, u, order)
        return float(out[0]) if scalar else out

    pair: AnalyticEigenpair = obj
    a = pair.params.a
    d0 = np.minimum(xr, 1.0 - xr)
    da = np.abs(xr - a)
    singular = np.minimum(d0, da) < _SINGULAR_TOL
    if singular.any() and order >= 1 and side is None:
        raise SideRequired("eigenfunction derivative at a Dirac site needs a side")
    xr = xr.copy()
    at_a = np.zeros_like(singular)
    if singular.any():
        s = 1 if (side is None or side > 0) else -1
        at0 = d0 < _SINGULAR_TOL
        at_a = da < _SINGULAR_TOL
        xr[at0] = 0.0 if s > 0 else 1.0
        xr[at_a] = a
    piece2 = xr > a
    if at_a.any():
        # right limit at a lives on [a, 1], left limit on [0, a]
        if side is not None and side > 0:
            piece2 = piece2 | at_a
        else:
            piece2 = piece2 & ~at_a
    out = np.empty_like(xr)
    m1 = ~piece2
    out[m1] = _pair_piece(pair, 0, xr[m1], order)
    out[piece2] = _pair_piece(pair, 1, xr[piece2], order)
    return float(out[0]) if scalar else out


# mp-precision evaluation for the jump analysis ------------------------------

def mp_eval_pair(pair: AnalyticEigenpair, x, order: int = 0):
    """Extended-precision evaluation; x interpreted mod 1, pieces split at a."""
    w = pair._mp["omega"]
    A1, B1, A2, B2 = pair._mp["coeffs"]
    a = mp.mpf(pair.params.a)
    x = mp.mpf(x) % 1
    A, B = (A1, B1) if x <= a else (A2, B2)
    if pair.branch == NEGATIVE:
        if order % 2 == 0:
            return w**order * (A * mp.cosh(w * x) + B * mp.sinh(w * x))
        return w**order * (A * mp.sinh(w * x) + B * mp.cosh(w * x))
    ph = order * mp.pi / 2
    return w**order * (A * mp.cos(w * x + ph) + B * mp.sin(w * x + ph))


def mp_eval_atomic(fn: AtomicFunction, x, order: int = 0):
    """Extended-precision evaluation at (x - site) mod 1."""
    w = fn._mp["omega"]
    t = (mp.mpf(x) - mp.mpf(fn.site)) % 1 - mp.mpf("0.5")
    if fn.branch == COSH_BRANCH:
        return w**order * (mp.cosh(w * t) if order % 2 == 0 else mp.sinh(w * t))
    return w**order * mp.cos(w * t + order * mp.pi / 2)
