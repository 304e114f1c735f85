"""Gauss-Legendre quadrature helpers, in double and extended precision.

Integrands over a cut-off window are analytic on each half of the window but
kinked at the site itself, so every window rule is split there.  Rules that
pair trigonometric basis functions with window-local data are composite, with
the panel count scaled to the number of oscillations so that doubling the
node count moves no assembled entry by more than ~1e-15 relative.
"""
from __future__ import annotations

from functools import lru_cache

import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=32)
def gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]; cached."""
    x, w = leggauss(n)
    return x, w


def gl_interval(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for a single panel [lo, hi]."""
    x, w = gl_rule(n)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return mid + half * x, half * w


def composite_nodes(lo: float, hi: float, panels: int, n: int = 16):
    """Composite rule on [lo, hi] with `panels` equal panels of `n` nodes."""
    edges = np.linspace(lo, hi, panels + 1)
    xs, ws = [], []
    for i in range(panels):
        x, w = gl_interval(edges[i], edges[i + 1], n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def window_rule(site: float, eta: float, max_freq: float = 0.0,
                min_panels: int = 2, n: int = 16, refine: int = 1):
    """Split composite rule over [site-eta, site+eta].

    `max_freq` is the largest spatial frequency (in periods per unit length)
    appearing in the integrand; the panel count keeps at most ~2.5 periods of
    that mode per panel.  `refine` multiplies the panel count (used by the
    quadrature-exactness checks).
    """
    panels = refine * max(min_panels, int(np.ceil(max_freq * eta / 2.5)))
    xl, wl = composite_nodes(site - eta, site, panels, n)
    xr, wr = composite_nodes(site, site + eta, panels, n)
    return np.concatenate([xl, xr]), np.concatenate([wl, wr])


def oscillatory_panel_rule(lo: float, hi: float, max_freq: float, n: int = 16,
                           min_panels: int = 1):
    """Composite rule on [lo, hi] resolving oscillations up to `max_freq`."""
    panels = max(min_panels, int(np.ceil(max_freq * (hi - lo) / 2.5)))
    return composite_nodes(lo, hi, panels, n)


# ---------------------------------------------------------------------------
# Extended-precision rules.  Setup-sized integrals (projector Grams, the
# matrices of <p~, phi> pairings, jump expansion coefficients) are evaluated
# with mpmath because their downstream linear systems are intrinsically
# ill-conditioned as eta -> 0; double precision cannot certify the 1e-12
# duality residuals the construction is required to meet.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def mp_gl_rule(n: int, dps: int = 50):
    """Gauss-Legendre nodes/weights on [-1, 1] to `dps` digits.

    Float nodes seed an mp Newton iteration on P_n; weights use the standard
    2 / ((1-x^2) P_n'(x)^2) identity.
    """
    with mp.workdps(dps + 10):
        xf, _ = leggauss(n)
        nodes, weights = [], []

        def legendre_and_deriv(x):
            p0, p1 = mp.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            return p1, dp

        for seed in xf:
            x = mp.mpf(float(seed))
            for _ in range(60):
                p, dp = legendre_and_deriv(x)
                dx = p / dp
                x -= dx
                if abs(dx) < mp.mpf(10) ** (-(dps + 5)):
                    break
            _, dp = legendre_and_deriv(x)
            nodes.append(x)
            weights.append(2 / ((1 - x * x) * dp * dp))
        return tuple(nodes), tuple(weights)


def mp_quad_interval(f, lo, hi, n: int = 48):
    """Fixed-node mp Gauss-Legendre of callable `f` over [lo, hi]."""
    x, w = mp_gl_rule(n)
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    return half * mp.fsum(wi * f(mid + half * xi) for xi, wi in zip(x, w))


def mp_quad_split(f, points, n: int = 48):
    """mp quadrature over consecutive intervals given by `points`."""
    return mp.fsum(mp_quad_interval(f, points[i], points[i + 1], n)
                   for i in range(len(points) - 1))
