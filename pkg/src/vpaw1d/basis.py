"""Real orthonormal trigonometric basis of L2_per(0, 1) and its grid maps.

Index layout for odd M = 2K+1:

    b_0 = 1,  b_{2k-1} = sqrt(2) cos(2 pi k x),  b_{2k} = sqrt(2) sin(2 pi k x)

for k = 1..K.  The span equals that of the complex exponentials e^{2 pi i m x},
|m| <= K; the real form keeps every assembled operator real symmetric.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TrigBasis:
    M: int
    K: int = field(init=False)

    def __post_init__(self):
        if self.M < 1 or self.M % 2 == 0:
            raise ValueError("basis size M must be odd and positive")
        object.__setattr__(self, "K", (self.M - 1) // 2)

    def kinetic_diagonal(self) -> np.ndarray:
        ks = np.arange(1, self.K + 1)
        diag = np.zeros(self.M)
        diag[1::2] = (2 * np.pi * ks) ** 2
        diag[2::2] = (2 * np.pi * ks) ** 2
        return diag

    def values(self, x, order: int = 0) -> np.ndarray:
        """(M, len(x)) matrix of order-th derivatives of the basis functions."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        ks = np.arange(1, self.K + 1)
        ang = 2 * np.pi * np.outer(ks, x)
        amp = np.sqrt(2.0) * (2 * np.pi * ks)[:, None] ** order
        out = np.empty((self.M, x.size))
        out[0] = 1.0 if order == 0 else 0.0
        ph = order * np.pi / 2
        out[1::2] = amp * np.cos(ang + ph)
        out[2::2] = amp * np.sin(ang + ph)
        return out

    def point_vector(self, x: float) -> np.ndarray:
        return self.values(x)[:, 0]

    # -- exact maps between coefficients and a uniform grid ----------------

    def grid_size(self) -> int:
        return 2 * self.M

    def to_grid(self, coeffs: np.ndarray) -> np.ndarray:
        """Values on x_j = j / (2M), exact for members of the span."""
        n = self.grid_size()
        spec = np.zeros(n // 2 + 1, dtype=complex)
        spec[0] = coeffs[0]
        c = coeffs[1::2]
        s = coeffs[2::2]
        spec[1:self.K + 1] = (c - 1j * s) / np.sqrt(2.0)
        return np.fft.irfft(spec, n=n) * n

    def from_grid(self, vals: np.ndarray) -> np.ndarray:
        """L2 projection of grid samples back onto the basis.

        Exact when the sampled function is a trig polynomial of degree < M,
        i.e. no aliasing onto the first K modes.
        """
        n = self.grid_size()
        spec = np.fft.rfft(vals) / n
        out = np.empty(self.M)
        out[0] = spec[0].real
        out[1::2] = np.sqrt(2.0) * spec[1:self.K + 1].real
        out[2::2] = -np.sqrt(2.0) * spec[1:self.K + 1].imag
        return out

    def grid_points(self) -> np.ndarray:
        n = self.grid_size()
        return np.arange(n) / n


def potential_matrix(basis: TrigBasis, C: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Galerkin matrix of V(x) = C_0 + sum_f C_f cos(2 pi f x) + S_f sin(2 pi f x).

    Entries follow from the product-to-sum identities; with w(m) and u(m)
    denoting the cosine/sine moments of V at frequency m,

        <V b_cosj, b_cosk> = w(j-k) + w(j+k)
        <V b_sinj, b_sink> = w(j-k) - w(j+k)
        <V b_cosj, b_sink> = u(j+k) + u(k-j)

    and the constant row pairs with sqrt(2)/2 times the coefficients.
    Exact: no quadrature involved.
    """
    M, K = basis.M, basis.K
    C = np.asarray(C, float)
    S = np.asarray(S, float)
    F = len(C) - 1

    def w(m):
        m = np.abs(m)
        out = np.zeros(m.shape)
        out[m == 0] = C[0]
        sel = (m >= 1) & (m <= F)
        out[sel] = 0.5 * C[m[sel]]
        return out

    def u(m):
        sgn = np.sign(m)
        am = np.abs(m)
        out = np.zeros(m.shape)
        sel = (am >= 1) & (am <= F)
        out[sel] = 0.5 * sgn[sel] * S[am[sel]]
        return out

    ks = np.arange(1, K + 1)
    J, Kk = np.meshgrid(ks, ks, indexing="ij")
    V = np.zeros((M, M))
    V[0, 0] = C[0]
    # constant against cos/sin rows
    idx = ks[ks <= F]
    row_c = np.zeros(K)
    row_s = np.zeros(K)
    row_c[idx - 1] = np.sqrt(2) / 2 * C[idx]
    row_s[idx - 1] = np.sqrt(2) / 2 * S[idx]
    V[0, 1::2] = row_c
    V[0, 2::2] = row_s
    V[1::2, 0] = row_c
    V[2::2, 0] = row_s
    # cos-cos, sin-sin, cos-sin blocks (factor 2 from sqrt(2)^2 halves)
    V[1::2, 1::2] = w(J - Kk) + w(J + Kk)
    V[2::2, 2::2] = w(J - Kk) - w(J + Kk)
    cs = u(J + Kk) + u(Kk - J)
    V[1::2, 2::2] = cs
    V[2::2, 1::2] = cs.T
    return V
