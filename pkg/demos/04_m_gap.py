"""Vertical gaps between error curves under basis-size doubling.

On the large-eta branch the error scales like 1/M, so doubling M lowers the
curve by log10(2) ~ 0.30; on the small-eta branch it scales like M^(1-2d),
a gap of (2d-1) log10(2).  Measured on the 9th eigenvalue with d = N.

Run:  python demos/04_m_gap.py       (a few minutes)
"""
import numpy as np

from vpaw1d import ModelParams, SweepSpec, run_sweep
from vpaw1d.jumps import eigenvalue_eta_grid

model = ModelParams(Z0=10.0, Za=10.0, a=0.4)

print(f"{'N':>3} {'M pair':>12} {'large-eta gap':>14} {'small-eta gap':>14} "
      f"{'log10(2)':>9} {'(2d-1)log10(2)':>15}")
for N in (2, 3):
    res = run_sweep(SweepSpec(method="vpaw", model=model, Ms=(129, 257, 513),
                              Ns=(N,), ds=(N,), etas=tuple(eigenvalue_eta_grid()),
                              eig_indices=(8,)))
    for (N_, d, eig, M1, M2), info in res.summary["gaps"].items():
        print(f"{N:>3} {f'{M1}->{M2}':>12} {info['decreasing_gap']:>14.3f} "
              f"{info['increasing_gap']:>14.3f} {np.log10(2):>9.3f} "
              f"{(2 * d - 1) * np.log10(2):>15.3f}")
