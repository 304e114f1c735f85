"""Exact spectrum of the double-Dirac ring model.

Solves the secular equations for the canonical parameters (Z0 = Za = 10,
a = 0.4), prints the lowest eigenvalues with their piecewise-closed-form
eigenfunction data, verifies the derivative-jump conditions pointwise, and
cross-checks everything against the quadratic finite-element reference.

Run:  python demos/01_exact_spectrum.py
"""
import numpy as np

from vpaw1d import ModelParams, eval_eigenfunction, fem_solve, solve_spectrum

model = ModelParams(Z0=10.0, Za=10.0, a=0.4)
pairs = solve_spectrum(model, 8)

print(f"{'k':>3} {'branch':>9} {'omega':>18} {'E':>18} {'psi(0)':>12} {'psi(a)':>12}")
for k, p in enumerate(pairs):
    print(f"{k:>3} {p.branch:>9} {p.omega:>18.12f} {p.E:>18.12f} "
          f"{eval_eigenfunction(p, 0.0):>12.6f} {eval_eigenfunction(p, model.a):>12.6f}")

print("\nderivative-jump conditions [psi']_site = -Z psi(site):")
p0 = pairs[0]
for site, Z in ((0.0, model.Z0), (model.a, model.Za)):
    jump = (eval_eigenfunction(p0, site, 1, side=+1)
            - eval_eigenfunction(p0, site, 1, side=-1))
    want = -Z * eval_eigenfunction(p0, site)
    print(f"  site {site}: jump = {jump:+.12f}, -Z psi = {want:+.12f}, "
          f"residual {abs(jump - want):.2e}")

print("\nfinite-element cross-check (4096 elements):")
fem = fem_solve(model, 4096, 8)
for k, (p, ef) in enumerate(zip(pairs, fem.values)):
    print(f"  E_{k}: analytic {p.E:+.12f}  fem {ef:+.12f}  "
          f"rel diff {abs(ef - p.E) / abs(p.E):.2e}")
