"""Scaling of the pseudo eigenfunction's derivative jumps.

The transformed ground state psi~ keeps a first-derivative jump at each site
(shrinking like eta^(2N)) and acquires d-th derivative jumps at the window
edges (growing like eta^(1-d)).  This script sweeps the cut-off radius and
fits both exponents, reproducing the slope tables of the jump study:

    first jump at the site:   N = 2..5  ->  ~ 4, 6, 8, 10
    d-th jump at the edge:    d = 2..5  ->  ~ -1, -2, -3, -4

Run:  python demos/02_derivative_jumps.py       (about a minute)
"""
from vpaw1d import ModelParams, solve_spectrum
from vpaw1d.jumps import default_eta_grid, edge_jump_slope, first_jump_slope, jump_sweep

model = ModelParams(Z0=10.0, Za=10.0, a=0.4)
ground = solve_spectrum(model, 1)[0]
etas = tuple(default_eta_grid())

print("first derivative jump at the site (d = N):")
print(f"{'N':>3} {'slope':>8} {'theory':>8}")
for N in (2, 3, 4, 5):
    rows = jump_sweep(model, N, N, etas, ground)
    fit = first_jump_slope(rows)
    print(f"{N:>3} {fit.slope:>8.2f} {2 * N:>8}")

print("\nd-th derivative jump at the window edge (N = 2):")
print(f"{'d':>3} {'slope':>8} {'theory':>8}")
for d in (2, 3, 4, 5):
    rows = jump_sweep(model, 2, d, etas, ground)
    fit = edge_jump_slope(rows, k=d)
    print(f"{d:>3} {fit.slope:>8.3f} {1 - d:>8}")
