"""Truncated PAW with a mollified potential versus the exact transformation.

The classical baseline replaces each Dirac well by a smooth bump and keeps
only N correction channels per site; its eigenvalue converges fast in M but
to a shifted value.  The variational transformation has no truncation step
and converges to the exact eigenvalue.

Run:  python demos/05_paw_vs_vpaw.py       (about a minute)
"""
from vpaw1d import (ModelParams, TrigBasis, VpawParams, assemble_vpaw,
                    build_vpaw_setup, paw_solve, solve_lowest, solve_spectrum)

model = ModelParams(Z0=10.0, Za=10.0, a=0.4)
E0 = solve_spectrum(model, 1)[0].E
setups = build_vpaw_setup(model, VpawParams(N=4, d=6, eta=0.1))

print(f"exact E0 = {E0:.12f}")
print(f"{'M':>6} {'|E_paw - E0|':>14} {'|E_vpaw - E0|':>14}")
for M in (257, 513, 1025):
    basis = TrigBasis(M)
    paw = paw_solve(model, list(setups), basis, epsilon=0.025, n_eigs=1)
    pair = assemble_vpaw(model, list(setups), basis)
    vpaw = solve_lowest(pair.Htilde, pair.Stilde, 1)
    print(f"{M:>6} {abs(paw.values[0] - E0):>14.3e} "
          f"{abs(vpaw.values[0] - E0):>14.3e}")
print("\nthe PAW column stalls on a truncation plateau; the VPAW column "
      "keeps falling to the solver floor")

print("\nplateau level vs truncation N (M = 257, eps = 0.025):")
for N in (1, 2, 3, 4, 5):
    s = build_vpaw_setup(model, VpawParams(N=N, d=6, eta=0.1))
    paw = paw_solve(model, list(s), TrigBasis(257), epsilon=0.025, n_eigs=1)
    print(f"  N={N}: |E_paw - E0| = {abs(paw.values[0] - E0):.3e}")
