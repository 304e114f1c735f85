"""Solver laboratory for the VPAW method on the 1D periodic double-Dirac model."""

from .analytic import (AnalyticEigenpair, AtomicFunction, ModelParams,
                       SmoothPotential, atomic_spectrum, eval_eigenfunction,
                       secular_value, solve_spectrum)
from .assembly import OperatorPair, apply_htilde, assemble_H, assemble_vpaw
from .basis import TrigBasis, potential_matrix
from .bench import SweepSpec, SweepRow, run_sweep, summary_table
from .eigensolve import EigResult, jacobi_lowest, solve_lowest
from .fem import FemMesh, build_mesh, fem_solve
from .jumps import (JumpReport, SlopeFit, default_eta_grid, expansion_coeffs,
                    fit_slope, jump_at_eta, jump_at_zero, jump_report, jump_sweep)
from .paw import MollifiedPotential, paw_solve
from .vpaw_setup import (ProjectorSet, PseudoFunction, SiteVpawSetup, VpawParams,
                         WellPosednessReport, build_projectors, build_pseudo,
                         build_site_setup, build_vpaw_setup, check_wellposed)

__all__ = [
    "AnalyticEigenpair", "AtomicFunction", "ModelParams", "SmoothPotential",
    "atomic_spectrum", "eval_eigenfunction", "secular_value", "solve_spectrum",
    "OperatorPair", "apply_htilde", "assemble_H", "assemble_vpaw",
    "TrigBasis", "potential_matrix",
    "SweepSpec", "SweepRow", "run_sweep", "summary_table",
    "EigResult", "jacobi_lowest", "solve_lowest",
    "FemMesh", "build_mesh", "fem_solve",
    "JumpReport", "SlopeFit", "default_eta_grid", "expansion_coeffs",
    "fit_slope", "jump_at_eta", "jump_at_zero", "jump_report", "jump_sweep",
    "MollifiedPotential", "paw_solve",
    "ProjectorSet", "PseudoFunction", "SiteVpawSetup", "VpawParams",
    "WellPosednessReport", "build_projectors", "build_pseudo",
    "build_site_setup", "build_vpaw_setup", "check_wellposed",
]

__version__ = "0.1.0"
