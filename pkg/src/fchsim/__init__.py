"""2D periodic-domain simulator for the functionalized Cahn-Hilliard equation.

A staggered finite-difference discretization with a convex-splitting time
step, solved per step by an FFT-preconditioned steepest-descent iteration.
See the README for the command-line harness (`fchsim run|converge|bench`).
"""

from .energy import ModelParams, assemble_f, delta_H, dir_deriv, energy_split, scheme_energy
from .grid import CellField, GridSpec, VertexField
from .poisson import SpectralPlan, hm1_inner, hm1_norm, inv_neg_laplacian, precond_solve
from .psd import NonConvergenceError, PsdConfig, PsdReport, line_search, residual, search_direction, solve
from .scheme import Hooks, RunSummary, StepResult, apply_N, run, time_step

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "CellField",
    "VertexField",
    "SpectralPlan",
    "ModelParams",
    "PsdConfig",
    "PsdReport",
    "NonConvergenceError",
    "StepResult",
    "RunSummary",
    "Hooks",
    "energy_split",
    "delta_H",
    "assemble_f",
    "scheme_energy",
    "dir_deriv",
    "inv_neg_laplacian",
    "hm1_inner",
    "hm1_norm",
    "precond_solve",
    "residual",
    "search_direction",
    "line_search",
    "solve",
    "apply_N",
    "time_step",
    "run",
    "__version__",
]
