"""Algebraic flux correction for 1D linear advection with P1 finite elements.

Galerkin, low order and monolithic convex limiting schemes, including a
coercivity-enforcing limiter, on uniform or perturbed meshes.
"""

__version__ = "0.1.0"

from .assembly import DiffusionVariant, assemble_operators
from .diagnostics import convergence_table, eoc, l2_error, lumped_norm
from .limiter import Prelimit, ce_limit, mcl_limit, minmod
from .mesh import Boundary, Mesh1D, build_uniform, hierarchy, perturb, refine
from .problems import get_problem, problem_coshump, problem_twoprofile
from .schemes import Scheme, SchemeConfig, SchemeKind, StabilizationVariant, evaluate, rhs
from .timeint import TimeConfig, run

__all__ = [
    "Boundary", "DiffusionVariant", "Mesh1D", "Prelimit", "Scheme", "SchemeConfig",
    "SchemeKind", "StabilizationVariant", "TimeConfig", "assemble_operators",
    "build_uniform", "ce_limit", "convergence_table", "eoc", "evaluate", "get_problem",
    "hierarchy", "l2_error", "lumped_norm", "mcl_limit", "minmod", "perturb",
    "problem_coshump", "problem_twoprofile", "refine", "rhs", "run",
]
