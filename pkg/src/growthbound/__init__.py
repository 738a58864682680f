"""Certified upper bounds on the growth factor of Gaussian elimination
with complete pivoting, via exactly verified linear programming duals."""

from .elimination import (
    COMPLETE,
    NONE,
    PARTIAL,
    EliminationTrace,
    FloatConfig,
    SingularMatrixError,
    eliminate,
    growth_factor,
    iterate,
    solve_linear_system,
    wilkinson_matrix,
)
from .lpmodel import (
    LPInstance,
    build_geomean_lp,
    build_improved_lp,
    build_wilkinson_lp,
    check_pivot_feasibility,
    cumulative_transform,
    load_lp,
    save_lp,
)
from .lpsolve import (
    CertificationError,
    CertifiedBound,
    SolverError,
    certify,
    exact_simplex,
    load_certificate,
    save_certificate,
    solve_float,
    verify_certificate,
    wilkinson_closed_form_dual,
)
from .matrix import Matrix, load_matrix, save_matrix
from .report import BoundReport, demo_instability, run_bound

__version__ = "0.1.0"

__all__ = [
    "COMPLETE",
    "NONE",
    "PARTIAL",
    "BoundReport",
    "CertificationError",
    "CertifiedBound",
    "EliminationTrace",
    "FloatConfig",
    "LPInstance",
    "Matrix",
    "SingularMatrixError",
    "SolverError",
    "build_geomean_lp",
    "build_improved_lp",
    "build_wilkinson_lp",
    "certify",
    "check_pivot_feasibility",
    "cumulative_transform",
    "demo_instability",
    "eliminate",
    "exact_simplex",
    "growth_factor",
    "iterate",
    "load_certificate",
    "load_lp",
    "load_matrix",
    "run_bound",
    "save_certificate",
    "save_lp",
    "save_matrix",
    "solve_float",
    "solve_linear_system",
    "verify_certificate",
    "wilkinson_closed_form_dual",
    "wilkinson_matrix",
    "__version__",
]
