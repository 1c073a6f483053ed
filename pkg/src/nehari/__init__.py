"""Minimal matrix deviation bounds for the block Nehari problem.

Given finitely many ``m x m`` Fourier coefficients ``gamma_1 .. gamma_K``,
compute the smallest strongly positive ``rho_min`` with
``Gamma^* Gamma <= diag(rho_min^2, rho_min^2, ...)`` as the fixed point of
``q^2 = A11 + A12 (Q^2 - A22)^{-1} A12^*``.
"""

from .errors import (
    InputError, IterationBreakdown, NehariError, NormalizationError, NotApplicableError,
    NotPSDError, PreconditionError, ReductionBreakdown, StateError,
)
from .feasibility import (
    DeviationBound, FeasibilityVerdict, Method, feasibility_direct, feasibility_schur,
    normalize_coefficients, scalar_aak_oracle,
)
from .hankel import (
    CoefficientSequence, GramBlocks, HankelPartition, TruncatedHankel, build_truncated_hankel,
    gram_blocks, gram_from_coefficients, gram_full, partition,
)
from .instance import InstanceFile, emit_instance, generate_instance, parse_instance
from .linalg import (
    is_strongly_positive, loewner_leq, min_eigenvalue, principal_sqrt, solve_strongly_positive,
)
from .reduction import (
    KernelSplit, NormalizedMap, ReducedBlocks, kernel_split, normalize_to_g, reduce_map,
    solve_with_reduction,
)
from .solver import (
    Certificate, ConvergenceResult, IterateRecord, SolverConfig, Status, TheoremPath,
    certify, certify_bound, classify, iterate_once, precondition_check, solve_rho_min,
)

__version__ = "0.1.0"
