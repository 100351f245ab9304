"""boxroots: all real roots of a nonlinear system inside a box.

The solver discretizes the box into a uniform grid, flags every grid cell
where all n equations change sign, and polishes each flagged cell's lower
vertex with Newton-Raphson; rounding-based deduplication and a domain
filter produce the final solution set.
"""

from .benchmarks import (
    BENCHMARK_IDS,
    BenchmarkProblem,
    BenchmarkReport,
    benchmark,
    builtin_problem,
    run_benchmark,
    scaling_problem,
)
from .detect import (
    CandidateSet,
    DetectionMode,
    SignChangeMask,
    evaluate_grid,
    intersect_masks,
    sign_change_mask,
)
from .expressions import (
    ArityError,
    Expression,
    ExpressionError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    VariableSet,
    parse,
)
from .grid import AxisSpec, DomainGrid, ValueTensor, linear_to_multi, multi_to_linear
from .refine import (
    NewtonOptions,
    RefinementResult,
    RefinementStatus,
    Solution,
    SolutionSet,
    dedupe,
    domain_filter,
    newton_raphson,
    numeric_jacobian,
)
from .solve import Problem, SolverConfig, find_all_roots

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "AxisSpec",
    "BENCHMARK_IDS",
    "BenchmarkProblem",
    "BenchmarkReport",
    "CandidateSet",
    "DetectionMode",
    "DomainGrid",
    "Expression",
    "ExpressionError",
    "ExpressionSyntaxError",
    "NewtonOptions",
    "Problem",
    "RefinementResult",
    "RefinementStatus",
    "SignChangeMask",
    "Solution",
    "SolutionSet",
    "SolverConfig",
    "UnknownIdentifierError",
    "ValueTensor",
    "VariableSet",
    "benchmark",
    "builtin_problem",
    "dedupe",
    "domain_filter",
    "evaluate_grid",
    "find_all_roots",
    "intersect_masks",
    "linear_to_multi",
    "multi_to_linear",
    "newton_raphson",
    "numeric_jacobian",
    "parse",
    "run_benchmark",
    "scaling_problem",
    "sign_change_mask",
]
