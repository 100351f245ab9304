"""Newton-Raphson refinement of candidate cells, deduplication, filtering.

Candidates land close to a root (within one cell diagonal), so the plain
undamped iteration x <- x - J^-1 F(x) is used with an LU solve under
partial pivoting; no line search or trust region.  The Jacobian is either
analytic (user-supplied expressions) or one-sided finite differences.

A refinement ends in one of four states: converged (max-norm residual
within tolerance at a finite iterate), diverged (iterate left the
divergence bound or the function value turned non-finite), non_converged
(iteration cap or stagnated step without a small residual), or
singular_jacobian (LU pivot underflow / non-finite Jacobian).

Converged results are rounded to a fixed number of decimals to merge
duplicates (first occurrence wins, unrounded coordinates are kept) and
optionally filtered back to the search box with a small slack.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Literal

import numpy as np
import scipy.linalg

from .grid import DomainGrid

if TYPE_CHECKING:
    from .solve import Problem, SolverConfig

__all__ = [
    "NewtonOptions",
    "RefinementResult",
    "RefinementStatus",
    "Solution",
    "SolutionSet",
    "dedupe",
    "domain_filter",
    "newton_raphson",
    "numeric_jacobian",
]

# Relative pivot underflow threshold below which the LU factors are
# treated as singular.
_PIVOT_RTOL = 1e-14


@dataclass(frozen=True)
class NewtonOptions:
    residual_tol: float = 1e-10
    step_tol: float = 1e-12
    max_iterations: int = 100
    divergence_bound: float = 1e12
    jacobian: Literal["analytic", "finite_difference"] = "finite_difference"

    def __post_init__(self):
        for name in ("residual_tol", "step_tol", "divergence_bound"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.jacobian not in ("analytic", "finite_difference"):
            raise ValueError(f"unknown jacobian mode {self.jacobian!r}")


class RefinementStatus(enum.Enum):
    CONVERGED = "converged"
    NON_CONVERGED = "non_converged"
    DIVERGED = "diverged"
    SINGULAR_JACOBIAN = "singular_jacobian"


@dataclass(frozen=True)
class RefinementResult:
    status: RefinementStatus
    root: np.ndarray | None
    residual_norm: float
    iterations: int
    start: np.ndarray

    @property
    def converged(self) -> bool:
        return self.status is RefinementStatus.CONVERGED


def numeric_jacobian(problem: Problem, x) -> np.ndarray:
    """Forward-difference Jacobian, J[i,j] ~= df_i/dx_j at x.

    Step h_j = sqrt(machine eps) * max(|x_j|, 1). Non-finite function
    values propagate into the matrix.
    """
    x = np.asarray(x, dtype=np.float64)
    f0 = problem.evaluate(x)
    return _forward_difference_jacobian(problem, x, f0)


def _forward_difference_jacobian(problem: Problem, x: np.ndarray, f0: np.ndarray) -> np.ndarray:
    n = x.size
    jac = np.empty((n, n), dtype=np.float64)
    sqrt_eps = math.sqrt(np.finfo(np.float64).eps)
    with np.errstate(all="ignore"):
        for j in range(n):
            h = sqrt_eps * max(abs(float(x[j])), 1.0)
            xp = x.copy()
            xp[j] += h
            jac[:, j] = (problem.evaluate(xp) - f0) / h
    return jac


def _analytic_jacobian(problem: Problem, x: np.ndarray) -> np.ndarray:
    rows = problem.analytic_jacobian
    n = x.size
    jac = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            jac[i, j] = rows[i][j].evaluate(x)
    return jac


def newton_raphson(problem: Problem, x0, opts: NewtonOptions | None = None) -> RefinementResult:
    """Polish one starting point to a root of the system.

    Each step solves J s = F via LU with partial pivoting and updates
    x <- x - s.  Stops converged as soon as the max-norm residual is within
    residual_tol; a step below step_tol ends the iteration too, counting as
    converged only if the residual at the new point is small (otherwise the
    iteration merely stagnated).
    """
    if opts is None:
        opts = NewtonOptions()
    x0 = np.asarray(x0, dtype=np.float64)
    if problem.n != x0.size:
        raise ValueError(f"start point has {x0.size} components, problem has {problem.n}")
    if not np.isfinite(x0).all():
        raise ValueError("start point must be finite")
    if opts.jacobian == "analytic" and problem.analytic_jacobian is None:
        raise ValueError("analytic jacobian requested but problem does not carry one")

    x = x0.copy()
    residual = math.inf
    for iteration in range(opts.max_iterations):
        f = problem.evaluate(x)
        if not np.isfinite(f).all():
            return RefinementResult(RefinementStatus.DIVERGED, None, math.inf, iteration, x0)
        residual = float(np.max(np.abs(f)))
        if residual <= opts.residual_tol:
            return RefinementResult(RefinementStatus.CONVERGED, x, residual, iteration, x0)

        if opts.jacobian == "analytic":
            jac = _analytic_jacobian(problem, x)
        else:
            jac = _forward_difference_jacobian(problem, x, f)
        if not np.isfinite(jac).all():
            return RefinementResult(RefinementStatus.SINGULAR_JACOBIAN, None, residual, iteration, x0)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            lu, piv = scipy.linalg.lu_factor(jac, check_finite=False)
        pivots = np.abs(np.diag(lu))
        if pivots.max() == 0.0 or pivots.min() < _PIVOT_RTOL * pivots.max():
            return RefinementResult(RefinementStatus.SINGULAR_JACOBIAN, None, residual, iteration, x0)
        step = scipy.linalg.lu_solve((lu, piv), f, check_finite=False)

        x = x - step
        if not np.isfinite(x).all() or float(np.max(np.abs(x))) > opts.divergence_bound:
            return RefinementResult(RefinementStatus.DIVERGED, None, residual, iteration + 1, x0)

        if float(np.max(np.abs(step))) <= opts.step_tol:
            f = problem.evaluate(x)
            residual = float(np.max(np.abs(f))) if np.isfinite(f).all() else math.inf
            if residual <= opts.residual_tol:
                return RefinementResult(
                    RefinementStatus.CONVERGED, x, residual, iteration + 1, x0
                )
            return RefinementResult(
                RefinementStatus.NON_CONVERGED, None, residual, iteration + 1, x0
            )

    return RefinementResult(RefinementStatus.NON_CONVERGED, None, residual, opts.max_iterations, x0)


@dataclass(frozen=True)
class Solution:
    coordinates: np.ndarray
    rounded: tuple[float, ...]
    residual_norm: float
    iterations: int
    source_index: int


@dataclass
class SolutionSet:
    """Deduplicated refined roots plus the run's provenance."""

    solutions: list[Solution]
    label: str = ""
    config: SolverConfig | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.solutions)

    def coordinates(self) -> np.ndarray:
        if not self.solutions:
            return np.empty((0, 0))
        return np.vstack([s.coordinates for s in self.solutions])


def dedupe(results: list[RefinementResult], round_decimals: int = 6) -> SolutionSet:
    """Merge converged refinements that round to the same coordinates.

    Non-converged results are dropped; each coordinate is rounded to
    `round_decimals` places and the first occurrence of each rounded tuple
    survives, keeping its unrounded coordinates.
    """
    if round_decimals < 0:
        raise ValueError("round_decimals must be >= 0")
    seen: dict[tuple[float, ...], None] = {}
    solutions: list[Solution] = []
    for index, result in enumerate(results):
        if not result.converged:
            continue
        key = tuple(float(v) for v in np.round(result.root, round_decimals))
        if key in seen:
            continue
        seen[key] = None
        solutions.append(
            Solution(
                coordinates=result.root.copy(),
                rounded=key,
                residual_norm=result.residual_norm,
                iterations=result.iterations,
                source_index=index,
            )
        )
    return SolutionSet(solutions)


def domain_filter(s: SolutionSet, g: DomainGrid, slack: float | None = None) -> SolutionSet:
    """Keep solutions inside the box, allowing `slack` beyond each bound.

    With slack=None each axis gets 1e-9 * (upper - lower).
    """
    if slack is not None and slack < 0.0:
        raise ValueError("slack must be >= 0")
    lowers = np.array([ax.lower for ax in g.axes])
    uppers = np.array([ax.upper for ax in g.axes])
    if slack is None:
        slacks = 1e-9 * (uppers - lowers)
    else:
        slacks = np.full(g.ndim, float(slack))
    kept = [
        sol
        for sol in s.solutions
        if np.all(sol.coordinates >= lowers - slacks)
        and np.all(sol.coordinates <= uppers + slacks)
    ]
    return SolutionSet(kept, label=s.label, config=s.config)
