"""End-to-end pipeline: detect candidate cells, refine, dedupe, filter."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .detect import DetectionMode, evaluate_grid, intersect_masks, sign_change_mask
from .expressions import Expression, VariableSet, parse
from .grid import DomainGrid
from .refine import NewtonOptions, SolutionSet, dedupe, domain_filter, newton_raphson

__all__ = ["Problem", "SolverConfig", "SolutionSet", "find_all_roots"]


@dataclass(frozen=True)
class Problem:
    """A square system: n scalar expressions over n ordered variables."""

    vars: VariableSet
    functions: tuple[Expression, ...]
    analytic_jacobian: tuple[tuple[Expression, ...], ...] | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        if len(self.functions) != len(self.vars):
            raise ValueError(
                f"{len(self.functions)} equations over {len(self.vars)} variables; counts must match"
            )
        if self.analytic_jacobian is not None:
            jac = tuple(tuple(row) for row in self.analytic_jacobian)
            n = len(self.vars)
            if len(jac) != n or any(len(row) != n for row in jac):
                raise ValueError(f"analytic jacobian must be {n}x{n}")
            object.__setattr__(self, "analytic_jacobian", jac)

    @classmethod
    def from_text(
        cls,
        equations: list[str],
        variables: list[str],
        jacobian: list[list[str]] | None = None,
        label: str = "",
    ) -> Problem:
        vars = VariableSet(tuple(variables))
        functions = tuple(parse(eq, vars) for eq in equations)
        jac = None
        if jacobian is not None:
            jac = tuple(tuple(parse(entry, vars) for entry in row) for row in jacobian)
        return cls(vars=vars, functions=functions, analytic_jacobian=jac, label=label)

    @property
    def n(self) -> int:
        return len(self.vars)

    def evaluate(self, x) -> np.ndarray:
        """F(x) as a length-n vector; non-finite components allowed."""
        point = tuple(float(v) for v in x)
        return np.array([f.evaluate(point) for f in self.functions], dtype=np.float64)


@dataclass(frozen=True)
class SolverConfig:
    grid: DomainGrid
    mode: DetectionMode = DetectionMode.PAIRWISE
    newton: NewtonOptions = field(default_factory=NewtonOptions)
    round_decimals: int = 6
    domain_slack: float | None = None
    keep_out_of_domain: bool = False
    # Where inside a flagged cell refinement starts. The center halves the
    # worst-case distance to the root, which matters on coarse grids where
    # an undamped Newton step from a cell corner can leave the basin.
    initial_guess: Literal["cell_center", "lower_vertex"] = "cell_center"


def find_all_roots(problem: Problem, config: SolverConfig) -> SolutionSet:
    """All roots of the system inside the configured box.

    Pipeline: evaluate every function over the grid, flag sign-change
    cells per function, intersect the flags into candidates, Newton-polish
    each candidate from its cell's lower vertex, then dedupe and (unless
    disabled) filter back to the box.  Deterministic for a fixed config;
    an empty result is a valid outcome.
    """
    if config.grid.ndim != problem.n:
        raise ValueError(
            f"grid has {config.grid.ndim} axes but problem has {problem.n} variables"
        )
    tensors = evaluate_grid(problem, config.grid)
    masks = [sign_change_mask(t, config.mode) for t in tensors]
    candidates = intersect_masks(masks, config.grid)
    starts = candidates.coordinates
    if config.initial_guess == "cell_center":
        starts = starts + 0.5 * np.array([ax.spacing for ax in config.grid.axes])
    elif config.initial_guess != "lower_vertex":
        raise ValueError(f"unknown initial_guess {config.initial_guess!r}")
    results = [newton_raphson(problem, start, config.newton) for start in starts]
    solutions = dedupe(results, config.round_decimals)
    if not config.keep_out_of_domain:
        solutions = domain_filter(solutions, config.grid, config.domain_slack)
    solutions.label = problem.label
    solutions.config = config
    return solutions
