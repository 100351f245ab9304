"""Built-in benchmark systems and the timed benchmark runner.

Four classic all-roots test systems ship with the solver, each with its
canonical search box and, where the literature states one, the expected
number of roots so runs are self-checking:

* ``effati``         trigonometric 2x2 system; boxes of half-width 2, 10
                     or 100 centered on the origin (1 / 13 / 127 roots).
* ``girder_reduced`` thin-wall rectangle girder sizing reduced to the
                     (x1, x3) plane by substituting x2; 6 roots in
                     [-40, 40]^2.
* ``girder_raw3d``   the raw 3-variable girder system on [-40, 40]^3.
                     Its domain contains singular regions, so detection
                     may be incomplete; kept as a robustness case with no
                     expected count.
* ``reactor``        two nonadiabatic stirred tank reactors, parametrized
                     by recycle ratio R in [0.935, 0.995]; root count
                     varies from 1 to 7 with R.
* ``chen``           exp/trig 2x2 system; 6 roots in [-10, 10]^2.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

from .grid import DomainGrid
from .refine import SolutionSet
from .solve import Problem, SolverConfig, find_all_roots

__all__ = [
    "BENCHMARK_IDS",
    "BenchmarkProblem",
    "BenchmarkReport",
    "benchmark",
    "builtin_problem",
    "run_benchmark",
    "scaling_problem",
]

BENCHMARK_IDS = ("effati", "girder_reduced", "girder_raw3d", "reactor", "chen")

# Reactor parameters: gamma=1000, D=22, beta1=beta2=2; R sweeps
# 0.935..0.995 in steps of 0.005.
REACTOR_R_MIN = 0.935
REACTOR_R_MAX = 0.995

EFFATI_EXPECTED = {2: 1, 10: 13, 100: 127}
# Keyed by round(R * 1000) to avoid float-key lookups.
REACTOR_EXPECTED = {
    935: 1, 940: 1, 945: 3, 950: 5, 955: 5, 960: 7,
    965: 5, 970: 5, 975: 5, 980: 5, 985: 5, 990: 1, 995: 1,
}

_EFFATI_EQUATIONS = [
    "cos(2*x1)-cos(2*x2)-0.4",
    "2*(x2-x1)+sin(2*x2)-sin(2*x1)-1.2",
]
_EFFATI_JACOBIAN = [
    ["-2*sin(2*x1)", "2*sin(2*x2)"],
    ["-2-2*cos(2*x1)", "2+2*cos(2*x2)"],
]

# x2 eliminated via x2 = 2*x3 - x1 + 165/(2*x3); the raw substitution is
# kept textual so the reduced system stays exactly the published one.
_GIRDER_X2 = "(2*x3-x1+165/(2*x3))"
_GIRDER_REDUCED_EQUATIONS = [
    f"x1*{_GIRDER_X2}^3/12-(x1-2*x3)*({_GIRDER_X2}-2*x3)^3/12-9369",
    f"2*({_GIRDER_X2}-x3)^2*(x1-x3)^2*x3/({_GIRDER_X2}+x1-2*x3)-6835",
]

_GIRDER_RAW3D_EQUATIONS = [
    "x1*x2-(x1-2*x3)*(x2-2*x3)-165",
    "x1*x2^3/12-(x1-2*x3)*(x2-2*x3)^3/12-9369",
    "2*(x2-x3)^2*(x1-x3)^2*x3/(x2+x1-2*x3)-6835",
]

_CHEN_EQUATIONS = [
    "exp(x1-x2)-sin(x1+x2)",
    "x1^2*x2^2-cos(x1+x2)",
]


@dataclass(frozen=True)
class BenchmarkProblem:
    """Descriptor for one built-in benchmark instance."""

    id: str
    grid: DomainGrid
    expected_solution_count: int | None
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        if self.id == "effati":
            return f"effati[-{self.params['halfwidth']:g},{self.params['halfwidth']:g}]"
        if self.id == "reactor":
            return f"reactor(R={self.params['R']:g})"
        return self.id


def benchmark(
    id: str,
    *,
    halfwidth: float = 2.0,
    R: float | None = None,
    points: int | None = None,
) -> BenchmarkProblem:
    """Build a benchmark descriptor with its canonical domain.

    `points` overrides the per-axis resolution (default 500, except the
    3-variable girder case which defaults to 100 to keep the node tensors
    at desk scale).
    """
    if id == "effati":
        hw = float(halfwidth)
        n_points = 500 if points is None else points
        expected = EFFATI_EXPECTED.get(int(hw)) if hw == int(hw) else None
        return BenchmarkProblem(
            id=id,
            grid=DomainGrid.uniform(-hw, hw, n_points, 2),
            expected_solution_count=expected,
            params={"halfwidth": hw},
        )
    if id == "girder_reduced":
        n_points = 500 if points is None else points
        return BenchmarkProblem(
            id=id,
            grid=DomainGrid.uniform(-40.0, 40.0, n_points, 2),
            expected_solution_count=6,
            params={},
        )
    if id == "girder_raw3d":
        n_points = 100 if points is None else points
        return BenchmarkProblem(
            id=id,
            grid=DomainGrid.uniform(-40.0, 40.0, n_points, 3),
            expected_solution_count=None,
            params={},
        )
    if id == "reactor":
        if R is None:
            raise ValueError("reactor benchmark needs the recycle ratio R")
        # 1e-9 slack: R is usually produced by stepping 0.935 + k*0.005.
        if not REACTOR_R_MIN - 1e-9 <= R <= REACTOR_R_MAX + 1e-9:
            raise ValueError(
                f"reactor R={R} outside the sweep range [{REACTOR_R_MIN}, {REACTOR_R_MAX}]"
            )
        n_points = 500 if points is None else points
        return BenchmarkProblem(
            id=id,
            grid=DomainGrid.uniform(0.0, 1.0, n_points, 2),
            expected_solution_count=REACTOR_EXPECTED.get(round(R * 1000)),
            params={"R": float(R)},
        )
    if id == "chen":
        n_points = 500 if points is None else points
        return BenchmarkProblem(
            id=id,
            grid=DomainGrid.uniform(-10.0, 10.0, n_points, 2),
            expected_solution_count=6,
            params={},
        )
    raise ValueError(f"unknown benchmark id {id!r}; known: {', '.join(BENCHMARK_IDS)}")


def builtin_problem(b: BenchmarkProblem) -> tuple[Problem, SolverConfig]:
    """Materialize a benchmark descriptor into a Problem and SolverConfig."""
    if b.id == "effati":
        problem = Problem.from_text(
            _EFFATI_EQUATIONS, ["x1", "x2"], jacobian=_EFFATI_JACOBIAN, label=b.label
        )
    elif b.id == "girder_reduced":
        problem = Problem.from_text(
            _GIRDER_REDUCED_EQUATIONS, ["x1", "x3"], label=b.label
        )
    elif b.id == "girder_raw3d":
        problem = Problem.from_text(
            _GIRDER_RAW3D_EQUATIONS, ["x1", "x2", "x3"], label=b.label
        )
    elif b.id == "reactor":
        R = b.params["R"]
        equations = [
            f"(1-{R!r})*(22/(10*(1+2))-x1)*exp(10*x1/(1+10*x1/1000))-x1",
            f"x1-(1+2)*x2+(1-{R!r})*(22/10-2*x1-(1+2)*x2)*exp(10*x2/(1+10*x2/1000))",
        ]
        problem = Problem.from_text(equations, ["x1", "x2"], label=b.label)
    elif b.id == "chen":
        problem = Problem.from_text(_CHEN_EQUATIONS, ["x1", "x2"], label=b.label)
    else:
        raise ValueError(f"unknown benchmark id {b.id!r}")
    return problem, SolverConfig(grid=b.grid)


@dataclass(frozen=True)
class BenchmarkReport:
    benchmark: BenchmarkProblem
    solutions: SolutionSet
    solution_count: int
    mean_seconds: float
    std_seconds: float
    repetitions: int
    expected_solution_count: int | None

    @property
    def passed(self) -> bool | None:
        """True/False against the expected count; None when unknown."""
        if self.expected_solution_count is None:
            return None
        return self.solution_count == self.expected_solution_count


def run_benchmark(b: BenchmarkProblem, repetitions: int = 50) -> BenchmarkReport:
    """Run a benchmark `repetitions` times and report the mean wall time.

    The solution set is identical across runs (the pipeline is
    deterministic); the report carries the one from the final run.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    problem, config = builtin_problem(b)
    times = []
    solutions = None
    for _ in range(repetitions):
        start = time.perf_counter()
        solutions = find_all_roots(problem, config)
        times.append(time.perf_counter() - start)
    return BenchmarkReport(
        benchmark=b,
        solutions=solutions,
        solution_count=len(solutions),
        mean_seconds=statistics.fmean(times),
        std_seconds=statistics.stdev(times) if len(times) > 1 else 0.0,
        repetitions=repetitions,
        expected_solution_count=b.expected_solution_count,
    )


def scaling_problem(ndim: int, points: int) -> tuple[Problem, SolverConfig]:
    """Separable quadratic test system x_k^2 - 25 = 0 on [-10, 10]^ndim.

    Every axis contributes roots at +-5, so the system has exactly 2^ndim
    solutions at any resolution; used by the scaling sweep.
    """
    variables = [f"x{k + 1}" for k in range(ndim)]
    equations = [f"{v}^2-25" for v in variables]
    problem = Problem.from_text(equations, variables, label=f"separable-quadratic-{ndim}d")
    config = SolverConfig(grid=DomainGrid.uniform(-10.0, 10.0, points, ndim))
    return problem, config
