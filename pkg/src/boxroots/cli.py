"""Command-line front-end.

Subcommands:

* ``solve CONFIG``      run a system described by a JSON config file.
* ``benchmark ID``      run a built-in benchmark with PASS/FAIL reporting.
* ``contours``          dump per-function value grids of a 2-variable
                        system as CSV (plus a rendered contour figure).
* ``sweep``             time the solver over grid sizes and dimensions.

The config file is a JSON document::

    {
      "equations": ["x1*cos(0.5*x2)", "-x1+0.5*x2^2"],
      "variables": ["x1", "x2"],
      "domain": [{"lower": -10, "upper": 10, "points": 11},
                 {"lower": -10, "upper": 10, "points": 11}],
      "mode": "pairwise",                      # or "strict_paper"
      "newton": {"residual_tol": 1e-10, "step_tol": 1e-12,
                 "max_iterations": 100, "jacobian": "finite_difference"},
      "jacobian_expressions": [["...", "..."], ["...", "..."]],  # optional
      "round_decimals": 6,
      "output": {"format": "csv", "path": "solutions.csv"},
      "contours": {"path": "contour_dir"},     # optional, 2D only
      "repetitions": 1
    }

``equations``, ``variables`` and ``domain`` are required (there is no
default point count); everything else has the defaults shown.  Solutions
are written as CSV (header ``x1,...,xn,residual_norm,iterations``) or as
JSON lines with one object per solution plus a trailer object carrying the
config echo and timing.  Numbers are serialized with 17 significant
digits, so parsing an emitted file recovers them bit-exactly.

Exit codes: 0 success (zero solutions included), 2 configuration error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import statistics
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import BENCHMARK_IDS, benchmark, builtin_problem, run_benchmark, scaling_problem
from .detect import DetectionMode, evaluate_grid
from .grid import AxisSpec, DomainGrid
from .refine import NewtonOptions, SolutionSet
from .solve import Problem, SolverConfig, find_all_roots

__all__ = [
    "ConfigError",
    "RunConfig",
    "dump_contours",
    "main",
    "parse_config",
    "run",
    "scaling_sweep",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

_DEFAULT_SWEEP_BUDGET = 2 * 1024**3  # bytes


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""


@dataclass
class RunConfig:
    """Validated run description, as parsed from a config document."""

    equations: list[str]
    variables: list[str]
    axes: list[AxisSpec]
    mode: DetectionMode = DetectionMode.PAIRWISE
    newton: NewtonOptions = field(default_factory=NewtonOptions)
    jacobian_expressions: list[list[str]] | None = None
    round_decimals: int = 6
    output_format: str = "csv"
    output_path: str | None = None
    contours_path: str | None = None
    figure_path: str | None = None
    repetitions: int = 1
    label: str = ""

    def problem(self) -> Problem:
        return Problem.from_text(
            self.equations, self.variables, jacobian=self.jacobian_expressions,
            label=self.label,
        )

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            grid=DomainGrid(tuple(self.axes)),
            mode=self.mode,
            newton=self.newton,
            round_decimals=self.round_decimals,
        )

    def echo(self) -> dict:
        """JSON-ready snapshot of the effective configuration."""
        return {
            "equations": list(self.equations),
            "variables": list(self.variables),
            "domain": [
                {"lower": ax.lower, "upper": ax.upper, "points": ax.points}
                for ax in self.axes
            ],
            "mode": self.mode.value,
            "newton": dataclasses.asdict(self.newton),
            "round_decimals": self.round_decimals,
            "repetitions": self.repetitions,
        }


def _require(doc: dict, key: str, kind, path: str = ""):
    where = f"{path}.{key}" if path else key
    if key not in doc:
        raise ConfigError(f"missing required field {where!r}")
    value = doc[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(f"field {where!r} must be {kind.__name__}, got {type(value).__name__}")
    return value


def parse_config(source: str) -> RunConfig:
    """Parse and validate a JSON config document into a RunConfig.

    Raises ConfigError naming the offending field on any schema violation.
    """
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")

    known = {
        "equations", "variables", "domain", "mode", "newton",
        "jacobian_expressions", "round_decimals", "output", "contours",
        "figure", "repetitions", "label",
    }
    for key in doc:
        if key not in known:
            raise ConfigError(f"unknown field {key!r}")

    equations = _require(doc, "equations", list)
    if not equations or not all(isinstance(e, str) for e in equations):
        raise ConfigError("field 'equations' must be a non-empty list of strings")
    variables = _require(doc, "variables", list)
    if not variables or not all(isinstance(v, str) for v in variables):
        raise ConfigError("field 'variables' must be a non-empty list of strings")
    if len(equations) != len(variables):
        raise ConfigError(
            f"equation/variable count mismatch: {len(equations)} equations, {len(variables)} variables"
        )

    domain = _require(doc, "domain", list)
    if len(domain) != len(variables):
        raise ConfigError(
            f"field 'domain' must list one axis per variable ({len(variables)}), got {len(domain)}"
        )
    axes = []
    for k, axis_doc in enumerate(domain):
        path = f"domain[{k}]"
        if not isinstance(axis_doc, dict):
            raise ConfigError(f"field {path!r} must be an object")
        lower = _require(axis_doc, "lower", float, path)
        upper = _require(axis_doc, "upper", float, path)
        points = _require(axis_doc, "points", int, path)
        try:
            axes.append(AxisSpec(float(lower), float(upper), points))
        except ValueError as exc:
            raise ConfigError(f"field {path!r}: {exc}") from exc

    cfg = RunConfig(equations=equations, variables=variables, axes=axes)

    if "label" in doc:
        cfg.label = _require(doc, "label", str)
    if "mode" in doc:
        mode = _require(doc, "mode", str)
        try:
            cfg.mode = DetectionMode(mode)
        except ValueError:
            raise ConfigError(
                f"field 'mode' must be one of {[m.value for m in DetectionMode]}, got {mode!r}"
            ) from None
    if "newton" in doc:
        newton_doc = _require(doc, "newton", dict)
        defaults = NewtonOptions()
        kwargs = {}
        fields = {
            "residual_tol": float, "step_tol": float, "max_iterations": int,
            "divergence_bound": float, "jacobian": str,
        }
        for key, value in newton_doc.items():
            if key not in fields:
                raise ConfigError(f"unknown field 'newton.{key}'")
            kwargs[key] = _require(newton_doc, key, fields[key], "newton")
        try:
            cfg.newton = dataclasses.replace(defaults, **kwargs)
        except ValueError as exc:
            raise ConfigError(f"field 'newton': {exc}") from exc
    if "jacobian_expressions" in doc:
        jac = _require(doc, "jacobian_expressions", list)
        n = len(variables)
        if len(jac) != n or any(
            not isinstance(row, list) or len(row) != n or not all(isinstance(e, str) for e in row)
            for row in jac
        ):
            raise ConfigError(f"field 'jacobian_expressions' must be an {n}x{n} matrix of strings")
        cfg.jacobian_expressions = jac
    if "round_decimals" in doc:
        value = _require(doc, "round_decimals", int)
        if value < 0:
            raise ConfigError("field 'round_decimals' must be >= 0")
        cfg.round_decimals = value
    if "output" in doc:
        out = _require(doc, "output", dict)
        for key in out:
            if key not in ("format", "path"):
                raise ConfigError(f"unknown field 'output.{key}'")
        if "format" in out:
            fmt = _require(out, "format", str, "output")
            if fmt not in ("csv", "json"):
                raise ConfigError(f"field 'output.format' must be 'csv' or 'json', got {fmt!r}")
            cfg.output_format = fmt
        if "path" in out:
            cfg.output_path = _require(out, "path", str, "output")
    if "contours" in doc:
        contours = _require(doc, "contours", dict)
        cfg.contours_path = _require(contours, "path", str, "contours")
    if "figure" in doc:
        figure = _require(doc, "figure", dict)
        cfg.figure_path = _require(figure, "path", str, "figure")
    if "repetitions" in doc:
        reps = _require(doc, "repetitions", int)
        if reps < 1:
            raise ConfigError("field 'repetitions' must be >= 1")
        cfg.repetitions = reps

    try:
        cfg.problem()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_solutions_csv(solutions: SolutionSet, variables: list[str], stream) -> None:
    stream.write(",".join(variables) + ",residual_norm,iterations\n")
    for sol in solutions.solutions:
        cells = [_fmt(c) for c in sol.coordinates]
        cells.append(_fmt(sol.residual_norm))
        cells.append(str(sol.iterations))
        stream.write(",".join(cells) + "\n")


def write_solutions_jsonl(
    solutions: SolutionSet, variables: list[str], stream,
    config_echo: dict, elapsed_seconds: float,
) -> None:
    for sol in solutions.solutions:
        record = {name: float(c) for name, c in zip(variables, sol.coordinates)}
        record["residual_norm"] = float(sol.residual_norm)
        record["iterations"] = sol.iterations
        stream.write(json.dumps(record) + "\n")
    trailer = {
        "label": solutions.label,
        "solution_count": len(solutions),
        "config": config_echo,
        "elapsed_seconds": elapsed_seconds,
    }
    stream.write(json.dumps(trailer) + "\n")


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute a RunConfig end to end; returns the process exit status."""
    stdout = sys.stdout if stdout is None else stdout
    problem = cfg.problem()
    solver_config = cfg.solver_config()

    start = time.perf_counter()
    solutions = None
    for _ in range(cfg.repetitions):
        solutions = find_all_roots(problem, solver_config)
    elapsed = (time.perf_counter() - start) / cfg.repetitions

    try:
        if cfg.output_path is not None:
            with open(cfg.output_path, "w") as fh:
                _emit(cfg, solutions, fh, elapsed)
        else:
            _emit(cfg, solutions, stdout, elapsed)

        if cfg.contours_path is not None:
            dump_contours(problem, solver_config.grid, cfg.contours_path)
        if cfg.figure_path is not None:
            from .figures import render_contour_figure

            render_contour_figure(problem, solver_config.grid, solutions, cfg.figure_path)
    except OSError as exc:
        print(f"error: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _emit(cfg: RunConfig, solutions: SolutionSet, stream, elapsed: float) -> None:
    if cfg.output_format == "csv":
        write_solutions_csv(solutions, cfg.variables, stream)
    else:
        write_solutions_jsonl(solutions, cfg.variables, stream, cfg.echo(), elapsed)


def dump_contours(problem: Problem, g: DomainGrid, path: str) -> list[str]:
    """Write one CSV per function with its values over a 2D grid.

    Layout: header row holds the first variable's node values, the first
    column holds the second variable's node values, and body cell (r, c)
    is f(x1_c, x2_r).  `path` is created as a directory holding
    f1.csv..fn.csv.
    """
    if g.ndim != 2:
        raise ValueError("contour dump requires 2 variables")
    import os

    os.makedirs(path, exist_ok=True)
    x1_nodes, x2_nodes = g.axis_nodes()
    tensors = evaluate_grid(problem, g)
    paths = []
    for i, tensor in enumerate(tensors):
        file_path = os.path.join(path, f"f{i + 1}.csv")
        with open(file_path, "w") as fh:
            fh.write("," + ",".join(_fmt(v) for v in x1_nodes) + "\n")
            for r in range(len(x2_nodes)):
                row = [_fmt(x2_nodes[r])]
                row.extend(_fmt(tensor.values[c, r]) for c in range(len(x1_nodes)))
                fh.write(",".join(row) + "\n")
        paths.append(file_path)
    return paths


@dataclass(frozen=True)
class SweepRecord:
    ndim: int
    points: int
    mean_seconds: float | None
    std_seconds: float | None
    cell_count: int
    solution_count: int | None
    skipped_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.skipped_reason is not None


def estimated_bytes(ndim: int, points: int) -> int:
    """Rough working-set estimate: n node tensors plus mask/product scratch."""
    return 8 * points**ndim * (ndim + 2)


def scaling_sweep(
    dimensions: list[int],
    points_list: list[int],
    repetitions: int = 50,
    memory_budget: int = _DEFAULT_SWEEP_BUDGET,
) -> list[SweepRecord]:
    """Time the pipeline on the separable quadratic system per (n, N).

    Combinations whose estimated working set exceeds `memory_budget` bytes
    are skipped (reason "memory budget") instead of attempted.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    for n in dimensions:
        if n not in (2, 3, 4, 5):
            raise ValueError(f"sweep dimensions must be within 2..5, got {n}")
    for p in points_list:
        if p < 20:
            raise ValueError(f"sweep points must be >= 20, got {p}")

    records = []
    for n in dimensions:
        for points in points_list:
            cell_count = (points - 1) ** n
            if estimated_bytes(n, points) > memory_budget:
                records.append(
                    SweepRecord(n, points, None, None, cell_count, None, "memory budget")
                )
                continue
            problem, config = scaling_problem(n, points)
            times = []
            solutions = None
            for _ in range(repetitions):
                t0 = time.perf_counter()
                solutions = find_all_roots(problem, config)
                times.append(time.perf_counter() - t0)
            records.append(
                SweepRecord(
                    n,
                    points,
                    statistics.fmean(times),
                    statistics.stdev(times) if len(times) > 1 else 0.0,
                    cell_count,
                    len(solutions),
                )
            )
    return records


def write_sweep_csv(records: list[SweepRecord], stream) -> None:
    stream.write("n,points,mean_seconds,std_seconds,cell_count,solutions\n")
    for rec in records:
        if rec.skipped:
            continue
        stream.write(
            f"{rec.ndim},{rec.points},{_fmt(rec.mean_seconds)},{_fmt(rec.std_seconds)},"
            f"{rec.cell_count},{rec.solution_count}\n"
        )


# ---------------------------------------------------------------------------
# argparse wiring
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxroots",
        description="Find all real roots of a nonlinear system inside a box.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run a system from a JSON config file")
    p_solve.add_argument("config", help="path to the JSON config")
    p_solve.add_argument("--points", type=int, help="override every axis's point count")
    p_solve.add_argument("--mode", choices=[m.value for m in DetectionMode])
    p_solve.add_argument("--output", help="override the output path")
    p_solve.add_argument("--format", choices=["csv", "json"], dest="fmt")
    p_solve.add_argument("--repetitions", type=int)
    p_solve.add_argument("--figure", help="render a contour figure (2D only) to this path")

    p_bench = sub.add_parser("benchmark", help="run a built-in benchmark")
    p_bench.add_argument("id", choices=BENCHMARK_IDS)
    p_bench.add_argument("--halfwidth", type=float, default=2.0,
                         help="effati box half-width (2, 10 or 100)")
    p_bench.add_argument("--R", type=float, help="reactor recycle ratio")
    p_bench.add_argument("--points", type=int, help="per-axis resolution override")
    p_bench.add_argument("--repetitions", type=int, default=1)
    p_bench.add_argument("--output", help="write the solutions here instead of stdout")
    p_bench.add_argument("--format", choices=["csv", "json"], dest="fmt", default="csv")
    p_bench.add_argument("--figure", help="render a contour figure (2D only) to this path")

    p_cont = sub.add_parser("contours", help="dump 2D per-function value grids as CSV")
    group = p_cont.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="JSON config describing the system")
    group.add_argument("--benchmark", choices=BENCHMARK_IDS, dest="benchmark_id")
    p_cont.add_argument("--halfwidth", type=float, default=2.0)
    p_cont.add_argument("--R", type=float)
    p_cont.add_argument("--points", type=int, help="per-axis resolution override")
    p_cont.add_argument("--outdir", required=True, help="directory for the CSV files")
    p_cont.add_argument("--no-figure", action="store_true",
                        help="skip the rendered contour figure")

    p_sweep = sub.add_parser("sweep", help="time the solver over grid sizes")
    p_sweep.add_argument("--dimensions", default="2,3",
                         help="comma-separated dimensions from 2..5 (default 2,3)")
    p_sweep.add_argument("--min-points", type=int, default=20)
    p_sweep.add_argument("--max-points", type=int, default=100)
    p_sweep.add_argument("--step", type=int, default=10)
    p_sweep.add_argument("--repetitions", type=int, default=50)
    p_sweep.add_argument("--memory-budget", type=int, default=_DEFAULT_SWEEP_BUDGET,
                         help="byte budget above which an (n, N) pair is skipped")
    p_sweep.add_argument("--output", help="CSV path (default stdout)")
    p_sweep.add_argument("--figure", help="render the timing curves to this path")
    return parser


def _cmd_solve(args) -> int:
    try:
        with open(args.config) as fh:
            source = fh.read()
    except OSError as exc:
        print(f"error: cannot read config {args.config!r}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(source)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.points is not None:
        try:
            cfg.axes = [AxisSpec(ax.lower, ax.upper, args.points) for ax in cfg.axes]
        except ValueError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    if args.mode:
        cfg.mode = DetectionMode(args.mode)
    if args.output:
        cfg.output_path = args.output
    if args.fmt:
        cfg.output_format = args.fmt
    if args.repetitions:
        if args.repetitions < 1:
            print("config error: --repetitions must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        cfg.repetitions = args.repetitions
    if args.figure:
        cfg.figure_path = args.figure
    return run(cfg)


def _cmd_benchmark(args) -> int:
    try:
        bench = benchmark(args.id, halfwidth=args.halfwidth, R=args.R, points=args.points)
        if args.repetitions < 1:
            raise ValueError("--repetitions must be >= 1")
        report = run_benchmark(bench, repetitions=args.repetitions)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    problem, config = builtin_problem(bench)
    variables = list(problem.vars.names)
    try:
        if args.output:
            with open(args.output, "w") as fh:
                _emit_benchmark(args, report, variables, fh)
        else:
            _emit_benchmark(args, report, variables, sys.stdout)
        if args.figure:
            from .figures import render_contour_figure

            render_contour_figure(problem, config.grid, report.solutions, args.figure)
    except OSError as exc:
        print(f"error: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO

    verdict = ""
    if report.passed is not None:
        verdict = "PASS" if report.passed else "FAIL"
    print(
        f"{bench.label}: {report.solution_count} solutions"
        + (f" (expected {report.expected_solution_count}, {verdict})" if verdict else "")
        + f", mean {report.mean_seconds:.4f}s over {report.repetitions} run(s)",
        file=sys.stderr,
    )
    if report.passed is False:
        return 1
    return EXIT_OK


def _emit_benchmark(args, report, variables, stream) -> None:
    if args.fmt == "csv":
        write_solutions_csv(report.solutions, variables, stream)
    else:
        echo = {
            "benchmark": report.benchmark.id,
            "params": report.benchmark.params,
            "points": report.benchmark.grid.axes[0].points,
        }
        write_solutions_jsonl(report.solutions, variables, stream, echo, report.mean_seconds)


def _cmd_contours(args) -> int:
    try:
        if args.config:
            with open(args.config) as fh:
                cfg = parse_config(fh.read())
            if args.points is not None:
                cfg.axes = [AxisSpec(ax.lower, ax.upper, args.points) for ax in cfg.axes]
            problem = cfg.problem()
            grid = cfg.solver_config().grid
            solver_config = cfg.solver_config()
        else:
            bench = benchmark(args.benchmark_id, halfwidth=args.halfwidth, R=args.R,
                              points=args.points)
            problem, solver_config = builtin_problem(bench)
            grid = solver_config.grid
    except OSError as exc:
        print(f"error: cannot read config {args.config!r}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        paths = dump_contours(problem, grid, args.outdir)
        if not args.no_figure:
            from .figures import render_contour_figure
            import os

            solutions = find_all_roots(problem, solver_config)
            figure_path = os.path.join(args.outdir, "contours.png")
            render_contour_figure(problem, grid, solutions, figure_path)
            paths.append(figure_path)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        print(p, file=sys.stderr)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        dimensions = [int(tok) for tok in args.dimensions.split(",") if tok]
        if args.step < 1 or args.max_points < args.min_points:
            raise ValueError("invalid points range")
        points_list = list(range(args.min_points, args.max_points + 1, args.step))
        records = scaling_sweep(
            dimensions, points_list,
            repetitions=args.repetitions, memory_budget=args.memory_budget,
        )
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for rec in records:
        if rec.skipped:
            print(
                f"skipped n={rec.ndim} points={rec.points}: {rec.skipped_reason}",
                file=sys.stderr,
            )
    try:
        if args.output:
            with open(args.output, "w") as fh:
                write_sweep_csv(records, fh)
        else:
            write_sweep_csv(records, sys.stdout)
        if args.figure:
            from .figures import render_sweep_figure

            render_sweep_figure(records, args.figure)
    except OSError as exc:
        print(f"error: cannot write {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "benchmark": _cmd_benchmark,
        "contours": _cmd_contours,
        "sweep": _cmd_sweep,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
