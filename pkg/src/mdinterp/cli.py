"""Command-line front end: solve, check, sample, render.

Exit codes: 0 success; 2 unreadable/invalid input or bad flags; 3 solve
found no solution; 4 check verdict not stationary (including feasibility
failures).  MDI_THREADS caps the multistart worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .io_formats import (
    FormatError,
    parse_problem,
    parse_result,
    result_to_dict,
    sampled_path_csv,
    serialize_result,
)
from .model import ProblemError
from .nlp import NoSolutionFound, SolveOutcome, SolverConfig, solve
from .render import render_svg
from .rollout import residuals, rollout_path, sample_path
from .stationarity import audit

__all__ = ["main"]

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_NO_SOLUTION = 3
EXIT_NOT_STATIONARY = 4

FEASIBILITY_TOL = 1e-8


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from None


def _cmd_solve(args) -> int:
    problem = parse_problem(_load_json(args.problem))
    config = SolverConfig(
        coarse_tol=args.coarse_tol,
        refine_tol=args.refine_tol,
        prune_eps=args.prune_eps,
        multistart_count=args.starts,
        random_seed=args.seed,
    )
    try:
        outcome: SolveOutcome = solve(problem, config)
    except NoSolutionFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    best = outcome.best
    print(f"{best.word}  t_f = {best.total_length:.12f}")
    if args.all:
        for sol in outcome.solutions[1:]:
            print(f"{sol.word}  t_f = {sol.total_length:.12f}")
    if args.out:
        out = Path(args.out)
        to_write = outcome.solutions if args.all else outcome.solutions[:1]
        for k, sol in enumerate(to_write):
            report = audit(sol)
            doc = result_to_dict(
                sol,
                report=report,
                outcome=outcome,
                record=outcome.records[k],
                config=config,
            )
            target = out if k == 0 else out.with_name(f"{out.stem}_{k}{out.suffix}")
            target.write_text(serialize_result(doc), encoding="utf-8")
            print(f"wrote {target}")
    return EXIT_OK


def _cmd_check(args) -> int:
    solution, _ = parse_result(_load_json(args.result))
    spec = solution.problem
    ends, _ = rollout_path(spec, solution.xi)
    nodes = spec.nodes()
    node_err = max(
        float(np.hypot(e.x - nodes[i + 1, 0], e.y - nodes[i + 1, 1]))
        for i, e in enumerate(ends)
    )
    res = residuals(spec, solution.xi)
    feas = max(node_err, abs(res.r_sin), abs(res.r_cos))
    print(f"word          {solution.word}")
    print(f"t_f           {solution.total_length:.12f}")
    print(f"feasibility   max node error {node_err:.3e}, "
          f"terminal heading residual {max(abs(res.r_sin), abs(res.r_cos)):.3e}")
    if feas > FEASIBILITY_TOL:
        print(f"verdict       infeasible (tolerance {FEASIBILITY_TOL:.1e})")
        return EXIT_NOT_STATIONARY
    report = audit(solution)
    print(f"stage classes {' '.join(report.stage_classes)}")
    if report.lambda0 is not None:
        print(f"lambda0       {report.lambda0}")
        rho = " ".join(f"{v:.6f}" for v in report.rho)
        phi = " ".join(f"{v:.6f}" for v in report.phi)
        print(f"rho           {rho}")
        print(f"phi           {phi}")
    print(f"midpoint      {' '.join(report.midpoint_verdicts) or '-'} "
          f"({'ok' if report.midpoint_ok else 'violated'})")
    print(f"subarc count  {report.subarc_count} <= {report.subarc_bound}: "
          f"{'ok' if report.subarc_bound_ok else 'violated'}")
    if report.detail:
        print(f"detail        {report.detail}")
    print(f"verdict       {report.verdict}")
    return EXIT_OK if report.verdict == "stationary" else EXIT_NOT_STATIONARY


def _cmd_sample(args) -> int:
    if args.ds <= 0:
        print("error: --ds must be positive", file=sys.stderr)
        return EXIT_BAD_INPUT
    solution, _ = parse_result(_load_json(args.result))
    path = sample_path(solution.problem, solution.xi, args.ds)
    text = sampled_path_csv(path)
    if args.csv:
        Path(args.csv).write_text(text, encoding="utf-8")
        print(f"wrote {args.csv} ({len(path)} rows)")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_render(args) -> int:
    if args.width <= 0:
        print("error: --width must be positive", file=sys.stderr)
        return EXIT_BAD_INPUT
    solution, _ = parse_result(_load_json(args.result))
    Path(args.svg).write_text(render_svg(solution, width=args.width), encoding="utf-8")
    print(f"wrote {args.svg}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdi",
        description="Shortest curvature-bounded interpolating curves through waypoints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem file")
    p_solve.add_argument("problem", help="problem JSON file")
    p_solve.add_argument("--starts", type=int, default=32, help="multistart count")
    p_solve.add_argument("--seed", type=int, default=0, help="random seed")
    p_solve.add_argument("--coarse-tol", type=float, default=1e-8)
    p_solve.add_argument("--refine-tol", type=float, default=1e-12)
    p_solve.add_argument("--prune-eps", type=float, default=1e-6)
    p_solve.add_argument("--out", help="result JSON output path")
    p_solve.add_argument(
        "--all", action="store_true", help="write/print all distinct solutions"
    )
    p_solve.set_defaults(func=_cmd_solve)

    p_check = sub.add_parser("check", help="audit a result file")
    p_check.add_argument("result", help="result JSON file")
    p_check.set_defaults(func=_cmd_check)

    p_sample = sub.add_parser("sample", help="export dense samples as CSV")
    p_sample.add_argument("result", help="result JSON file")
    p_sample.add_argument("--ds", type=float, required=True, help="max arclength step")
    p_sample.add_argument("--csv", help="CSV output path (default: stdout)")
    p_sample.set_defaults(func=_cmd_sample)

    p_render = sub.add_parser("render", help="render a result to SVG")
    p_render.add_argument("result", help="result JSON file")
    p_render.add_argument("--svg", required=True, help="SVG output path")
    p_render.add_argument("--width", type=int, default=800, help="image width in px")
    p_render.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ProblemError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
