"""Problem/result JSON documents and CSV path export.

Numbers round-trip exactly: floats are emitted with ``repr`` (shortest
round-trip form), so parse(serialize(x)) reproduces every numeric field
bitwise.  JSON schemas for both documents live in ``schemas/`` at the
repository root.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from . import kernels
from .model import (
    OrientedPoint,
    PathSolution,
    ProblemSpec,
    SampledPath,
    StationarityReport,
    SubarcMatrix,
    Waypoint,
    validate_problem,
)
from .nlp import SolveOutcome, SolverConfig, StartRecord
from .rollout import make_solution

__all__ = [
    "FormatError",
    "parse_problem",
    "parse_result",
    "problem_to_dict",
    "result_to_dict",
    "sampled_path_csv",
    "serialize_problem",
    "serialize_result",
]

CSV_HEADER = "t,x,y,theta,u"


class FormatError(ValueError):
    """Malformed problem or result document."""


def _require(doc: dict, key: str, types) -> Any:
    if key not in doc:
        raise FormatError(f"missing key {key!r}")
    val = doc[key]
    if not isinstance(val, types):
        raise FormatError(f"key {key!r} has wrong type {type(val).__name__}")
    return val


def _number(doc: dict, key: str) -> float:
    return float(_require(doc, key, (int, float)))


def _point(doc: dict, key: str) -> OrientedPoint:
    sub = _require(doc, key, dict)
    return OrientedPoint(_number(sub, "x"), _number(sub, "y"), _number(sub, "theta"))


def problem_to_dict(spec: ProblemSpec) -> dict:
    return {
        "curvature_bound": spec.curvature_bound,
        "start": {"x": spec.start.x, "y": spec.start.y, "theta": spec.start.theta},
        "end": {"x": spec.end.x, "y": spec.end.y, "theta": spec.end.theta},
        "waypoints": [{"x": w.x, "y": w.y} for w in spec.waypoints],
    }


def parse_problem(doc: dict) -> ProblemSpec:
    """Dict -> validated ProblemSpec; raises FormatError / ProblemError."""
    if not isinstance(doc, dict):
        raise FormatError("problem document must be a JSON object")
    waypoints = []
    for i, w in enumerate(_require(doc, "waypoints", list)):
        if not isinstance(w, dict):
            raise FormatError(f"waypoint {i} must be an object")
        waypoints.append(Waypoint(_number(w, "x"), _number(w, "y")))
    spec = ProblemSpec(
        start=_point(doc, "start"),
        end=_point(doc, "end"),
        waypoints=tuple(waypoints),
        curvature_bound=_number(doc, "curvature_bound"),
    )
    return validate_problem(spec)


def serialize_problem(spec: ProblemSpec) -> str:
    return json.dumps(problem_to_dict(spec), indent=2) + "\n"


def _report_to_dict(report: StationarityReport) -> dict:
    return {
        "verdict": report.verdict,
        "lambda0": report.lambda0,
        "rho": list(report.rho),
        "phi": list(report.phi),
        "stage_classes": list(report.stage_classes),
        "node_residuals": list(report.node_residuals),
        "midpoint_ok": report.midpoint_ok,
        "midpoint_verdicts": list(report.midpoint_verdicts),
        "subarc_count": report.subarc_count,
        "subarc_bound": report.subarc_bound,
        "subarc_bound_ok": report.subarc_bound_ok,
        "detail": report.detail,
    }


def result_to_dict(
    solution: PathSolution,
    report: StationarityReport | None = None,
    outcome: SolveOutcome | None = None,
    record: StartRecord | None = None,
    config: SolverConfig | None = None,
) -> dict:
    h = solution.headings.values
    doc = {
        "format": "mdi-result/1",
        "problem": problem_to_dict(solution.problem),
        "word": solution.word,
        "xi": [[float(v) for v in row] for row in solution.xi.xi],
        "total_length": solution.total_length,
        "prune_eps": solution.prune_eps,
        "stage_headings": {
            "theta0": [float(v) for v in h[:, 0]],
            "theta1": [float(v) for v in h[:, 1]],
            "theta2": [float(v) for v in h[:, 2]],
            "theta4": [float(v) for v in h[:, 3]],
            "theta5": [float(v) for v in h[:, 4]],
        },
    }
    if report is not None:
        doc["stationarity"] = _report_to_dict(report)
    solver: dict[str, Any] = {"backend": kernels.BACKEND}
    if outcome is not None:
        solver.update(
            starts_attempted=outcome.starts_attempted,
            starts_converged=outcome.starts_converged,
            seed=outcome.random_seed,
        )
    if record is not None:
        solver.update(
            iterations=record.iterations,
            residual_norm=record.residual_norm,
            kkt_norm=record.kkt_norm,
            classifiable=record.classifiable,
        )
    if config is not None:
        solver.update(
            coarse_tol=config.coarse_tol,
            refine_tol=config.refine_tol,
            prune_eps=config.prune_eps,
        )
    doc["solver"] = solver
    return doc


def parse_result(doc: dict) -> tuple[PathSolution, dict]:
    """Dict -> (PathSolution, raw document).

    The solution is rebuilt from the problem and the subarc matrix alone;
    derived fields (headings, word, total length) are recomputed rather
    than trusted, so a corrupted matrix shows up downstream as rollout
    infeasibility rather than silently inconsistent metadata.
    """
    if not isinstance(doc, dict):
        raise FormatError("result document must be a JSON object")
    spec = parse_problem(_require(doc, "problem", dict))
    xi_rows = _require(doc, "xi", list)
    try:
        xi = np.asarray(xi_rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad subarc matrix: {exc}") from None
    if xi.ndim != 2 or xi.shape != (spec.n_stages, 5):
        raise FormatError(
            f"subarc matrix must be {spec.n_stages} x 5, got {list(xi.shape)}"
        )
    if np.any(xi < 0) or not np.all(np.isfinite(xi)):
        raise FormatError("subarc matrix entries must be finite and nonnegative")
    prune_eps = float(doc.get("prune_eps", 1e-6))
    solution = make_solution(spec, SubarcMatrix(xi), prune_eps)
    return solution, doc


def serialize_result(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def sampled_path_csv(path: SampledPath) -> str:
    """CSV with header ``t,x,y,theta,u``, 15 significant digits, LF endings."""
    lines = [CSV_HEADER]
    for t, x, y, theta, u in zip(path.t, path.x, path.y, path.theta, path.u):
        lines.append(f"{t:.15g},{x:.15g},{y:.15g},{theta:.15g},{u:.15g}")
    return "\n".join(lines) + "\n"
