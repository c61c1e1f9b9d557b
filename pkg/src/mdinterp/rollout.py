"""Forward propagation of curves defined by a subarc matrix.

Two independent derivations of the same geometry live here on purpose: the
closed-form per-stage closure residuals (via the kernels) and the sequential
subarc-by-subarc propagation.  They are cross-checked in the test suite,
which guards the sign conventions of the trigonometric telescoping.

No angle is ever wrapped: multi-winding curves are legitimate and the
terminal heading condition is expressed through sin/cos residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import (
    SLOT_KINDS,
    OrientedPoint,
    PathSolution,
    ProblemSpec,
    SampledPath,
    StageHeadings,
    SubarcKind,
    SubarcMatrix,
    word_of,
)

__all__ = [
    "StageResidual",
    "propagate_subarc",
    "stage_headings",
    "rollout_path",
    "residuals",
    "sample_path",
    "make_solution",
]


def propagate_subarc(
    p: OrientedPoint, kind: SubarcKind, length: float, a: float
) -> OrientedPoint:
    """End configuration after following one subarc from ``p``.

    L turns left with curvature +a, R turns right with -a, S goes straight.
    Length 0 is the identity.
    """
    if length < 0:
        raise ValueError("subarc length must be >= 0")
    if a <= 0:
        raise ValueError("curvature bound must be > 0")
    if kind is SubarcKind.S:
        return OrientedPoint(
            p.x + length * math.cos(p.theta), p.y + length * math.sin(p.theta), p.theta
        )
    u = kind.sign * a
    theta1 = p.theta + u * length
    return OrientedPoint(
        p.x + (math.sin(theta1) - math.sin(p.theta)) / u,
        p.y - (math.cos(theta1) - math.cos(p.theta)) / u,
        theta1,
    )


def stage_headings(theta0: float, xi_row, a: float) -> tuple[float, float, float, float, float]:
    """Headings (theta0, theta1, theta2, theta4, theta5) for one stage row.

    These are definitions, not solved-for quantities: theta1 = theta0 +
    a*xi1, theta2 = theta1 - a*xi2, theta4 = theta2 + a*xi4, theta5 =
    theta4 - a*xi5.
    """
    xi1, xi2, _, xi4, xi5 = (float(v) for v in xi_row)
    t1 = theta0 + a * xi1
    t2 = t1 - a * xi2
    t4 = t2 + a * xi4
    t5 = t4 - a * xi5
    return (theta0, t1, t2, t4, t5)


def rollout_path(
    spec: ProblemSpec, xi: SubarcMatrix
) -> tuple[list[OrientedPoint], StageHeadings]:
    """Propagate the start configuration through all 5N subarcs.

    Returns the configuration at the end of each stage (which should land
    on the corresponding node for a feasible matrix) and the heading table.
    Heading continuity across stages holds bitwise by construction.
    """
    if xi.n_stages != spec.n_stages:
        raise ValueError(f"matrix has {xi.n_stages} stages, problem needs {spec.n_stages}")
    a = spec.curvature_bound
    p = spec.start
    ends: list[OrientedPoint] = []
    for row in xi.xi:
        for kind, length in zip(SLOT_KINDS, row):
            p = propagate_subarc(p, kind, float(length), a)
        ends.append(p)
    table = kernels.heading_table(xi.flat(), spec.start.theta, a)
    return ends, StageHeadings(table)


@dataclass(frozen=True)
class StageResidual:
    """Constraint residuals of a candidate matrix.

    ``rx``/``ry`` are the per-stage position-closure residuals, ``r_sin``/
    ``r_cos`` the terminal-heading residuals.  A feasible matrix has all
    2N + 2 values equal to zero.
    """

    rx: np.ndarray
    ry: np.ndarray
    r_sin: float
    r_cos: float

    def as_array(self) -> np.ndarray:
        n = self.rx.shape[0]
        out = np.empty(2 * n + 2)
        out[0 : 2 * n : 2] = self.rx
        out[1 : 2 * n : 2] = self.ry
        out[2 * n] = self.r_sin
        out[2 * n + 1] = self.r_cos
        return out

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.as_array())))


def residuals(spec: ProblemSpec, xi: SubarcMatrix) -> StageResidual:
    """Closed-form closure residuals of ``xi`` for ``spec``."""
    if xi.n_stages != spec.n_stages:
        raise ValueError(f"matrix has {xi.n_stages} stages, problem needs {spec.n_stages}")
    res = kernels.closure_residuals(
        xi.flat(), spec.nodes(), spec.start.theta, spec.end.theta, spec.curvature_bound
    )
    n = spec.n_stages
    return StageResidual(
        rx=res[0 : 2 * n : 2].copy(),
        ry=res[1 : 2 * n : 2].copy(),
        r_sin=float(res[2 * n]),
        r_cos=float(res[2 * n + 1]),
    )


def sample_path(spec: ProblemSpec, xi: SubarcMatrix, ds: float) -> SampledPath:
    """Sample the curve at arclength steps of at most ``ds``.

    Every surviving subarc endpoint is hit exactly, so the switching
    structure is visible in the output; the ``u`` column carries each
    subarc's curvature command.  Zero-length subarcs contribute nothing.
    """
    if ds <= 0:
        raise ValueError("ds must be > 0")
    a = spec.curvature_bound
    p = spec.start
    t_acc = 0.0
    ts: list[float] = []
    xs: list[float] = []
    ys: list[float] = []
    thetas: list[float] = []
    us: list[float] = []
    last = p
    last_u = 0.0
    first = True
    for row in xi.xi:
        for kind, length in zip(SLOT_KINDS, row):
            length = float(length)
            if length == 0.0:
                continue
            u = kind.sign * a
            if first:
                last_u = u
                first = False
            nsteps = max(1, math.ceil(length / ds - 1e-9))
            for k in range(nsteps):
                q = propagate_subarc(p, kind, length * k / nsteps, a)
                ts.append(t_acc + length * k / nsteps)
                xs.append(q.x)
                ys.append(q.y)
                thetas.append(q.theta)
                us.append(u)
            p = propagate_subarc(p, kind, length, a)
            t_acc += length
            last = p
            last_u = u
    ts.append(t_acc)
    xs.append(last.x)
    ys.append(last.y)
    thetas.append(last.theta)
    us.append(last_u)
    return SampledPath(ts, xs, ys, thetas, us)


def make_solution(spec: ProblemSpec, xi: SubarcMatrix, prune_eps: float) -> PathSolution:
    """Assemble a PathSolution with consistent derived fields."""
    _, headings = rollout_path(spec, xi)
    return PathSolution(
        problem=spec,
        xi=xi,
        headings=headings,
        total_length=xi.total,
        word=word_of(xi, prune_eps),
        prune_eps=prune_eps,
    )
