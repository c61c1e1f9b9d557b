"""Domain types shared by the solver, the rollout engine and the checkers.

An interpolation problem asks for the shortest planar curve of curvature at
most ``a`` that runs from an oriented start point through an ordered list of
waypoints to an oriented end point.  Candidate curves are encoded by an N x 5
matrix of nonnegative subarc lengths: every stage (the piece between two
consecutive nodes) consists of five slots whose turn directions are fixed to
the pattern L, R, S, L, R (left arc, right arc, straight, left arc, right
arc).  A slot of length zero is simply absent from the curve.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
import numpy as np

__all__ = [
    "SLOT_KINDS",
    "DistinctNodesViolation",
    "NonFiniteInput",
    "NonpositiveCurvatureBound",
    "OrientedPoint",
    "PathSolution",
    "ProblemError",
    "ProblemSpec",
    "SampledPath",
    "StageHeadings",
    "StationarityReport",
    "SubarcKind",
    "SubarcMatrix",
    "Waypoint",
    "validate_problem",
    "word_of",
]

# Tolerance below which two consecutive nodes count as coincident.
DISTINCT_NODES_TOL = 1e-12


class ProblemError(ValueError):
    """Base class for invalid problem data."""


class NonFiniteInput(ProblemError):
    """A coordinate, heading or bound is NaN or infinite."""


class NonpositiveCurvatureBound(ProblemError):
    """The curvature bound must be strictly positive."""


class DistinctNodesViolation(ProblemError):
    """Two consecutive nodes coincide."""


@dataclass(frozen=True)
class OrientedPoint:
    """Planar position plus heading angle (radians, unnormalized).

    Headings are deliberately kept as raw reals rather than wrapped into
    (-pi, pi]: curves may wind, and the heading recurrences depend on the
    winding.  Wrapping happens only at display or comparison time, via
    sin/cos pairs.
    """

    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise NonFiniteInput(f"non-finite oriented point {(self.x, self.y, self.theta)}")


@dataclass(frozen=True)
class Waypoint:
    """An interior node the curve must pass through (heading free)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise NonFiniteInput(f"non-finite waypoint {(self.x, self.y)}")


@dataclass(frozen=True)
class ProblemSpec:
    """Endpoints, interior waypoints and the curvature bound.

    With ``N - 1`` waypoints the curve has ``N`` stages; stage ``i`` joins
    node ``i - 1`` to node ``i`` where node 0 is the start and node ``N``
    the end.
    """

    start: OrientedPoint
    end: OrientedPoint
    waypoints: tuple[Waypoint, ...]
    curvature_bound: float

    def __init__(self, start, end, waypoints, curvature_bound):
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)
        object.__setattr__(self, "waypoints", tuple(waypoints))
        object.__setattr__(self, "curvature_bound", float(curvature_bound))

    @property
    def n_stages(self) -> int:
        return len(self.waypoints) + 1

    def nodes(self) -> np.ndarray:
        """All node positions as an (N+1, 2) array, start first."""
        pts = [(self.start.x, self.start.y)]
        pts += [(w.x, w.y) for w in self.waypoints]
        pts.append((self.end.x, self.end.y))
        return np.asarray(pts, dtype=float)


def validate_problem(spec: ProblemSpec) -> ProblemSpec:
    """Check the ProblemSpec invariants, returning the spec unchanged.

    Raises NonpositiveCurvatureBound, NonFiniteInput or
    DistinctNodesViolation on bad data.  Idempotent.
    """
    a = spec.curvature_bound
    if not math.isfinite(a):
        raise NonFiniteInput("curvature bound is not finite")
    if a <= 0:
        raise NonpositiveCurvatureBound(f"curvature bound must be > 0, got {a}")
    # OrientedPoint/Waypoint constructors enforce finiteness already, but a
    # spec assembled from raw tuples could bypass them.
    nodes = spec.nodes()
    if not np.all(np.isfinite(nodes)):
        raise NonFiniteInput("non-finite node coordinates")
    if not (math.isfinite(spec.start.theta) and math.isfinite(spec.end.theta)):
        raise NonFiniteInput("non-finite endpoint heading")
    gaps = np.hypot(*(nodes[1:] - nodes[:-1]).T)
    bad = np.nonzero(gaps <= DISTINCT_NODES_TOL)[0]
    if bad.size:
        i = int(bad[0])
        raise DistinctNodesViolation(
            f"consecutive nodes {i} and {i + 1} coincide (distance {gaps[i]:.3e})"
        )
    return spec


class SubarcKind(enum.Enum):
    """Turn direction of a subarc: left arc, right arc or straight."""

    L = "L"
    R = "R"
    S = "S"

    @property
    def sign(self) -> int:
        """Sign of the curvature command: +1 (L), -1 (R), 0 (S)."""
        return {"L": 1, "R": -1, "S": 0}[self.value]


#: Fixed slot-to-kind mapping for the five slots of every stage.
SLOT_KINDS: tuple[SubarcKind, ...] = (
    SubarcKind.L,
    SubarcKind.R,
    SubarcKind.S,
    SubarcKind.L,
    SubarcKind.R,
)

#: Curvature-command sign per slot (+1, -1, 0, +1, -1).
SLOT_SIGNS = np.array([k.sign for k in SLOT_KINDS], dtype=float)


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SubarcMatrix:
    """N x 5 matrix of subarc lengths, one row per stage.

    Entry (i, j) is the arc length of slot j in stage i; all entries are
    nonnegative.  This matrix is the full decision-variable set of the
    solver.
    """

    xi: np.ndarray

    def __init__(self, xi):
        arr = np.asarray(xi, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 5 or arr.shape[0] < 1:
            raise ValueError(f"subarc matrix must be N x 5 with N >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("subarc matrix has non-finite entries")
        if np.any(arr < 0):
            raise ValueError("subarc matrix has negative entries")
        object.__setattr__(self, "xi", _readonly(arr + 0.0))  # +0.0 clears -0.0

    @property
    def n_stages(self) -> int:
        return self.xi.shape[0]

    @property
    def total(self) -> float:
        return float(self.xi.sum())

    def flat(self) -> np.ndarray:
        return self.xi.reshape(-1)


def word_of(xi: SubarcMatrix | np.ndarray, prune_eps: float) -> str:
    """Subarc word of a matrix: per stage, L/R/S for each slot longer than
    ``prune_eps``, slots in order, stages joined by "|".
    """
    if prune_eps < 0:
        raise ValueError("prune_eps must be >= 0")
    arr = xi.xi if isinstance(xi, SubarcMatrix) else np.asarray(xi, dtype=float)
    stages = []
    for row in arr:
        stages.append("".join(k.value for k, v in zip(SLOT_KINDS, row) if v > prune_eps))
    word = "|".join(stages)
    return "" if word == "|" * (len(stages) - 1) else word


@dataclass(frozen=True)
class StageHeadings:
    """Headings at the five slot boundaries of each stage.

    Column j of ``values`` holds (theta0, theta1, theta2, theta4, theta5)
    for the respective stage: theta0 is the stage entry heading, theta1/2
    the headings after slots 1 and 2, theta4 after slot 4 and theta5 the
    stage exit heading.  theta0 of stage i+1 equals theta5 of stage i
    bitwise; nothing is wrapped.
    """

    values: np.ndarray  # (N, 5)

    def __init__(self, values):
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 5:
            raise ValueError(f"stage headings must be N x 5, got {arr.shape}")
        object.__setattr__(self, "values", _readonly(arr))

    @property
    def theta0(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def theta1(self) -> np.ndarray:
        return self.values[:, 1]

    @property
    def theta2(self) -> np.ndarray:
        return self.values[:, 2]

    @property
    def theta4(self) -> np.ndarray:
        return self.values[:, 3]

    @property
    def theta5(self) -> np.ndarray:
        return self.values[:, 4]


@dataclass(frozen=True)
class PathSolution:
    """A candidate curve: subarc matrix plus derived quantities.

    ``total_length`` always equals the sum of the matrix entries; ``word``
    lists the slots longer than ``prune_eps``.  Build instances through
    :func:`make_solution` so the derived fields stay consistent.
    """

    problem: ProblemSpec
    xi: SubarcMatrix
    headings: StageHeadings
    total_length: float
    word: str
    prune_eps: float

    def __post_init__(self):
        s = self.xi.total
        if abs(self.total_length - s) > 1e-12 * max(1.0, abs(s)):
            raise ValueError("total_length does not equal the sum of subarc lengths")


@dataclass(frozen=True)
class SampledPath:
    """Dense samples of a curve at increasing arclength values.

    ``u`` holds the signed curvature command of the subarc each sample lies
    on (one of 0, +a, -a).
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    u: np.ndarray

    def __init__(self, t, x, y, theta, u):
        for name, v in (("t", t), ("x", x), ("y", y), ("theta", theta), ("u", u)):
            object.__setattr__(self, name, _readonly(np.asarray(v, dtype=float)))

    def __len__(self) -> int:
        return self.t.shape[0]


@dataclass(frozen=True)
class StationarityReport:
    """Outcome of auditing a solution against the necessary conditions.

    ``lambda0`` is the objective-multiplier normalization (1 = normal,
    0 = abnormal); ``rho``/``phi`` are the reconstructed per-stage adjoint
    constants (the constant adjoint pair of stage i is
    ``rho[i]*cos(phi[i]), rho[i]*sin(phi[i])``).  ``verdict`` is one of
    "stationary", "not stationary", "inconclusive".  If any stage contains
    a straight subarc the curve cannot be abnormal, so lambda0 is 1.
    """

    verdict: str
    lambda0: int | None
    rho: tuple[float, ...]
    phi: tuple[float, ...]
    stage_classes: tuple[str, ...]
    node_residuals: tuple[float, ...]
    midpoint_ok: bool
    midpoint_verdicts: tuple[str, ...]
    subarc_count: int
    subarc_bound: int
    subarc_bound_ok: bool
    detail: str = ""

    def __post_init__(self):
        if self.verdict not in ("stationary", "not stationary", "inconclusive"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == "stationary" and any("S" in c for c in self.stage_classes):
            if self.lambda0 != 1:
                raise ValueError("a curve with a straight subarc must be normal")
