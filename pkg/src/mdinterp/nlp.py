"""Two-phase multistart solver for the arc-length program.

The program has 5N nonnegative variables (the subarc lengths), a linear
objective (their sum) and 2N + 2 equality constraints (per-stage position
closure plus the terminal heading through sin/cos).  The workflow follows
the structure-detection idea: a coarse local solve finds which subarcs the
solution uses, near-zero subarcs are pruned away, and the surviving
structure is re-solved to high accuracy.  Multistart over perturbed
interior headings explores different switching structures.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .dubins import initial_headings, seed_from_dubins
from .model import PathSolution, ProblemSpec, SubarcMatrix, validate_problem, word_of
from .optimize import (
    BoxProblem,
    LocalResult,
    augmented_lagrangian,
    kkt_measures,
    newton_polish,
)
from .rollout import make_solution

__all__ = [
    "NlpInstance",
    "NoSolutionFound",
    "SolveOutcome",
    "SolverConfig",
    "StartRecord",
    "StructureInfeasible",
    "assemble",
    "prune_and_refine",
    "solve",
    "solve_local",
    "worker_count",
]

# Tolerance below which the Newton polish takes over from the
# augmented-Lagrangian loop.
_POLISH_THRESHOLD = 1e-9


class NoSolutionFound(RuntimeError):
    """Every start failed to produce a refined solution."""


class StructureInfeasible(RuntimeError):
    """The pruned switching structure cannot satisfy the constraints."""


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and multistart controls for :func:`solve`."""

    coarse_tol: float = 1e-8
    refine_tol: float = 1e-12
    prune_eps: float = 1e-6
    multistart_count: int = 32
    max_outer_iterations: int = 40
    max_inner_iterations: int = 60
    random_seed: int = 0

    def __post_init__(self):
        if not (0 < self.refine_tol <= self.coarse_tol):
            raise ValueError("need 0 < refine_tol <= coarse_tol")
        if not self.prune_eps > self.refine_tol:
            raise ValueError("need prune_eps > refine_tol")
        if self.multistart_count < 1:
            raise ValueError("need at least one start")


@dataclass(frozen=True)
class NlpInstance:
    """Assembled program: residual/Jacobian callables over the flat 5N vector."""

    spec: ProblemSpec
    nodes: np.ndarray
    n: int
    m: int

    def residual(self, x: np.ndarray) -> np.ndarray:
        s = self.spec
        return kernels.closure_residuals(x, self.nodes, s.start.theta, s.end.theta, s.curvature_bound)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        s = self.spec
        return kernels.closure_jacobian(x, self.nodes, s.start.theta, s.end.theta, s.curvature_bound)

    def hessian(self, x: np.ndarray, nu: np.ndarray) -> np.ndarray:
        s = self.spec
        return kernels.lagrangian_hessian(
            x, self.nodes, s.start.theta, s.end.theta, s.curvature_bound, nu
        )

    def objective(self, x: np.ndarray) -> float:
        return float(np.sum(x))


def assemble(spec: ProblemSpec) -> NlpInstance:
    """Build the program for a validated problem: 5N variables, 2N+2 constraints."""
    spec = validate_problem(spec)
    n = spec.n_stages
    return NlpInstance(spec=spec, nodes=spec.nodes(), n=5 * n, m=2 * n + 2)


def _polish_first(problem: BoxProblem, z0: np.ndarray, tol: float) -> LocalResult | None:
    """Newton attempt for starts that are already near a first-order point.

    A start within the convergence basin (small constraint residual and
    small projected stationarity) reconverges to the nearby solution
    directly, which both preserves locality and skips the outer loop.
    Returns None when the start is not near-stationary or the attempt did
    not reach tolerance.
    """
    res0 = problem.residual(z0)
    jac0 = problem.jacobian(z0)
    feas0, stat0, nu0 = kkt_measures(z0, res0, jac0)
    if feas0 < tol and stat0 < tol:
        return LocalResult(z0.copy(), True, "converged", 0, 0, feas0, stat0, nu0)
    if feas0 > 0.05 or stat0 > 0.05:
        return None
    interior = z0 > 1e-9
    if not interior.any():
        return None
    z, nu, _, _ = newton_polish(problem, z0, interior, tol, nu0=nu0)
    if np.any(z < 0):
        return None
    res = problem.residual(z)
    jac = problem.jacobian(z)
    feas, stat, _ = kkt_measures(z, res, jac)
    if feas < tol and stat < tol:
        return LocalResult(z, True, "converged", 0, 0, feas, stat, nu)
    return None


def _reduced_problem(instance: NlpInstance, free: np.ndarray) -> BoxProblem:
    idx = np.nonzero(free)[0]

    def expand(z):
        x = np.zeros(instance.n)
        x[idx] = z
        return x

    return BoxProblem(
        n=idx.size,
        residual=lambda z: instance.residual(expand(z)),
        jacobian=lambda z: instance.jacobian(expand(z))[:, idx],
        hessian=lambda z, nu: instance.hessian(expand(z), nu)[np.ix_(idx, idx)],
    )


def solve_local(
    instance: NlpInstance,
    x0,
    tol: float,
    max_outer: int = 40,
    max_inner: int = 60,
    free_mask: np.ndarray | None = None,
) -> LocalResult:
    """Local solve from ``x0``: augmented Lagrangian plus Newton polish.

    ``free_mask`` fixes the masked-out variables at zero (used by the
    refinement phase).  The result carries the full-length iterate; its
    ``status`` is "converged", "max_iterations" (best iterate returned with
    diagnostics) or "diverged_penalty".
    """
    x0 = np.asarray(
        x0.flat() if isinstance(x0, SubarcMatrix) else x0, dtype=float
    ).reshape(-1)
    if x0.size != instance.n:
        raise ValueError(f"start point has size {x0.size}, expected {instance.n}")
    if np.any(x0 < 0):
        raise ValueError("start point must be nonnegative")
    free = np.ones(instance.n, dtype=bool) if free_mask is None else np.asarray(free_mask, bool)
    idx = np.nonzero(free)[0]
    problem = _reduced_problem(instance, free)
    z0 = x0[idx]

    result = _polish_first(problem, z0, tol)
    if result is None:
        al_tol = max(tol, _POLISH_THRESHOLD)
        result = augmented_lagrangian(
            problem, z0, al_tol, max_outer=max_outer, max_inner=max_inner
        )
    z = result.x
    nu = result.multipliers
    if max(result.feasibility, result.stationarity) >= tol and result.feasibility < 1e-4:
        # Newton endgame on the first-order system: positive components are
        # polished, components parked at the bound stay there.
        interior = z > 1e-9
        if interior.any():
            z_pol, nu_pol, _, _ = newton_polish(problem, z, interior, tol, nu0=nu)
            if np.all(z_pol >= 0):
                res_p = problem.residual(z_pol)
                jac_p = problem.jacobian(z_pol)
                feas_p, stat_p, _ = kkt_measures(z_pol, res_p, jac_p)
                if max(feas_p, stat_p) <= max(result.feasibility, result.stationarity):
                    z, nu = z_pol, nu_pol
                    result = replace(result, feasibility=feas_p, stationarity=stat_p)
    done = result.feasibility < tol and result.stationarity < tol
    result = replace(
        result, converged=done, status="converged" if done else result.status
    )
    x_full = np.zeros(instance.n)
    x_full[idx] = np.maximum(z, 0.0)
    return replace(result, x=x_full, multipliers=nu)


def _pack_split_arcs(x: np.ndarray) -> np.ndarray:
    """Merge same-kind slot pairs separated only by zero slots.

    A row like (0, r1, 0, 0, r2) traces the same curve as (0, r1+r2, 0, 0,
    0): with nothing between them the two right arcs are one arc split
    across slots.  Packing into the earlier slot is an exact equivalence
    transform and yields the canonical representation.  Slot pairs: L in
    slots 0/3 (zeros required in 1, 2), R in slots 1/4 (zeros in 2, 3).
    """
    out = x.reshape(-1, 5).copy()
    for row in out:
        if row[3] > 0 and row[0] > 0 and row[1] == 0 and row[2] == 0:
            row[0] += row[3]
            row[3] = 0.0
        if row[4] > 0 and row[1] > 0 and row[2] == 0 and row[3] == 0:
            row[1] += row[4]
            row[4] = 0.0
    return out.reshape(-1)


def prune_and_refine(
    spec: ProblemSpec, xi_coarse: SubarcMatrix, config: SolverConfig
) -> PathSolution:
    """Fix near-zero subarcs at zero and re-solve to the refinement tolerance.

    Raises StructureInfeasible when the surviving structure cannot reach
    ``config.refine_tol`` (a wrong structure guess).  Variables that
    collapse below the prune threshold during refinement are pruned in turn.
    """
    instance = assemble(spec)
    x = xi_coarse.flat().copy()
    free = x >= config.prune_eps
    x[~free] = 0.0
    x = _pack_split_arcs(x)
    free = x > 0
    for _ in range(4):
        if not free.any():
            raise StructureInfeasible("pruning removed every subarc")
        result = solve_local(
            instance,
            x,
            config.refine_tol,
            max_outer=config.max_outer_iterations,
            max_inner=config.max_inner_iterations,
            free_mask=free,
        )
        x = result.x
        shrunk = free & (x < config.prune_eps)
        if result.converged and not shrunk.any():
            return make_solution(spec, SubarcMatrix(x.reshape(-1, 5)), config.prune_eps)
        if shrunk.any():
            free = free & ~shrunk
            x[shrunk] = 0.0
            continue
        break
    raise StructureInfeasible(
        f"refinement stalled at feasibility {result.feasibility:.3e}, "
        f"stationarity {result.stationarity:.3e}"
    )


@dataclass(frozen=True)
class StartRecord:
    """Convergence record of one multistart attempt."""

    start_index: int
    status: str
    word: str = ""
    total_length: float = math.nan
    iterations: int = 0
    residual_norm: float = math.nan
    kkt_norm: float = math.nan
    classifiable: bool = True


@dataclass(frozen=True)
class SolveOutcome:
    """All distinct refined solutions, shortest first."""

    solutions: tuple[PathSolution, ...]
    records: tuple[StartRecord, ...]  # aligned with ``solutions``
    starts_attempted: int
    starts_converged: int
    random_seed: int

    @property
    def best(self) -> PathSolution:
        return self.solutions[0]


def worker_count() -> int:
    """Thread-pool size for multistart solves; MDI_THREADS caps it."""
    env = os.environ.get("MDI_THREADS", "")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(4, os.cpu_count() or 1))


def _full_circle(xi: SubarcMatrix, a: float) -> bool:
    """True when some circular subarc closes a full circle (never optimal).

    Only the four C slots count: a straight slot may be arbitrarily long.
    """
    arcs = xi.xi[:, [0, 1, 3, 4]]
    return bool(np.any(a * arcs >= 2.0 * math.pi - 1e-12))


def _classifiable(xi: SubarcMatrix, prune_eps: float) -> bool:
    return bool(np.all((xi.xi > prune_eps).sum(axis=1) <= 3))


def solve(spec: ProblemSpec, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    """Multistart two-phase solve.

    Start 0 seeds from the chord-bisector interior headings; the remaining
    starts perturb those headings uniformly in [-pi/2, pi/2] and re-seed.
    Every converged coarse result is pruned and refined; distinct refined
    solutions (different word, or lengths more than 1e-9 apart) are kept,
    sorted by (length, word).  Solutions containing a full-circle subarc
    are discarded as non-optimal artifacts.
    """
    spec = validate_problem(spec)
    instance = assemble(spec)
    base = initial_headings(spec)
    n_int = len(base)
    rng = np.random.default_rng(config.random_seed)
    deltas = rng.uniform(-math.pi / 2, math.pi / 2, size=(config.multistart_count - 1, n_int))
    heading_sets = [list(base)] + [
        [b + d for b, d in zip(base, deltas[k])] for k in range(config.multistart_count - 1)
    ]

    def attempt(k: int):
        try:
            x0 = seed_from_dubins(spec, heading_sets[k]).flat()
        except Exception as exc:  # seeding is defensive; record and move on
            return StartRecord(k, f"seed_failed: {exc}"), None
        coarse = solve_local(
            instance,
            x0,
            config.coarse_tol,
            max_outer=config.max_outer_iterations,
            max_inner=config.max_inner_iterations,
        )
        if not coarse.converged:
            return StartRecord(k, coarse.status, iterations=coarse.inner_iterations), None
        try:
            sol = prune_and_refine(spec, SubarcMatrix(coarse.x.reshape(-1, 5)), config)
        except StructureInfeasible:
            return StartRecord(k, "structure_infeasible", iterations=coarse.inner_iterations), None
        final = solve_local(
            instance, sol.xi.flat(), config.refine_tol, free_mask=sol.xi.flat() > 0
        )
        record = StartRecord(
            k,
            "converged",
            word=sol.word,
            total_length=sol.total_length,
            iterations=coarse.inner_iterations + final.inner_iterations,
            residual_norm=final.feasibility,
            kkt_norm=final.stationarity,
            classifiable=_classifiable(sol.xi, config.prune_eps),
        )
        return record, sol

    workers = worker_count()
    results: list[tuple[StartRecord, PathSolution | None]] = [None] * config.multistart_count
    if workers == 1 or config.multistart_count == 1:
        for k in range(config.multistart_count):
            results[k] = attempt(k)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for k, out in enumerate(pool.map(attempt, range(config.multistart_count))):
                results[k] = out

    converged = 0
    kept: list[tuple[PathSolution, StartRecord]] = []
    for record, sol in results:
        if sol is None:
            continue
        converged += 1
        if _full_circle(sol.xi, spec.curvature_bound):
            continue
        duplicate = False
        for prev, _ in kept:
            if prev.word == sol.word and abs(prev.total_length - sol.total_length) <= 1e-9:
                duplicate = True
                break
        if not duplicate:
            kept.append((sol, record))
    if not kept:
        raise NoSolutionFound(
            f"no start converged to a refined solution ({config.multistart_count} attempted)"
        )
    kept.sort(key=lambda pair: (pair[0].total_length, pair[0].word))
    return SolveOutcome(
        solutions=tuple(s for s, _ in kept),
        records=tuple(r for _, r in kept),
        starts_attempted=config.multistart_count,
        starts_converged=converged,
        random_seed=config.random_seed,
    )
