"""Audit of candidate curves against the first-order necessary conditions.

A curve is *stationary* when constant per-stage adjoint pairs
(lambda1_i, lambda2_i) and a normalization lambda0 in {0, 1} exist such
that the switching function

    lambda3(t) = -sgn(u) * (lambda1_i cos(theta) + lambda2_i sin(theta) + lambda0) / a

vanishes exactly at the control switches, is identically zero on straight
segments, is continuous across stage nodes, and has the sign opposite to
the active control everywhere else.  Writing P_i = rho_i cos(phi_i) and
Q_i = rho_i sin(phi_i) for the adjoint pair makes every one of those
conditions linear in (P_i, Q_i), so reconstruction reduces to a small
linear system plus sign checks:

* a stage with a straight segment at heading tb pins
  (P, Q) = -lambda0 (cos tb, sin tb)  (so rho = lambda0, phi = tb - pi);
* each interior control switch at heading ts adds
  P cos ts + Q sin ts + lambda0 = 0;
* each node adds the continuity equation of lambda3 across it;
* curves with a straight segment must be normal (lambda0 = 1), and the
  abnormal system (lambda0 = 0) is homogeneous, so its solutions are
  nontrivial null vectors subject to positivity.

The audit also checks the node-midpoint property of consecutive
bang-singular-bang stages, and the merged subarc-count bound (2N + 1 when
the control never switches sign at a node).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .model import PathSolution, StationarityReport, SubarcKind

__all__ = [
    "Arc",
    "MultiplierMissing",
    "MultiplierReconstruction",
    "NonconformingStage",
    "SubarcCount",
    "audit",
    "check_midpoint",
    "check_subarc_bound",
    "classify_stage",
    "merged_word",
    "reconstruct_multipliers",
    "stage_arcs",
    "switching_function_profile",
]

COND_TOL = 1e-8  # tolerance for every necessary-condition check

_KIND_SIGN = {"L": 1, "R": -1, "S": 0}


class NonconformingStage(ValueError):
    """A stage's arc sequence falls outside the admissible taxonomy."""


class MultiplierMissing(ValueError):
    """Profile requested for a solution without reconstructed multipliers."""


def classify_stage(word_i: str) -> str:
    """Map one stage's subarc word to its arc-type class.

    Adjacent same-kind letters denote one arc split across slots and are
    merged first.  Admissible classes are CSC, CS, SC, S (one straight
    segment) and CCC, CC, C (bang arcs only); anything else, for example
    four alternating arcs, is "nonconforming".  The empty word maps to
    "empty".
    """
    merged = []
    for ch in word_i:
        if ch not in "LRS":
            raise ValueError(f"bad subarc letter {ch!r}")
        if merged and merged[-1] == ch:
            continue
        merged.append(ch)
    if not merged:
        return "empty"
    pattern = "".join("S" if ch == "S" else "C" for ch in merged)
    if pattern in ("CSC", "CS", "SC", "S", "CCC", "CC", "C"):
        return pattern
    return "nonconforming"


@dataclass(frozen=True)
class Arc:
    """One maximal subarc of a stage: kind, length and swept headings."""

    kind: str  # "L" | "R" | "S"
    length: float
    theta_start: float
    theta_end: float

    @property
    def sign(self) -> int:
        return _KIND_SIGN[self.kind]


def stage_arcs(solution: PathSolution) -> list[list[Arc]]:
    """Per stage, the surviving arcs in order, same-kind neighbors merged.

    Survival means slot length above the solution's prune threshold; tiny
    surviving slots shorter than the threshold are treated as absent so the
    classification matches the word.
    """
    eps = solution.prune_eps
    a = solution.problem.curvature_bound
    out: list[list[Arc]] = []
    for row, th in zip(solution.xi.xi, solution.headings.values):
        # Heading at the start of each slot: theta0, theta1, theta2 (the
        # straight slot keeps it), theta2, theta4.
        starts = (th[0], th[1], th[2], th[2], th[3])
        ends = (th[1], th[2], th[2], th[3], th[4])
        arcs: list[Arc] = []
        for kind, length, t0, t1 in zip("LRSLR", row, starts, ends):
            if length <= eps:
                continue
            if arcs and arcs[-1].kind == kind:
                prev = arcs[-1]
                arcs[-1] = Arc(kind, prev.length + length, prev.theta_start, t1)
            else:
                arcs.append(Arc(kind, float(length), float(t0), float(t1)))
        out.append(arcs)
    return out


def _stage_class(arcs: list[Arc]) -> str:
    return classify_stage("".join(arc.kind for arc in arcs))


@dataclass(frozen=True)
class MultiplierReconstruction:
    """Result of the multiplier solve: adjoint pairs per stage, or failure."""

    satisfiable: bool
    lambda0: int | None
    p: np.ndarray  # rho_i cos(phi_i) per stage
    q: np.ndarray  # rho_i sin(phi_i) per stage
    residual: float
    node_residuals: np.ndarray
    boundary_hit: bool
    reason: str = ""

    @property
    def rho(self) -> np.ndarray:
        return np.hypot(self.p, self.q)

    @property
    def phi(self) -> np.ndarray:
        """Wrapped to (-pi, pi] for reporting; zero where rho vanishes."""
        phi = np.arctan2(self.q, self.p)
        return np.where(phi <= -math.pi, math.pi, phi)


def _switch_headings(arcs: list[Arc]) -> list[float]:
    """Headings at interior switch times of a stage."""
    return [arcs[j].theta_end for j in range(len(arcs) - 1)]


def _lambda3(arc: Arc, theta, p, q, lambda0, a):
    """Switching function on a nonsingular arc at heading(s) ``theta``."""
    return -arc.sign * (p * np.cos(theta) + q * np.sin(theta) + lambda0) / a


def _assemble_system(stage_arc_list, lambda0, a):
    """Linear system A z = b in z = (P_1, Q_1, ..., P_N, Q_N)."""
    n = len(stage_arc_list)
    rows = []
    rhs = []

    def add(stage_cols, rhs_val):
        row = np.zeros(2 * n)
        for stage, cp, cq in stage_cols:
            row[2 * stage] += cp
            row[2 * stage + 1] += cq
        rows.append(row)
        rhs.append(rhs_val)

    for i, arcs in enumerate(stage_arc_list):
        cls = _stage_class(arcs)
        if "S" in cls:
            tb = next(arc.theta_start for arc in arcs if arc.kind == "S")
            add([(i, math.cos(tb), math.sin(tb))], -float(lambda0))
            add([(i, math.sin(tb), -math.cos(tb))], 0.0)
        else:
            for ts in _switch_headings(arcs):
                add([(i, math.cos(ts), math.sin(ts))], -float(lambda0))
            if lambda0 == 0 and cls == "C":
                # Abnormal single-arc stage: the adjoint pair is aligned
                # with the stage-entry heading rotated by +-pi/2 (sign of
                # the control), which reads as one homogeneous row plus a
                # positivity check applied after the solve.
                arc = arcs[0]
                phi_hat = arc.theta_start + arc.sign * math.pi / 2.0
                add([(i, math.sin(phi_hat), -math.cos(phi_hat))], 0.0)
    for i in range(n - 1):
        left = stage_arc_list[i][-1]
        right = stage_arc_list[i + 1][0]
        tn = left.theta_end
        ct, st = math.cos(tn), math.sin(tn)
        if left.kind == "S" and right.kind == "S":
            continue
        if left.kind == "S":
            add([(i + 1, ct, st)], -float(lambda0))
        elif right.kind == "S":
            add([(i, ct, st)], -float(lambda0))
        else:
            sl, sr = left.sign, right.sign
            add([(i, sl * ct, sl * st), (i + 1, -sr * ct, -sr * st)], float(sr - sl) * lambda0)
    a_mat = np.vstack(rows) if rows else np.zeros((0, 2 * n))
    b_vec = np.asarray(rhs)
    return a_mat, b_vec


def _sign_profile_ok(stage_arc_list, p, q, lambda0, a, samples=33):
    """Check lambda3 sign consistency along every nonsingular arc."""
    for i, arcs in enumerate(stage_arc_list):
        for arc in arcs:
            if arc.kind == "S":
                # rho must equal lambda0 here; the assembled rows enforce it.
                continue
            theta = np.linspace(arc.theta_start, arc.theta_end, samples)
            lam3 = _lambda3(arc, theta, p[i], q[i], lambda0, a)
            if np.any(arc.sign * lam3 > COND_TOL):
                return False
    return True


def _node_continuity_residuals(stage_arc_list, p, q, lambda0, a):
    vals = []
    for i in range(len(stage_arc_list) - 1):
        left = stage_arc_list[i][-1]
        right = stage_arc_list[i + 1][0]
        tn = left.theta_end
        lm = 0.0 if left.kind == "S" else float(_lambda3(left, tn, p[i], q[i], lambda0, a))
        rm = (
            0.0
            if right.kind == "S"
            else float(_lambda3(right, tn, p[i + 1], q[i + 1], lambda0, a))
        )
        vals.append(abs(rm - lm))
    return np.asarray(vals)


def _stage_checks(stage_arc_list, p, q, lambda0):
    """Class-dependent magnitude conditions; returns (ok, boundary_hit)."""
    boundary = False
    for i, arcs in enumerate(stage_arc_list):
        cls = _stage_class(arcs)
        rho = math.hypot(p[i], q[i])
        if "S" in cls:
            if abs(rho - lambda0) > COND_TOL:
                return False, boundary
        elif cls in ("CC", "CCC"):
            if lambda0 == 1:
                if rho < 1.0 - COND_TOL:
                    return False, boundary
                if abs(rho - 1.0) <= COND_TOL:
                    boundary = True
            else:
                if rho <= COND_TOL:
                    return False, boundary
        elif cls == "C":
            if lambda0 == 0:
                if rho <= COND_TOL:
                    return False, boundary
                arc = arcs[0]
                phi_hat = arc.theta_start + arc.sign * math.pi / 2.0
                if p[i] * math.cos(phi_hat) + q[i] * math.sin(phi_hat) <= COND_TOL:
                    return False, boundary
    return True, boundary


def _canonicalize_free_stages(a_mat, z, stage_arc_list, lambda0):
    """Give untouched stages a definite adjoint pair.

    A stage no equation refers to (possible only for single-arc stages in
    short problems) keeps rho strictly positive with an always-valid
    canonical choice.
    """
    for i, arcs in enumerate(stage_arc_list):
        cols = a_mat[:, 2 * i : 2 * i + 2]
        if cols.size and np.any(cols != 0.0):
            continue
        if lambda0 == 1:
            z[2 * i] = 0.5
            z[2 * i + 1] = 0.0
        else:
            arc = arcs[0]
            phi_hat = arc.theta_start + arc.sign * math.pi / 2.0
            z[2 * i] = math.cos(phi_hat)
            z[2 * i + 1] = math.sin(phi_hat)
    return z


def _attempt(stage_arc_list, lambda0, a):
    """Try one normalization; returns a MultiplierReconstruction."""
    n = len(stage_arc_list)
    a_mat, b_vec = _assemble_system(stage_arc_list, lambda0, a)

    def finish(z, residual):
        z = _canonicalize_free_stages(a_mat, z.copy(), stage_arc_list, lambda0)
        p, q = z[0::2], z[1::2]
        ok, boundary = _stage_checks(stage_arc_list, p, q, lambda0)
        if ok and not _sign_profile_ok(stage_arc_list, p, q, lambda0, a):
            ok = False
        node_res = _node_continuity_residuals(stage_arc_list, p, q, lambda0, a)
        if ok and node_res.size and float(node_res.max()) > COND_TOL:
            ok = False
        return MultiplierReconstruction(
            satisfiable=ok,
            lambda0=lambda0 if ok else None,
            p=p,
            q=q,
            residual=residual,
            node_residuals=node_res,
            boundary_hit=boundary,
            reason="" if ok else "sign or magnitude conditions failed",
        )

    if lambda0 == 1:
        if a_mat.size:
            z, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)
            residual = float(np.max(np.abs(a_mat @ z - b_vec), initial=0.0))
        else:
            z = np.zeros(2 * n)
            residual = 0.0
        if residual > COND_TOL:
            return MultiplierReconstruction(
                False, None, z[0::2], z[1::2], residual, np.array([]), False,
                "stage/node equations inconsistent",
            )
        base = finish(z, residual)
        if base.satisfiable:
            return base
        # The system may be underdetermined; walk the null space looking
        # for an assignment that passes the sign checks.
        if a_mat.size:
            _, sv, vt = np.linalg.svd(a_mat)
            null = vt[(sv > 1e-10 * max(1.0, sv[0])).sum() :] if sv.size else vt
        else:
            null = np.eye(2 * n)
        if null.shape[0] == 0 or null.shape[0] > 3:
            return base
        grid = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
        for combo in product((0.0,) + grid, repeat=null.shape[0]):
            if not any(combo):
                continue
            cand = finish(z + null.T @ np.asarray(combo), residual)
            if cand.satisfiable:
                return cand
        return base
    # Abnormal normalization: homogeneous system, nontrivial null vectors.
    if a_mat.size == 0:
        return finish(np.zeros(2 * n), 0.0)
    _, sv, vt = np.linalg.svd(a_mat)
    rank = int((sv > 1e-10 * max(1.0, sv[0] if sv.size else 1.0)).sum())
    null = vt[rank:]
    if null.shape[0] == 0:
        return MultiplierReconstruction(
            False, None, np.zeros(n), np.zeros(n), 0.0, np.array([]), False,
            "abnormal system admits only the trivial multiplier",
        )
    if null.shape[0] <= 3:
        for combo in product((-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0), repeat=null.shape[0]):
            if not any(combo):
                continue
            cand = finish(null.T @ np.asarray(combo), 0.0)
            if cand.satisfiable:
                return cand
    cand = finish(null[0].copy(), 0.0)
    if not cand.satisfiable:
        cand = finish(-null[0], 0.0)
    return cand


def reconstruct_multipliers(solution: PathSolution) -> MultiplierReconstruction:
    """Reconstruct (rho_i, phi_i, lambda0) certifying stationarity, if possible.

    Curves containing a straight segment are normal, so only lambda0 = 1 is
    attempted for them; bang-only curves try the normal system first and
    the abnormal one second.  The abnormal certificate additionally
    requires every circular arc to be no longer than pi/a.  Raises
    NonconformingStage when any stage falls outside the taxonomy.
    """
    arcs_per_stage = stage_arcs(solution)
    classes = [_stage_class(arcs) for arcs in arcs_per_stage]
    bad = [i for i, cls in enumerate(classes) if cls in ("nonconforming", "empty")]
    if bad:
        raise NonconformingStage(f"stage(s) {bad} not classifiable: {classes}")
    a = solution.problem.curvature_bound
    has_straight = any("S" in cls for cls in classes)
    normal = _attempt(arcs_per_stage, 1, a)
    if normal.satisfiable or has_straight:
        return normal
    abnormal_possible = all(cls in ("C", "CC") for cls in classes) and all(
        arc.length <= math.pi / a + COND_TOL
        for arcs in arcs_per_stage
        for arc in arcs
    )
    if abnormal_possible:
        abnormal = _attempt(arcs_per_stage, 0, a)
        if abnormal.satisfiable:
            return abnormal
    return normal


def check_midpoint(solution: PathSolution) -> list[str]:
    """Node-by-node midpoint verdicts: "ok", "violated" or "not_applicable".

    At a junction of two bang-singular-bang stages where the control keeps
    its sign, the node must bisect the shared circular arc: equal lengths
    on both sides (within 1e-9) and each side sweeping strictly less than
    pi.
    """
    arcs_per_stage = stage_arcs(solution)
    a = solution.problem.curvature_bound
    verdicts = []
    for i in range(len(arcs_per_stage) - 1):
        left_arcs = arcs_per_stage[i]
        right_arcs = arcs_per_stage[i + 1]
        if _stage_class(left_arcs) != "CSC" or _stage_class(right_arcs) != "CSC":
            verdicts.append("not_applicable")
            continue
        left, right = left_arcs[-1], right_arcs[0]
        if left.kind != right.kind:  # control switches sign at the node
            verdicts.append("not_applicable")
            continue
        equal = abs(left.length - right.length) <= 1e-9
        sweep_ok = a * left.length < math.pi and a * right.length < math.pi
        verdicts.append("ok" if (equal and sweep_ok) else "violated")
    return verdicts


def merged_word(solution: PathSolution) -> str:
    """Whole-curve word with same-kind arcs merged across nodes.

    The stage-separated word "RSL|LSR|RSR" collapses to "RSLSRSR": the two
    arcs meeting at a node with equal kind are one subarc of the curve.
    """
    letters: list[str] = []
    for arcs in stage_arcs(solution):
        for arc in arcs:
            if not letters or letters[-1] != arc.kind:
                letters.append(arc.kind)
    return "".join(letters)


@dataclass(frozen=True)
class SubarcCount:
    """Merged subarc count against the structural bound."""

    merged_count: int
    bound: int
    ok: bool
    sign_switch_nodes: tuple[int, ...]


def check_subarc_bound(solution: PathSolution) -> SubarcCount:
    """Count maximal subarcs after merging across nodes.

    Same-kind arcs touching a node merge into one.  Without any
    control-sign switch at a node the count is checked against 2N + 1;
    with a switch somewhere the raw bound 3N applies instead.
    """
    arcs_per_stage = stage_arcs(solution)
    n = len(arcs_per_stage)
    switches = []
    count = 0
    prev_kind = None
    for i, arcs in enumerate(arcs_per_stage):
        for arc in arcs:
            if arc.kind != prev_kind:
                count += 1
            prev_kind = arc.kind
        if i < n - 1 and arcs and arcs_per_stage[i + 1]:
            left, right = arcs[-1], arcs_per_stage[i + 1][0]
            if {left.kind, right.kind} == {"L", "R"}:
                switches.append(i + 1)
    bound = 3 * n if switches else 2 * n + 1
    return SubarcCount(count, bound, count <= bound, tuple(switches))


def switching_function_profile(
    solution: PathSolution,
    multipliers: MultiplierReconstruction,
    samples_per_arc: int = 32,
):
    """Sampled (t, lambda3, lambda3_dot, ellipse_residual) per stage.

    The ellipse residual is the pointwise defect of
    lambda3_dot^2 + (a |lambda3| - lambda0)^2 = rho_i^2, which every
    reconstructed profile must satisfy along nonsingular and singular arcs
    alike.
    """
    if multipliers.lambda0 is None:
        raise MultiplierMissing("no multipliers available for profiling")
    lam0 = float(multipliers.lambda0)
    a = solution.problem.curvature_bound
    p, q = multipliers.p, multipliers.q
    out = []
    t_base = 0.0
    for i, arcs in enumerate(stage_arcs(solution)):
        ts, l3s, dl3s, ells = [], [], [], []
        rho2 = p[i] ** 2 + q[i] ** 2
        for arc in arcs:
            tau = np.linspace(0.0, arc.length, samples_per_arc)
            theta = arc.theta_start + arc.sign * a * tau
            if arc.kind == "S":
                lam3 = np.zeros_like(tau)
            else:
                lam3 = _lambda3(arc, theta, p[i], q[i], lam0, a)
            dlam3 = p[i] * np.sin(theta) - q[i] * np.cos(theta)
            ell = dlam3**2 + (a * np.abs(lam3) - lam0) ** 2 - rho2
            ts.append(t_base + tau)
            l3s.append(lam3)
            dl3s.append(dlam3)
            ells.append(ell)
            t_base += arc.length
        out.append(
            {
                "t": np.concatenate(ts),
                "lambda3": np.concatenate(l3s),
                "lambda3_dot": np.concatenate(dl3s),
                "ellipse_residual": np.concatenate(ells),
            }
        )
    return out


def audit(solution: PathSolution) -> StationarityReport:
    """Full necessary-conditions audit of a (feasible) solution.

    The verdict is "stationary" when multipliers exist, every applicable
    midpoint equality holds and the subarc bound is met; "inconclusive"
    when a stage is not classifiable or a magnitude condition sits on its
    tolerance boundary; "not stationary" otherwise.  Feasibility itself is
    not re-checked here.
    """
    try:
        arcs_per_stage = stage_arcs(solution)
        classes = tuple(_stage_class(arcs) for arcs in arcs_per_stage)
        recon = reconstruct_multipliers(solution)
    except NonconformingStage:
        classes = tuple(
            classify_stage(w) for w in (solution.word.split("|") if solution.word else [])
        )
        counts = check_subarc_bound(solution)
        return StationarityReport(
            verdict="inconclusive",
            lambda0=None,
            rho=(),
            phi=(),
            stage_classes=classes,
            node_residuals=(),
            midpoint_ok=False,
            midpoint_verdicts=tuple(check_midpoint(solution)),
            subarc_count=counts.merged_count,
            subarc_bound=counts.bound,
            subarc_bound_ok=counts.ok,
            detail="nonconforming stage(s); necessary conditions not evaluable",
        )
    midpoints = check_midpoint(solution)
    midpoint_ok = all(v != "violated" for v in midpoints)
    counts = check_subarc_bound(solution)
    if recon.satisfiable:
        profile = switching_function_profile(solution, recon)
        ellipse_ok = all(
            float(np.max(np.abs(seg["ellipse_residual"]), initial=0.0)) <= COND_TOL
            for seg in profile
        )
    else:
        ellipse_ok = False
    if recon.satisfiable and midpoint_ok and counts.ok and ellipse_ok:
        verdict = "stationary"
        detail = ""
    elif recon.boundary_hit:
        verdict = "inconclusive"
        detail = "magnitude condition on tolerance boundary"
    else:
        verdict = "not stationary"
        parts = []
        if not recon.satisfiable:
            parts.append(f"multiplier system unsatisfiable ({recon.reason})")
        if not midpoint_ok:
            parts.append("midpoint property violated")
        if not counts.ok:
            parts.append("subarc count exceeds bound")
        if recon.satisfiable and not ellipse_ok:
            parts.append("phase-ellipse identity violated")
        detail = "; ".join(parts)
    return StationarityReport(
        verdict=verdict,
        lambda0=recon.lambda0 if recon.satisfiable else None,
        rho=tuple(float(v) for v in recon.rho) if recon.satisfiable else (),
        phi=tuple(float(v) for v in recon.phi) if recon.satisfiable else (),
        stage_classes=classes,
        node_residuals=tuple(float(v) for v in recon.node_residuals),
        midpoint_ok=midpoint_ok,
        midpoint_verdicts=tuple(midpoints),
        subarc_count=counts.merged_count,
        subarc_bound=counts.bound,
        subarc_bound_ok=counts.ok,
        detail=detail,
    )
