"""Closed-form shortest bounded-curvature path between two oriented points.

This is the classical single-stage problem (no interior waypoints): the
optimum is one of six families (LSL, RSR, LSR, RSL, LRL, RLR).  The module
serves three purposes: the N = 1 special case of the interpolation problem,
the per-stage initializer for the multistart solver, and an independent
oracle for tests.

All constructions work on the scaled instance with turning radius 1
(positions multiplied by the curvature bound) and are derived from tangent
circles: the centers of the left/right turning circles of a configuration
(x, y, theta) sit at (x -+ sin(theta), y +- cos(theta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import OrientedPoint, ProblemSpec, SubarcKind, SubarcMatrix

__all__ = [
    "CoincidentPoints",
    "DubinsCandidate",
    "EmbeddingImpossible",
    "NoFeasibleFamily",
    "dubins_shortest",
    "initial_headings",
    "seed_from_dubins",
]

_TWO_PI = 2.0 * math.pi


class CoincidentPoints(ValueError):
    """The two endpoint positions coincide."""


class NoFeasibleFamily(RuntimeError):
    """No family produced a candidate (cannot occur for distinct points)."""


class EmbeddingImpossible(RuntimeError):
    """A word does not fit the L,R,S,L,R slot pattern (defensive)."""


@dataclass(frozen=True)
class DubinsCandidate:
    """One feasible family: segment lengths in problem units."""

    family: str
    segment_lengths: tuple[float, float, float]
    total: float


def _mod2pi(x: float) -> float:
    r = math.fmod(x, _TWO_PI)
    return r + _TWO_PI if r < 0 else r


def _left_center(x, y, th):
    return (x - math.sin(th), y + math.cos(th))


def _right_center(x, y, th):
    return (x + math.sin(th), y - math.cos(th))


def _csc(family: str, p, q):
    """CSC candidates on the unit-radius instance; None if infeasible."""
    xp, yp, tp = p
    xq, yq, tq = q
    first_left = family[0] == "L"
    last_left = family[2] == "L"
    c1 = _left_center(xp, yp, tp) if first_left else _right_center(xp, yp, tp)
    c2 = _left_center(xq, yq, tq) if last_left else _right_center(xq, yq, tq)
    vx, vy = c2[0] - c1[0], c2[1] - c1[1]
    d = math.hypot(vx, vy)
    if first_left == last_left:
        if d < 1e-14:
            # Same circle: a single arc absorbs the transfer.
            t1 = _mod2pi(tq - tp) if first_left else _mod2pi(tp - tq)
            return (t1, 0.0, 0.0)
        psi = math.atan2(vy, vx)
        s = d
    else:
        if d < 2.0:
            return None
        lam = math.atan2(vy, vx)
        shift = math.asin(min(1.0, 2.0 / d))
        psi = lam + shift if first_left else lam - shift
        s = math.sqrt(max(0.0, d * d - 4.0))
    t1 = _mod2pi(psi - tp) if first_left else _mod2pi(tp - psi)
    t2 = _mod2pi(tq - psi) if last_left else _mod2pi(psi - tq)
    return (t1, s, t2)


def _ccc(family: str, p, q):
    """Both geometric variants of a CCC family; middle sweep unfiltered."""
    xp, yp, tp = p
    xq, yq, tq = q
    outer_left = family[0] == "L"
    center = _left_center if outer_left else _right_center
    c1 = center(xp, yp, tp)
    c2 = center(xq, yq, tq)
    vx, vy = c2[0] - c1[0], c2[1] - c1[1]
    d = math.hypot(vx, vy)
    if d > 4.0:
        return []
    lam = math.atan2(vy, vx)
    half = math.acos(max(-1.0, min(1.0, d / 4.0)))
    out = []
    for w in (lam + half, lam - half):
        cm = (c1[0] + 2.0 * math.cos(w), c1[1] + 2.0 * math.sin(w))
        v = math.atan2(c2[1] - cm[1], c2[0] - cm[0])
        if outer_left:
            psi1 = w + math.pi / 2.0
            psi2 = v - math.pi / 2.0
            t1 = _mod2pi(psi1 - tp)
            tm = _mod2pi(psi1 - psi2)
            t2 = _mod2pi(tq - psi2)
        else:
            psi1 = w - math.pi / 2.0
            psi2 = v + math.pi / 2.0
            t1 = _mod2pi(tp - psi1)
            tm = _mod2pi(psi2 - psi1)
            t2 = _mod2pi(psi2 - tq)
        out.append((t1, tm, t2))
    return out


def dubins_shortest(
    p: OrientedPoint, q: OrientedPoint, a: float
) -> tuple[DubinsCandidate, list[DubinsCandidate]]:
    """Shortest single-stage path from ``p`` to ``q`` with curvature bound ``a``.

    Returns the minimizer plus the full feasible candidate list sorted by
    (total length, family name).  CCC variants whose middle arc sweeps an
    angle of at most pi are discarded: such paths are never optimal.
    """
    if a <= 0:
        raise ValueError("curvature bound must be > 0")
    if math.hypot(q.x - p.x, q.y - p.y) <= 1e-12:
        raise CoincidentPoints("endpoint positions coincide")
    ps = (a * p.x, a * p.y, p.theta)
    qs = (a * q.x, a * q.y, q.theta)
    candidates: list[DubinsCandidate] = []
    for family in ("LSL", "LSR", "RSL", "RSR"):
        seg = _csc(family, ps, qs)
        if seg is None:
            continue
        lengths = tuple(v / a for v in seg)
        candidates.append(DubinsCandidate(family, lengths, sum(lengths)))
    for family in ("LRL", "RLR"):
        for t1, tm, t2 in _ccc(family, ps, qs):
            if tm <= math.pi:
                continue
            lengths = (t1 / a, tm / a, t2 / a)
            candidates.append(DubinsCandidate(family, lengths, sum(lengths)))
    if not candidates:
        raise NoFeasibleFamily("no feasible family found")
    candidates.sort(key=lambda c: (c.total, c.family))
    return candidates[0], candidates


def initial_headings(spec: ProblemSpec) -> list[float]:
    """Heading guesses at the interior nodes: chord-direction bisectors.

    Node i gets the direction of the normalized sum of the unit chords into
    and out of it; if the chords are opposite, the incoming chord rotated by
    pi/2 is used instead.
    """
    nodes = spec.nodes()
    out = []
    for i in range(1, nodes.shape[0] - 1):
        d1 = nodes[i] - nodes[i - 1]
        d2 = nodes[i + 1] - nodes[i]
        d1 = d1 / np.hypot(*d1)
        d2 = d2 / np.hypot(*d2)
        v = d1 + d2
        if np.hypot(*v) < 1e-9:
            out.append(math.atan2(d1[1], d1[0]) + math.pi / 2.0)
        else:
            out.append(math.atan2(v[1], v[0]))
    return out


#: Slot indices usable per kind, in order (slots are L, R, S, L, R).
_KIND_SLOTS = {"L": (0, 3), "R": (1, 4), "S": (2,)}


def _embed_word(family: str, lengths) -> np.ndarray:
    """Place a stage word's segment lengths into the five-slot layout."""
    row = np.zeros(5)
    cursor = -1
    for kind, length in zip(family, lengths):
        slot = next((s for s in _KIND_SLOTS[kind] if s > cursor), None)
        if slot is None:
            raise EmbeddingImpossible(f"word {family} does not embed into L,R,S,L,R")
        row[slot] = length
        cursor = slot
    return row


def seed_from_dubins(spec: ProblemSpec, interior_headings) -> SubarcMatrix:
    """Stage-by-stage shortest-path seed for the given interior headings.

    Every stage is solved as a single-stage problem between consecutive
    oriented nodes, and its word is embedded into the slot layout; the
    result is feasible for the interpolation problem by construction.
    """
    headings = [spec.start.theta, *interior_headings, spec.end.theta]
    if len(headings) != spec.n_stages + 1:
        raise ValueError("need exactly N - 1 interior headings")
    nodes = spec.nodes()
    rows = []
    for i in range(spec.n_stages):
        p = OrientedPoint(nodes[i, 0], nodes[i, 1], headings[i])
        q = OrientedPoint(nodes[i + 1, 0], nodes[i + 1, 1], headings[i + 1])
        best, _ = dubins_shortest(p, q, spec.curvature_bound)
        rows.append(_embed_word(best.family, best.segment_lengths))
    return SubarcMatrix(np.vstack(rows))
