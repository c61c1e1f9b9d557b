"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the criterion
lines alongside pytest's own status.
"""

import contextlib
import math
import os
import time

import numpy as np
import pytest

import mdinterp as MD
from mdinterp import (
    OrientedPoint,
    ProblemSpec,
    SubarcKind,
    SubarcMatrix,
    assemble,
    audit,
    check_midpoint,
    check_subarc_bound,
    dubins_shortest,
    make_solution,
    merged_word,
    propagate_subarc,
    prune_and_refine,
    reconstruct_multipliers,
    residuals,
    rollout_path,
    sample_path,
    serialize_problem,
    solve,
    solve_local,
    switching_function_profile,
)
from mdinterp.cli import main
from mdinterp.nlp import SolverConfig

from fixtures import ALL_FIXTURES, EXAMPLE1, EXAMPLE2, EXAMPLE3, EXAMPLE4, PROBLEM1, PROBLEM2
from oracles import dubins_grid_oracle


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"FAIL {name}")
        raise
    print(f"PASS {name}")


def test_criterion_1_fixture_feasibility():
    with criterion("criterion 1: published fixtures feasible, lengths match"):
        for fx in ALL_FIXTURES:
            xi = SubarcMatrix(fx.xi)
            ends, _ = rollout_path(fx.spec, xi)
            nodes = fx.spec.nodes()
            for i, end in enumerate(ends):
                err = math.hypot(end.x - nodes[i + 1, 0], end.y - nodes[i + 1, 1])
                assert err < 1e-8, f"{fx.name}: node {i + 1} off by {err:.2e}"
            res = residuals(fx.spec, xi)
            assert abs(res.r_sin) < 1e-8 and abs(res.r_cos) < 1e-8, fx.name
            assert abs(xi.total - fx.t_f) < 1e-10, f"{fx.name}: sum vs t_f"


def test_criterion_2_local_refinement():
    with criterion("criterion 2: perturbed published starts reconverge"):
        for fx in ALL_FIXTURES:
            t0 = time.time()
            inst = assemble(fx.spec)
            x0 = fx.xi.reshape(-1).copy()
            x0[x0 > 0] += 1e-3
            coarse = solve_local(inst, x0, 1e-8)
            assert coarse.converged, f"{fx.name}: coarse failed ({coarse.status})"
            sol = prune_and_refine(
                fx.spec, SubarcMatrix(coarse.x.reshape(-1, 5)), SolverConfig()
            )
            assert sol.word == fx.word, f"{fx.name}: {sol.word} != {fx.word}"
            assert abs(sol.total_length - fx.t_f) < 1e-9, f"{fx.name}: t_f"
            assert time.time() - t0 < 5.0, f"{fx.name}: too slow"


def test_criterion_3_global_search(tmp_path, capsys):
    with criterion("criterion 3: desk-scale global search finds published best"):
        problem = tmp_path / "example1.json"
        problem.write_text(serialize_problem(PROBLEM1))
        out = tmp_path / "result.json"
        t0 = time.time()
        code = main(
            ["solve", str(problem), "--starts", "32", "--seed", "0", "--out", str(out)]
        )
        elapsed = time.time() - t0
        captured = capsys.readouterr()
        assert code == 0
        assert "RSL|LSR|RSR" in captured.out
        assert "3.415578858075" in captured.out
        assert elapsed < 60.0, f"example 1 solve took {elapsed:.1f}s"
        out1 = solve(PROBLEM1, SolverConfig(multistart_count=32, random_seed=0))
        assert merged_word(out1.best) == "RSLSRSR"
        assert out1.best.total_length <= 3.415578858075 + 1e-6
        out2 = solve(PROBLEM2, SolverConfig(multistart_count=128, random_seed=0))
        assert out2.best.total_length <= 6.278034550309 + 1e-4


def test_criterion_4_large_instances():
    with criterion("criterion 4: 20- and 12-node fixtures verify structurally"):
        sol3 = make_solution(EXAMPLE3.spec, SubarcMatrix(EXAMPLE3.xi), 1e-6)
        rep3 = audit(sol3)
        assert rep3.verdict == "stationary"
        assert rep3.lambda0 == 1
        assert np.allclose(rep3.rho, 1.0, atol=1e-8)
        assert EXAMPLE3.xi[0, 3] == 0.066067208642 == EXAMPLE3.xi[1, 0]
        assert all(v == "ok" for v in check_midpoint(sol3))
        c3 = check_subarc_bound(sol3)
        assert (c3.merged_count, c3.ok) == (39, True)

        sol4 = make_solution(EXAMPLE4.spec, SubarcMatrix(EXAMPLE4.xi), 1e-6)
        rep4 = audit(sol4)
        assert all(v != "violated" for v in rep4.midpoint_verdicts)
        c4 = check_subarc_bound(sol4)
        assert c4.merged_count <= 23
        # applicable midpoint equalities hold to 1e-9
        xi4 = EXAMPLE4.xi
        for (i, j), (k, l) in [
            ((2, 3), (3, 0)),
            ((3, 3), (4, 0)),
            ((6, 3), (7, 0)),
            ((7, 4), (8, 1)),
            ((8, 3), (9, 0)),
        ]:
            assert abs(xi4[i, j] - xi4[k, l]) < 1e-9


def test_criterion_5_single_stage_oracle():
    with criterion("criterion 5: single-stage solver vs closed form vs grid oracle"):
        t0 = time.time()
        rng = np.random.default_rng(2024)
        done = 0
        while done < 500:
            p = OrientedPoint(*rng.uniform(-2, 2, 2), rng.uniform(-math.pi, math.pi))
            q = OrientedPoint(*rng.uniform(-2, 2, 2), rng.uniform(-math.pi, math.pi))
            if math.hypot(q.x - p.x, q.y - p.y) < 1e-6:
                continue
            a = float(rng.choice([1.0, 3.0]))
            best, _ = dubins_shortest(p, q, a)
            out = solve(
                ProblemSpec(p, q, (), a), SolverConfig(multistart_count=2, random_seed=0)
            )
            assert abs(out.best.total_length - best.total) < 1e-6
            done += 1
        done = 0
        while done < 200:
            p = OrientedPoint(*rng.uniform(-2, 2, 2), rng.uniform(-math.pi, math.pi))
            q = OrientedPoint(*rng.uniform(-2, 2, 2), rng.uniform(-math.pi, math.pi))
            if math.hypot(q.x - p.x, q.y - p.y) < 1e-6:
                continue
            a = float(rng.choice([1.0, 3.0]))
            best, _ = dubins_shortest(p, q, a)
            oracle = dubins_grid_oracle((p.x, p.y, p.theta), (q.x, q.y, q.theta), a)
            assert best.total <= oracle + 1e-3
            assert best.total >= oracle - 1e-6
            done += 1
        elapsed = time.time() - t0
        assert elapsed < 120.0, f"criterion 5 took {elapsed:.1f}s"


def test_criterion_6_jacobian_correctness():
    with criterion("criterion 6: analytic Jacobian vs central differences"):
        from fixtures import ALL_PROBLEMS

        h = 1e-6
        for spec in ALL_PROBLEMS.values():
            inst = assemble(spec)
            rng = np.random.default_rng(inst.n)
            for _ in range(100):
                x = rng.uniform(0.0, 1.5, inst.n)
                jac = inst.jacobian(x)
                fd = np.empty_like(jac)
                for k in range(inst.n):
                    xp = x.copy()
                    xp[k] += h
                    xm = x.copy()
                    xm[k] -= h
                    fd[:, k] = (inst.residual(xp) - inst.residual(xm)) / (2 * h)
                dev = np.abs(jac - fd) / np.maximum(1.0, np.abs(fd))
                assert dev.max() < 1e-6


def test_criterion_7_invariant_suites():
    with criterion("criterion 7: geometric and adjoint invariants"):
        rng = np.random.default_rng(77)
        # subarc composition law
        for _ in range(200):
            p = OrientedPoint(*rng.uniform(-2, 2, 2), rng.uniform(-6, 6))
            kind = SubarcKind(rng.choice(["L", "R", "S"]))
            a = float(rng.uniform(0.3, 4.0))
            s, t = rng.uniform(0, 2.0, 2)
            one = propagate_subarc(p, kind, s + t, a)
            two = propagate_subarc(propagate_subarc(p, kind, s, a), kind, t, a)
            assert math.hypot(one.x - two.x, one.y - two.y) < 1e-12
        # unit-speed sampling on a published solution
        fx = EXAMPLE1["a"]
        a = PROBLEM1.curvature_bound
        sp = sample_path(PROBLEM1, SubarcMatrix(fx.xi), 0.01)
        dt = np.diff(sp.t)
        chord = np.hypot(np.diff(sp.x), np.diff(sp.y))
        assert np.all(chord <= dt + 1e-10)
        same = sp.u[:-1] == sp.u[1:]
        arc = same & (sp.u[:-1] != 0)
        straight = same & (sp.u[:-1] == 0)
        assert np.allclose(chord[straight], dt[straight], atol=1e-10)
        assert np.allclose(chord[arc], 2 * np.sin(a * dt[arc] / 2) / a, atol=1e-10)
        # heading continuity is bitwise
        xi = SubarcMatrix(rng.uniform(0, 1.0, (3, 5)))
        _, headings = rollout_path(PROBLEM1, xi)
        assert np.array_equal(headings.theta0[1:], headings.theta5[:-1])
        # switching-function ellipse identity on reconstructed profiles
        for fixture in (EXAMPLE1["a"], EXAMPLE3):
            sol = make_solution(fixture.spec, SubarcMatrix(fixture.xi), 1e-6)
            rec = reconstruct_multipliers(sol)
            assert rec.satisfiable
            for seg in switching_function_profile(sol, rec):
                assert np.max(np.abs(seg["ellipse_residual"])) < 1e-8
        # structural subarc count of the shortest 4-node curve
        sol_a = make_solution(PROBLEM1, SubarcMatrix(EXAMPLE1["a"].xi), 1e-6)
        assert check_subarc_bound(sol_a).merged_count == 7


def test_criterion_8_determinism(tmp_path):
    with criterion("criterion 8: byte-identical results across runs and workers"):
        problem = tmp_path / "example1.json"
        problem.write_text(serialize_problem(PROBLEM1))
        blobs = []
        for run, threads in enumerate(("4", "1", "2")):
            out = tmp_path / f"r{run}.json"
            old = os.environ.get("MDI_THREADS")
            os.environ["MDI_THREADS"] = threads
            try:
                code = main(
                    [
                        "solve",
                        str(problem),
                        "--starts",
                        "12",
                        "--seed",
                        "0",
                        "--out",
                        str(out),
                    ]
                )
            finally:
                if old is None:
                    os.environ.pop("MDI_THREADS")
                else:
                    os.environ["MDI_THREADS"] = old
            assert code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1] == blobs[2]
