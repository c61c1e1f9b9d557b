"""Self-contained equality-constrained optimizer over the nonnegative box.

Three layers, all deterministic and dependency-free:

* :func:`projected_newton` - damped Newton minimization subject to x >= 0,
  used for the augmented-Lagrangian subproblems (the problems here are
  tiny, so exact Hessians plus dense factorizations beat quasi-Newton by a
  wide margin).
* :func:`augmented_lagrangian` - outer loop over the equality constraints
  with classic multiplier/penalty updates.
* :func:`newton_polish` - Newton iteration on the first-order optimality
  system restricted to the strictly positive variables, which pushes both
  the constraint residuals and the stationarity residual down to the
  refinement tolerance.

Robustness and reproducibility matter more than flop counts: every
factorization is dense and every fallback is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "BoxProblem",
    "LocalResult",
    "augmented_lagrangian",
    "kkt_measures",
    "newton_polish",
    "projected_newton",
]


@dataclass(frozen=True)
class BoxProblem:
    """Equality-constrained problem data: min sum(x) s.t. c(x)=0, x>=0.

    ``residual(x)`` returns c(x) (length m), ``jacobian(x)`` its (m, n)
    Jacobian and ``hessian(x, w)`` the Hessian of w . c(x).
    """

    n: int
    residual: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class LocalResult:
    """Outcome of a local solve: best iterate plus diagnostics."""

    x: np.ndarray
    converged: bool
    status: str  # "converged" | "max_iterations" | "diverged_penalty"
    outer_iterations: int
    inner_iterations: int
    feasibility: float
    stationarity: float
    multipliers: np.ndarray


def kkt_measures(x, res, jac, act_eps=1e-10):
    """(feasibility, stationarity, nu) with a least-squares multiplier estimate.

    Stationarity is the infinity norm of the Lagrangian gradient projected
    onto the tangent cone of the nonnegative box.
    """
    free = x > act_eps
    if free.any():
        nu, *_ = np.linalg.lstsq(jac[:, free].T, -np.ones(int(free.sum())), rcond=None)
    else:
        nu = np.zeros(jac.shape[0])
    g = 1.0 + jac.T @ nu
    pg = np.where(free, g, np.minimum(g, 0.0))
    stat = float(np.max(np.abs(pg), initial=0.0))
    feas = float(np.max(np.abs(res), initial=0.0))
    return feas, stat, nu


def _solve_damped(h, g):
    """Solve h d = -g with escalating Tikhonov damping until Cholesky works."""
    n = h.shape[0]
    scale = max(1.0, float(np.max(np.abs(np.diag(h)), initial=0.0)))
    tau = 0.0
    for _ in range(40):
        try:
            chol = np.linalg.cholesky(h + tau * np.eye(n))
            return np.linalg.solve(chol.T, np.linalg.solve(chol, -g))
        except np.linalg.LinAlgError:
            tau = 1e-8 * scale if tau == 0.0 else tau * 10.0
    return -g  # pathological; fall back to steepest descent


def projected_newton(fun, grad, hess, x0, gtol, max_iter, act_eps=1e-12):
    """Minimize fun subject to x >= 0 with damped Newton steps.

    Binding coordinates (at the bound with nonnegative gradient) are frozen
    out of each Newton system; steps follow the projection arc with an
    Armijo backtracking search.  Returns (x, iterations).
    """
    x = np.maximum(np.asarray(x0, dtype=float), 0.0)
    f = fun(x)
    g = grad(x)
    iters = 0
    for iters in range(1, max_iter + 1):
        free = (x > act_eps) | (g < 0.0)
        pg = np.where(free, g, 0.0)
        if np.max(np.abs(pg), initial=0.0) < gtol:
            break
        idx = np.nonzero(free)[0]
        d = np.zeros_like(x)
        d[idx] = _solve_damped(hess(x)[np.ix_(idx, idx)], g[idx])
        if g @ d > 0.0:
            d = -pg
        alpha = 1.0
        ok = False
        for _ in range(50):
            x_new = np.maximum(x + alpha * d, 0.0)
            step = x_new - x
            if not step.any():
                break
            f_new = fun(x_new)
            if f_new <= f + 1e-4 * (g @ step):
                ok = True
                break
            alpha *= 0.5
        if not ok:
            break
        x, f = x_new, f_new
        g = grad(x)
    return x, iters


def augmented_lagrangian(
    problem: BoxProblem,
    x0: np.ndarray,
    tol: float,
    max_outer: int = 40,
    max_inner: int = 60,
    mu0: float = 1e3,
    mu_max: float = 1e12,
) -> LocalResult:
    """Drive feasibility and stationarity below ``tol``.

    Multipliers are updated whenever the feasibility target is met,
    otherwise the penalty grows.  The starting penalty is deliberately
    large: starts are typically feasible (seeded stage by stage) and a weak
    penalty lets the linear objective drag iterates far off the constraint
    manifold, sometimes into infeasible basins.  When an outer round makes
    feasibility much worse than the best seen, the iterate is rolled back
    and the multipliers reset.  The loop reports "diverged_penalty" when
    the penalty hits its cap without reaching feasibility.
    """
    x = np.maximum(np.asarray(x0, dtype=float), 0.0)
    res = problem.residual(x)
    jac = problem.jacobian(x)
    feas, stat, nu = kkt_measures(x, res, jac)
    if feas < tol and stat < tol:
        return LocalResult(x, True, "converged", 0, 0, feas, stat, nu)

    lam = np.zeros(res.size)
    mu = mu0
    eta = 0.1
    omega = 1e-3
    inner_total = 0
    best = (max(feas, stat), x.copy())
    for outer in range(1, max_outer + 1):

        def fun(z, lam=lam, mu=mu):
            c = problem.residual(z)
            return float(z.sum() + lam @ c + 0.5 * mu * (c @ c))

        def grad(z, lam=lam, mu=mu):
            c = problem.residual(z)
            return 1.0 + problem.jacobian(z).T @ (lam + mu * c)

        def hess(z, lam=lam, mu=mu):
            c = problem.residual(z)
            j = problem.jacobian(z)
            return problem.hessian(z, lam + mu * c) + mu * (j.T @ j)

        x, it = projected_newton(fun, grad, hess, x, max(omega, 0.02 * tol), max_inner)
        inner_total += it
        res = problem.residual(x)
        jac = problem.jacobian(x)
        feas, stat, nu = kkt_measures(x, res, jac)
        if feas < tol and stat < tol:
            return LocalResult(x, True, "converged", outer, inner_total, feas, stat, nu)
        if max(feas, stat) < best[0]:
            best = (max(feas, stat), x.copy())
        if feas > 10.0 * max(best[0], tol) and feas > 1e-6:
            # The objective dragged the iterate off the manifold; restart
            # the multiplier estimate from the best point with more penalty.
            x = best[1].copy()
            lam = np.zeros(res.size)
            mu = min(mu * 10.0, mu_max)
            res = problem.residual(x)
            jac = problem.jacobian(x)
            feas = float(np.max(np.abs(res), initial=0.0))
            if mu >= mu_max:
                feas, stat, nu = kkt_measures(x, res, jac)
                return LocalResult(
                    x, False, "diverged_penalty", outer, inner_total, feas, stat, nu
                )
            continue
        if feas <= max(eta, tol):
            lam = lam + mu * res
            eta = max(eta / mu**0.9, 0.1 * tol)
            omega = max(omega / mu, 0.02 * tol)
        else:
            if mu >= mu_max:
                return LocalResult(
                    x, False, "diverged_penalty", outer, inner_total, feas, stat, nu
                )
            mu = min(mu * 10.0, mu_max)
            eta = max(mu**-0.1, 0.1 * tol)
            omega = max(1.0 / mu, 0.02 * tol)
    feas, stat, nu = kkt_measures(x, res, jac)
    return LocalResult(x, False, "max_iterations", max_outer, inner_total, feas, stat, nu)


def newton_polish(
    problem: BoxProblem,
    x: np.ndarray,
    free: np.ndarray,
    tol: float,
    nu0: np.ndarray | None = None,
    max_iter: int = 50,
):
    """Newton iteration on the first-order system over the free variables.

    Solves [grad_L(x, nu); c(x)] = 0 for (x_free, nu) with damped
    least-squares Newton steps (the constraint Jacobian carries one exact
    rank deficiency because the terminal heading enters through both its
    sine and cosine, so plain factorizations are not an option).  Free
    variables are kept nonnegative by step capping.

    Returns (x, nu, converged, residual_norm).
    """
    x = np.array(x, dtype=float)
    idx = np.nonzero(free)[0]
    m = problem.residual(x).size

    def system(xv, nuv):
        c = problem.residual(xv)
        jf = problem.jacobian(xv)[:, idx]
        gl = 1.0 + jf.T @ nuv
        return c, jf, np.concatenate([gl, c])

    if nu0 is None:
        jf0 = problem.jacobian(x)[:, idx]
        nu, *_ = np.linalg.lstsq(jf0.T, -np.ones(idx.size), rcond=None)
    else:
        nu = np.array(nu0, dtype=float)
    c, jf, fvec = system(x, nu)
    fnorm = float(np.linalg.norm(fvec))
    for _ in range(max_iter):
        if float(np.max(np.abs(fvec), initial=0.0)) < tol:
            return x, nu, True, float(np.max(np.abs(fvec), initial=0.0))
        hess = problem.hessian(x, nu)[np.ix_(idx, idx)]
        kkt = np.block([[hess, jf.T], [jf, np.zeros((m, m))]])
        step, *_ = np.linalg.lstsq(kkt, -fvec, rcond=None)
        dx = step[: idx.size]
        dnu = step[idx.size :]
        # Cap the step so free variables stay nonnegative.
        alpha = 1.0
        neg = dx < 0
        if neg.any():
            alpha = min(1.0, 0.999 * float(np.min(x[idx][neg] / -dx[neg])))
        improved = False
        for _ in range(40):
            x_try = x.copy()
            x_try[idx] = np.maximum(x[idx] + alpha * dx, 0.0)
            nu_try = nu + alpha * dnu
            c_t, jf_t, f_t = system(x_try, nu_try)
            fn = float(np.linalg.norm(f_t))
            if fn <= (1.0 - 1e-4 * alpha) * fnorm:
                x, nu, c, jf, fvec, fnorm = x_try, nu_try, c_t, jf_t, f_t, fn
                improved = True
                break
            alpha *= 0.5
        if not improved:
            break
    return x, nu, float(np.max(np.abs(fvec), initial=0.0)) < tol, float(
        np.max(np.abs(fvec), initial=0.0)
    )
