"""Numpy implementation of the closure kernels.

These functions are the hot inner loop of the solver: they evaluate the
per-stage closure constraints of the arc-length program and their exact
Jacobian.  A compiled twin lives in ``_ckernels.pyx``; both implementations
follow the same arithmetic order so their results agree to rounding.

Layout conventions
------------------
* ``xi`` is the flattened N x 5 subarc-length matrix (C order, length 5N).
* Slot curvature signs are (+1, -1, 0, +1, -1) times the bound ``a``.
* The residual vector has length 2N + 2 and is ordered
  ``[cx_1, cy_1, ..., cx_N, cy_N, r_sin, r_cos]`` where ``cx_i``/``cy_i``
  close stage i onto node i and the last two entries match the terminal
  heading through its sine and cosine (so whole windings are permitted).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

#: curvature-command sign per slot
_SLOT_SIGNS = np.array([1.0, -1.0, 0.0, 1.0, -1.0])


def heading_table(xi: np.ndarray, theta0: float, a: float) -> np.ndarray:
    """Headings (theta0, theta1, theta2, theta4, theta5) per stage, (N, 5).

    Stage entry headings are chained sequentially so that the exit heading
    of stage i is bitwise equal to the entry heading of stage i + 1.
    """
    x = np.asarray(xi, dtype=float).reshape(-1, 5)
    n = x.shape[0]
    table = np.empty((n, 5))
    t0 = float(theta0)
    for i in range(n):
        t1 = t0 + a * x[i, 0]
        t2 = t1 - a * x[i, 1]
        t4 = t2 + a * x[i, 3]
        t5 = t4 - a * x[i, 4]
        table[i, 0] = t0
        table[i, 1] = t1
        table[i, 2] = t2
        table[i, 3] = t4
        table[i, 4] = t5
        t0 = t5
    return table


def closure_residuals(
    xi: np.ndarray, nodes: np.ndarray, theta0: float, thetaf: float, a: float
) -> np.ndarray:
    """Residuals of the 2N + 2 equality constraints at ``xi``."""
    x = np.asarray(xi, dtype=float).reshape(-1, 5)
    n = x.shape[0]
    th = heading_table(x, theta0, a)
    s = np.sin(th)
    c = np.cos(th)
    xi3 = x[:, 2]
    res = np.empty(2 * n + 2)
    res[0 : 2 * n : 2] = (
        nodes[:-1, 0]
        - nodes[1:, 0]
        + (-s[:, 0] + 2.0 * s[:, 1] - 2.0 * s[:, 2] + 2.0 * s[:, 3] - s[:, 4]) / a
        + xi3 * c[:, 2]
    )
    res[1 : 2 * n : 2] = (
        nodes[:-1, 1]
        - nodes[1:, 1]
        + (c[:, 0] - 2.0 * c[:, 1] + 2.0 * c[:, 2] - 2.0 * c[:, 3] + c[:, 4]) / a
        + xi3 * s[:, 2]
    )
    res[2 * n] = s[n - 1, 4] - np.sin(thetaf)
    res[2 * n + 1] = c[n - 1, 4] - np.cos(thetaf)
    return res


def closure_jacobian(
    xi: np.ndarray, nodes: np.ndarray, theta0: float, thetaf: float, a: float
) -> np.ndarray:
    """Exact Jacobian of :func:`closure_residuals`, shape (2N+2, 5N).

    Headings are affine in the subarc lengths, so every entry is a short
    trigonometric expression.  A variable in an earlier stage shifts all
    headings of a later stage by the same amount, which gives the uniform
    column blocks below the diagonal.
    """
    x = np.asarray(xi, dtype=float).reshape(-1, 5)
    n = x.shape[0]
    th = heading_table(x, theta0, a)
    s = np.sin(th)
    c = np.cos(th)
    xi3 = x[:, 2]
    jac = np.zeros((2 * n + 2, 5 * n))

    # Sensitivity of stage i's closure to a uniform rotation of all its
    # headings; earlier-stage variables act exactly this way (scaled by
    # +-a depending on their slot sign).
    gx = (-c[:, 0] + 2.0 * c[:, 1] - 2.0 * c[:, 2] + 2.0 * c[:, 3] - c[:, 4]) / a - xi3 * s[:, 2]
    gy = (-s[:, 0] + 2.0 * s[:, 1] - 2.0 * s[:, 2] + 2.0 * s[:, 3] - s[:, 4]) / a + xi3 * c[:, 2]

    for i in range(n):
        if i > 0:
            block = (a * _SLOT_SIGNS)[None, :] * np.array([[gx[i]], [gy[i]]])
            jac[2 * i : 2 * i + 2, : 5 * i] = np.tile(block, (1, i))
        c1, c2, c4, c5 = c[i, 1], c[i, 2], c[i, 3], c[i, 4]
        s1, s2, s4, s5 = s[i, 1], s[i, 2], s[i, 3], s[i, 4]
        k = 5 * i
        jac[2 * i, k] = 2.0 * c1 - 2.0 * c2 + 2.0 * c4 - c5 - a * xi3[i] * s2
        jac[2 * i, k + 1] = 2.0 * c2 - 2.0 * c4 + c5 + a * xi3[i] * s2
        jac[2 * i, k + 2] = c2
        jac[2 * i, k + 3] = 2.0 * c4 - c5
        jac[2 * i, k + 4] = c5
        jac[2 * i + 1, k] = 2.0 * s1 - 2.0 * s2 + 2.0 * s4 - s5 + a * xi3[i] * c2
        jac[2 * i + 1, k + 1] = 2.0 * s2 - 2.0 * s4 + s5 - a * xi3[i] * c2
        jac[2 * i + 1, k + 2] = s2
        jac[2 * i + 1, k + 3] = 2.0 * s4 - s5
        jac[2 * i + 1, k + 4] = s5

    # Terminal sin/cos rows: the exit heading shifts with every slot of
    # every stage according to the slot sign.
    full_signs = np.tile(a * _SLOT_SIGNS, n)
    jac[2 * n, :] = c[n - 1, 4] * full_signs
    jac[2 * n + 1, :] = -s[n - 1, 4] * full_signs
    return jac


def _heading_weight_rows(n: int, i: int) -> np.ndarray:
    """Weight vectors v such that d(theta_j of stage i)/d(xi) = a * v.

    Returns a (5, 5n) array, one row per heading (theta0..theta5 order as in
    the heading table).
    """
    v = np.zeros((5, 5 * n))
    if i > 0:
        v[:, : 5 * i] = np.tile(_SLOT_SIGNS, (5, i))
    k = 5 * i
    v[1, k] = 1.0
    v[2, k] = 1.0
    v[2, k + 1] = -1.0
    v[3, k] = 1.0
    v[3, k + 1] = -1.0
    v[3, k + 3] = 1.0
    v[4, k] = 1.0
    v[4, k + 1] = -1.0
    v[4, k + 3] = 1.0
    v[4, k + 4] = -1.0
    return v


def lagrangian_hessian(
    xi: np.ndarray,
    nodes: np.ndarray,
    theta0: float,
    thetaf: float,
    a: float,
    nu: np.ndarray,
) -> np.ndarray:
    """Hessian of nu . closure_residuals(xi), shape (5N, 5N).

    Used only by the high-accuracy refinement step, so it is implemented
    here once (the compiled backend reuses it).
    """
    x = np.asarray(xi, dtype=float).reshape(-1, 5)
    n = x.shape[0]
    th = heading_table(x, theta0, a)
    s = np.sin(th)
    c = np.cos(th)
    alpha = np.array([-1.0, 2.0, -2.0, 2.0, -1.0]) / a
    beta = -alpha
    hess = np.zeros((5 * n, 5 * n))
    for i in range(n):
        v = _heading_weight_rows(n, i)
        v2 = v[2]
        e3 = np.zeros(5 * n)
        e3[5 * i + 2] = 1.0
        wx = -(a * a) * (alpha * s[i])  # coefficient of v_j v_j^T in d2(cx_i)
        wy = -(a * a) * (beta * c[i])
        coeff = nu[2 * i] * wx + nu[2 * i + 1] * wy
        hess += np.einsum("j,jk,jl->kl", coeff, v, v)
        cross = -a * s[i, 2] * nu[2 * i] + a * c[i, 2] * nu[2 * i + 1]
        hess += cross * (np.outer(e3, v2) + np.outer(v2, e3))
        bilin = -(a * a) * x[i, 2] * (c[i, 2] * nu[2 * i] + s[i, 2] * nu[2 * i + 1])
        hess += bilin * np.outer(v2, v2)
    vfull = np.tile(_SLOT_SIGNS, n)
    w_end = -(a * a) * (nu[2 * n] * s[n - 1, 4] + nu[2 * n + 1] * c[n - 1, 4])
    hess += w_end * np.outer(vfull, vfull)
    return hess
