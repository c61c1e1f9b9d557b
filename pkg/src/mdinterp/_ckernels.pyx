# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled closure kernels: the hot inner loop of the solver.

Mirrors ``_kernels_py`` (same arithmetic, same layouts); see that module
for the conventions.  The pure-python twin stays authoritative for
readability; this file exists because the multistart solver evaluates
these functions hundreds of thousands of times.
"""

import numpy as np

cimport numpy as cnp

from libc.math cimport cos, sin

cnp.import_array()

BACKEND = "compiled"


cdef cnp.ndarray[cnp.float64_t, ndim=2] _as_matrix(obj, Py_ssize_t ncols):
    """C-contiguous writable float64 view/copy with ``ncols`` columns."""
    arr = np.asarray(obj, dtype=np.float64)
    if ncols:
        arr = arr.reshape(-1, ncols)
    if not (arr.flags.c_contiguous and arr.flags.writeable):
        arr = np.array(arr, dtype=np.float64, order="C")
    return arr


def heading_table(xi, double theta0, double a):
    """Headings (theta0, theta1, theta2, theta4, theta5) per stage, (N, 5)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = _as_matrix(xi, 5)
    cdef Py_ssize_t n = x.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=2] table = np.empty((n, 5))
    cdef double t0 = theta0, t1, t2, t4, t5
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


cdef void _trig_tables(
    double[:, :] x,
    double theta0,
    double a,
    double[:, :] s,
    double[:, :] c,
) noexcept:
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef double th[5]
    cdef double t0 = theta0
    for i in range(n):
        th[0] = t0
        th[1] = th[0] + a * x[i, 0]
        th[2] = th[1] - a * x[i, 1]
        th[3] = th[2] + a * x[i, 3]
        th[4] = th[3] - a * x[i, 4]
        t0 = th[4]
        for j in range(5):
            s[i, j] = sin(th[j])
            c[i, j] = cos(th[j])


def closure_residuals(xi, nodes, double theta0, double thetaf, double a):
    """Residuals of the 2N + 2 equality constraints at ``xi``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = _as_matrix(xi, 5)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] nd = _as_matrix(nodes, 2)
    cdef Py_ssize_t n = x.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=2] s = np.empty((n, 5))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c = np.empty((n, 5))
    _trig_tables(x, theta0, a, s, c)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] res = np.empty(2 * n + 2)
    for i in range(n):
        res[2 * i] = (
            nd[i, 0]
            - nd[i + 1, 0]
            + (-s[i, 0] + 2.0 * s[i, 1] - 2.0 * s[i, 2] + 2.0 * s[i, 3] - s[i, 4]) / a
            + x[i, 2] * c[i, 2]
        )
        res[2 * i + 1] = (
            nd[i, 1]
            - nd[i + 1, 1]
            + (c[i, 0] - 2.0 * c[i, 1] + 2.0 * c[i, 2] - 2.0 * c[i, 3] + c[i, 4]) / a
            + x[i, 2] * s[i, 2]
        )
    res[2 * n] = s[n - 1, 4] - sin(thetaf)
    res[2 * n + 1] = c[n - 1, 4] - cos(thetaf)
    return res


def closure_jacobian(xi, nodes, double theta0, double thetaf, double a):
    """Exact Jacobian of :func:`closure_residuals`, shape (2N+2, 5N)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = _as_matrix(xi, 5)
    cdef Py_ssize_t n = x.shape[0], i, m, l
    cdef cnp.ndarray[cnp.float64_t, ndim=2] s = np.empty((n, 5))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c = np.empty((n, 5))
    _trig_tables(x, theta0, a, s, c)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] jac = np.zeros((2 * n + 2, 5 * n))
    cdef double gx, gy, xi3, rowsign
    cdef double signs[5]
    signs[0] = 1.0
    signs[1] = -1.0
    signs[2] = 0.0
    signs[3] = 1.0
    signs[4] = -1.0
    for i in range(n):
        xi3 = x[i, 2]
        gx = (-c[i, 0] + 2.0 * c[i, 1] - 2.0 * c[i, 2] + 2.0 * c[i, 3] - c[i, 4]) / a - xi3 * s[i, 2]
        gy = (-s[i, 0] + 2.0 * s[i, 1] - 2.0 * s[i, 2] + 2.0 * s[i, 3] - s[i, 4]) / a + xi3 * c[i, 2]
        for m in range(i):
            for l in range(5):
                jac[2 * i, 5 * m + l] = a * signs[l] * gx
                jac[2 * i + 1, 5 * m + l] = a * signs[l] * gy
        jac[2 * i, 5 * i] = 2.0 * c[i, 1] - 2.0 * c[i, 2] + 2.0 * c[i, 3] - c[i, 4] - a * xi3 * s[i, 2]
        jac[2 * i, 5 * i + 1] = 2.0 * c[i, 2] - 2.0 * c[i, 3] + c[i, 4] + a * xi3 * s[i, 2]
        jac[2 * i, 5 * i + 2] = c[i, 2]
        jac[2 * i, 5 * i + 3] = 2.0 * c[i, 3] - c[i, 4]
        jac[2 * i, 5 * i + 4] = c[i, 4]
        jac[2 * i + 1, 5 * i] = 2.0 * s[i, 1] - 2.0 * s[i, 2] + 2.0 * s[i, 3] - s[i, 4] + a * xi3 * c[i, 2]
        jac[2 * i + 1, 5 * i + 1] = 2.0 * s[i, 2] - 2.0 * s[i, 3] + s[i, 4] - a * xi3 * c[i, 2]
        jac[2 * i + 1, 5 * i + 2] = s[i, 2]
        jac[2 * i + 1, 5 * i + 3] = 2.0 * s[i, 3] - s[i, 4]
        jac[2 * i + 1, 5 * i + 4] = s[i, 4]
    for m in range(n):
        for l in range(5):
            rowsign = a * signs[l]
            jac[2 * n, 5 * m + l] = c[n - 1, 4] * rowsign
            jac[2 * n + 1, 5 * m + l] = -s[n - 1, 4] * rowsign
    return jac


def lagrangian_hessian(xi, nodes, double theta0, double thetaf, double a, nu):
    """Hessian of nu . closure_residuals(xi), shape (5N, 5N).

    Every heading is affine in xi with slot weights in {-1, 0, +1}, so the
    Hessian is accumulated from per-heading rank-one updates over the
    weight vectors plus the straight-slot coupling terms.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = _as_matrix(xi, 5)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.array(nu, dtype=np.float64, order="C")
    cdef Py_ssize_t n = x.shape[0], i, j, k, l, nv = 5 * n
    cdef cnp.ndarray[cnp.float64_t, ndim=2] s = np.empty((n, 5))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] c = np.empty((n, 5))
    _trig_tables(x, theta0, a, s, c)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] hess = np.zeros((nv, nv))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.empty(nv)
    cdef double signs[5]
    cdef double alpha[5]
    cdef double coeff, cross, bilin, vk, a2 = a * a
    signs[0] = 1.0
    signs[1] = -1.0
    signs[2] = 0.0
    signs[3] = 1.0
    signs[4] = -1.0
    alpha[0] = -1.0 / a
    alpha[1] = 2.0 / a
    alpha[2] = -2.0 / a
    alpha[3] = 2.0 / a
    alpha[4] = -1.0 / a
    # Heading weight rows per stage i and heading j (theta0..theta5): the
    # columns of earlier stages carry the slot signs, the in-stage part is
    # the cumulative-recurrence pattern.
    for i in range(n):
        for j in range(5):
            coeff = -a2 * alpha[j] * (w[2 * i] * s[i, j] - w[2 * i + 1] * c[i, j])
            if coeff == 0.0:
                continue
            _fill_weight(v, i, j, signs)
            _rank_one(hess, v, coeff, 5 * (i + 1))
        # Straight-slot couplings of stage i (heading index 2).
        _fill_weight(v, i, 2, signs)
        cross = -a * s[i, 2] * w[2 * i] + a * c[i, 2] * w[2 * i + 1]
        if cross != 0.0:
            k = 5 * i + 2
            for l in range(5 * (i + 1)):
                vk = cross * v[l]
                hess[k, l] += vk
                hess[l, k] += vk
        bilin = -a2 * x[i, 2] * (c[i, 2] * w[2 * i] + s[i, 2] * w[2 * i + 1])
        if bilin != 0.0:
            _rank_one(hess, v, bilin, 5 * (i + 1))
    # Terminal sin/cos rows: weight vector is the full slot-sign pattern.
    coeff = -a2 * (w[2 * n] * s[n - 1, 4] + w[2 * n + 1] * c[n - 1, 4])
    if coeff != 0.0:
        for i in range(n):
            for l in range(5):
                v[5 * i + l] = signs[l]
        _rank_one(hess, v, coeff, nv)
    return hess


cdef void _fill_weight(double[:] v, Py_ssize_t i, Py_ssize_t j, double* signs) noexcept:
    """Weight vector of heading j in stage i (nonzero up to column 5(i+1))."""
    cdef Py_ssize_t m, l
    for m in range(i):
        for l in range(5):
            v[5 * m + l] = signs[l]
    for l in range(5):
        v[5 * i + l] = 0.0
    if j >= 1:
        v[5 * i] = 1.0
    if j >= 2:
        v[5 * i + 1] = -1.0
    if j >= 3:
        v[5 * i + 3] = 1.0
    if j >= 4:
        v[5 * i + 4] = -1.0


cdef void _rank_one(double[:, :] hess, double[:] v, double coeff, Py_ssize_t upto) noexcept:
    cdef Py_ssize_t k, l
    cdef double vk
    for k in range(upto):
        vk = coeff * v[k]
        if vk == 0.0:
            continue
        for l in range(upto):
            hess[k, l] += vk * v[l]
