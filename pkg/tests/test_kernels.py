"""Backend equivalence and derivative correctness of the closure kernels."""

import numpy as np
import pytest

from mdinterp import kernels
from mdinterp import _kernels_py

from fixtures import ALL_PROBLEMS, PROBLEM1
from oracles import fd_jacobian


def _random_cases(rng, n_stages, count):
    for _ in range(count):
        yield rng.uniform(0.0, 1.5, 5 * n_stages)


def test_backend_names():
    names = [name for name, _ in kernels.get_backends()]
    assert "python" in names
    assert kernels.BACKEND in names


@pytest.mark.parametrize("n_stages", [1, 3, 5, 19])
def test_backends_agree(n_stages):
    rng = np.random.default_rng(n_stages)
    nodes = rng.uniform(-2, 2, (n_stages + 1, 2))
    for xi in _random_cases(rng, n_stages, 10):
        nu = rng.normal(size=2 * n_stages + 2)
        args = (xi, nodes, -1.1, 0.7, 3.0)
        for name, mod in kernels.get_backends():
            ref = _kernels_py
            assert np.allclose(
                mod.closure_residuals(*args), ref.closure_residuals(*args), atol=1e-13
            ), name
            assert np.allclose(
                mod.closure_jacobian(*args), ref.closure_jacobian(*args), atol=1e-13
            ), name
            assert np.allclose(
                mod.lagrangian_hessian(*args, nu),
                ref.lagrangian_hessian(*args, nu),
                atol=1e-12,
            ), name
            assert np.array_equal(
                mod.heading_table(xi, -1.1, 3.0), ref.heading_table(xi, -1.1, 3.0)
            ), name


def test_heading_table_chains_bitwise():
    rng = np.random.default_rng(0)
    xi = rng.uniform(0, 1.5, 15)
    table = kernels.heading_table(xi, -0.5, 3.0)
    assert np.array_equal(table[1:, 0], table[:-1, 4])


@pytest.mark.parametrize("name", sorted(ALL_PROBLEMS))
def test_jacobian_matches_finite_differences(name):
    spec = ALL_PROBLEMS[name]
    n = spec.n_stages
    nodes = spec.nodes()
    rng = np.random.default_rng(17)

    def res(x):
        return kernels.closure_residuals(
            x, nodes, spec.start.theta, spec.end.theta, spec.curvature_bound
        )

    for xi in _random_cases(rng, n, 5):
        jac = kernels.closure_jacobian(
            xi, nodes, spec.start.theta, spec.end.theta, spec.curvature_bound
        )
        ref = fd_jacobian(res, xi)
        dev = np.abs(jac - ref) / np.maximum(1.0, np.abs(ref))
        assert dev.max() < 1e-6


def test_hessian_matches_finite_differences():
    spec = PROBLEM1
    nodes = spec.nodes()
    rng = np.random.default_rng(23)
    xi = rng.uniform(0, 1.5, 15)
    nu = rng.normal(size=8)

    def jtnu(x):
        return (
            kernels.closure_jacobian(
                x, nodes, spec.start.theta, spec.end.theta, spec.curvature_bound
            ).T
            @ nu
        )

    hess = kernels.lagrangian_hessian(
        xi, nodes, spec.start.theta, spec.end.theta, spec.curvature_bound, nu
    )
    ref = fd_jacobian(jtnu, xi)
    assert np.abs(hess - hess.T).max() < 1e-12
    dev = np.abs(hess - ref) / np.maximum(1.0, np.abs(ref))
    assert dev.max() < 1e-6
