import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from dgsem import basis
from dgsem.basis import apply_along_axis, build_operators, diff_matrix, lgl_rule, sbp_matrices
from dgsem.errors import BasisError


def test_lgl_rule_degree_one():
    nodes, weights = lgl_rule(1)
    assert_allclose(nodes, [-1.0, 1.0])
    assert_allclose(weights, [1.0, 1.0])


def test_lgl_rule_degree_two():
    nodes, weights = lgl_rule(2)
    assert_allclose(nodes, [-1.0, 0.0, 1.0], atol=1e-15)
    assert_allclose(weights, [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0], rtol=1e-14)
    assert np.dot(weights, nodes ** 2) == pytest.approx(2.0 / 3.0, rel=1e-14)


def test_degree_zero_rejected():
    with pytest.raises(BasisError):
        lgl_rule(0)


@pytest.mark.parametrize("degree", [3, 5, 8])
def test_nodes_match_extended_precision_roots(degree):
    nodes, _ = lgl_rule(degree)
    with mpmath.workdps(40):
        dP = lambda x: mpmath.diff(lambda y: mpmath.legendre(degree, y), x)  # noqa: E731
        roots = [mpmath.findroot(dP, mpmath.mpf(node)) for node in nodes[1:-1]]
    assert_allclose(nodes[1:-1], [float(root) for root in roots], atol=1e-14)


@pytest.mark.parametrize("degree", range(1, 17))
def test_quadrature_and_symmetry(degree):
    nodes, weights = lgl_rule(degree)
    assert np.all(np.diff(nodes) > 0.0)
    assert nodes[0] == -1.0 and nodes[-1] == 1.0
    assert np.all(weights > 0.0)
    assert np.sum(weights) == pytest.approx(2.0, rel=1e-14)
    assert_allclose(nodes, -nodes[::-1], atol=1e-15)
    assert_allclose(weights, weights[::-1], rtol=1e-15)
    for power in range(2 * degree):
        exact = 0.0 if power % 2 else 2.0 / (power + 1)
        assert np.dot(weights, nodes ** power) == pytest.approx(exact, abs=1e-13)


@pytest.mark.parametrize("degree", range(1, 17))
def test_sbp_property(degree):
    ops = build_operators(degree)
    tolerance = 1e-13 if degree <= 8 else 1e-12
    assert ops.sbp_residual() <= tolerance
    assert_allclose(ops.Q @ np.ones(ops.size), 0.0, atol=1e-12)
    assert np.count_nonzero(ops.B) == 2


def test_degree_one_matrices():
    ops = build_operators(1)
    assert_allclose(ops.D, [[-0.5, 0.5], [-0.5, 0.5]])
    assert_allclose(ops.Q, [[-0.5, 0.5], [-0.5, 0.5]])
    assert_allclose(ops.Q + ops.Q.T, np.diag([-1.0, 1.0]))


@pytest.mark.parametrize("degree", [2, 4, 7, 10])
def test_differentiation_exact_on_polynomials(degree):
    nodes, _ = lgl_rule(degree)
    D = diff_matrix(nodes)
    assert_allclose(D @ np.ones_like(nodes), 0.0, atol=1e-12)
    assert_allclose(D @ nodes ** degree, degree * nodes ** (degree - 1), atol=1e-12)


def test_duplicate_nodes_rejected():
    with pytest.raises(BasisError):
        diff_matrix(np.array([-1.0, 0.0, 0.0, 1.0]))


@pytest.mark.parametrize("degree", [2, 5, 8])
def test_discrete_integration_by_parts(degree, rng):
    ops = build_operators(degree)
    W = np.diag(ops.weights)
    for _ in range(100):
        u = np.polynomial.legendre.legval(ops.nodes, rng.normal(size=degree + 1))
        v = np.polynomial.legendre.legval(ops.nodes, rng.normal(size=degree + 1))
        left = u @ W @ (ops.D @ v)
        right = u[-1] * v[-1] - u[0] * v[0] - (ops.D @ u) @ W @ v
        assert left == pytest.approx(right, abs=1e-12 * max(1.0, abs(left)))


def test_sbp_matrices_from_inputs():
    nodes, weights = lgl_rule(3)
    Q, B = sbp_matrices(diff_matrix(nodes), weights)
    assert_allclose(Q + Q.T, B, atol=1e-13)
    assert B[0, 0] == -1.0 and B[-1, -1] == 1.0


def test_operator_set_is_immutable_and_cached():
    ops = build_operators(4)
    assert build_operators(4) is ops
    with pytest.raises(ValueError):
        ops.D[0, 0] = 1.0


def test_interpolation_matrix_reproduces_polynomials():
    ops = build_operators(5)
    points = np.linspace(-1.0, 1.0, 11)
    values = 3.0 * ops.nodes ** 5 - ops.nodes ** 2 + 0.5
    assert_allclose(ops.interpolation_matrix(points) @ values, 3.0 * points ** 5 - points ** 2 + 0.5, atol=1e-13)


def test_dump_lists_all_tables():
    text = build_operators(2).dump()
    for header in ("[nodes]", "[weights]", "[D]", "[Q]", "[B]"):
        assert header in text
    assert "0.33333333333333331" in text or "0.33333333333333337" in text


def test_apply_along_axis_matches_matrix_product(rng):
    ops = build_operators(3)
    field = rng.normal(size=(2, 4, 4, 4))
    result = apply_along_axis(ops.D, field, 2)
    assert_allclose(result, np.einsum("jm,kimo->kijo", ops.D, field))


@pytest.mark.parametrize("degree", [4, 7])
def test_bisection_fallback_reproduces_newton_rule(degree, monkeypatch):
    nodes, weights = lgl_rule(degree)
    monkeypatch.setattr(basis, "_newton_lobatto", lambda n: (np.zeros(n + 1), False))
    with np.errstate(all="raise"):
        fallback_nodes, fallback_weights = lgl_rule(degree)
    assert fallback_nodes[0] == -1.0 and fallback_nodes[-1] == 1.0
    assert_allclose(fallback_nodes, nodes, atol=1e-14)
    assert_allclose(fallback_weights, weights, rtol=1e-13)
