"""
Legendre-Gauss-Lobatto quadrature, Lagrange differentiation and
summation-by-parts matrices on the reference interval [-1, 1].
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from .errors import BasisError

logger = logging.getLogger(__name__)

MAX_SUPPORTED_DEGREE = 32
NODE_TOLERANCE = 1e-15
MAX_NEWTON_ITERATIONS = 100
MAX_BISECTION_ITERATIONS = 200


def legendre_with_derivative(degree: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Evaluate P_N, P_{N-1} and P'_N at x with the three-term recurrence.
    """
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if degree == 0:
        return p_prev, np.zeros_like(x), np.zeros_like(x)
    p = x.copy()
    dp_prev = np.zeros_like(x)
    dp = np.ones_like(x)
    for k in range(1, degree):
        p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        dp_next = dp_prev + (2 * k + 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, p_prev, dp


def _newton_lobatto(degree: int) -> Tuple[np.ndarray, bool]:
    """Newton iteration on (1-x^2) P'_N from Chebyshev-Gauss-Lobatto guesses."""
    nodes = -np.cos(np.pi * np.arange(degree + 1) / degree)
    for _ in range(MAX_NEWTON_ITERATIONS):
        p, p_prev, _ = legendre_with_derivative(degree, nodes)
        update = (nodes * p - p_prev) / ((degree + 1) * p)
        nodes = nodes - update
        if np.max(np.abs(update)) <= NODE_TOLERANCE:
            return nodes, True
    return nodes, False


def _bisect_interior_node(degree: int, index: int, left: float, right: float) -> float:
    """Bisection on P'_N inside a bracket formed by consecutive roots of P_N."""
    _, _, f_left = legendre_with_derivative(degree, np.array([left]))
    _, _, f_right = legendre_with_derivative(degree, np.array([right]))
    if f_left[0] * f_right[0] > 0.0:
        raise BasisError(f"No sign change bracketing LGL node {index} for N={degree}")
    for _ in range(MAX_BISECTION_ITERATIONS):
        middle = 0.5 * (left + right)
        _, _, f_middle = legendre_with_derivative(degree, np.array([middle]))
        if f_left[0] * f_middle[0] <= 0.0:
            right = middle
        else:
            left, f_left = middle, f_middle
        if right - left <= NODE_TOLERANCE:
            return 0.5 * (left + right)
    raise BasisError(f"Bisection did not converge for LGL node {index} (N={degree})")


def lgl_rule(degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Legendre-Gauss-Lobatto nodes and weights for polynomial degree N.

    The nodes are the roots of (1 - x^2) P'_N(x), ordered increasingly with
    exact end points. The rule integrates polynomials up to degree 2N-1 exactly.
    """
    if degree < 1:
        raise BasisError(f"LGL rule needs degree >= 1, got {degree}")
    if degree > MAX_SUPPORTED_DEGREE:
        logger.warning("Degree %d exceeds the verified range (<= %d)", degree, MAX_SUPPORTED_DEGREE)

    nodes, converged = _newton_lobatto(degree)
    if not converged:
        logger.warning("Newton iteration stalled for N=%d, switching to bisection", degree)
        gauss_roots = np.polynomial.legendre.leggauss(degree)[0]
        nodes = np.empty(degree + 1)
        nodes[0], nodes[-1] = -1.0, 1.0
        for index in range(1, degree):
            nodes[index] = _bisect_interior_node(degree, index, gauss_roots[index - 1], gauss_roots[index])

    # symmetric about the origin, end points exact
    nodes = 0.5 * (nodes - nodes[::-1])
    nodes[0], nodes[-1] = -1.0, 1.0
    if degree % 2 == 0:
        nodes[degree // 2] = 0.0

    p_n, _, _ = legendre_with_derivative(degree, nodes)
    weights = 2.0 / (degree * (degree + 1) * p_n ** 2)
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Barycentric weights 1 / prod_{k != j} (x_j - x_k)."""
    nodes = np.asarray(nodes, dtype=float)
    differences = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(differences, 1.0)
    return 1.0 / np.prod(differences, axis=1)


def _check_distinct(nodes: np.ndarray) -> None:
    gaps = np.diff(np.sort(nodes))
    if gaps.size and np.min(gaps) <= 0.0:
        duplicate = int(np.argmin(gaps))
        raise BasisError(f"Duplicate interpolation nodes near index {duplicate}")


def diff_matrix(nodes: np.ndarray) -> np.ndarray:
    """
    Lagrange differentiation matrix D_ij = l'_j(x_i) in barycentric form.

    Diagonal entries are the negative row sums, so constants are
    differentiated to zero exactly.
    """
    nodes = np.asarray(nodes, dtype=float)
    _check_distinct(nodes)
    weights = barycentric_weights(nodes)
    differences = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(differences, 1.0)
    matrix = (weights[None, :] / weights[:, None]) / differences
    np.fill_diagonal(matrix, 0.0)
    np.fill_diagonal(matrix, -np.sum(matrix, axis=1))
    return matrix


def sbp_matrices(D: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """SBP matrix Q = diag(w) D and boundary matrix B = diag(-1, 0, ..., 0, 1)."""
    Q = np.asarray(weights)[:, None] * np.asarray(D)
    B = np.zeros_like(Q)
    B[0, 0] = -1.0
    B[-1, -1] = 1.0
    return Q, B


def interpolation_matrix(nodes: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Matrix evaluating the nodal interpolant at arbitrary points."""
    nodes = np.asarray(nodes, dtype=float)
    points = np.atleast_1d(np.asarray(points, dtype=float))
    weights = barycentric_weights(nodes)
    differences = points[:, None] - nodes[None, :]
    exact = np.isclose(differences, 0.0, rtol=0.0, atol=1e-15)
    differences[exact] = 1.0
    terms = weights[None, :] / differences
    matrix = terms / np.sum(terms, axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    matrix[rows] = exact[rows].astype(float)
    return matrix


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class OperatorSet:
    """Nodal DGSEM operators for one polynomial degree (immutable)."""
    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    D: np.ndarray
    Q: np.ndarray
    B: np.ndarray

    @property
    def size(self) -> int:
        return self.degree + 1

    def sbp_residual(self) -> float:
        """max |Q + Q^T - B|."""
        return float(np.max(np.abs(self.Q + self.Q.T - self.B)))

    def interpolation_matrix(self, points: np.ndarray) -> np.ndarray:
        return interpolation_matrix(self.nodes, points)

    def dump(self) -> str:
        """Plain-text tables of the operator set, row-major, 17 significant digits."""
        lines = [f"# OperatorSet degree={self.degree}"]
        for name in ("nodes", "weights"):
            lines.append(f"[{name}]")
            lines.append(" ".join(f"{value:.17g}" for value in getattr(self, name)))
        for name in ("D", "Q", "B"):
            lines.append(f"[{name}]")
            for row in getattr(self, name):
                lines.append(" ".join(f"{value:.17g}" for value in row))
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def build_operators(degree: int) -> OperatorSet:
    """Build (and cache) the operator set for degree N."""
    nodes, weights = lgl_rule(degree)
    D = diff_matrix(nodes)
    Q, B = sbp_matrices(D, weights)
    logger.debug("Built LGL operators for N=%d (SBP residual %.2e)",
                 degree, float(np.max(np.abs(Q + Q.T - B))))
    return OperatorSet(degree=degree, nodes=_readonly(nodes), weights=_readonly(weights),
                       D=_readonly(D), Q=_readonly(Q), B=_readonly(B))


def apply_along_axis(D: np.ndarray, field: np.ndarray, axis: int) -> np.ndarray:
    """Apply a 1D operator along one tensor-product axis of a nodal field."""
    result = np.tensordot(D, field, axes=([1], [axis]))
    return np.moveaxis(result, 0, axis)
