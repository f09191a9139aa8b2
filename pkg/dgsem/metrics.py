"""
Metric terms of curvilinear hexahedra.

Nodal fields are stored as arrays indexed ``[element, i, j, k, ...]`` where
i, j, k run over the LGL nodes in the xi, eta and zeta directions.
Contravariant vectors are stored as ``Ja[..., l, n]`` = (Ja^l)_n.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .basis import OperatorSet, apply_along_axis
from .errors import MeshError

logger = logging.getLogger(__name__)

# side number -> (reference direction, index position: 0 lower / 1 upper)
SIDES = {
    1: (0, 0),
    2: (0, 1),
    3: (1, 0),
    4: (1, 1),
    5: (2, 0),
    6: (2, 1),
}


@dataclass
class MetricData:
    """Jacobian, covariant and contravariant metric vectors at every node."""
    jacobian: np.ndarray        # (K, n, n, n)
    contravariant: np.ndarray   # (K, n, n, n, 3, 3)  Ja^l_n
    covariant: np.ndarray       # (K, n, n, n, 3, 3)  a_i components


def reference_derivative(ops: OperatorSet, field: np.ndarray, direction: int) -> np.ndarray:
    """d/d xi^direction of a nodal field with leading element axis."""
    return apply_along_axis(ops.D, field, direction + 1)


def covariant_vectors(geometry: np.ndarray, ops: OperatorSet) -> np.ndarray:
    """a_i = dX/d xi^i, shape (K, n, n, n, 3, 3) with a[..., i, :]."""
    return np.stack([reference_derivative(ops, geometry, direction) for direction in range(3)], axis=-2)


def _jacobian(covariant: np.ndarray) -> np.ndarray:
    return np.einsum("...d,...d->...", covariant[..., 0, :],
                     np.cross(covariant[..., 1, :], covariant[..., 2, :]))


def _check_positive_jacobian(jacobian: np.ndarray) -> None:
    if np.all(jacobian > 0.0):
        return
    index = np.unravel_index(int(np.argmin(jacobian)), jacobian.shape)
    raise MeshError(f"Non-positive Jacobian {jacobian[index]:.6e}",
                    element=int(index[0]), node=tuple(int(i) for i in index[1:]))


def compute_metrics_curl_form(geometry: np.ndarray, ops: OperatorSet) -> MetricData:
    """
    Contravariant metrics in conservative curl form,
    Ja^i_n = -x_i . curl_xi( I^N(X_l grad_xi X_m) ) for cyclic (n, m, l).

    The curl of a nodal field differentiated with the tensor-product D commutes
    across directions, so the discrete metric identities hold to round-off.
    """
    if geometry.shape[1] != ops.size:
        raise MeshError(f"Geometry degree {geometry.shape[1] - 1} does not match operators N={ops.degree}")
    covariant = covariant_vectors(geometry, ops)
    contravariant = np.empty_like(covariant)
    for n in range(3):
        m, l = (n + 1) % 3, (n + 2) % 3
        # V_r = X_l dX_m/dxi^r
        V = [geometry[..., l] * covariant[..., r, m] for r in range(3)]
        curl = (
            reference_derivative(ops, V[2], 1) - reference_derivative(ops, V[1], 2),
            reference_derivative(ops, V[0], 2) - reference_derivative(ops, V[2], 0),
            reference_derivative(ops, V[1], 0) - reference_derivative(ops, V[0], 1),
        )
        for i in range(3):
            contravariant[..., i, n] = -curl[i]
    jacobian = _jacobian(covariant)
    _check_positive_jacobian(jacobian)
    return MetricData(jacobian=jacobian, contravariant=contravariant, covariant=covariant)


def compute_metrics_cross_product(geometry: np.ndarray, ops: OperatorSet) -> MetricData:
    """Naive nodal metrics Ja^i = a_j x a_k; kept as a control for the identity check."""
    covariant = covariant_vectors(geometry, ops)
    contravariant = np.stack([
        np.cross(covariant[..., 1, :], covariant[..., 2, :]),
        np.cross(covariant[..., 2, :], covariant[..., 0, :]),
        np.cross(covariant[..., 0, :], covariant[..., 1, :]),
    ], axis=-2)
    jacobian = _jacobian(covariant)
    _check_positive_jacobian(jacobian)
    return MetricData(jacobian=jacobian, contravariant=contravariant, covariant=covariant)


def check_metric_identities(metrics: MetricData, ops: OperatorSet) -> float:
    """max over nodes and n of |sum_l d/dxi^l (Ja^l_n)|."""
    residual = sum(reference_derivative(ops, metrics.contravariant[..., l, :], l) for l in range(3))
    return float(np.max(np.abs(residual)))


def side_trace(field: np.ndarray, side: int) -> np.ndarray:
    """Restrict a nodal field (K, n, n, n, ...) to one element side -> (K, n, n, ...)."""
    direction, upper = SIDES[side]
    index = -1 if upper else 0
    return np.take(field, index, axis=direction + 1)


def face_geometry(metrics: MetricData, side: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Outward unit normal and surface element on one side of every element,
    s n = +/- Ja^l at the face nodes.
    """
    if side not in SIDES:
        raise MeshError(f"Invalid side index {side}, expected 1..6")
    direction, upper = SIDES[side]
    sign = 1.0 if upper else -1.0
    scaled_normal = sign * side_trace(metrics.contravariant[..., direction, :], side)
    surface = np.linalg.norm(scaled_normal, axis=-1)
    if np.any(surface <= 0.0):
        index = np.unravel_index(int(np.argmin(surface)), surface.shape)
        raise MeshError(f"Degenerate face on side {side}", element=int(index[0]),
                        node=tuple(int(i) for i in index[1:]))
    return scaled_normal / surface[..., None], surface
