"""
Two-point numerical fluxes: the kinetic energy preserving and entropy
conservative (KEPEC) Euler flux, matrix dissipation, contravariant assembly,
BR1 averages and the scalar 1D fluxes.

All functions broadcast over leading axes; states carry a trailing axis of 5.
"""
import logging
from typing import Tuple

import numpy as np

from .errors import StateError
from .physics import GasParams, entropy_variables, pressure, velocity

logger = logging.getLogger(__name__)

LOG_MEAN_SWITCH = 1e-4


def log_mean(a_left: np.ndarray, a_right: np.ndarray) -> np.ndarray:
    """
    Logarithmic mean (aR - aL) / (ln aR - ln aL), with the series branch for
    nearly equal arguments: zeta = aL/aR, f = (zeta-1)/(zeta+1), u = f^2,
    mean = (aL + aR) / (2 F), F = 1 + u/3 + u^2/5 + u^3/7 for u < 1e-4.
    """
    a_left = np.asarray(a_left, dtype=float)
    a_right = np.asarray(a_right, dtype=float)
    if np.any(a_left <= 0.0) or np.any(a_right <= 0.0):
        raise StateError("Logarithmic mean needs positive arguments")
    zeta = a_left / a_right
    f = (zeta - 1.0) / (zeta + 1.0)
    u = f * f
    series = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = 0.5 * np.log(zeta) / f
    factor = np.where(u < LOG_MEAN_SWITCH, series, direct)
    return 0.5 * (a_left + a_right) / factor


def _averages(u_left: np.ndarray, u_right: np.ndarray, gas: GasParams):
    rho_l, rho_r = u_left[..., 0], u_right[..., 0]
    v_l, v_r = velocity(u_left), velocity(u_right)
    p_l, p_r = pressure(u_left, gas), pressure(u_right, gas)
    beta_l, beta_r = 0.5 * rho_l / p_l, 0.5 * rho_r / p_r
    rho_ln = log_mean(rho_l, rho_r)
    beta_ln = log_mean(beta_l, beta_r)
    v_avg = 0.5 * (v_l + v_r)
    p_hat = 0.5 * (rho_l + rho_r) / (beta_l + beta_r)
    v2_avg = 0.5 * (np.sum(v_l ** 2, axis=-1) + np.sum(v_r ** 2, axis=-1))
    v2_bar = 2.0 * np.sum(v_avg ** 2, axis=-1) - v2_avg
    return rho_ln, beta_ln, v_avg, p_hat, v2_bar


def _kepec_contracted(u_left: np.ndarray, u_right: np.ndarray, direction: np.ndarray,
                      gas: GasParams) -> np.ndarray:
    """sum_m direction_m F^ec_m(uL, uR)."""
    rho_ln, beta_ln, v_avg, p_hat, v2_bar = _averages(u_left, u_right, gas)
    p_ln = 0.5 * rho_ln / beta_ln
    vn = np.sum(v_avg * direction, axis=-1)
    mass = rho_ln * vn
    flux = np.empty(np.broadcast(mass[..., None], u_left).shape)
    flux[..., 0] = mass
    flux[..., 1:4] = mass[..., None] * v_avg + p_hat[..., None] * direction
    flux[..., 4] = p_ln * vn / (gas.gamma - 1.0) + p_hat * vn + 0.5 * mass * v2_bar
    return flux


def kepec_flux(u_left: np.ndarray, u_right: np.ndarray, direction: int, gas: GasParams) -> np.ndarray:
    """KEPEC flux in Cartesian direction l (0, 1, 2)."""
    unit = np.zeros(3)
    unit[direction] = 1.0
    return _kepec_contracted(u_left, u_right, unit, gas)


def contravariant_ec_flux(u_left: np.ndarray, u_right: np.ndarray, metric_average: np.ndarray,
                          gas: GasParams) -> np.ndarray:
    """KEPEC flux dotted with the two-point averaged metric vector."""
    return _kepec_contracted(u_left, u_right, np.asarray(metric_average, dtype=float), gas)


def tangent_frame(normal: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orthonormal tangents (t1, t2) for unit normals. t1 = e_a x n with a the axis
    following the largest-magnitude normal component; t2 = n x t1.
    """
    normal = np.asarray(normal, dtype=float)
    largest = np.argmax(np.abs(normal), axis=-1)
    axis = np.eye(3)[(largest + 1) % 3]
    t1 = np.cross(axis, normal)
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(normal, t1)
    return t1, t2


def matrix_dissipation_operator(u_left: np.ndarray, u_right: np.ndarray, normal: np.ndarray,
                                gas: GasParams) -> np.ndarray:
    """
    R |Lambda| T R^T of the averaged eigensystem in the rotated (n, t1, t2)
    frame, mapped back to Cartesian momentum components -> (..., 5, 5).
    """
    normal = np.broadcast_to(np.asarray(normal, dtype=float), u_left.shape[:-1] + (3,))
    t1, t2 = tangent_frame(normal)
    rotation = np.stack([normal, t1, t2], axis=-2)

    rho_ln, beta_ln, v_avg, p_hat, v2_bar = _averages(u_left, u_right, gas)
    v = np.einsum("...ij,...j->...i", rotation, v_avg)
    gamma = gas.gamma
    a_bar = np.sqrt(gamma * p_hat / rho_ln)
    h_bar = gamma / (2.0 * beta_ln * (gamma - 1.0)) + 0.5 * v2_bar

    shape = rho_ln.shape
    R = np.zeros(shape + (5, 5))
    R[..., 0, 0] = 1.0
    R[..., 0, 1] = 1.0
    R[..., 0, 4] = 1.0
    R[..., 1, 0] = v[..., 0] - a_bar
    R[..., 1, 1] = v[..., 0]
    R[..., 1, 4] = v[..., 0] + a_bar
    R[..., 2, 0] = v[..., 1]
    R[..., 2, 1] = v[..., 1]
    R[..., 2, 2] = 1.0
    R[..., 2, 4] = v[..., 1]
    R[..., 3, 0] = v[..., 2]
    R[..., 3, 1] = v[..., 2]
    R[..., 3, 3] = 1.0
    R[..., 3, 4] = v[..., 2]
    R[..., 4, 0] = h_bar - v[..., 0] * a_bar
    R[..., 4, 1] = 0.5 * v2_bar
    R[..., 4, 2] = v[..., 1]
    R[..., 4, 3] = v[..., 2]
    R[..., 4, 4] = h_bar + v[..., 0] * a_bar

    eigenvalues = np.abs(np.stack([v[..., 0] - a_bar, v[..., 0], v[..., 0], v[..., 0],
                                   v[..., 0] + a_bar], axis=-1))
    scaling = np.stack([rho_ln / (2.0 * gamma), rho_ln * (gamma - 1.0) / gamma,
                        p_hat, p_hat, rho_ln / (2.0 * gamma)], axis=-1)
    rotated = np.einsum("...ik,...k,...jk->...ij", R, eigenvalues * scaling, R)

    # back to Cartesian momentum: block-diag(1, rotation^T, 1) . rotated . block-diag(1, rotation, 1)
    frame = np.zeros(shape + (5, 5))
    frame[..., 0, 0] = 1.0
    frame[..., 4, 4] = 1.0
    frame[..., 1:4, 1:4] = rotation
    return np.einsum("...ki,...kl,...lj->...ij", frame, rotated, frame)


def es_dissipation(u_left: np.ndarray, u_right: np.ndarray, normal: np.ndarray,
                   surface: np.ndarray, gas: GasParams) -> np.ndarray:
    """Penalty -1/2 s R|Lambda|T R^T [w] added to the EC surface flux."""
    jump_w = entropy_variables(u_right, gas) - entropy_variables(u_left, gas)
    operator = matrix_dissipation_operator(u_left, u_right, normal, gas)
    penalty = -0.5 * np.einsum("...ij,...j->...i", operator, jump_w)
    return np.asarray(surface)[..., None] * penalty


def es_surface_flux(u_left: np.ndarray, u_right: np.ndarray, normal: np.ndarray,
                    surface: np.ndarray, gas: GasParams, dissipation: bool = True) -> np.ndarray:
    """s F^ec_n(uL, uR), plus matrix dissipation when requested."""
    surface = np.asarray(surface)
    flux = surface[..., None] * contravariant_ec_flux(u_left, u_right, normal, gas)
    if dissipation:
        flux = flux + es_dissipation(u_left, u_right, normal, surface, gas)
    return flux


def br1_average_state(w_left: np.ndarray, w_right: np.ndarray) -> np.ndarray:
    return 0.5 * (np.asarray(w_left) + np.asarray(w_right))


def br1_average_flux(flux_left: np.ndarray, flux_right: np.ndarray) -> np.ndarray:
    return 0.5 * (np.asarray(flux_left) + np.asarray(flux_right))


# ---------------------------------------------------------------------------
# scalar fluxes
# ---------------------------------------------------------------------------

def burgers_ec_flux(u_left: np.ndarray, u_right: np.ndarray) -> np.ndarray:
    """(uL^2 + uL uR + uR^2) / 6."""
    return (u_left * u_left + u_left * u_right + u_right * u_right) / 6.0


def burgers_lax_friedrichs_penalty(u_left: np.ndarray, u_right: np.ndarray) -> np.ndarray:
    """-(lambda/2)[u] with lambda = max(|uL|, |uR|)."""
    speed = np.maximum(np.abs(u_left), np.abs(u_right))
    return -0.5 * speed * (u_right - u_left)


def linear_flux(u_left: np.ndarray, u_right: np.ndarray, speed: float, sigma: float) -> np.ndarray:
    """a<U> - (sigma/2)|a|[U]; sigma = 1 upwind, sigma = 0 central."""
    return speed * 0.5 * (u_left + u_right) - 0.5 * sigma * abs(speed) * (u_right - u_left)
