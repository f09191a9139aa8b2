"""
Compressible Navier-Stokes state algebra in free-stream scaled form and the
scalar 1D model problems.

States are arrays with a trailing axis of length 5,
u = (rho, rho v1, rho v2, rho v3, rho E). Block fluxes carry one more axis of
length 3 in front of it: f[..., i, :] is the flux in direction x_i.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import PositivityError, StateError

logger = logging.getLogger(__name__)

DENSITY_FLOOR = 1e-10
PRESSURE_FLOOR = 1e-10

ArrayLike = Union[np.ndarray, float]


@dataclass(frozen=True)
class GasParams:
    """Ideal gas with constant viscosity; reynolds=inf switches viscous terms off."""
    gamma: float = 1.4
    reynolds: float = math.inf
    prandtl: float = 0.72
    mach: float = 0.1
    viscosity: float = 1.0

    def __post_init__(self):
        for name in ("gamma", "reynolds", "prandtl", "mach", "viscosity"):
            if not getattr(self, name) > 0.0:
                raise StateError(f"Gas parameter {name} must be positive, got {getattr(self, name)}")
        if self.gamma <= 1.0:
            raise StateError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def is_viscous(self) -> bool:
        return math.isfinite(self.reynolds)

    @property
    def heat_conductivity(self) -> float:
        """lambda = mu / ((gamma - 1) Pr M^2)."""
        return self.viscosity / ((self.gamma - 1.0) * self.prandtl * self.mach ** 2)


def _locate(mask: np.ndarray) -> Tuple[Optional[int], Optional[tuple]]:
    index = np.unravel_index(int(np.argmax(mask)), mask.shape)
    if mask.ndim >= 2:
        return int(index[0]), tuple(int(i) for i in index[1:])
    return None, tuple(int(i) for i in index)


def check_state(u: np.ndarray, gas: GasParams) -> None:
    """Raise PositivityError at the first node with rho or p below the floor, or non-finite data."""
    u = np.asarray(u)
    if not np.all(np.isfinite(u)):
        element, node = _locate(~np.all(np.isfinite(u), axis=-1))
        raise PositivityError("Non-finite state", element=element, node=node)
    rho = u[..., 0]
    p = pressure(u, gas, checked=False)
    bad = (rho <= DENSITY_FLOOR) | (p <= PRESSURE_FLOOR)
    if np.any(bad):
        element, node = _locate(bad)
        index = ((element,) if element is not None else ()) + node
        raise PositivityError("Density or pressure below floor", element=element, node=node,
                              density=float(rho[index]), pressure=float(p[index]))


def velocity(u: np.ndarray) -> np.ndarray:
    return u[..., 1:4] / u[..., :1]


def pressure(u: np.ndarray, gas: GasParams, checked: bool = True) -> np.ndarray:
    """p = (gamma - 1)(rho E - rho |v|^2 / 2)."""
    u = np.asarray(u, dtype=float)
    rho = u[..., 0]
    if checked and np.any(rho <= 0.0):
        raise StateError("Pressure requested for non-positive density")
    kinetic = 0.5 * np.sum(u[..., 1:4] ** 2, axis=-1) / rho
    return (gas.gamma - 1.0) * (u[..., 4] - kinetic)


def primitive_from_conservative(u: np.ndarray, gas: GasParams) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rho, v, p)."""
    return u[..., 0], velocity(u), pressure(u, gas)


def conservative_from_primitive(rho: ArrayLike, v: np.ndarray, p: ArrayLike, gas: GasParams) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    u = np.empty(np.broadcast(rho, p, v[..., 0]).shape + (5,))
    u[..., 0] = rho
    u[..., 1:4] = rho[..., None] * v
    u[..., 4] = p / (gas.gamma - 1.0) + 0.5 * rho * np.sum(v ** 2, axis=-1)
    return u


def sound_speed(u: np.ndarray, gas: GasParams) -> np.ndarray:
    return np.sqrt(gas.gamma * pressure(u, gas) / u[..., 0])


def euler_flux(u: np.ndarray, gas: GasParams) -> np.ndarray:
    """Advective block flux f[..., i, :] for i = 1, 2, 3."""
    u = np.asarray(u, dtype=float)
    rho, v, p = primitive_from_conservative(u, gas)
    flux = np.empty(u.shape[:-1] + (3, 5))
    for i in range(3):
        flux[..., i, 0] = u[..., 1 + i]
        flux[..., i, 1:4] = u[..., 1 + i, None] * v
        flux[..., i, 1 + i] += p
        flux[..., i, 4] = v[..., i] * (u[..., 4] + p)
    return flux


def normal_flux(u: np.ndarray, normal: np.ndarray, gas: GasParams) -> np.ndarray:
    """f . n for a (possibly non-unit) direction vector."""
    return np.einsum("...i,...iv->...v", normal, euler_flux(u, gas))


def physical_entropy(u: np.ndarray, gas: GasParams) -> np.ndarray:
    """varsigma = ln p - gamma ln rho."""
    return np.log(pressure(u, gas)) - gas.gamma * np.log(u[..., 0])


def entropy_variables(u: np.ndarray, gas: GasParams) -> np.ndarray:
    """w = ds/du for s = -rho varsigma / (gamma - 1)."""
    u = np.asarray(u, dtype=float)
    rho, v, p = primitive_from_conservative(u, gas)
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise StateError("Entropy variables need rho > 0 and p > 0")
    varsigma = np.log(p) - gas.gamma * np.log(rho)
    beta = rho / p
    w = np.empty_like(u)
    w[..., 0] = (gas.gamma - varsigma) / (gas.gamma - 1.0) - 0.5 * beta * np.sum(v ** 2, axis=-1)
    w[..., 1:4] = beta[..., None] * v
    w[..., 4] = -beta
    return w


def conservative_from_entropy(w: np.ndarray, gas: GasParams) -> np.ndarray:
    """Inverse of entropy_variables; requires w5 < 0."""
    w = np.asarray(w, dtype=float)
    w5 = w[..., 4]
    if np.any(w5 >= 0.0):
        raise StateError("Entropy variables need w5 < 0")
    v = -w[..., 1:4] / w5[..., None]
    varsigma = gas.gamma - (gas.gamma - 1.0) * (w[..., 0] - 0.5 * w5 * np.sum(v ** 2, axis=-1))
    rho = np.exp((varsigma + np.log(-w5)) / (1.0 - gas.gamma))
    p = -rho / w5
    return conservative_from_primitive(rho, v, p, gas)


def entropy_and_flux(u: np.ndarray, gas: GasParams) -> Tuple[np.ndarray, np.ndarray]:
    """Mathematical entropy s = -rho varsigma / (gamma - 1) and entropy flux s v."""
    u = np.asarray(u, dtype=float)
    s = -u[..., 0] * physical_entropy(u, gas) / (gas.gamma - 1.0)
    return s, s[..., None] * velocity(u)


def entropy_potential(u: np.ndarray, gas: GasParams) -> np.ndarray:
    """Psi_l = w^T f_l - f^ent_l, which reduces to rho v_l."""
    w = entropy_variables(u, gas)
    _, entropy_flux = entropy_and_flux(u, gas)
    return np.einsum("...v,...iv->...i", w, euler_flux(u, gas)) - entropy_flux


def velocity_gradient_from_entropy(u: np.ndarray, grad_w: np.ndarray, gas: GasParams) -> np.ndarray:
    """
    dv_j/dx_i from entropy-variable gradients, using w_{1+j} = -w5 v_j:
    grad v_j = -(grad w_{1+j} + v_j grad w5) / w5.
    Returns (..., 3 (i), 3 (j)).
    """
    rho, v, p = primitive_from_conservative(u, gas)
    inv_beta = (p / rho)[..., None, None]
    return inv_beta * (grad_w[..., :, 1:4] + v[..., None, :] * grad_w[..., :, 4:5])


def temperature_gradient_from_entropy(u: np.ndarray, grad_w: np.ndarray, gas: GasParams) -> np.ndarray:
    """T = gamma M^2 p / rho = -gamma M^2 / w5, so grad T = gamma M^2 grad w5 / w5^2."""
    rho, _, p = primitive_from_conservative(u, gas)
    w5 = -rho / p
    return gas.gamma * gas.mach ** 2 * grad_w[..., :, 4] / (w5 ** 2)[..., None]


def viscous_flux(u: np.ndarray, grad_w: np.ndarray, gas: GasParams) -> np.ndarray:
    """
    Viscous block flux f_v[..., i, :] from the state and the entropy-variable
    gradient block grad_w[..., i, :]. The 1/Re factor is applied by the operator.
    """
    u = np.asarray(u, dtype=float)
    grad_w = np.asarray(grad_w, dtype=float)
    mu = gas.viscosity
    grad_v = velocity_gradient_from_entropy(u, grad_w, gas)
    grad_t = temperature_gradient_from_entropy(u, grad_w, gas)
    divergence = np.trace(grad_v, axis1=-2, axis2=-1)
    tau = mu * (grad_v + np.swapaxes(grad_v, -1, -2))
    tau -= (2.0 / 3.0) * mu * divergence[..., None, None] * np.eye(3)
    v = velocity(u)
    flux = np.zeros(u.shape[:-1] + (3, 5))
    flux[..., :, 1:4] = tau
    flux[..., :, 4] = np.einsum("...ij,...j->...i", tau, v) + gas.heat_conductivity * grad_t
    return flux


# ---------------------------------------------------------------------------
# scalar model problems
# ---------------------------------------------------------------------------

def burgers_flux(u: ArrayLike) -> ArrayLike:
    return 0.5 * np.square(u)


def burgers_entropy(u: ArrayLike) -> ArrayLike:
    return 0.5 * np.square(u)


def burgers_entropy_variable(u: ArrayLike) -> ArrayLike:
    return u


def burgers_entropy_flux(u: ArrayLike) -> ArrayLike:
    return np.power(u, 3) / 3.0


def burgers_viscosity(u: ArrayLike, base: float, growth: float = 0.0) -> ArrayLike:
    """b(u) = b0 (1 + c u^2)."""
    return base * (1.0 + growth * np.square(u))


def linear_advdiff_coeffs(x: np.ndarray, speed: float, diffusion: float,
                          amplitude: float = 0.0, wavenumber: float = 1.0) -> Tuple[float, np.ndarray]:
    """
    Constant advection speed a and diffusion b(x) = b0 + b1 sin(k x) sampled at x.
    b identically zero (pure advection) is accepted; otherwise b must be positive.
    """
    if speed <= 0.0:
        raise StateError(f"Advection speed must be positive, got {speed}")
    b = diffusion + amplitude * np.sin(wavenumber * np.asarray(x, dtype=float))
    if np.any(b <= 0.0) and (diffusion > 0.0 or amplitude != 0.0):
        raise StateError(f"Diffusion coefficient must be positive, min b = {float(np.min(b)):.3e}")
    return speed, b


def diffusion_profile(diffusion: float, amplitude: float = 0.0,
                      wavenumber: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: diffusion + amplitude * np.sin(wavenumber * np.asarray(x, dtype=float))
