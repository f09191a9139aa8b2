"""
Explicit low-storage Runge-Kutta integration and CFL step control.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import ConfigError, MeshError, StateError
from .mesh import Mesh, Mesh1D
from .physics import GasParams, sound_speed, velocity

logger = logging.getLogger(__name__)

RHS = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RkScheme:
    """2N-storage scheme: k = a_s k + dt f(u); u += b_s k."""
    name: str
    order: int
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]

    @property
    def stages(self) -> int:
        return len(self.b)


SCHEMES: Dict[str, RkScheme] = {
    # Carpenter & Kennedy, five stages, fourth order
    "lsrk54": RkScheme(
        name="lsrk54",
        order=4,
        a=(0.0,
           -567301805773.0 / 1357537059087.0,
           -2404267990393.0 / 2016746695238.0,
           -3550918686646.0 / 2091501179385.0,
           -1275806237668.0 / 842570457699.0),
        b=(1432997174477.0 / 9575080441755.0,
           5161836677717.0 / 13612068292357.0,
           1720146321549.0 / 2090206949498.0,
           3134564353537.0 / 4481467310338.0,
           2277821191437.0 / 14882151754819.0),
        c=(0.0,
           1432997174477.0 / 9575080441755.0,
           2526269341429.0 / 6820363962896.0,
           2006345519317.0 / 3224310063776.0,
           2802321613138.0 / 2924317926251.0),
    ),
    # Williamson, three stages, third order
    "lsrk33": RkScheme(
        name="lsrk33",
        order=3,
        a=(0.0, -5.0 / 9.0, -153.0 / 128.0),
        b=(1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0),
        c=(0.0, 1.0 / 3.0, 3.0 / 4.0),
    ),
}

DEFAULT_SCHEME = "lsrk54"
DEFAULT_CFL = 0.5


def get_scheme(name: str) -> RkScheme:
    try:
        return SCHEMES[name]
    except KeyError:
        raise ConfigError(f"Unknown time scheme '{name}', expected one of {sorted(SCHEMES)}") from None


def step(u: np.ndarray, rhs: RHS, dt: float, scheme: str = DEFAULT_SCHEME) -> np.ndarray:
    """
    Advance one step. The input array is never modified, so an exception from
    any stage leaves the caller's state as it was.
    """
    if dt < 0.0 or not np.isfinite(dt):
        raise StateError(f"Time step must be finite and non-negative, got {dt}")
    rk = get_scheme(scheme)
    state = np.array(u, dtype=float, copy=True)
    if dt == 0.0:
        return state
    residual = np.zeros_like(state)
    for a, b in zip(rk.a, rk.b):
        residual = a * residual + dt * rhs(state)
        state = state + b * residual
    if not np.all(np.isfinite(state)):
        raise StateError("Non-finite solution after time step")
    return state


def advance(u: np.ndarray, rhs: RHS, t_start: float, t_end: float,
            dt_estimate: Callable[[np.ndarray], float], scheme: str = DEFAULT_SCHEME,
            callback: Optional[Callable[[int, float, np.ndarray], None]] = None,
            max_steps: Optional[int] = None) -> Tuple[np.ndarray, float, int]:
    """Step from t_start to t_end (last step clipped); returns (u, t, steps)."""
    t, steps = t_start, 0
    while t < t_end and (max_steps is None or steps < max_steps):
        dt = min(dt_estimate(u), t_end - t)
        if dt <= 0.0:
            raise StateError(f"Non-positive time step {dt:.3e} at t={t:.6e}")
        u = step(u, rhs, dt, scheme)
        t = t_end if t_end - t <= dt else t + dt
        steps += 1
        logger.debug("step %d: t=%.6e dt=%.3e", steps, t, dt)
        if callback is not None:
            callback(steps, t, u)
    return u, t, steps


def mesh_scale(mesh: Mesh) -> np.ndarray:
    """Nodal length scale h = 2 min_l J / |Ja^l|."""
    norms = np.linalg.norm(mesh.metrics.contravariant, axis=-1)
    if np.any(norms <= 0.0):
        raise MeshError("Zero-measure element in step size estimate")
    return 2.0 * np.min(mesh.metrics.jacobian[..., None] / norms, axis=-1)


def estimate_dt(mesh: Mesh, u: np.ndarray, cfl: float, gas: GasParams) -> float:
    """
    dt = cfl min( h / ((|v| + a) N^2) ), further limited for viscous flow by
    cfl Re h^2 / (nu N^4) with nu = mu max(4/3, gamma/Pr) / rho.
    """
    h = mesh_scale(mesh)
    degree = max(mesh.degree, 1)
    speed = np.linalg.norm(velocity(u), axis=-1) + sound_speed(u, gas)
    dt = cfl * float(np.min(h / (speed * degree ** 2)))
    if gas.is_viscous:
        nu = gas.viscosity * max(4.0 / 3.0, gas.gamma / gas.prandtl) / u[..., 0]
        dt = min(dt, cfl * float(np.min(gas.reynolds * h ** 2 / (nu * degree ** 4))))
    return dt


def estimate_dt_1d(mesh: Mesh1D, speed: float, diffusivity: float, cfl: float) -> float:
    """1D counterpart with dx in place of h; infinite when nothing moves or diffuses."""
    degree = max(mesh.degree, 1)
    dx = float(np.min(mesh.dx))
    dt = np.inf
    if speed > 0.0:
        dt = cfl * dx / (speed * degree ** 2)
    if diffusivity > 0.0:
        dt = min(dt, cfl * dx ** 2 / (diffusivity * degree ** 4))
    return dt
