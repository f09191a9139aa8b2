"""
Initial conditions, looked up by name per equation.

3D functions take node coordinates (..., 3) and the gas and return conservative
states (..., 5); 1D functions take node coordinates and return U.
"""
import inspect
import logging
import math
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .errors import ConfigError
from .physics import GasParams, check_state, conservative_from_primitive

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# nse3d
# ---------------------------------------------------------------------------

def free_stream(x: np.ndarray, gas: GasParams, density: float = 1.0,
                velocity: Sequence[float] = (0.1, 0.2, -0.3), pressure: float = 1.0) -> np.ndarray:
    shape = x.shape[:-1]
    return conservative_from_primitive(np.full(shape, density), np.broadcast_to(velocity, shape + (3,)),
                                       np.full(shape, pressure), gas)


def taylor_green(x: np.ndarray, gas: GasParams, mach: Optional[float] = None) -> np.ndarray:
    """
    Taylor-Green vortex on [0, 2 pi]^3 with an isentropic background:
    p0 = 1 / (gamma M^2), p = p0 + (cos 2x + cos 2y)(cos 2z + 2) / 16,
    rho = (p / p0)^(1 / gamma).
    """
    mach = gas.mach if mach is None else mach
    X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
    p0 = 1.0 / (gas.gamma * mach ** 2)
    v = np.stack([np.sin(X) * np.cos(Y) * np.cos(Z),
                  -np.cos(X) * np.sin(Y) * np.cos(Z),
                  np.zeros_like(X)], axis=-1)
    p = p0 + (np.cos(2.0 * X) + np.cos(2.0 * Y)) * (np.cos(2.0 * Z) + 2.0) / 16.0
    rho = (p / p0) ** (1.0 / gas.gamma)
    return conservative_from_primitive(rho, v, p, gas)


def taylor_green_kinetic_energy(mach: float, gamma: float = 1.4, samples: int = 64) -> float:
    """Mean of rho |v|^2 / 2 of the initial field on a uniform periodic grid."""
    s = 2.0 * np.pi * np.arange(samples) / samples
    grid = np.stack(np.meshgrid(s, s, s, indexing="ij"), axis=-1)
    u = taylor_green(grid, GasParams(gamma=gamma, mach=mach))
    return float(np.mean(0.5 * np.sum(u[..., 1:4] ** 2, axis=-1) / u[..., 0]))


def density_wave(x: np.ndarray, gas: GasParams, amplitude: float = 0.1,
                 velocity: Sequence[float] = (1.0, 1.0, 1.0), pressure: float = 1.0,
                 length: float = 2.0, time: float = 0.0) -> np.ndarray:
    """rho = 1 + A sin(2 pi / L (x + y + z - (v1 + v2 + v3) t)) at constant v and p."""
    velocity = np.asarray(velocity, dtype=float)
    phase = 2.0 * np.pi / length * (np.sum(x, axis=-1) - float(np.sum(velocity)) * time)
    rho = 1.0 + amplitude * np.sin(phase)
    return conservative_from_primitive(rho, np.broadcast_to(velocity, x.shape), np.full(rho.shape, pressure), gas)


def random_smooth(x: np.ndarray, gas: GasParams, seed: int = 0, amplitude: float = 0.1,
                  modes: int = 2, length: float = 1.0) -> np.ndarray:
    """Periodic perturbation of (rho, v, p) = (1, 0, 1) by seeded low Fourier modes."""
    rng = np.random.default_rng(seed)
    fields = []
    for _ in range(5):
        value = np.zeros(x.shape[:-1])
        for _ in range(modes):
            k = rng.integers(-modes, modes + 1, size=3)
            phase = rng.uniform(0.0, 2.0 * np.pi)
            value += rng.uniform(-1.0, 1.0) * np.sin(2.0 * np.pi / length * (x @ k) + phase)
        fields.append(amplitude * value / max(modes, 1))
    rho = 1.0 + fields[0]
    v = np.stack(fields[1:4], axis=-1)
    p = 1.0 + fields[4]
    return conservative_from_primitive(rho, v, p, gas)


# ---------------------------------------------------------------------------
# 1D
# ---------------------------------------------------------------------------

def manufactured_sine(x: np.ndarray, amplitude: float = 1.0, wavenumber: float = 1.0) -> np.ndarray:
    return amplitude * np.sin(wavenumber * x)


def gaussian(x: np.ndarray, amplitude: float = 1.0, center: float = 0.5, width: float = 0.1) -> np.ndarray:
    return amplitude * np.exp(-((x - center) / width) ** 2)


def sine(x: np.ndarray, amplitude: float = 1.0, length: float = 1.0) -> np.ndarray:
    """A sin(2 pi x / L); vanishes at both ends of [0, L]."""
    return amplitude * np.sin(2.0 * math.pi * x / length)


def random_smooth_1d(x: np.ndarray, seed: int = 0, amplitude: float = 1.0, modes: int = 4,
                     length: float = 1.0) -> np.ndarray:
    """Seeded sum of sin(m pi x / L), m = 1..modes."""
    rng = np.random.default_rng(seed)
    coefficients = rng.uniform(-1.0, 1.0, size=modes)
    value = sum(c * np.sin((m + 1) * math.pi * x / length) for m, c in enumerate(coefficients))
    return amplitude * value / modes


INITIAL_CONDITIONS: Dict[str, Dict[str, Callable]] = {
    "nse3d": {
        "free_stream": free_stream,
        "taylor_green": taylor_green,
        "density_wave": density_wave,
        "random_smooth": random_smooth,
    },
    "advdiff1d": {
        "manufactured_sine": manufactured_sine,
        "gaussian": gaussian,
    },
    "burgers1d": {
        "sine": sine,
        "random_smooth": random_smooth_1d,
    },
}


def get_initial_condition(equation: str, name: str) -> Callable:
    try:
        return INITIAL_CONDITIONS[equation][name]
    except KeyError:
        available = sorted(INITIAL_CONDITIONS.get(equation, {}))
        raise ConfigError(f"Unknown initial condition '{name}' for {equation}; expected one of {available}") from None


def check_parameters(equation: str, name: str, params: Dict) -> None:
    """Reject parameters the initial condition does not accept."""
    function = get_initial_condition(equation, name)
    accepted = set(inspect.signature(function).parameters) - {"x", "gas"}
    unknown = sorted(set(params) - accepted)
    if unknown:
        raise ConfigError(f"Unknown parameters {unknown} for initial condition '{name}'; "
                          f"accepted: {sorted(accepted)}")


def build_initial_condition(equation: str, name: str, x: np.ndarray, params: Optional[Dict] = None,
                            gas: Optional[GasParams] = None, seed: Optional[int] = None) -> np.ndarray:
    """Evaluate a named initial condition; ``seed`` fills in for randomized ones without their own."""
    params = dict(params or {})
    check_parameters(equation, name, params)
    function = get_initial_condition(equation, name)
    if seed is not None and "seed" in inspect.signature(function).parameters:
        params.setdefault("seed", seed)
    if equation == "nse3d":
        u = function(x, gas or GasParams(), **params)
        check_state(u, gas or GasParams())
    else:
        u = function(x, **params)
    logger.debug("Initial condition %s/%s with %s", equation, name, params)
    return np.ascontiguousarray(u, dtype=float)
