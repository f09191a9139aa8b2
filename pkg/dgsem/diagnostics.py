"""
Discrete functionals and time series.

Volume integrals are LGL quadrature sums sum_k sum_ijk omega_ijk J_ijk f_ijk,
so they are additive over elements.
"""
import csv
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .mesh import Mesh, Mesh1D
from .physics import (
    GasParams,
    entropy_and_flux,
    entropy_variables,
    velocity_gradient_from_entropy,
)

logger = logging.getLogger(__name__)

NSE_COLUMNS = ("t", "S", "Ekin", "ens", "diss", "Re_num", "mass")
LINE_COLUMNS = ("t", "energy", "entropy", "mass")


def quadrature_weights(mesh: Mesh) -> np.ndarray:
    """omega_i omega_j omega_k J at every node, (K, n, n, n)."""
    w = mesh.ops.weights
    return w[:, None, None] * w[None, :, None] * w[None, None, :] * mesh.metrics.jacobian


def integrate(mesh: Mesh, values: np.ndarray) -> np.ndarray:
    weights = quadrature_weights(mesh)
    return np.tensordot(weights, values, axes=(tuple(range(4)), tuple(range(4))))


def total_entropy(mesh: Mesh, u: np.ndarray, gas: GasParams) -> float:
    """S = sum_k <J s, 1>_N with s = -rho varsigma / (gamma - 1)."""
    s, _ = entropy_and_flux(u, gas)
    return float(integrate(mesh, s))


def conserved_totals(mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Integrals of mass, momentum and total energy."""
    return integrate(mesh, u)


def kinetic_energy(mesh: Mesh, u: np.ndarray) -> float:
    return float(integrate(mesh, 0.5 * np.sum(u[..., 1:4] ** 2, axis=-1) / u[..., 0]))


def vorticity(u: np.ndarray, gradients: np.ndarray, gas: GasParams) -> np.ndarray:
    """curl v from the lifted entropy-variable gradients."""
    grad_v = velocity_gradient_from_entropy(u, gradients, gas)  # [..., i, j] = d v_j / d x_i
    return np.stack([grad_v[..., 1, 2] - grad_v[..., 2, 1],
                     grad_v[..., 2, 0] - grad_v[..., 0, 2],
                     grad_v[..., 0, 1] - grad_v[..., 1, 0]], axis=-1)


def enstrophy(operator, u: np.ndarray, gradients: Optional[np.ndarray] = None) -> float:
    """integral of rho |omega|^2 / 2, reusing the operator's BR1 gradients."""
    gas = operator.gas
    if gradients is None:
        gradients = operator.br1_gradients(entropy_variables(u, gas))
    omega = vorticity(u, gradients, gas)
    return float(integrate(operator.mesh, 0.5 * u[..., 0] * np.sum(omega ** 2, axis=-1)))


def diss_rate(times: Sequence[float], kinetic: Sequence[float]) -> np.ndarray:
    """
    -dE_kin/dt: centered differences inside, one-sided at both ends.
    Needs at least three samples; fewer give an all-NaN result.
    """
    t = np.asarray(times, dtype=float)
    e = np.asarray(kinetic, dtype=float)
    rate = np.full(t.shape, np.nan)
    if t.size < 3:
        return rate
    rate[1:-1] = -(e[2:] - e[:-2]) / (t[2:] - t[:-2])
    rate[0] = -(e[1] - e[0]) / (t[1] - t[0])
    rate[-1] = -(e[-1] - e[-2]) / (t[-1] - t[-2])
    return rate


def numerical_reynolds(enstrophy_values: Sequence[float], dissipation: Sequence[float]) -> np.ndarray:
    """2 ens / diss where diss > 0; NaN (absent) elsewhere."""
    ens = np.asarray(enstrophy_values, dtype=float)
    diss = np.asarray(dissipation, dtype=float)
    result = np.full(ens.shape, np.nan)
    valid = np.isfinite(diss) & (diss > 0.0)
    result[valid] = 2.0 * ens[valid] / diss[valid]
    if np.any(~valid & np.isfinite(diss)):
        logger.debug("Numerical Reynolds number absent at %d samples with diss <= 0",
                     int(np.sum(~valid & np.isfinite(diss))))
    return result


def entropy_rate_audit(mesh: Mesh, u: np.ndarray, rhs: np.ndarray, gas: GasParams) -> float:
    """dS/dt = sum omega J W . dU/dt for a supplied dU/dt."""
    w = entropy_variables(u, gas)
    return float(np.sum(quadrature_weights(mesh) * np.sum(w * rhs, axis=-1)))


def energy_norm_1d(mesh: Mesh1D, u: np.ndarray) -> float:
    """sum_k (dx_k / 2) ||U^k||_N^2."""
    return float(np.sum(mesh.jacobian[:, None] * mesh.ops.weights[None] * np.square(u)))


def mass_1d(mesh: Mesh1D, u: np.ndarray) -> float:
    return float(np.sum(mesh.jacobian[:, None] * mesh.ops.weights[None] * u))


@dataclass
class TimeSeries:
    """Ordered diagnostic records with strictly increasing t."""
    columns: Sequence[str] = NSE_COLUMNS
    records: List[Dict[str, float]] = field(default_factory=list)

    def append(self, t: float, **values: float) -> None:
        if self.records and not t > self.records[-1]["t"]:
            raise ValueError(f"Time series needs strictly increasing t, got {t} after {self.records[-1]['t']}")
        record = {name: np.nan for name in self.columns}
        record.update(values)
        record["t"] = float(t)
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        return np.array([record[name] for record in self.records], dtype=float)

    def finalize(self) -> "TimeSeries":
        """Fill diss and Re_num from the E_kin and enstrophy samples."""
        if "diss" in self.columns and self.records:
            diss = diss_rate(self.column("t"), self.column("Ekin"))
            reynolds = numerical_reynolds(self.column("ens"), diss)
            for record, d, r in zip(self.records, diss, reynolds):
                record["diss"] = float(d)
                record["Re_num"] = float(r)
        return self

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(self.columns)
            for record in self.records:
                writer.writerow(["" if np.isnan(record[name]) else f"{record[name]:.17g}"
                                 for name in self.columns])
