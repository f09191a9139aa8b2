"""
Semi-discrete entropy stable DGSEM operator for the compressible Navier-Stokes
equations on curvilinear periodic hexahedral meshes.

The operator is assembled in nodal strong form:

    J U_t = -( volume + lift(s F* - s f.n) )
            + 1/Re ( sum_l D_l Fv^l + lift(s (<fv> - fv).n) )

with the gradient of the entropy variables lifted the BR1 way,

    J Q_d = sum_l Ja^l_d D_l W + lift(s n_d (<W> - W)).

Lifted side values are divided by the end-point weight of the normal
direction. Each face uses the master side's ``s n``; the slave side
sees its negation.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .basis import apply_along_axis
from .fluxes import br1_average_flux, br1_average_state, contravariant_ec_flux, es_surface_flux
from .mesh import Mesh, element_side_traces, face_pairs, lift_sides, scatter_to_sides
from .metrics import SIDES
from .physics import GasParams, check_state, entropy_variables, euler_flux, normal_flux, viscous_flux
from .scheme import SchemeConfig

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 16


@dataclass
class RHSParts:
    """Contributions to J U_t, kept apart for the entropy audits."""
    advective: np.ndarray
    viscous: np.ndarray
    gradients: Optional[np.ndarray] = None

    @property
    def total(self) -> np.ndarray:
        return self.advective + self.viscous


class NavierStokesOperator:
    """
    Right-hand side of the semi-discrete system on one mesh.

    ``threads > 1`` evaluates the per-element volume phase in element chunks on a
    thread pool. Chunks are reassembled in order, so results do not depend on
    the thread count.
    """

    def __init__(self, mesh: Mesh, gas: GasParams, scheme: Optional[SchemeConfig] = None,
                 threads: int = 1, chunk_size: int = DEFAULT_CHUNK):
        self.mesh = mesh
        self.gas = gas
        self.scheme = (scheme or SchemeConfig()).validate("nse3d")
        self.threads = max(1, int(threads))
        self.chunk_size = max(1, int(chunk_size))
        self.ops = mesh.ops
        self.jacobian = mesh.metrics.jacobian
        self.contravariant = mesh.metrics.contravariant
        w = self.ops.weights
        self.mass = w[:, None, None] * w[None, :, None] * w[None, None, :]
        self.face_weights = np.outer(w, w).reshape(-1)
        self.side_normals = self._own_side_normals()

        # one s n per face, negated on the slave side
        self.master_normals = self.side_normals[mesh.master_elements, mesh.master_sides - 1]
        self.slave_normals = -self.master_normals
        logger.debug("NavierStokesOperator: K=%d, N=%d, faces=%d, volume=%s, interface=%s, threads=%d",
                     mesh.n_elements, self.ops.degree, len(mesh.faces), self.scheme.volume,
                     self.scheme.interface, self.threads)

    def _own_side_normals(self) -> np.ndarray:
        """Scaled outward normals s n = +/- Ja^l on every element side -> (K, 6, n*n, 3)."""
        traces = element_side_traces(self.contravariant)
        normals = np.empty(traces.shape[:3] + (3,))
        for side, (direction, upper) in SIDES.items():
            sign = 1.0 if upper else -1.0
            normals[:, side - 1] = sign * traces[:, side - 1, :, direction, :]
        return normals

    # ------------------------------------------------------------------
    # element-chunked execution
    # ------------------------------------------------------------------

    def _chunks(self) -> List[slice]:
        K = self.mesh.n_elements
        return [slice(start, min(start + self.chunk_size, K)) for start in range(0, K, self.chunk_size)]

    def _map_elements(self, kernel: Callable[[slice], np.ndarray]) -> np.ndarray:
        chunks = self._chunks()
        if self.threads == 1 or len(chunks) == 1:
            return np.concatenate([kernel(chunk) for chunk in chunks], axis=0)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return np.concatenate(list(pool.map(kernel, chunks)), axis=0)

    # ------------------------------------------------------------------
    # volume terms
    # ------------------------------------------------------------------

    def _ec_volume_chunk(self, u: np.ndarray, metric: np.ndarray) -> np.ndarray:
        D = self.ops.D
        volume = np.zeros_like(u)
        for direction in range(3):
            axis = direction + 1
            line = np.moveaxis(u, axis, 1)
            ja = np.moveaxis(metric[..., direction, :], axis, 1)
            average = 0.5 * (ja[:, :, None] + ja[:, None, :])
            flux = contravariant_ec_flux(line[:, :, None], line[:, None, :], average, self.gas)
            line_sum = 2.0 * np.einsum("im,kim...->ki...", D, flux)
            volume += np.moveaxis(line_sum, 1, axis)
        return volume

    def _standard_volume_chunk(self, u: np.ndarray, metric: np.ndarray) -> np.ndarray:
        flux = euler_flux(u, self.gas)
        contravariant = np.einsum("...ln,...nv->...lv", metric, flux)
        return sum(apply_along_axis(self.ops.D, contravariant[..., l, :], l + 1) for l in range(3))

    def flux_difference_volume(self, u: np.ndarray) -> np.ndarray:
        """Advective volume term at all nodes (flux differencing or standard strong form)."""
        kernel = (self._ec_volume_chunk if self.scheme.entropy_conservative_volume
                  else self._standard_volume_chunk)
        return self._map_elements(lambda chunk: kernel(u[chunk], self.contravariant[chunk]))

    # ------------------------------------------------------------------
    # surface terms
    # ------------------------------------------------------------------

    def advective_surface(self, u: np.ndarray) -> np.ndarray:
        """Lifted s (F* - f.n) on both sides of every face."""
        left, right = face_pairs(self.mesh, element_side_traces(u))
        flux = es_surface_flux(left, right, self.mesh.normals, self.mesh.surface, self.gas,
                               dissipation=self.scheme.dissipation)
        master = flux - normal_flux(left, self.master_normals, self.gas)
        slave = -flux - normal_flux(right, self.slave_normals, self.gas)
        return lift_sides(self.ops, scatter_to_sides(self.mesh, master, slave))

    # ------------------------------------------------------------------
    # BR1 gradients and viscous terms
    # ------------------------------------------------------------------

    def _gradient_volume_chunk(self, w: np.ndarray, metric: np.ndarray) -> np.ndarray:
        gradient = np.zeros(w.shape[:-1] + (3, 5))
        for l in range(3):
            derivative = apply_along_axis(self.ops.D, w, l + 1)
            gradient += metric[..., l, :, None] * derivative[..., None, :]
        return gradient

    def gradient_lift(self, w: np.ndarray, interface: bool = True) -> np.ndarray:
        """Lifted s n_d (<W> - W); zero when ``interface`` is False."""
        if not interface:
            return np.zeros(w.shape[:-1] + (3, 5))
        left, right = face_pairs(self.mesh, element_side_traces(w))
        average = br1_average_state(left, right)
        master = self.master_normals[..., :, None] * (average - left)[..., None, :]
        slave = self.slave_normals[..., :, None] * (average - right)[..., None, :]
        return lift_sides(self.ops, scatter_to_sides(self.mesh, master, slave))

    def br1_gradients(self, w: np.ndarray, interface: bool = True) -> np.ndarray:
        """Q_d = grad_d W, shape (K, n, n, n, 3, 5)."""
        volume = self._map_elements(lambda chunk: self._gradient_volume_chunk(w[chunk], self.contravariant[chunk]))
        return (volume + self.gradient_lift(w, interface)) / self.jacobian[..., None, None]

    def viscous_terms(self, u: np.ndarray, gradients: np.ndarray, interface: bool = True) -> np.ndarray:
        """sum_l D_l Fv^l + lift(s (<fv> - fv).n), without the 1/Re factor."""
        fv = viscous_flux(u, gradients, self.gas)
        contravariant = np.einsum("...ln,...nv->...lv", self.contravariant, fv)
        volume = sum(apply_along_axis(self.ops.D, contravariant[..., l, :], l + 1) for l in range(3))
        if not interface:
            return volume
        left, right = face_pairs(self.mesh, element_side_traces(fv))
        average = br1_average_flux(left, right)
        master = np.einsum("fpn,fpnv->fpv", self.master_normals, average - left)
        slave = np.einsum("fpn,fpnv->fpv", self.slave_normals, average - right)
        return volume + lift_sides(self.ops, scatter_to_sides(self.mesh, master, slave))

    # ------------------------------------------------------------------
    # assembly
    # ------------------------------------------------------------------

    def rhs_parts(self, u: np.ndarray, viscous_interface: bool = True) -> RHSParts:
        """
        J U_t split into the advective and viscous contributions.
        ``viscous_interface=False`` suppresses every BR1 face term.
        """
        check_state(u, self.gas)
        advective = -(self.flux_difference_volume(u) + self.advective_surface(u))
        if not self.gas.is_viscous:
            return RHSParts(advective=advective, viscous=np.zeros_like(u))
        w = entropy_variables(u, self.gas)
        gradients = self.br1_gradients(w, interface=viscous_interface)
        viscous = self.viscous_terms(u, gradients, interface=viscous_interface) / self.gas.reynolds
        return RHSParts(advective=advective, viscous=viscous, gradients=gradients)

    def rhs(self, u: np.ndarray) -> np.ndarray:
        """dU/dt at every node."""
        return self.rhs_parts(u).total / self.jacobian[..., None]

    __call__ = rhs

    # ------------------------------------------------------------------
    # audits
    # ------------------------------------------------------------------

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """sum over elements and nodes of omega J values; trailing axes survive."""
        weights = (self.mass[None] * self.jacobian).reshape(-1)
        flat = values.reshape((weights.size,) + values.shape[4:])
        return np.tensordot(weights, flat, axes=(0, 0))

    def contract_with_entropy(self, u: np.ndarray, jacobian_rate: np.ndarray) -> float:
        """sum omega W . (J U_t) for a supplied J U_t."""
        w = entropy_variables(u, self.gas)
        return float(np.sum(self.mass[None, ..., None] * w * jacobian_rate))

    def viscous_interface_entropy(self, u: np.ndarray) -> Dict[str, float]:
        """
        BR1 interface entropy contribution measured two ways: the face sum
        <fv>.[W] - [fv.W] + <W>.[fv], and the full viscous audit minus the
        interface-free value -1/Re sum omega J Q.fv.
        """
        if not self.gas.is_viscous:
            return {"face_sum": 0.0, "difference": 0.0, "volume": 0.0}
        w = entropy_variables(u, self.gas)
        gradients = self.br1_gradients(w)
        fv = viscous_flux(u, gradients, self.gas)
        viscous = self.viscous_terms(u, gradients) / self.gas.reynolds
        full = self.contract_with_entropy(u, viscous)
        volume = -float(np.sum(self.integrate(np.sum(gradients * fv, axis=(-2, -1))))) / self.gas.reynolds

        w_left, w_right = face_pairs(self.mesh, element_side_traces(w))
        f_left, f_right = face_pairs(self.mesh, element_side_traces(fv))
        normal = self.mesh.normals[..., :, None]
        fn_left = np.sum(normal * f_left, axis=-2)
        fn_right = np.sum(normal * f_right, axis=-2)
        pointwise = (np.sum(0.5 * (fn_left + fn_right) * (w_right - w_left), axis=-1)
                     - np.sum(fn_right * w_right - fn_left * w_left, axis=-1)
                     + np.sum(0.5 * (w_left + w_right) * (fn_right - fn_left), axis=-1))
        face_sum = float(np.sum(self.mesh.surface * self.face_weights[None] * pointwise)) / self.gas.reynolds
        return {"face_sum": face_sum, "difference": full - volume, "volume": volume}

    def entropy_rate(self, u: np.ndarray) -> float:
        """dS/dt = sum omega J W . U_t, evaluated semi-discretely."""
        return self.contract_with_entropy(u, self.rhs_parts(u).total)
