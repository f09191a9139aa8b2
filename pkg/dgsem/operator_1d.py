"""
Nodal DGSEM operators for the 1D model problems: linear advection-diffusion
and viscous Burgers, both with BR1 viscous terms.

Fields are arrays (K, n). Interface quantities live on the K + 1 element
vertices; vertex v sits between element v-1 (minus side) and element v (plus
side). On periodic meshes vertex 0 and vertex K are the same point.
"""
import logging
from typing import Callable, Tuple

import numpy as np

from .basis import OperatorSet
from .errors import StateError
from .fluxes import burgers_ec_flux, burgers_lax_friedrichs_penalty, linear_flux
from .mesh import Mesh1D
from .physics import burgers_entropy_flux, burgers_flux, burgers_viscosity
from .scheme import SchemeConfig

logger = logging.getLogger(__name__)


def derivative(ops: OperatorSet, values: np.ndarray) -> np.ndarray:
    return values @ ops.D.T


def vertex_pairs(mesh: Mesh1D, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(minus, plus) traces at every vertex. Boundary vertices of a
    non-periodic mesh repeat the single interior trace."""
    minus = np.empty(mesh.n_elements + 1)
    plus = np.empty(mesh.n_elements + 1)
    minus[1:] = values[:, -1]
    plus[:-1] = values[:, 0]
    if mesh.periodic:
        minus[0] = values[-1, -1]
        plus[-1] = values[0, 0]
    else:
        minus[0] = values[0, 0]
        plus[-1] = values[-1, -1]
    return minus, plus


def lift_ends(ops: OperatorSet, star: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Lift n (star - own) to the end nodes, divided by the end weight."""
    lifted = np.zeros_like(values)
    lifted[:, 0] = -(star[:-1] - values[:, 0])
    lifted[:, -1] = star[1:] - values[:, -1]
    return lifted / ops.weights[0]


def burgers_ec_volume(ops: OperatorSet, u: np.ndarray) -> np.ndarray:
    """2 sum_m D_im F^ec(U_i, U_m) per element."""
    pairs = burgers_ec_flux(u[:, :, None], u[:, None, :])
    return 2.0 * np.einsum("im,kim->ki", ops.D, pairs)


def burgers_split_volume(ops: OperatorSet, u: np.ndarray) -> np.ndarray:
    """(1/3)((U^2)_xi + U U_xi), the split form the flux differencing reproduces."""
    return (derivative(ops, u * u) + u * derivative(ops, u)) / 3.0


def burgers_volume_entropy_residual(ops: OperatorSet, u: np.ndarray) -> np.ndarray:
    """<D(F)^ec, W>_N - F^ent|_{-1}^{1} per element."""
    contraction = np.sum(ops.weights[None] * u * burgers_ec_volume(ops, u), axis=1)
    boundary = burgers_entropy_flux(u[:, -1]) - burgers_entropy_flux(u[:, 0])
    return contraction - boundary


class _Operator1D:
    def __init__(self, mesh: Mesh1D, scheme: SchemeConfig):
        self.mesh = mesh
        self.scheme = scheme
        self.ops = mesh.ops
        self.jacobian = mesh.jacobian[:, None]

    def integrate(self, values: np.ndarray) -> float:
        """sum (dx_k / 2) <values, 1>_N."""
        return float(np.sum(self.jacobian * self.ops.weights[None] * values))

    def energy(self, u: np.ndarray) -> float:
        return self.integrate(u * u)

    def energy_rate(self, u: np.ndarray) -> float:
        """d/dt of sum (dx/2) <U, U>_N, evaluated semi-discretely."""
        return 2.0 * float(np.sum(self.ops.weights[None] * u * self.jacobian_rhs(u)))

    def _gradient(self, u: np.ndarray, boundary: Callable[[np.ndarray], None]) -> np.ndarray:
        minus, plus = vertex_pairs(self.mesh, u)
        star = 0.5 * (minus + plus)
        if not self.mesh.periodic:
            boundary(star)
        return (derivative(self.ops, u) + lift_ends(self.ops, star, u)) / self.jacobian

    def _viscous(self, fv: np.ndarray, boundary: Callable[[np.ndarray, np.ndarray], None]) -> np.ndarray:
        minus, plus = vertex_pairs(self.mesh, fv)
        star = 0.5 * (minus + plus)
        if not self.mesh.periodic:
            boundary(star, fv)
        return derivative(self.ops, fv) + lift_ends(self.ops, star, fv)

    def rhs(self, u: np.ndarray) -> np.ndarray:
        return self.jacobian_rhs(u) / self.jacobian

    __call__ = rhs


class LinearAdvectionDiffusionOperator(_Operator1D):
    """
    U_t + (a U)_x = (b(x) U_x)_x on a line of elements.

    Outflow at the right, zero inflow at the left: F* = 0, U* = 0, Q* = Q on
    the left and F* = a U, U* = U, Q* = 0 on the right.
    """

    def __init__(self, mesh: Mesh1D, speed: float, diffusion: Callable[[np.ndarray], np.ndarray],
                 scheme: SchemeConfig = SchemeConfig(interface="upwind")):
        super().__init__(mesh, scheme.validate("advdiff1d"))
        if speed <= 0.0:
            raise StateError(f"Advection speed must be positive, got {speed}")
        self.speed = float(speed)
        self.diffusion = np.broadcast_to(np.asarray(diffusion(mesh.physical_nodes()), dtype=float),
                                         (mesh.n_elements, self.ops.size))
        if np.any(self.diffusion < 0.0):
            raise StateError("Diffusion coefficient must be non-negative")
        self.sigma = self.scheme.jump_weight

    def advective_star(self, u: np.ndarray) -> np.ndarray:
        minus, plus = vertex_pairs(self.mesh, u)
        star = linear_flux(minus, plus, self.speed, self.sigma)
        if not self.mesh.periodic:
            star[0] = 0.0
            star[-1] = self.speed * u[-1, -1]
        return star

    def interface_energy_terms(self, u: np.ndarray) -> np.ndarray:
        """[U](F* - a<U>) at every interior vertex; -sigma |a| [U]^2 / 2."""
        minus, plus = vertex_pairs(self.mesh, u)
        jump = plus - minus
        terms = jump * (self.advective_star(u) - self.speed * 0.5 * (minus + plus))
        return terms if self.mesh.periodic else terms[1:-1]

    def gradients(self, u: np.ndarray) -> np.ndarray:
        def boundary(star):
            star[0] = 0.0
            star[-1] = u[-1, -1]
        return self._gradient(u, boundary)

    def jacobian_rhs(self, u: np.ndarray) -> np.ndarray:
        a = self.speed
        volume = 0.5 * (derivative(self.ops, a * u) + a * derivative(self.ops, u))
        surface = lift_ends(self.ops, self.advective_star(u), a * u)
        result = -(volume + surface)
        if np.any(self.diffusion > 0.0):
            fv = self.diffusion * self.gradients(u)

            def boundary(star, own):
                star[0] = own[0, 0]
                star[-1] = 0.0
            result += self._viscous(fv, boundary)
        return result

    def exact_periodic(self, x: np.ndarray, t: float, amplitude: float = 1.0,
                       wavenumber: float = 1.0) -> np.ndarray:
        """Decaying travelling sine for constant a and b on a periodic line."""
        b = float(np.mean(self.diffusion))
        return amplitude * np.exp(-b * wavenumber ** 2 * t) * np.sin(wavenumber * (x - self.speed * t))


class BurgersOperator(_Operator1D):
    """
    u_t + (u^2/2)_x = (b(u) u_x)_x with b(u) = b0 (1 + c u^2).

    Homogeneous Dirichlet data is imposed through the mirror state -U, which
    gives U* = 0 and leaves the viscous flux unchanged at the boundary.
    """

    def __init__(self, mesh: Mesh1D, viscosity: float, growth: float = 0.0,
                 scheme: SchemeConfig = SchemeConfig()):
        super().__init__(mesh, scheme.validate("burgers1d"))
        if viscosity < 0.0 or growth < 0.0:
            raise StateError(f"Burgers viscosity needs b0 >= 0 and c >= 0, got {viscosity}, {growth}")
        self.viscosity = float(viscosity)
        self.growth = float(growth)

    def volume(self, u: np.ndarray) -> np.ndarray:
        if self.scheme.entropy_conservative_volume:
            return burgers_ec_volume(self.ops, u)
        return derivative(self.ops, burgers_flux(u))

    def advective_star(self, u: np.ndarray) -> np.ndarray:
        minus, plus = vertex_pairs(self.mesh, u)
        if not self.mesh.periodic:
            minus[0] = -plus[0]
            plus[-1] = -minus[-1]
        star = burgers_ec_flux(minus, plus)
        if self.scheme.dissipation:
            star = star + burgers_lax_friedrichs_penalty(minus, plus)
        return star

    def gradients(self, u: np.ndarray) -> np.ndarray:
        def boundary(star):
            star[0] = 0.0
            star[-1] = 0.0
        return self._gradient(u, boundary)

    def jacobian_rhs(self, u: np.ndarray) -> np.ndarray:
        surface = lift_ends(self.ops, self.advective_star(u), burgers_flux(u))
        result = -(self.volume(u) + surface)
        if self.viscosity > 0.0:
            fv = burgers_viscosity(u, self.viscosity, self.growth) * self.gradients(u)

            def boundary(star, own):
                star[0] = own[0, 0]
                star[-1] = own[-1, -1]
            result += self._viscous(fv, boundary)
        return result

    def entropy(self, u: np.ndarray) -> float:
        return 0.5 * self.energy(u)

    def entropy_rate(self, u: np.ndarray) -> float:
        return 0.5 * self.energy_rate(u)
