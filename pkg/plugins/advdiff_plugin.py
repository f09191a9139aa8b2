"""
Linear advection-diffusion plugin (1D): energy stability and exact-solution sweeps.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from config.case_config import CaseConfig
from dgsem.diagnostics import LINE_COLUMNS, TimeSeries, energy_norm_1d, mass_1d
from dgsem.initial_conditions import build_initial_condition
from dgsem.mesh import Mesh1D, build_line_mesh
from dgsem.operator_1d import LinearAdvectionDiffusionOperator
from dgsem.physics import diffusion_profile, linear_advdiff_coeffs
from dgsem.time_integration import estimate_dt_1d
from .base_plugin import AuditResult, BaseEquationPlugin

logger = logging.getLogger(__name__)

SBP_TOLERANCE = 1e-13
ENERGY_TOLERANCE = 1e-12


class AdvectionDiffusionPlugin(BaseEquationPlugin):
    """advdiff1d: U_t + a U_x = (b(x) U_x)_x."""

    def get_equation_name(self) -> str:
        return "advdiff1d"

    def setup(self, case: CaseConfig) -> None:
        self.case = case
        mesh = case.mesh
        self.mesh = build_line_mesh(float(mesh["length"]), mesh["elements"], case.degree,
                                    periodic=bool(mesh.get("periodic", False)),
                                    origin=float(mesh.get("origin", 0.0)))
        self.operator = self._build_operator(self.mesh)
        self.u0 = build_initial_condition("advdiff1d", case.initial_condition, self.mesh.physical_nodes(),
                                          case.initial_params, seed=case.seed)
        logger.info("advdiff1d setup: %d elements, N=%d, a=%g, sigma=%g, periodic=%s",
                    self.mesh.n_elements, self.mesh.degree, self.operator.speed, self.operator.sigma,
                    self.mesh.periodic)

    def _build_operator(self, mesh: Mesh1D) -> LinearAdvectionDiffusionOperator:
        c = self.case.coefficients
        profile = diffusion_profile(float(c["diffusion"]), float(c["diffusion_amplitude"]),
                                    float(c["diffusion_wavenumber"]))
        # validates a > 0 and the sign of b at the nodes
        linear_advdiff_coeffs(mesh.physical_nodes(), float(c["speed"]), float(c["diffusion"]),
                              float(c["diffusion_amplitude"]), float(c["diffusion_wavenumber"]))
        return LinearAdvectionDiffusionOperator(mesh, float(c["speed"]), profile, self.case.scheme)

    def initial_state(self) -> np.ndarray:
        return self.u0.copy()

    def rhs(self, u: np.ndarray) -> np.ndarray:
        return self.operator.rhs(u)

    def estimate_dt(self, u: np.ndarray) -> float:
        return estimate_dt_1d(self.mesh, self.operator.speed, float(np.max(self.operator.diffusion)),
                              self.case.cfl)

    def new_series(self) -> TimeSeries:
        return TimeSeries(columns=LINE_COLUMNS)

    def record(self, series: TimeSeries, t: float, u: np.ndarray) -> None:
        energy = energy_norm_1d(self.mesh, u)
        series.append(t, energy=energy, entropy=0.5 * energy, mass=mass_1d(self.mesh, u))

    @property
    def node_axes(self) -> int:
        return 2

    def integrate(self, values: np.ndarray) -> float:
        return self.operator.integrate(values)

    def exact_solution(self, t: float) -> Optional[np.ndarray]:
        c = self.case.coefficients
        if (not self.mesh.periodic or self.case.initial_condition != "manufactured_sine"
                or float(c["diffusion_amplitude"]) != 0.0):
            return None
        return self.operator.exact_periodic(self.mesh.physical_nodes(), t, **self.case.initial_params)

    def snapshot_rows(self, u: np.ndarray) -> List[Tuple[int, np.ndarray]]:
        x = self.mesh.physical_nodes()
        return [(element, np.stack([x[element], u[element]], axis=-1)) for element in range(self.mesh.n_elements)]

    def audits(self, u: np.ndarray) -> List[AuditResult]:
        operator = self.operator
        energy = operator.energy(u)
        bound = ENERGY_TOLERANCE * max(1.0, energy)
        results = [
            AuditResult.at_most("sbp_residual", self.mesh.ops.sbp_residual(), SBP_TOLERANCE),
            AuditResult.at_most("energy_rate_nonpositive", operator.energy_rate(u), bound),
        ]

        minus, plus = self._jumps(u)
        expected = -0.5 * operator.sigma * abs(operator.speed) * (plus - minus) ** 2
        mismatch = np.max(np.abs(operator.interface_energy_terms(u) - expected), initial=0.0)
        results.append(AuditResult.at_most("interface_energy_terms", mismatch, bound))

        periodic = build_line_mesh(self.mesh.length, self.mesh.n_elements, self.mesh.degree, periodic=True,
                                   vertices=self.mesh.vertices)
        constant = np.full_like(u, 1.0)
        residual = np.max(np.abs(self._build_operator(periodic).rhs(constant)))
        results.append(AuditResult.at_most("constant_state_rhs", residual, ENERGY_TOLERANCE))
        return results

    def _jumps(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.mesh.periodic:
            return np.roll(u[:, -1], 1), u[:, 0]
        return u[:-1, -1], u[1:, 0]
