"""
Viscous Burgers plugin (1D): flux differencing equivalences and entropy audits.
"""
import logging
from typing import List, Tuple

import numpy as np

from config.case_config import CaseConfig
from dgsem.diagnostics import LINE_COLUMNS, TimeSeries, energy_norm_1d, mass_1d
from dgsem.initial_conditions import build_initial_condition
from dgsem.mesh import build_line_mesh
from dgsem.operator_1d import (
    BurgersOperator,
    burgers_ec_volume,
    burgers_split_volume,
    burgers_volume_entropy_residual,
)
from dgsem.physics import burgers_viscosity
from dgsem.time_integration import estimate_dt_1d
from .base_plugin import AuditResult, BaseEquationPlugin

logger = logging.getLogger(__name__)

SBP_TOLERANCE = 1e-13
IDENTITY_TOLERANCE = 1e-12


class BurgersPlugin(BaseEquationPlugin):
    """burgers1d: u_t + (u^2/2)_x = (b(u) u_x)_x."""

    def get_equation_name(self) -> str:
        return "burgers1d"

    def setup(self, case: CaseConfig) -> None:
        self.case = case
        mesh = case.mesh
        self.mesh = build_line_mesh(float(mesh["length"]), mesh["elements"], case.degree,
                                    periodic=bool(mesh.get("periodic", False)),
                                    origin=float(mesh.get("origin", 0.0)))
        c = case.coefficients
        self.operator = BurgersOperator(self.mesh, float(c["viscosity"]), float(c["growth"]), case.scheme)
        self.u0 = build_initial_condition("burgers1d", case.initial_condition, self.mesh.physical_nodes(),
                                          case.initial_params, seed=case.seed)
        logger.info("burgers1d setup: %d elements, N=%d, b0=%g, c=%g, interface=%s",
                    self.mesh.n_elements, self.mesh.degree, self.operator.viscosity, self.operator.growth,
                    case.scheme.interface)

    def initial_state(self) -> np.ndarray:
        return self.u0.copy()

    def rhs(self, u: np.ndarray) -> np.ndarray:
        return self.operator.rhs(u)

    def estimate_dt(self, u: np.ndarray) -> float:
        speed = float(np.max(np.abs(u)))
        diffusivity = float(np.max(burgers_viscosity(u, self.operator.viscosity, self.operator.growth)))
        return estimate_dt_1d(self.mesh, speed, diffusivity, self.case.cfl)

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

    def snapshot_rows(self, u: np.ndarray) -> List[Tuple[int, np.ndarray]]:
        x = self.mesh.physical_nodes()
        return [(element, np.stack([x[element], u[element]], axis=-1)) for element in range(self.mesh.n_elements)]

    def audits(self, u: np.ndarray) -> List[AuditResult]:
        operator, ops = self.operator, self.mesh.ops
        scale = max(1.0, float(np.max(np.abs(u))))
        results = [AuditResult.at_most("sbp_residual", ops.sbp_residual(), SBP_TOLERANCE)]
        results.append(AuditResult.at_most(
            "split_form_equivalence", float(np.max(np.abs(burgers_ec_volume(ops, u) - burgers_split_volume(ops, u)))),
            IDENTITY_TOLERANCE * scale ** 2))
        results.append(AuditResult.at_most(
            "volume_entropy_contraction", float(np.max(np.abs(burgers_volume_entropy_residual(ops, u)))),
            IDENTITY_TOLERANCE * scale ** 3))

        rate = operator.entropy_rate(u)
        bound = IDENTITY_TOLERANCE * max(1.0, operator.entropy(u))
        conservative = (operator.scheme.entropy_conservative_volume and not operator.scheme.dissipation
                        and operator.viscosity == 0.0)
        if not operator.scheme.entropy_conservative_volume:
            results.append(AuditResult("entropy_rate_standard_volume", rate, float("inf"), True))
        elif conservative:
            results.append(AuditResult.at_most("entropy_rate_conservative", abs(rate), bound))
        else:
            results.append(AuditResult.at_most("entropy_rate_nonpositive", rate, bound))

        results.append(AuditResult.at_most("zero_state_rhs", float(np.max(np.abs(operator.rhs(np.zeros_like(u))))),
                                           0.0))
        return results
