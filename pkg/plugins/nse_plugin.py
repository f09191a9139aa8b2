"""
Compressible Navier-Stokes plugin: periodic hexahedral meshes, Taylor-Green
and density-wave cases, entropy and conservation audits.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from config.case_config import CaseConfig
from dgsem.diagnostics import (
    NSE_COLUMNS,
    TimeSeries,
    conserved_totals,
    enstrophy,
    integrate,
    kinetic_energy,
    total_entropy,
)
from dgsem.initial_conditions import build_initial_condition, free_stream
from dgsem.mesh import build_box_mesh, check_watertight, nodes_in_file_order, read_mesh_file
from dgsem.metrics import check_metric_identities
from dgsem.operator_nse import NavierStokesOperator
from dgsem.time_integration import estimate_dt
from .base_plugin import AuditResult, BaseEquationPlugin

logger = logging.getLogger(__name__)

SBP_TOLERANCE = 1e-13
METRIC_TOLERANCE = 1e-12
FREE_STREAM_TOLERANCE = 1e-11
ENTROPY_TOLERANCE = 1e-10
CONSERVATION_TOLERANCE = 1e-11
NEUTRALITY_TOLERANCE = 1e-12


class NavierStokesPlugin(BaseEquationPlugin):
    """nse3d: entropy stable DGSEM for the compressible Navier-Stokes equations."""

    def get_equation_name(self) -> str:
        return "nse3d"

    def setup(self, case: CaseConfig) -> None:
        self.case = case
        self.gas = case.gas
        mesh_config = case.mesh
        if mesh_config.get("file"):
            self.mesh = read_mesh_file(mesh_config["file"])
        else:
            self.mesh = build_box_mesh(mesh_config["extent"], mesh_config["elements"], case.degree,
                                       warp=mesh_config.get("warp", "none"),
                                       amplitude=float(mesh_config.get("amplitude", 0.0)))
        threads = 1 if case.deterministic else case.threads
        self.operator = NavierStokesOperator(self.mesh, self.gas, case.scheme, threads=threads)
        self.u0 = build_initial_condition("nse3d", case.initial_condition, self.mesh.geometry,
                                          case.initial_params, self.gas, seed=case.seed)
        logger.info("nse3d setup: %d elements, N=%d, volume=%s, interface=%s, Re=%g",
                    self.mesh.n_elements, self.mesh.degree, case.scheme.volume, case.scheme.interface,
                    self.gas.reynolds)

    def initial_state(self) -> np.ndarray:
        return self.u0.copy()

    def rhs(self, u: np.ndarray) -> np.ndarray:
        return self.operator.rhs(u)

    def estimate_dt(self, u: np.ndarray) -> float:
        return estimate_dt(self.mesh, u, self.case.cfl, self.gas)

    def new_series(self) -> TimeSeries:
        return TimeSeries(columns=NSE_COLUMNS)

    def record(self, series: TimeSeries, t: float, u: np.ndarray) -> None:
        series.append(t,
                      S=total_entropy(self.mesh, u, self.gas),
                      Ekin=kinetic_energy(self.mesh, u),
                      ens=enstrophy(self.operator, u),
                      mass=float(conserved_totals(self.mesh, u)[0]))

    @property
    def node_axes(self) -> int:
        return 4

    def integrate(self, values: np.ndarray) -> float:
        return float(integrate(self.mesh, values))

    def exact_solution(self, t: float) -> Optional[np.ndarray]:
        if self.case.initial_condition != "density_wave" or self.gas.is_viscous:
            return None
        params = dict(self.case.initial_params, time=t)
        return build_initial_condition("nse3d", "density_wave", self.mesh.geometry, params, self.gas)

    def snapshot_rows(self, u: np.ndarray) -> List[Tuple[int, np.ndarray]]:
        data = np.concatenate([self.mesh.geometry, u], axis=-1)
        return [(element, nodes_in_file_order(data[element])) for element in range(self.mesh.n_elements)]

    def audits(self, u: np.ndarray) -> List[AuditResult]:
        mesh, operator = self.mesh, self.operator
        results = [AuditResult.at_most("sbp_residual", mesh.ops.sbp_residual(), SBP_TOLERANCE)]

        scale = max(1.0, float(np.max(np.abs(mesh.metrics.contravariant))))
        results.append(AuditResult.at_most("metric_identity", check_metric_identities(mesh.metrics, mesh.ops),
                                           METRIC_TOLERANCE * scale))
        results.append(AuditResult.at_most("watertight_faces", check_watertight(mesh), METRIC_TOLERANCE * scale))

        constant = free_stream(mesh.geometry, self.gas)
        results.append(AuditResult.at_most("free_stream_rhs", float(np.max(np.abs(operator.rhs(constant)))),
                                           FREE_STREAM_TOLERANCE))

        parts = operator.rhs_parts(u)
        entropy = total_entropy(mesh, u, self.gas)
        rate = operator.contract_with_entropy(u, parts.total)
        bound = ENTROPY_TOLERANCE * max(1.0, abs(entropy))
        if not self.case.scheme.entropy_conservative_volume:
            # no entropy statement for the standard volume integral; reported only
            results.append(AuditResult("entropy_rate_standard_volume", rate, float("inf"), True))
        elif self.case.scheme.dissipation or self.gas.is_viscous:
            results.append(AuditResult.at_most("entropy_rate_nonpositive", rate, bound))
        else:
            results.append(AuditResult.at_most("entropy_rate_conservative", abs(rate), bound))
        inviscid_rate = operator.contract_with_entropy(u, parts.advective)
        if self.case.scheme.entropy_conservative_volume and not self.case.scheme.dissipation:
            results.append(AuditResult.at_most("advective_entropy_rate", abs(inviscid_rate), bound))

        totals = conserved_totals(mesh, np.abs(u))
        drift = np.abs(operator.integrate(parts.total / operator.jacobian[..., None]))
        results.append(AuditResult.at_most("conservation", float(np.max(drift / np.maximum(1.0, totals))),
                                           CONSERVATION_TOLERANCE))

        if self.gas.is_viscous:
            neutrality = operator.viscous_interface_entropy(u)
            results.append(AuditResult.at_most(
                "br1_interface_neutrality", abs(neutrality["difference"]),
                NEUTRALITY_TOLERANCE * max(1.0, abs(neutrality["volume"]))))
            results.append(AuditResult.at_most(
                "br1_viscous_dissipation", neutrality["volume"], ENTROPY_TOLERANCE * max(1.0, abs(entropy))))
        logger.debug("Audited state: S=%.17g, dS/dt=%.6e", entropy, rate)
        return results
