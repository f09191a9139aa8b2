"""
Base plugin class for equation-specific setup, diagnostics and audits.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.case_config import CaseConfig
from dgsem.diagnostics import TimeSeries


@dataclass
class AuditResult:
    """One invariant check: measured residual against its bound."""
    name: str
    measured: float
    bound: float
    passed: bool

    @classmethod
    def at_most(cls, name: str, measured: float, bound: float) -> "AuditResult":
        return cls(name, float(measured), float(bound), bool(measured <= bound))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<40s} measured={self.measured:.6e} bound={self.bound:.3e}"


class BaseEquationPlugin(ABC):
    """
    Abstract base class for equation plugins.

    A plugin turns a validated case into a mesh, an initial state and a
    right-hand side, and knows the diagnostics and audits of its equation.
    """

    def __init__(self, config: Dict[str, Any]):
        self.config = config
        self.equation = config.get('equation', self.get_equation_name())

    @abstractmethod
    def get_equation_name(self) -> str:
        """Return the equation name this plugin handles."""

    @abstractmethod
    def setup(self, case: CaseConfig) -> None:
        """Build mesh, operator and initial state for a case."""

    @abstractmethod
    def initial_state(self) -> np.ndarray:
        pass

    @abstractmethod
    def rhs(self, u: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def estimate_dt(self, u: np.ndarray) -> float:
        pass

    @abstractmethod
    def new_series(self) -> TimeSeries:
        pass

    @abstractmethod
    def record(self, series: TimeSeries, t: float, u: np.ndarray) -> None:
        """Append one diagnostic sample."""

    @abstractmethod
    def audits(self, u: np.ndarray) -> List[AuditResult]:
        """Semi-discrete invariant checks at state u."""

    def exact_solution(self, t: float) -> Optional[np.ndarray]:
        """Nodal exact solution at time t, if the case has one."""
        return None

    def l2_error(self, u: np.ndarray, t: float) -> Optional[float]:
        exact = self.exact_solution(t)
        if exact is None:
            return None
        squared = np.sum(np.square(u - exact), axis=tuple(range(self.node_axes, u.ndim)))
        return float(np.sqrt(self.integrate(squared)))

    @property
    @abstractmethod
    def node_axes(self) -> int:
        """Number of leading element/node axes of a solution array."""

    @abstractmethod
    def integrate(self, values: np.ndarray) -> float:
        """Quadrature integral of a nodal scalar field."""

    @abstractmethod
    def snapshot_rows(self, u: np.ndarray) -> List[Tuple[int, np.ndarray]]:
        """(element, rows) pairs with coordinates followed by state, nodes in file order."""
