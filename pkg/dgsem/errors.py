"""
Exception hierarchy shared by the solver library and the batch driver.
"""
from typing import Optional, Tuple


class DGSEMError(Exception):
    """Base class for all solver errors."""


class BasisError(DGSEMError):
    """Invalid degree, duplicate nodes or a root solve that did not converge."""


class MeshError(DGSEMError):
    """Invalid geometry, connectivity or mesh file."""

    def __init__(self, message: str, element: Optional[int] = None,
                 node: Optional[Tuple[int, ...]] = None):
        details = []
        if element is not None:
            details.append(f"element {element}")
        if node is not None:
            details.append(f"node {node}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.element = element
        self.node = node


class StateError(DGSEMError):
    """A state outside the admissible set of the physics."""


class PositivityError(StateError):
    """Density or pressure fell below the admissible floor."""

    def __init__(self, message: str, element: Optional[int] = None,
                 node: Optional[Tuple[int, ...]] = None,
                 density: Optional[float] = None, pressure: Optional[float] = None):
        details = []
        if element is not None:
            details.append(f"element {element}")
        if node is not None:
            details.append(f"node {node}")
        if density is not None:
            details.append(f"rho={density:.6e}")
        if pressure is not None:
            details.append(f"p={pressure:.6e}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)
        self.element = element
        self.node = node
        self.density = density
        self.pressure = pressure


class ConfigError(DGSEMError):
    """Invalid or inconsistent case configuration."""
