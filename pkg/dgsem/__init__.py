"""
Entropy stable discontinuous Galerkin spectral element library.
"""
from .errors import BasisError, ConfigError, DGSEMError, MeshError, PositivityError, StateError

__all__ = ["BasisError", "ConfigError", "DGSEMError", "MeshError", "PositivityError", "StateError"]
