"""
Scheme selection shared by the 3D and 1D operators.
"""
from dataclasses import dataclass

from .errors import ConfigError

VOLUME_MODES = ("entropy_conservative", "standard")

INTERFACE_FLUXES = {
    "nse3d": ("ec", "ec_dissipation"),
    "burgers1d": ("ec", "ec_dissipation"),
    "advdiff1d": ("upwind", "central", "linear"),
}


@dataclass(frozen=True)
class SchemeConfig:
    """
    Volume mode and interface flux of one discretization. The viscous interface
    flux is always BR1.

    ``sigma`` weights the jump term of the linear 1D flux; "upwind" and
    "central" are shorthands for sigma = 1 and sigma = 0.
    """
    volume: str = "entropy_conservative"
    interface: str = "ec"
    sigma: float = 1.0

    @property
    def dissipation(self) -> bool:
        return self.interface == "ec_dissipation"

    @property
    def entropy_conservative_volume(self) -> bool:
        return self.volume == "entropy_conservative"

    @property
    def jump_weight(self) -> float:
        if self.interface == "upwind":
            return 1.0
        if self.interface == "central":
            return 0.0
        return self.sigma

    def validate(self, equation: str) -> "SchemeConfig":
        if equation not in INTERFACE_FLUXES:
            raise ConfigError(f"Unknown equation '{equation}'")
        if self.volume not in VOLUME_MODES:
            raise ConfigError(f"Unknown volume mode '{self.volume}', expected one of {VOLUME_MODES}")
        allowed = INTERFACE_FLUXES[equation]
        if self.interface not in allowed:
            raise ConfigError(f"Interface flux '{self.interface}' is not available for {equation}; "
                              f"expected one of {allowed}")
        if equation == "advdiff1d" and not 0.0 <= self.sigma <= 1.0:
            raise ConfigError(f"Linear flux weight sigma must lie in [0, 1], got {self.sigma}")
        return self
