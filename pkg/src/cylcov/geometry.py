"""Deployment region: a finite cylinder of base radius R and height H."""

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class CylinderGeometry:
    """Cylindrical deployment volume.

    Attributes:
        R: base radius (> 0).
        H: height (> 0).
    """

    R: float
    H: float

    def __post_init__(self):
        if not (self.R > 0.0):
            raise DomainError(f"radius R={self.R!r} must be positive")
        if not (self.H > 0.0):
            raise DomainError(f"height H={self.H!r} must be positive")

    @property
    def d_max(self) -> float:
        """Largest possible distance between two points, sqrt(4 R^2 + H^2)."""
        return math.sqrt(4.0 * self.R * self.R + self.H * self.H)

    @property
    def volume(self) -> float:
        return math.pi * self.R * self.R * self.H
