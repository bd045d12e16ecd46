import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np


@dataclass(frozen=True, slots=True)
class Waypoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"Waypoint coordinates must be finite: {(self.x, self.y, self.z)}")

    def as_array(self) -> np.ndarray:
        return np.array((self.x, self.y, self.z), dtype=float)


@dataclass(frozen=True)
class WaypointPlan:
    """Ordered waypoints (destination last), acceptance radii and the active target.

    start is the vehicle position when guidance first ran; it closes the first
    path segment.
    """

    waypoints: tuple[Waypoint, ...]
    rho_c: float = 0.5
    rho_s: float = 3.0
    active_index: int = 0
    start: Optional[Waypoint] = None

    def __post_init__(self):
        if len(self.waypoints) < 1:
            raise ValueError("a plan needs at least one waypoint")
        if not self.rho_c > 0.0:
            raise ValueError("rho_c must be positive")
        if not self.rho_s > 0.0:
            raise ValueError("rho_s must be positive")
        if not 0 <= self.active_index <= len(self.waypoints):
            raise ValueError(f"active_index {self.active_index} out of range")

    @property
    def count(self) -> int:
        return len(self.waypoints)

    @property
    def is_complete(self) -> bool:
        return self.active_index >= self.count

    @property
    def active(self) -> Waypoint:
        return self.waypoints[self.active_index]

    def segment_start(self, index: int) -> Optional[Waypoint]:
        """Start point of the segment that ends at waypoint `index`."""
        return self.waypoints[index - 1] if index > 0 else self.start

    def advanced(self) -> "WaypointPlan":
        return replace(self, active_index=self.active_index + 1)


@dataclass(frozen=True, slots=True)
class LosReference:
    """Tracked output reference [x_los, y_los, z_los, 0, theta_p, psi_p]."""

    x_los: float
    y_los: float
    z_los: float
    phi_ref: float = 0.0
    theta_ref: float = 0.0
    psi_ref: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(
            (self.x_los, self.y_los, self.z_los, self.phi_ref, self.theta_ref, self.psi_ref),
            dtype=float,
        )
