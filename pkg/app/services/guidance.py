"""3D line-of-sight waypoint guidance.

Per sample: switch waypoints on the sphere of acceptance, aim along the
desired heading psi_d at a point on the circle of acceptance, lift/lower that
point so the elevation angle to the waypoint is preserved, and take the
reference attitude from the straight segment being followed.
"""

import logging
import math
from dataclasses import replace

from app.models.guidance import LosReference, Waypoint, WaypointPlan
from app.models.vehicle import Pose
from app.services.vehicle_dynamics import wrap_to_pi

logger = logging.getLogger(__name__)

# Horizontal separations below this are treated as coincident
COINCIDENCE_TOL = 1e-9


class CoincidentPointError(ValueError):
    """Raised when the vehicle sits horizontally on top of the waypoint."""

    pass


class DegenerateSegmentError(ValueError):
    """Raised when a path segment is vertical or has zero length."""

    pass


class PlanCompleteError(Exception):
    """Raised when the destination's sphere of acceptance has been entered."""

    def __init__(self, plan: WaypointPlan):
        super().__init__(f"destination reached after {plan.count} waypoints")
        self.plan = plan


def desired_heading(pos: tuple[float, float], wp: Waypoint) -> float:
    """Four-quadrant bearing from pos to the waypoint, in (-pi, pi]."""
    dx, dy = wp.x - pos[0], wp.y - pos[1]
    if math.hypot(dx, dy) < COINCIDENCE_TOL:
        raise CoincidentPointError(f"vehicle at {pos} is horizontally on waypoint {wp}")
    return wrap_to_pi(math.atan2(dy, dx))


def los_horizontal(pos: tuple[float, float], psi_d: float, rho_c: float) -> tuple[float, float]:
    """Point on the circle of acceptance along psi_d.

    The cos/sin offset solves the circle and ray equations in every quadrant,
    which the tan-based closed form cannot do at psi_d = +-pi/2.
    """
    if not rho_c > 0.0:
        raise ValueError("rho_c must be positive")
    return pos[0] + rho_c * math.cos(psi_d), pos[1] + rho_c * math.sin(psi_d)


def los_surge_speed(x_los: float, x_los_prev: float, Ts: float) -> float:
    """Discrete LOS surge speed (x_los(k) - x_los(k-1)) / Ts. Diagnostic only."""
    if not Ts > 0.0:
        raise ValueError("Ts must be positive")
    return (x_los - x_los_prev) / Ts


def elevation_angle(pos: tuple[float, float, float], wp: Waypoint) -> float:
    horizontal = math.hypot(wp.x - pos[0], wp.y - pos[1])
    if horizontal <= COINCIDENCE_TOL:
        raise CoincidentPointError(f"vehicle at {pos} is horizontally on waypoint {wp}")
    return math.atan((wp.z - pos[2]) / horizontal)


def los_depth(z: float, theta0: float, rho_c: float) -> float:
    if not abs(theta0) < math.pi / 2:
        raise ValueError("theta0 must lie in (-pi/2, pi/2)")
    return z + math.tan(theta0) * rho_c


def switch_condition(pos: tuple[float, float, float], wp: Waypoint, rho_s: float) -> bool:
    """True inside or on the sphere of acceptance."""
    dx, dy, dz = wp.x - pos[0], wp.y - pos[1], wp.z - pos[2]
    return dx * dx + dy * dy + dz * dz <= rho_s * rho_s


def path_orientation(wp_from: Waypoint, wp_to: Waypoint) -> tuple[float, float]:
    """(psi_p, theta_p) of the straight segment wp_from -> wp_to."""
    dx, dy, dz = wp_to.x - wp_from.x, wp_to.y - wp_from.y, wp_to.z - wp_from.z
    horizontal = math.hypot(dx, dy)
    if horizontal <= COINCIDENCE_TOL:
        raise DegenerateSegmentError(f"segment {wp_from} -> {wp_to} has no horizontal extent")
    psi_p = wrap_to_pi(math.atan2(dy, dx))
    theta_p = -math.atan(dz / horizontal)
    return psi_p, theta_p


def guidance_update(plan: WaypointPlan, pose: Pose) -> tuple[WaypointPlan, LosReference]:
    """One guidance sample: waypoint switching, then the LOS reference for the active target."""
    if plan.is_complete:
        raise PlanCompleteError(plan)
    pos = (pose.x, pose.y, pose.z)
    if plan.start is None:
        plan = replace(plan, start=Waypoint(*pos))

    # several spheres may contain the vehicle at once
    while not plan.is_complete and switch_condition(pos, plan.active, plan.rho_s):
        logger.info("Waypoint %d reached at %s", plan.active_index, tuple(round(v, 3) for v in pos))
        plan = plan.advanced()
    if plan.is_complete:
        raise PlanCompleteError(plan)

    wp = plan.active
    psi_p, theta_p = path_orientation(plan.segment_start(plan.active_index), wp)
    try:
        psi_d = desired_heading(pos[:2], wp)
        x_los, y_los = los_horizontal(pos[:2], psi_d, plan.rho_c)
        z_los = los_depth(pose.z, elevation_angle(pos, wp), plan.rho_c)
    except CoincidentPointError:
        # directly above/below the waypoint: hold the path heading, move vertically
        x_los, y_los = los_horizontal(pos[:2], psi_p, plan.rho_c)
        z_los = pose.z + math.copysign(plan.rho_c, wp.z - pose.z)

    reference = LosReference(
        x_los=x_los,
        y_los=y_los,
        z_los=z_los,
        phi_ref=0.0,
        theta_ref=theta_p,
        psi_ref=psi_p,
    )
    return plan, reference
