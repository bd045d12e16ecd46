"""Coupled 6-DOF vehicle model: kinematics, M nu_dot + C nu + D nu + g = tau + tau_w.

The same functions serve as the simulation truth model (RK4 integration) and
as the inverse-dynamics map that turns an optimal velocity increment into the
generalised wrench actually commanded.

Sign convention: z is a signed inertial coordinate with the body z axis
pointing down at level attitude, so waypoints below the surface carry
negative z and formulas are applied literally.
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from app.config import PITCH_MARGIN
from app.models.vehicle import Pose, Velocity, VehicleParams, VehicleState, Wrench

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
TWO_PI = 2.0 * math.pi


class PitchSingularityError(ValueError):
    """Raised when |theta| reaches pi/2 - margin and the Euler rate map is undefined."""

    pass


def wrap_to_pi(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, TWO_PI)
    return math.pi if wrapped <= -math.pi else wrapped


def skew(a: FloatArray) -> FloatArray:
    """S(a) with S(a) b = a x b."""
    return np.array(
        [
            [0.0, -a[2], a[1]],
            [a[2], 0.0, -a[0]],
            [-a[1], a[0], 0.0],
        ]
    )


def check_pitch(theta: float, pitch_margin: float = PITCH_MARGIN) -> None:
    if abs(theta) >= math.pi / 2 - pitch_margin:
        raise PitchSingularityError(
            f"pitch {theta:.6f} rad is within {pitch_margin} rad of +-pi/2"
        )


def linear_rotation(pose: Pose) -> FloatArray:
    """J1: body-to-inertial rotation, zyx Euler convention."""
    cphi, sphi = math.cos(pose.phi), math.sin(pose.phi)
    cth, sth = math.cos(pose.theta), math.sin(pose.theta)
    cpsi, spsi = math.cos(pose.psi), math.sin(pose.psi)
    return np.array(
        [
            [cpsi * cth, -spsi * cphi + cpsi * sth * sphi, spsi * sphi + cpsi * cphi * sth],
            [spsi * cth, cpsi * cphi + sphi * sth * spsi, -cpsi * sphi + sth * spsi * cphi],
            [-sth, cth * sphi, cth * cphi],
        ]
    )


def angular_transform(pose: Pose) -> FloatArray:
    """J2: body rates to Euler-angle rates."""
    cphi, sphi = math.cos(pose.phi), math.sin(pose.phi)
    cth, sth = math.cos(pose.theta), math.sin(pose.theta)
    return np.array(
        [
            [1.0, sphi * sth / cth, cphi * sth / cth],
            [0.0, cphi, -sphi],
            [0.0, sphi / cth, cphi / cth],
        ]
    )


def rotation_matrix(pose: Pose, pitch_margin: float = PITCH_MARGIN) -> FloatArray:
    """J(eta) = blockdiag(J1, J2)."""
    check_pitch(pose.theta, pitch_margin)
    J = np.zeros((6, 6))
    J[0:3, 0:3] = linear_rotation(pose)
    J[3:6, 3:6] = angular_transform(pose)
    return J


def coriolis_matrix(nu: Velocity, params: VehicleParams) -> FloatArray:
    """C(nu) from the partitioned inertia matrix.

    C = [[0, -S(M11 nu1 + M12 nu2)], [-S(M11 nu1 + M12 nu2), -S(M21 nu1 + M22 nu2)]],
    which makes nu' C(nu) nu vanish identically.
    """
    M = 0.5 * (params.M + params.M.T)
    v = nu.as_array()
    nu1, nu2 = v[0:3], v[3:6]
    a = M[0:3, 0:3] @ nu1 + M[0:3, 3:6] @ nu2
    b = M[3:6, 0:3] @ nu1 + M[3:6, 3:6] @ nu2
    C = np.zeros((6, 6))
    C[0:3, 3:6] = -skew(a)
    C[3:6, 0:3] = -skew(a)
    C[3:6, 3:6] = -skew(b)
    return C


def damping_matrix(nu: Velocity, params: VehicleParams) -> FloatArray:
    """D(nu) = D_lin + diag(|nu_i| * D_quad_i)."""
    return params.D_lin + np.diag(np.abs(nu.as_array()) * params.D_quad)


def restoring_vector(pose: Pose, params: VehicleParams) -> FloatArray:
    """g(eta) for a submerged body with weight W at r_g and buoyancy B at r_b."""
    W, B = params.W, params.B
    xg, yg, zg = params.r_g
    xb, yb, zb = params.r_b
    sth, cth = math.sin(pose.theta), math.cos(pose.theta)
    sphi, cphi = math.sin(pose.phi), math.cos(pose.phi)
    return np.array(
        [
            (W - B) * sth,
            -(W - B) * cth * sphi,
            -(W - B) * cth * cphi,
            -(yg * W - yb * B) * cth * cphi + (zg * W - zb * B) * cth * sphi,
            (zg * W - zb * B) * sth + (xg * W - xb * B) * cth * cphi,
            -(xg * W - xb * B) * cth * sphi - (yg * W - yb * B) * sth,
        ]
    )


def chi(nu: Velocity, pose: Pose, params: VehicleParams) -> FloatArray:
    """chi = C(nu) nu + D(nu) nu + g(eta)."""
    v = nu.as_array()
    return (
        coriolis_matrix(nu, params) @ v
        + damping_matrix(nu, params) @ v
        + restoring_vector(pose, params)
    )


def accel(
    state: VehicleState,
    tau: Wrench,
    tau_w: FloatArray,
    params: VehicleParams,
) -> FloatArray:
    """nu_dot = M^-1 (tau + tau_w - chi(nu, eta))."""
    rhs = tau.as_array() + np.asarray(tau_w, dtype=float) - chi(state.nu, state.pose, params)
    return np.linalg.solve(params.M, rhs)


def state_derivative(
    state: VehicleState,
    tau: Wrench,
    tau_w: FloatArray,
    params: VehicleParams,
) -> FloatArray:
    """[eta_dot; nu_dot] = [J(eta) nu; accel]."""
    J = rotation_matrix(state.pose, params.pitch_margin)
    eta_dot = J @ state.nu.as_array()
    return np.concatenate((eta_dot, accel(state, tau, tau_w, params)))


def step_truth(
    state: VehicleState,
    tau: Wrench,
    tau_w: FloatArray,
    params: VehicleParams,
    Ts: float,
) -> VehicleState:
    """One classical RK4 step with tau and tau_w held over the interval."""
    if not Ts > 0.0:
        raise ValueError("Ts must be positive")
    x0 = state.as_array()

    def f(x: FloatArray) -> FloatArray:
        return state_derivative(VehicleState.from_array(x), tau, tau_w, params)

    k1 = f(x0)
    k2 = f(x0 + 0.5 * Ts * k1)
    k3 = f(x0 + 0.5 * Ts * k2)
    k4 = f(x0 + Ts * k3)
    x1 = x0 + (Ts / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    # the new pose has to stay usable by the next step
    check_pitch(float(x1[4]), params.pitch_margin)
    return VehicleState.from_array(x1)


def inverse_dynamics(
    delta_nu: FloatArray,
    nu_prev: Velocity,
    pose: Pose,
    params: VehicleParams,
    Ts: float,
) -> Wrench:
    """tau = (M / Ts) dnu + chi(nu_prev, eta); no saturation here."""
    if not Ts > 0.0:
        raise ValueError("Ts must be positive")
    tau = (params.M / Ts) @ np.asarray(delta_nu, dtype=float) + chi(nu_prev, pose, params)
    return Wrench.from_array(tau)


def describe(params: VehicleParams) -> None:
    """Log the headline numbers of a parameter set and flag implausible ones."""
    logger.info(
        "Vehicle: L=%.2f m, W=%.1f N, B=%.1f N, diag(M)=%s, tau_bar=%s",
        params.L,
        params.W,
        params.B,
        np.round(np.diag(params.M), 2).tolist(),
        params.tau_bar.tolist(),
    )
    if abs(params.W - params.B) > 0.05 * max(params.W, params.B):
        logger.warning("Vehicle is far from neutral buoyancy: W-B=%.1f N", params.W - params.B)
    if params.r_g[2] < params.r_b[2]:
        logger.warning("Centre of gravity above centre of buoyancy: roll/pitch unstable")
