"""Minimax MPC on the frozen LPV kinematic model.

The decision variable is the stacked body-velocity increment U over the
control horizon. Disturbances enter every predicted block additively and are
box-bounded, and Q is diagonal, so the inner maximisation has the closed form

    max_D V = sum_{j,i} Q_i (|a_ji(U)| + d_bar_i)^2 + sum_j ||dnu_j||_R^2,

with a(U) the predicted output error. Introducing t >= |a| turns the outer
minimisation into a convex QP; each (t + d_bar)^2 increases in t >= 0, so
t = |a(U*)| at the optimum and the QP value is the exact minimax value. The
2 Q_i d_bar_i |a| cross term acts as an L1 penalty on the predicted error.

Only the six pose slots of each 12-component disturbance block reach the
output, so the velocity-slot bounds are accepted but do not change the cost.
"""

import logging
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from app.models.control import (
    ControlSolution,
    LpvModel,
    McTuning,
    PredictionOperators,
    QpProblem,
    SolveStatus,
)
from app.models.guidance import LosReference
from app.models.vehicle import Pose, Velocity, VehicleParams, VehicleState, Wrench
from app.services import vehicle_dynamics as vd
from app.services.qp_solver import QpBackend, get_backend

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

# Output selector G = [I6 0]
G = np.hstack((np.eye(6), np.zeros((6, 6))))


def build_lpv(pose: Pose, Ts: float, pitch_margin: float = vd.PITCH_MARGIN) -> LpvModel:
    """A = [[I, J(k)], [0, I]], B = [[J(k)], [I]] with J(k) = J(eta) * Ts."""
    if not Ts > 0.0:
        raise ValueError("Ts must be positive")
    Jk = vd.rotation_matrix(pose, pitch_margin) * Ts
    A = np.eye(12)
    A[0:6, 6:12] = Jk
    B = np.vstack((Jk, np.eye(6)))
    return LpvModel(A=A, B=B, frozen_pose=pose, Ts=Ts)


def build_prediction(model: LpvModel, N: int, Nu: int) -> PredictionOperators:
    """Stacked X = A_tilde x + B_tilde U with dnu(k+j|k) = 0 for j >= Nu."""
    if not 1 <= Nu <= N:
        raise ValueError(f"horizons must satisfy 1 <= Nu <= N, got N={N}, Nu={Nu}")
    nx, nu = model.B.shape
    powers = [np.eye(nx)]
    for _ in range(N):
        powers.append(model.A @ powers[-1])

    A_tilde = np.vstack(powers[1:])
    B_tilde = np.zeros((nx * N, nu * Nu))
    AB = [P @ model.B for P in powers[:N]]
    for j in range(1, N + 1):
        for i in range(min(j, Nu)):
            B_tilde[(j - 1) * nx : j * nx, i * nu : (i + 1) * nu] = AB[j - 1 - i]
    G_tilde = np.kron(np.eye(N), G)
    return PredictionOperators(A_tilde=A_tilde, B_tilde=B_tilde, G_tilde=G_tilde, N=N, Nu=Nu)


def _errors(U: FloatArray, x: FloatArray, refs: FloatArray, ops: PredictionOperators) -> FloatArray:
    return ops.G_tilde @ (ops.A_tilde @ x + ops.B_tilde @ U) - refs


def worst_case_cost(
    U: FloatArray,
    x: FloatArray,
    refs: FloatArray,
    ops: PredictionOperators,
    tuning: McTuning,
) -> float:
    """Exact maximum of the tracking cost over the disturbance box."""
    a = np.abs(_errors(U, x, refs, ops))
    q = np.tile(tuning.Q, ops.N)
    e = np.tile(tuning.output_d_bar, ops.N)
    r = np.tile(tuning.R, ops.Nu)
    return float(q @ (a + e) ** 2 + r @ (U * U))


def nominal_cost(
    U: FloatArray,
    x: FloatArray,
    refs: FloatArray,
    ops: PredictionOperators,
    tuning: McTuning,
) -> float:
    a = _errors(U, x, refs, ops)
    q = np.tile(tuning.Q, ops.N)
    r = np.tile(tuning.R, ops.Nu)
    return float(q @ (a * a) + r @ (U * U))


def build_qp(
    x: FloatArray,
    refs: FloatArray,
    model: LpvModel,
    tuning: McTuning,
    nu_prev: Velocity,
    pose: Pose,
    params: VehicleParams,
    ops: Optional[PredictionOperators] = None,
) -> QpProblem:
    """Epigraph QP over z = [U; t] equivalent to the minimax problem.

    Constraints: t >= a(U), t >= -a(U), and -tau_bar <= (M/Ts) dnu_j + chi(nu_prev) <= tau_bar
    for j = 0..Nu-1 with chi frozen at the last measured velocity.
    """
    ops = ops if ops is not None else build_prediction(model, tuning.N, tuning.Nu)
    n_u, n_t = 6 * ops.Nu, 6 * ops.N

    S = ops.G_tilde @ ops.B_tilde
    c = ops.G_tilde @ (ops.A_tilde @ np.asarray(x, dtype=float)) - np.asarray(refs, dtype=float)
    q = np.tile(tuning.Q, ops.N)
    e = np.tile(tuning.output_d_bar, ops.N)
    r = np.tile(tuning.R, ops.Nu)

    H = 2.0 * np.diag(np.concatenate((r, q)))
    f = np.concatenate((np.zeros(n_u), 2.0 * q * e))
    constant_offset = float(q @ (e * e))

    eye_t = np.eye(n_t)
    epi_plus = np.hstack((S, -eye_t))
    epi_minus = np.hstack((-S, -eye_t))

    M_bar = params.M / model.Ts
    chi_prev = vd.chi(nu_prev, pose, params)
    tau_bar = tuning.tau_bar
    block = np.kron(np.eye(ops.Nu), M_bar)
    input_rows = np.hstack((block, np.zeros((n_u, n_t))))
    upper = np.tile(tau_bar - chi_prev, ops.Nu)
    lower = np.tile(tau_bar + chi_prev, ops.Nu)

    C_ineq = np.vstack((epi_plus, epi_minus, input_rows, -input_rows))
    b_ineq = np.concatenate((-c, c, upper, lower))
    return QpProblem(
        H=H,
        f=f,
        C_ineq=C_ineq,
        b_ineq=b_ineq,
        constant_offset=constant_offset,
        n_u=n_u,
        n_t=n_t,
    )


def solve_qp(
    problem: QpProblem,
    tol: float = 1e-6,
    max_iter: int = 4000,
    backend: Optional[QpBackend] = None,
    warm_start: Optional[FloatArray] = None,
) -> ControlSolution:
    backend = backend if backend is not None else get_backend("active_set")
    result = backend.solve(
        problem.H,
        problem.f,
        problem.C_ineq,
        problem.b_ineq,
        tol=tol,
        max_iter=max_iter,
        x0=warm_start,
    )
    U = result.x[: problem.n_u]
    return ControlSolution(
        U_star=U,
        delta_nu_star=U[:6].copy(),
        worst_case_cost=result.objective + problem.constant_offset,
        iterations=result.iterations,
        status=result.status,
        t_star=result.x[problem.n_u :],
    )


def align_reference(ref: LosReference, pose: Pose) -> FloatArray:
    """Reference 6-vector with each angle moved within pi of the current attitude."""
    y_ref = ref.as_array()
    current = pose.as_array()
    for i in range(3, 6):
        y_ref[i] = current[i] + vd.wrap_to_pi(y_ref[i] - current[i])
    return y_ref


def shift_warm_start(previous: Optional[ControlSolution], n_u: int, n_t: int) -> Optional[FloatArray]:
    """Previous [U; t] shifted one block ahead and zero-padded."""
    if previous is None or previous.U_star.shape[0] != n_u or previous.t_star.shape[0] != n_t:
        return None
    U = np.concatenate((previous.U_star[6:], np.zeros(6)))
    t = np.concatenate((previous.t_star[6:], previous.t_star[-6:]))
    return np.concatenate((U, t))


def mpc_step(
    state: VehicleState,
    nu_prev: Velocity,
    refs: LosReference,
    tuning: McTuning,
    params: VehicleParams,
    backend: Optional[QpBackend] = None,
    previous: Optional[ControlSolution] = None,
) -> tuple[Wrench, ControlSolution]:
    """Solve the minimax problem at the current state and map dnu(k|k)* to a wrench.

    On any non-solved status the zero-increment wrench chi(nu_prev), saturated to
    +-tau_bar, is returned together with the flagged solution.
    """
    pose = state.pose
    model = build_lpv(pose, tuning.Ts, params.pitch_margin)
    ops = build_prediction(model, tuning.N, tuning.Nu)
    y_ref = np.tile(align_reference(refs, pose), tuning.N)
    problem = build_qp(state.as_array(), y_ref, model, tuning, nu_prev, pose, params, ops)

    backend = backend if backend is not None else get_backend(tuning.solver)
    solution = solve_qp(
        problem,
        tol=tuning.tol,
        max_iter=tuning.max_iter,
        backend=backend,
        warm_start=shift_warm_start(previous, problem.n_u, problem.n_t),
    )
    logger.debug(
        "QP %s in %d iterations, worst-case cost %.6g",
        solution.status.value,
        solution.iterations,
        solution.worst_case_cost,
    )

    if solution.status is SolveStatus.SOLVED:
        tau = vd.inverse_dynamics(solution.delta_nu_star, nu_prev, pose, params, tuning.Ts).as_array()
    else:
        logger.warning("QP %s; applying zero-increment wrench", solution.status.value)
        tau = vd.chi(nu_prev, pose, params)
        solution = ControlSolution(
            U_star=np.zeros(problem.n_u),
            delta_nu_star=np.zeros(6),
            worst_case_cost=worst_case_cost(np.zeros(problem.n_u), state.as_array(), y_ref, ops, tuning),
            iterations=solution.iterations,
            status=solution.status,
            t_star=np.zeros(problem.n_t),
        )
    # solver tolerance may leave the bound exceeded by a hair
    tau = np.clip(tau, -tuning.tau_bar, tuning.tau_bar)
    return Wrench.from_array(tau), solution
