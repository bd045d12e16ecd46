"""Controller value types: LPV model, tuning, stacked operators, QP and its solution."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from app.models.vehicle import Pose

FloatArray = NDArray[np.float64]


class SolveStatus(str, Enum):
    SOLVED = "solved"
    INFEASIBLE = "infeasible"
    MAX_ITER = "max-iter"


class QpBackendName(str, Enum):
    ACTIVE_SET = "active_set"
    OSQP = "osqp"


@dataclass(frozen=True, eq=False)
class LpvModel:
    """x(k+1) = A x(k) + B dnu(k) with J(k) = J(eta(k)) * Ts frozen over the horizon."""

    A: FloatArray
    B: FloatArray
    frozen_pose: Pose
    Ts: float


@dataclass(frozen=True, eq=False)
class McTuning:
    """Weights, horizons, disturbance bounds and solver settings of the minimax MPC."""

    Q: FloatArray
    R: FloatArray
    N: int
    Nu: int
    d_bar: FloatArray
    tau_bar: FloatArray
    Ts: float
    solver: QpBackendName = QpBackendName.ACTIVE_SET
    tol: float = 1e-6
    max_iter: int = 4000

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "Q", np.asarray(self.Q, dtype=float).reshape(6))
        set_(self, "R", np.asarray(self.R, dtype=float).reshape(6))
        set_(self, "d_bar", np.broadcast_to(np.asarray(self.d_bar, dtype=float), (12,)).copy())
        set_(self, "tau_bar", np.broadcast_to(np.asarray(self.tau_bar, dtype=float), (6,)).copy())
        if not 1 <= self.Nu <= self.N:
            raise ValueError(f"horizons must satisfy 1 <= Nu <= N, got N={self.N}, Nu={self.Nu}")
        if np.any(self.Q <= 0.0) or np.any(self.R <= 0.0):
            raise ValueError("Q and R weights must be positive")
        if np.any(self.d_bar < 0.0):
            raise ValueError("d_bar must be nonnegative")
        if np.any(self.tau_bar <= 0.0):
            raise ValueError("tau_bar must be positive")
        if not self.Ts > 0.0:
            raise ValueError("Ts must be positive")

    @property
    def output_d_bar(self) -> FloatArray:
        """Bounds on the six output-visible (pose) slots of each disturbance block."""
        return self.d_bar[:6]


@dataclass(frozen=True, eq=False)
class PredictionOperators:
    """X = A_tilde x + B_tilde U and Y = G_tilde X over N steps, increments zero beyond Nu."""

    A_tilde: FloatArray
    B_tilde: FloatArray
    G_tilde: FloatArray
    N: int
    Nu: int


@dataclass(frozen=True, eq=False)
class QpProblem:
    """min 1/2 z'Hz + f'z + constant_offset  s.t.  C_ineq z <= b_ineq, z = [U; t].

    The first 2*n_t inequality rows are the epigraph pairs (t >= a, then t >= -a);
    the remaining rows bound the generalised input over the control horizon.
    """

    H: FloatArray
    f: FloatArray
    C_ineq: FloatArray
    b_ineq: FloatArray
    constant_offset: float
    n_u: int
    n_t: int

    @property
    def n_epigraph(self) -> int:
        return 2 * self.n_t


@dataclass(frozen=True, eq=False)
class QpResult:
    """Raw backend output."""

    x: FloatArray
    objective: float
    iterations: int
    status: SolveStatus
    multipliers: FloatArray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True, eq=False)
class ControlSolution:
    U_star: FloatArray
    delta_nu_star: FloatArray
    worst_case_cost: float
    iterations: int
    status: SolveStatus
    t_star: FloatArray = field(default_factory=lambda: np.zeros(0))
