"""Closed-loop record types: per-step log rows, the run log, metrics and sweep tables."""

from dataclasses import dataclass, field
from typing import List, Optional

POSE_COLUMNS = ("x", "y", "z", "phi", "theta", "psi")
NU_COLUMNS = ("u", "v", "w", "p", "q", "r")
TAU_COLUMNS = ("tau_X", "tau_Y", "tau_Z", "tau_K", "tau_M", "tau_N")
TAU_W_COLUMNS = ("tau_w_X", "tau_w_Y", "tau_w_Z")
REF_COLUMNS = ("x_los", "y_los", "z_los", "phi_ref", "theta_ref", "psi_ref")

# Fixed column order of CSV/JSON logs
LOG_COLUMNS = (
    ("t",)
    + POSE_COLUMNS
    + NU_COLUMNS
    + TAU_COLUMNS
    + TAU_W_COLUMNS
    + REF_COLUMNS
    + ("active_index", "qp_status", "qp_iterations", "worst_case_cost")
)

# qp_status of the row closing a run (no control computed on it)
TERMINAL_STATUS = "terminal"


@dataclass(frozen=True, slots=True)
class LogRow:
    t: float
    pose: tuple[float, ...]
    nu: tuple[float, ...]
    tau: tuple[float, ...]
    tau_w: tuple[float, ...]
    los_ref: tuple[float, ...]
    active_index: int
    qp_status: str
    qp_iterations: int
    worst_case_cost: float

    def as_record(self) -> list:
        """Flatten in LOG_COLUMNS order."""
        return [
            self.t,
            *self.pose,
            *self.nu,
            *self.tau,
            *self.tau_w,
            *self.los_ref,
            self.active_index,
            self.qp_status,
            self.qp_iterations,
            self.worst_case_cost,
        ]

    @classmethod
    def from_record(cls, record: list) -> "LogRow":
        values = list(record)
        if len(values) != len(LOG_COLUMNS):
            raise ValueError(f"log row needs {len(LOG_COLUMNS)} fields, got {len(values)}")
        floats = [float(v) for v in values[:29]]
        return cls(
            t=floats[0],
            pose=tuple(floats[1:7]),
            nu=tuple(floats[7:13]),
            tau=tuple(floats[13:19]),
            tau_w=tuple(floats[19:22]),
            los_ref=tuple(floats[22:28]),
            active_index=int(values[28]),
            qp_status=str(values[29]),
            qp_iterations=int(values[30]),
            worst_case_cost=float(values[31]),
        )


@dataclass
class SimLog:
    """Ordered per-step closed-loop record; t advances in exact multiples of Ts."""

    Ts: float
    rows: List[LogRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, row: LogRow) -> None:
        self.rows.append(row)


@dataclass(frozen=True)
class Metrics:
    waypoint_hit_times: tuple[Optional[float], ...]
    mean_surge: float
    surge_std: float
    mean_abs_roll: float
    max_abs_roll: float
    max_abs_tau: float
    cross_track_rms: tuple[Optional[float], ...]
    completed: bool
    mean_los_surge: float = 0.0
    final_time: float = 0.0


@dataclass(frozen=True, slots=True)
class SweepRow:
    value: float
    mean_surge: float
    completed: bool
    max_cross_track_rms: Optional[float] = None
    metrics: Optional[Metrics] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SweepTable:
    parameter: str
    rows: tuple[SweepRow, ...]

    @property
    def comparable(self) -> bool:
        """False as soon as one run failed to finish the plan."""
        return all(row.completed for row in self.rows)
