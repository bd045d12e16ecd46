from app.models.control import (
    ControlSolution,
    LpvModel,
    McTuning,
    PredictionOperators,
    QpBackendName,
    QpProblem,
    QpResult,
    SolveStatus,
)
from app.models.guidance import LosReference, Waypoint, WaypointPlan
from app.models.run_record import RunRecord
from app.models.simulation import LogRow, Metrics, SimLog, SweepRow, SweepTable
from app.models.vehicle import Pose, Velocity, VehicleParams, VehicleState, Wrench
from app.models.waves import WaveAxisParams, WaveAxisState, WaveField

__all__ = [
    "ControlSolution",
    "LogRow",
    "LosReference",
    "LpvModel",
    "McTuning",
    "Metrics",
    "Pose",
    "PredictionOperators",
    "QpBackendName",
    "QpProblem",
    "QpResult",
    "RunRecord",
    "SimLog",
    "SolveStatus",
    "SweepRow",
    "SweepTable",
    "Velocity",
    "VehicleParams",
    "VehicleState",
    "WaveAxisParams",
    "WaveAxisState",
    "WaveField",
    "Waypoint",
    "WaypointPlan",
    "Wrench",
]
