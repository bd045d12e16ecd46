"""JSON scenario file schema.

Every section except `vehicle` defaults to the reference waypoint scenario.
Matrices are nested row-major lists. Unknown keys are rejected at every level.
"""

import math
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.models.control import QpBackendName


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


Vector6 = List[float]
Matrix6 = List[List[float]]


def _check_matrix(value: Matrix6, name: str) -> Matrix6:
    if len(value) != 6 or any(len(row) != 6 for row in value):
        raise ValueError(f"{name} must be a 6x6 nested list")
    return value


def _check_vector(value: List[float], size: int, name: str) -> List[float]:
    if len(value) != size:
        raise ValueError(f"{name} must have {size} entries, got {len(value)}")
    return value


class VehicleConfig(StrictModel):
    M: Matrix6
    D_lin: Matrix6
    D_quad: Vector6
    W: float
    B: float
    r_g: List[float]
    r_b: List[float]
    L: float = Field(gt=0)
    tau_bar: Union[float, Vector6] = 2000.0
    pitch_margin: float = Field(default=0.05, gt=0, lt=math.pi / 2)

    @field_validator("M", "D_lin")
    @classmethod
    def square(cls, value: Matrix6, info) -> Matrix6:
        return _check_matrix(value, info.field_name)

    @field_validator("D_quad")
    @classmethod
    def six(cls, value: Vector6) -> Vector6:
        return _check_vector(value, 6, "D_quad")

    @field_validator("r_g", "r_b")
    @classmethod
    def three(cls, value: List[float], info) -> List[float]:
        return _check_vector(value, 3, info.field_name)

    @field_validator("tau_bar")
    @classmethod
    def positive_bound(cls, value: Union[float, Vector6]) -> Union[float, Vector6]:
        values = value if isinstance(value, list) else [value]
        if isinstance(value, list):
            _check_vector(value, 6, "tau_bar")
        if any(v <= 0 for v in values):
            raise ValueError("tau_bar must be positive")
        return value


class WaypointConfig(StrictModel):
    x: float
    y: float
    z: float


def _reference_waypoints() -> List[WaypointConfig]:
    return [
        WaypointConfig(x=20.0, y=40.0, z=-16.0),
        WaypointConfig(x=50.0, y=20.0, z=-16.0),
        WaypointConfig(x=70.0, y=50.0, z=-8.0),
        WaypointConfig(x=40.0, y=70.0, z=-4.0),
    ]


class GuidanceConfig(StrictModel):
    waypoints: List[WaypointConfig] = Field(default_factory=_reference_waypoints, min_length=1)
    rho_c: float = Field(default=0.5, gt=0)
    rho_s: float = Field(default=3.0, gt=0)

    @model_validator(mode="after")
    def no_vertical_segments(self) -> "GuidanceConfig":
        for i, (a, b) in enumerate(zip(self.waypoints, self.waypoints[1:])):
            if math.hypot(b.x - a.x, b.y - a.y) <= 1e-9:
                raise ValueError(f"segment {i}->{i + 1} has no horizontal extent")
        return self


class SolverConfig(StrictModel):
    backend: QpBackendName = QpBackendName.ACTIVE_SET
    tol: float = Field(default=1e-6, gt=0)
    max_iter: int = Field(default=4000, ge=1)


class TuningConfig(StrictModel):
    Q: Vector6 = Field(default_factory=lambda: [5.0, 5.0, 5.0, 0.1, 0.1, 0.1])
    R: Union[float, Vector6] = 18.0
    N: int = Field(default=10, ge=1)
    Nu: int = Field(default=2, ge=1)
    d_bar: Union[float, List[float]] = 0.5
    solver: SolverConfig = Field(default_factory=SolverConfig)

    @field_validator("Q")
    @classmethod
    def positive_q(cls, value: Vector6) -> Vector6:
        _check_vector(value, 6, "Q")
        if any(v <= 0 for v in value):
            raise ValueError("Q weights must be positive")
        return value

    @field_validator("R")
    @classmethod
    def positive_r(cls, value: Union[float, Vector6]) -> Union[float, Vector6]:
        values = value if isinstance(value, list) else [value]
        if isinstance(value, list):
            _check_vector(value, 6, "R")
        if any(v <= 0 for v in values):
            raise ValueError("R weights must be positive")
        return value

    @field_validator("d_bar")
    @classmethod
    def nonnegative_d_bar(cls, value: Union[float, List[float]]) -> Union[float, List[float]]:
        values = value if isinstance(value, list) else [value]
        if isinstance(value, list) and len(value) not in (6, 12):
            raise ValueError("d_bar must be a scalar or have 6 or 12 entries")
        if any(v < 0 for v in values):
            raise ValueError("d_bar must be nonnegative")
        return value

    @model_validator(mode="after")
    def horizons(self) -> "TuningConfig":
        if self.Nu > self.N:
            raise ValueError(f"Nu ({self.Nu}) must not exceed N ({self.N})")
        return self


class WaveAxisConfig(StrictModel):
    xi: float = Field(default=0.2573, gt=0)
    omega0: float = Field(default=0.8, gt=0)
    Kw: float = 1.5
    noise_std: float = Field(default=0.15, ge=0)
    bias_bounds: List[float] = Field(default_factory=lambda: [-100.0, 100.0])
    bias_step_std: float = Field(default=2.0, ge=0)

    @field_validator("bias_bounds")
    @classmethod
    def ordered(cls, value: List[float]) -> List[float]:
        _check_vector(value, 2, "bias_bounds")
        if value[0] > value[1]:
            raise ValueError("bias_bounds must satisfy lo <= hi")
        return value


class WaveConfig(StrictModel):
    """One shared axis or exactly three (X, Y, Z)."""

    axes: List[WaveAxisConfig] = Field(default_factory=lambda: [WaveAxisConfig()])
    common_mode: bool = True
    enabled: bool = True

    @field_validator("axes")
    @classmethod
    def one_or_three(cls, value: List[WaveAxisConfig]) -> List[WaveAxisConfig]:
        if len(value) not in (1, 3):
            raise ValueError("axes must hold one shared entry or three per-axis entries")
        return value


class InitialStateConfig(StrictModel):
    pose: Vector6 = Field(default_factory=lambda: [10.0, 30.0, -16.0, 0.0, 0.0, math.pi / 4])
    nu: Vector6 = Field(default_factory=lambda: [0.0] * 6)

    @field_validator("pose", "nu")
    @classmethod
    def six_finite(cls, value: Vector6, info) -> Vector6:
        _check_vector(value, 6, info.field_name)
        if not all(math.isfinite(v) for v in value):
            raise ValueError(f"{info.field_name} must be finite")
        return value


class ScenarioConfig(StrictModel):
    vehicle: VehicleConfig
    guidance: GuidanceConfig = Field(default_factory=GuidanceConfig)
    tuning: TuningConfig = Field(default_factory=TuningConfig)
    wave: WaveConfig = Field(default_factory=WaveConfig)
    initial_state: InitialStateConfig = Field(default_factory=InitialStateConfig)
    Ts: float = Field(default=0.1, gt=0)
    max_sim_time: float = Field(default=300.0, gt=0)
    seed: int = Field(default=7, ge=0)
    label: Optional[str] = None

    @model_validator(mode="after")
    def horizon_covers_a_step(self) -> "ScenarioConfig":
        if self.max_sim_time <= self.Ts:
            raise ValueError("max_sim_time must exceed Ts")
        return self
