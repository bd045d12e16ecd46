from app.schemas.scenario import (
    GuidanceConfig,
    InitialStateConfig,
    ScenarioConfig,
    SolverConfig,
    TuningConfig,
    VehicleConfig,
    WaveAxisConfig,
    WaveConfig,
    WaypointConfig,
)

__all__ = [
    "GuidanceConfig",
    "InitialStateConfig",
    "ScenarioConfig",
    "SolverConfig",
    "TuningConfig",
    "VehicleConfig",
    "WaveAxisConfig",
    "WaveConfig",
    "WaypointConfig",
]
