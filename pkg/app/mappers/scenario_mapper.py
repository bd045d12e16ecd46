from app.models import (
    McTuning,
    Pose,
    Velocity,
    VehicleParams,
    VehicleState,
    WaveAxisParams,
    WaveField,
    Waypoint,
    WaypointPlan,
)
from app.schemas import (
    GuidanceConfig,
    InitialStateConfig,
    ScenarioConfig,
    TuningConfig,
    VehicleConfig,
    WaveAxisConfig,
    WaveConfig,
)
from app.services.disturbance import make_wave_field


class ScenarioMapper:
    """Handles conversion between the scenario file schema and domain types."""

    @staticmethod
    def to_vehicle(cfg: VehicleConfig) -> VehicleParams:
        return VehicleParams(
            M=cfg.M,
            D_lin=cfg.D_lin,
            D_quad=cfg.D_quad,
            W=cfg.W,
            B=cfg.B,
            r_g=cfg.r_g,
            r_b=cfg.r_b,
            L=cfg.L,
            tau_bar=cfg.tau_bar,
            pitch_margin=cfg.pitch_margin,
        )

    @staticmethod
    def to_plan(cfg: GuidanceConfig) -> WaypointPlan:
        return WaypointPlan(
            waypoints=tuple(Waypoint(wp.x, wp.y, wp.z) for wp in cfg.waypoints),
            rho_c=cfg.rho_c,
            rho_s=cfg.rho_s,
        )

    @staticmethod
    def to_tuning(cfg: TuningConfig, tau_bar, Ts: float) -> McTuning:
        """The input bound is the vehicle's; d_bar given for the six outputs is padded to 12."""
        d_bar = cfg.d_bar
        if isinstance(d_bar, list) and len(d_bar) == 6:
            d_bar = d_bar + [0.0] * 6
        R = cfg.R if isinstance(cfg.R, list) else [cfg.R] * 6
        return McTuning(
            Q=cfg.Q,
            R=R,
            N=cfg.N,
            Nu=cfg.Nu,
            d_bar=d_bar,
            tau_bar=tau_bar,
            Ts=Ts,
            solver=cfg.solver.backend,
            tol=cfg.solver.tol,
            max_iter=cfg.solver.max_iter,
        )

    @staticmethod
    def to_wave_axis(cfg: WaveAxisConfig, enabled: bool = True) -> WaveAxisParams:
        return WaveAxisParams(
            xi=cfg.xi,
            omega0=cfg.omega0,
            Kw=cfg.Kw,
            noise_std=cfg.noise_std if enabled else 0.0,
            bias_bounds=(cfg.bias_bounds[0], cfg.bias_bounds[1]),
            bias_step_std=cfg.bias_step_std if enabled else 0.0,
        )

    @staticmethod
    def to_wave_field(cfg: WaveConfig, seed: int) -> WaveField:
        axes = [ScenarioMapper.to_wave_axis(axis, cfg.enabled) for axis in cfg.axes]
        return make_wave_field(axes, seed=seed, common_mode=cfg.common_mode)

    @staticmethod
    def to_initial_state(cfg: InitialStateConfig) -> VehicleState:
        return VehicleState(pose=Pose.from_array(cfg.pose), nu=Velocity.from_array(cfg.nu))

    @staticmethod
    def with_seed(config: ScenarioConfig, seed: int) -> ScenarioConfig:
        return config.model_copy(update={"seed": seed})

    @staticmethod
    def with_rho_c(config: ScenarioConfig, rho_c: float) -> ScenarioConfig:
        guidance = config.guidance.model_copy(update={"rho_c": rho_c})
        return config.model_copy(update={"guidance": guidance})

    @staticmethod
    def with_d_bar(config: ScenarioConfig, d_bar: float) -> ScenarioConfig:
        tuning = config.tuning.model_copy(update={"d_bar": d_bar})
        return config.model_copy(update={"tuning": tuning})
