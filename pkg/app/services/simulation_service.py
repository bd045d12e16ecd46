"""Closed-loop scenario runner, run metrics and parameter sweeps.

Per sample k (t = k * Ts) the loop runs, in this order: wave draw, guidance
update, minimax MPC with inverse dynamics, RK4 truth step, log append. The
logged pose and velocity are the ones the guidance and controller saw; tau and
tau_w are the inputs held over [t, t + Ts].

A run ends with one terminal row (status "terminal", zero wrench) when the
destination sphere is entered or the last sample of max_sim_time is reached.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

import numpy as np

from app.mappers.scenario_mapper import ScenarioMapper
from app.models import (
    ControlSolution,
    LogRow,
    LosReference,
    Metrics,
    SimLog,
    SweepRow,
    SweepTable,
    VehicleState,
    WaypointPlan,
    Wrench,
)
from app.models.simulation import TERMINAL_STATUS
from app.schemas import ScenarioConfig
from app.services import vehicle_dynamics as vd
from app.services.controller import mpc_step
from app.services.disturbance import field_step
from app.services.guidance import (
    DegenerateSegmentError,
    PlanCompleteError,
    guidance_update,
    los_surge_speed,
)
from app.services.qp_solver import QpBackend

logger = logging.getLogger(__name__)

# Fraction of each segment's duration excluded at both ends from surge statistics
SEGMENT_EDGE = 0.1


class SimulationAbortedError(Exception):
    """Raised when a run cannot continue; carries the log recorded so far."""

    def __init__(self, message: str, log: SimLog, plan: WaypointPlan):
        super().__init__(message)
        self.log = log
        self.plan = plan

    def __reduce__(self):
        # sweep workers send the exception back to the parent process
        return type(self), (self.args[0], self.log, self.plan)


def _row(
    t: float,
    state: VehicleState,
    tau: Wrench,
    tau_w: np.ndarray,
    ref: LosReference,
    active_index: int,
    status: str,
    iterations: int,
    cost: float,
) -> LogRow:
    return LogRow(
        t=t,
        pose=state.pose.as_tuple(),
        nu=state.nu.as_tuple(),
        tau=tau.as_tuple(),
        tau_w=tuple(float(v) for v in tau_w[:3]),
        los_ref=tuple(float(v) for v in ref.as_array()),
        active_index=active_index,
        qp_status=status,
        qp_iterations=iterations,
        worst_case_cost=cost,
    )


def _hold_reference(state: VehicleState) -> LosReference:
    pose = state.pose
    return LosReference(pose.x, pose.y, pose.z, 0.0, pose.theta, pose.psi)


def run_simulation(
    config: ScenarioConfig,
    backend: Optional[QpBackend] = None,
) -> tuple[SimLog, Metrics]:
    """Run one scenario to completion or max_sim_time.

    Raises SimulationAbortedError (with the partial log) on a pitch
    singularity or a degenerate path segment.
    """
    Ts = config.Ts
    params = ScenarioMapper.to_vehicle(config.vehicle)
    plan = ScenarioMapper.to_plan(config.guidance)
    initial_plan = plan
    tuning = ScenarioMapper.to_tuning(config.tuning, params.tau_bar, Ts)
    field = ScenarioMapper.to_wave_field(config.wave, config.seed)
    state = ScenarioMapper.to_initial_state(config.initial_state)
    vd.describe(params)

    steps = int(math.floor(config.max_sim_time / Ts + 1e-9))
    log = SimLog(Ts=Ts)
    previous: Optional[ControlSolution] = None
    reference = _hold_reference(state)
    logger.info(
        "Run start: %d waypoints, rho_c=%g, rho_s=%g, seed=%d, %d steps",
        plan.count,
        plan.rho_c,
        plan.rho_s,
        config.seed,
        steps,
    )

    for k in range(steps):
        t = k * Ts
        field, tau_w = field_step(field, Ts)

        try:
            plan, reference = guidance_update(plan, state.pose)
        except PlanCompleteError as done:
            plan = done.plan
            log.append(_row(t, state, Wrench(), tau_w, reference, plan.active_index, TERMINAL_STATUS, 0, 0.0))
            logger.info("Destination reached at t=%.1f s", t)
            break
        except DegenerateSegmentError as exc:
            raise SimulationAbortedError(f"t={t:.3f}: {exc}", log, plan) from exc

        if k == steps - 1:
            log.append(_row(t, state, Wrench(), tau_w, reference, plan.active_index, TERMINAL_STATUS, 0, 0.0))
            logger.info("Time limit %.1f s reached at waypoint %d/%d", config.max_sim_time, plan.active_index, plan.count)
            break

        try:
            tau, solution = mpc_step(state, state.nu, reference, tuning, params, backend, previous)
            log.append(
                _row(
                    t,
                    state,
                    tau,
                    tau_w,
                    reference,
                    plan.active_index,
                    solution.status.value,
                    solution.iterations,
                    solution.worst_case_cost,
                )
            )
            state = vd.step_truth(state, tau, tau_w, params, Ts)
        except vd.PitchSingularityError as exc:
            logger.warning("Run aborted at t=%.3f s: %s", t, exc)
            raise SimulationAbortedError(f"t={t:.3f}: {exc}", log, plan) from exc
        previous = solution

    metrics = compute_metrics(log, initial_plan)
    logger.info(
        "Run finished: completed=%s, t=%.1f s, mean surge %.3f m/s",
        metrics.completed,
        metrics.final_time,
        metrics.mean_surge,
    )
    return log, metrics


def _hit_indices(active: np.ndarray, count: int) -> list[Optional[int]]:
    """First row whose logged active_index has moved past each waypoint.

    One guidance update can pass several overlapping spheres, so consecutive
    waypoints may share a hit row.
    """
    hits: list[Optional[int]] = []
    for i in range(count):
        passed = np.flatnonzero(active > i)
        hits.append(int(passed[0]) if passed.size else None)
    return hits


def _segment_directions(plan: WaypointPlan, origin: np.ndarray) -> list[Optional[np.ndarray]]:
    """Unit direction of the segment ending at each waypoint; the first starts at origin."""
    directions: list[Optional[np.ndarray]] = []
    start = origin
    for wp in plan.waypoints:
        delta = wp.as_array() - start
        length = np.linalg.norm(delta)
        directions.append(delta / length if length > 0.0 else None)
        start = wp.as_array()
    return directions


def _mean_los_surge(log: SimLog, plan: WaypointPlan, origin: np.ndarray) -> float:
    """Mean along-track advance of the LOS point per sample, over controlled rows.

    Both LOS points of a pair are projected on the segment active at the later
    row; pairs straddling the end of the plan are skipped.
    """
    if log.Ts <= 0.0:
        return 0.0
    directions = _segment_directions(plan, origin)
    control_rows = [row for row in log.rows if row.qp_status != TERMINAL_STATUS]
    speeds = []
    for prev, row in zip(control_rows, control_rows[1:]):
        if row.active_index >= plan.count or directions[row.active_index] is None:
            continue
        d = directions[row.active_index]
        x_los = float(np.asarray(row.los_ref[:3]) @ d)
        x_los_prev = float(np.asarray(prev.los_ref[:3]) @ d)
        speeds.append(los_surge_speed(x_los, x_los_prev, log.Ts))
    return float(np.mean(speeds)) if speeds else 0.0


def _line_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    direction = b - a
    length = np.linalg.norm(direction)
    if length == 0.0:
        return np.linalg.norm(points - a, axis=1)
    return np.linalg.norm(np.cross(points - a, direction / length), axis=1)


def compute_metrics(log: SimLog, plan: WaypointPlan) -> Metrics:
    """Scenario statistics from a run log.

    Waypoint hits and completion follow the logged active_index. Surge
    statistics pool the samples between 10% and 90% of every completed
    segment; without any completed segment all rows are used. Roll is in
    degrees. Cross-track RMS is measured against the straight line of each
    segment (the first one starts at the logged start position).
    """
    if not log.rows:
        raise ValueError("cannot compute metrics of an empty log")
    rows = log.rows
    t = np.array([row.t for row in rows])
    poses = np.array([row.pose for row in rows])
    positions = poses[:, 0:3]
    surge = np.array([row.nu[0] for row in rows])
    taus = np.array([row.tau for row in rows])

    active = np.array([row.active_index for row in rows])
    hits = _hit_indices(active, plan.count)
    hit_times = tuple(float(t[i]) if i is not None else None for i in hits)

    window = np.zeros(len(rows), dtype=bool)
    cross_track: list[Optional[float]] = []
    seg_start_index: Optional[int] = 0
    seg_start_point = positions[0]
    for wp, hit in zip(plan.waypoints, hits):
        if hit is None or seg_start_index is None:
            cross_track.append(None)
            seg_start_index = None
            continue
        t0, t1 = t[seg_start_index], t[hit]
        span = t1 - t0
        window |= (t >= t0 + SEGMENT_EDGE * span) & (t <= t0 + (1.0 - SEGMENT_EDGE) * span)
        in_segment = slice(seg_start_index, hit + 1)
        dist = _line_distances(positions[in_segment], seg_start_point, wp.as_array())
        cross_track.append(float(np.sqrt(np.mean(dist * dist))))
        seg_start_index, seg_start_point = hit, wp.as_array()

    samples = surge[window] if np.any(window) else surge
    roll_deg = np.degrees(np.abs(poses[:, 3]))

    mean_los_surge = _mean_los_surge(log, plan, positions[0])

    return Metrics(
        waypoint_hit_times=hit_times,
        mean_surge=float(np.mean(samples)),
        surge_std=float(np.std(samples)),
        mean_abs_roll=float(np.mean(roll_deg)),
        max_abs_roll=float(np.max(roll_deg)),
        max_abs_tau=float(np.max(np.abs(taus))),
        cross_track_rms=tuple(cross_track),
        completed=bool(active[-1] >= plan.count),
        mean_los_surge=mean_los_surge,
        final_time=float(t[-1]),
    )


def _run_metrics(config: ScenarioConfig) -> Metrics:
    return run_simulation(config)[1]


def _check_ascending(values: Sequence[float], name: str, strictly_positive: bool) -> list[float]:
    values = [float(v) for v in values]
    if not values:
        raise ValueError(f"{name} sweep needs at least one value")
    lower_ok = (lambda v: v > 0.0) if strictly_positive else (lambda v: v >= 0.0)
    if not all(lower_ok(v) for v in values):
        raise ValueError(f"{name} values must be {'positive' if strictly_positive else 'nonnegative'}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} values must be strictly ascending")
    return values


def _sweep(parameter: str, configs: list[ScenarioConfig], values: list[float], workers: Optional[int]) -> SweepTable:
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_metrics, configs))
    else:
        results = [_run_metrics(cfg) for cfg in configs]

    rows = []
    for value, metrics in zip(values, results):
        rms = [r for r in metrics.cross_track_rms if r is not None]
        row = SweepRow(
            value=value,
            mean_surge=metrics.mean_surge,
            completed=metrics.completed,
            max_cross_track_rms=max(rms) if rms else None,
            metrics=metrics,
        )
        logger.info("%s=%g: mean surge %.4f m/s, completed=%s", parameter, value, row.mean_surge, row.completed)
        rows.append(row)
    table = SweepTable(parameter=parameter, rows=tuple(rows))
    if not table.comparable:
        logger.warning("Sweep over %s has incomplete runs; rows are not comparable", parameter)
    return table


def sweep_rho_c(
    config: ScenarioConfig,
    values: Sequence[float],
    workers: Optional[int] = None,
) -> SweepTable:
    """One run per circle-of-acceptance radius, all with the config's seed."""
    values = _check_ascending(values, "rho_c", strictly_positive=True)
    configs = [ScenarioMapper.with_rho_c(config, v) for v in values]
    return _sweep("rho_c", configs, values, workers)


def sweep_d_bar(
    config: ScenarioConfig,
    values: Sequence[float],
    workers: Optional[int] = None,
) -> SweepTable:
    """One run per scalar disturbance bound, all with the config's seed."""
    values = _check_ascending(values, "d_bar", strictly_positive=False)
    configs = [ScenarioMapper.with_d_bar(config, v) for v in values]
    return _sweep("d_bar", configs, values, workers)
