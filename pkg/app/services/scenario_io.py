"""Scenario file loading and run-log serialisation.

Logs are written with the columns in LOG_COLUMNS order. Floats use repr(),
which round-trips float64 exactly; CSV cells and JSON numbers therefore read
back bit-identical.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Literal, Union

from pydantic import ValidationError

from app.mappers.scenario_mapper import ScenarioMapper
from app.models.simulation import LOG_COLUMNS, LogRow, SimLog
from app.schemas import ScenarioConfig

logger = logging.getLogger(__name__)

LogFormat = Literal["csv", "json"]


class ConfigError(Exception):
    """Raised when a scenario file cannot be read, parsed or validated."""

    def __init__(self, message: str, fields: tuple[str, ...] = ()):
        super().__init__(message)
        self.fields = fields


def _dotted(loc: tuple) -> str:
    return ".".join(str(part) for part in loc)


def parse_config(data: Union[dict, str]) -> ScenarioConfig:
    """Validate an already-decoded mapping (or JSON text), schema first, then physics."""
    try:
        if isinstance(data, str):
            config = ScenarioConfig.model_validate_json(data)
        else:
            config = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        fields = tuple(_dotted(err["loc"]) for err in exc.errors())
        details = "; ".join(
            f"{_dotted(err['loc']) or '<root>'}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigError(f"invalid scenario: {details}", fields) from exc
    check_scenario(config)
    return config


def check_scenario(config: ScenarioConfig) -> None:
    """Domain invariants the schema cannot express (M positive definite, horizons, ...)."""
    try:
        params = ScenarioMapper.to_vehicle(config.vehicle)
        ScenarioMapper.to_tuning(config.tuning, params.tau_bar, config.Ts)
        ScenarioMapper.to_plan(config.guidance)
        ScenarioMapper.to_initial_state(config.initial_state)
    except ValueError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc
    if abs(config.initial_state.pose[4]) >= math.pi / 2 - config.vehicle.pitch_margin:
        raise ConfigError("invalid scenario: initial pitch is within the singularity margin", ("initial_state.pose",))


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object at the top level")
    config = parse_config(data)
    logger.info("Loaded scenario %s (seed=%d, Ts=%g)", path, config.seed, config.Ts)
    return config


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _json_value(value):
    # JSON has no NaN/inf literals; keep them as strings
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def write_log(log: SimLog, path: Union[str, Path], format: LogFormat = "csv") -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if format == "csv":
            with path.open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(LOG_COLUMNS)
                for row in log.rows:
                    writer.writerow([_cell(v) for v in row.as_record()])
        elif format == "json":
            payload = {
                "Ts": log.Ts,
                "columns": list(LOG_COLUMNS),
                "rows": [[_json_value(v) for v in row.as_record()] for row in log.rows],
            }
            path.write_text(json.dumps(payload), encoding="utf-8")
        else:
            raise ValueError(f"unknown log format {format!r}")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror or exc}") from exc
    logger.info("Wrote %d log rows to %s", len(log), path)
    return path


def read_log(path: Union[str, Path], Ts: float | None = None) -> SimLog:
    """Inverse of write_log; the format is taken from the file suffix.

    CSV files do not carry Ts; it is inferred from the first two timestamps
    unless given, so a CSV log with fewer than two rows needs an explicit Ts.
    """
    path = Path(path)
    if path.suffix == ".json":
        payload = json.loads(path.read_text(encoding="utf-8"))
        if tuple(payload["columns"]) != LOG_COLUMNS:
            raise ValueError(f"{path}: unexpected column layout")
        rows = [LogRow.from_record(r) for r in payload["rows"]]
        return SimLog(Ts=float(payload["Ts"]), rows=rows)

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != LOG_COLUMNS:
            raise ValueError(f"{path}: unexpected column layout")
        rows = [LogRow.from_record(r) for r in reader]
    if Ts is None:
        if len(rows) < 2:
            raise ValueError(f"{path}: cannot infer Ts from {len(rows)} row(s); pass Ts")
        Ts = rows[1].t - rows[0].t
    return SimLog(Ts=Ts, rows=rows)
