from typing import Optional

from app.models import Metrics, RunRecord
from app.schemas import ScenarioConfig


class RunMapper:
    """Converts a finished run (scenario + metrics) into its archive row."""

    @staticmethod
    def to_record(
        config: ScenarioConfig,
        metrics: Metrics,
        log_path: Optional[str] = None,
    ) -> RunRecord:
        d_bar = config.tuning.d_bar
        return RunRecord(
            label=config.label or "run",
            seed=config.seed,
            Ts=config.Ts,
            rho_c=config.guidance.rho_c,
            rho_s=config.guidance.rho_s,
            N=config.tuning.N,
            Nu=config.tuning.Nu,
            d_bar=float(max(d_bar)) if isinstance(d_bar, list) else float(d_bar),
            completed=metrics.completed,
            final_time=metrics.final_time,
            mean_surge=metrics.mean_surge,
            surge_std=metrics.surge_std,
            mean_abs_roll=metrics.mean_abs_roll,
            max_abs_roll=metrics.max_abs_roll,
            max_abs_tau=metrics.max_abs_tau,
            mean_los_surge=metrics.mean_los_surge,
            log_path=log_path,
        )

    @staticmethod
    def to_summary(record: RunRecord) -> dict:
        """Flat projection used by `history` output."""
        return {
            "id": record.id,
            "dateCreation": record.dateCreation.isoformat(timespec="seconds"),
            "label": record.label,
            "seed": record.seed,
            "rho_c": record.rho_c,
            "d_bar": record.d_bar,
            "completed": record.completed,
            "final_time": record.final_time,
            "mean_surge": record.mean_surge,
        }
