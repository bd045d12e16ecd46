from datetime import datetime
from typing import Optional
from sqlmodel import Field, SQLModel
import uuid


class RunRecord(SQLModel, table=True):
    """One archived closed-loop run: scenario identifiers plus its metrics."""

    id: Optional[str] = Field(default_factory=lambda: str(uuid.uuid4()), primary_key=True)
    dateCreation: datetime = Field(default_factory=datetime.now)
    label: str = Field(default="run")
    seed: int
    Ts: float
    rho_c: float = Field(index=True)
    rho_s: float
    N: int
    Nu: int
    d_bar: float
    completed: bool = Field(index=True)
    final_time: float
    mean_surge: float
    surge_std: float
    mean_abs_roll: float
    max_abs_roll: float
    max_abs_tau: float
    mean_los_surge: float = Field(default=0.0)
    log_path: Optional[str] = Field(default=None)
