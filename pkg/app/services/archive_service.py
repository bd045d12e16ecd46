"""Service layer for the run archive."""

import logging
from typing import List, Optional

from sqlalchemy.ext.asyncio import AsyncSession

from app.mappers.run_mapper import RunMapper
from app.models import Metrics, RunRecord
from app.repositories import RunRepository
from app.schemas import ScenarioConfig

logger = logging.getLogger(__name__)


class RunNotFoundError(Exception):
    """Raised when an archived run is not found."""

    pass


class RunArchiveService:
    """Stores finished runs and answers history queries."""

    def __init__(self, session: AsyncSession):
        self.repository = RunRepository(session)

    async def archive(
        self,
        config: ScenarioConfig,
        metrics: Metrics,
        log_path: Optional[str] = None,
    ) -> RunRecord:
        record = await self.repository.create(RunMapper.to_record(config, metrics, log_path))
        logger.info("Archived run %s (rho_c=%g, completed=%s)", record.id, record.rho_c, record.completed)
        return record

    async def get_all(self) -> List[RunRecord]:
        return await self.repository.get_all()

    async def get_by_id(self, run_id: str) -> RunRecord:
        record = await self.repository.get_by_id(run_id)
        if not record:
            raise RunNotFoundError(f"Run with id {run_id} not found")
        return record

    async def delete(self, run_id: str) -> None:
        if await self.repository.delete(run_id):
            return
        raise RunNotFoundError(f"Run with id {run_id} not found")

    async def history(
        self,
        min_rho_c: Optional[float] = None,
        max_rho_c: Optional[float] = None,
        completed: Optional[bool] = None,
    ) -> List[RunRecord]:
        """Archived runs, optionally filtered by rho_c range and completion."""
        if min_rho_c is None and max_rho_c is None:
            if completed is not None:
                return await self.repository.find_completed(completed)
            return await self.repository.get_all()
        records = await self.repository.find_by_rho_c_range(min_rho_c, max_rho_c)
        if completed is not None:
            records = [r for r in records if r.completed == completed]
        return records
