from typing import List, Optional

from sqlalchemy.ext.asyncio import AsyncSession
from sqlmodel import select

from app.models.run_record import RunRecord


class RunRepository:
    def __init__(self, session: AsyncSession):
        self.session = session

    async def get_all(self) -> List[RunRecord]:
        result = await self.session.execute(select(RunRecord).order_by(RunRecord.dateCreation))
        return result.scalars().all()

    async def get_by_id(self, run_id: str) -> Optional[RunRecord]:
        result = await self.session.execute(select(RunRecord).where(RunRecord.id == run_id))
        return result.scalar_one_or_none()

    async def create(self, record: RunRecord) -> RunRecord:
        self.session.add(record)
        await self.session.commit()
        await self.session.refresh(record)
        return record

    async def delete(self, run_id: str) -> bool:
        record = await self.get_by_id(run_id)
        if record:
            await self.session.delete(record)
            await self.session.commit()
            return True
        return False

    async def find_completed(self, completed: bool = True) -> List[RunRecord]:
        stmt = select(RunRecord).where(RunRecord.completed == completed)
        result = await self.session.execute(stmt)
        return result.scalars().all()

    async def find_by_rho_c_range(self, min_rho_c: Optional[float], max_rho_c: Optional[float]) -> List[RunRecord]:
        query = select(RunRecord)
        if min_rho_c is not None:
            query = query.where(RunRecord.rho_c >= min_rho_c)
        if max_rho_c is not None:
            query = query.where(RunRecord.rho_c <= max_rho_c)
        result = await self.session.execute(query.order_by(RunRecord.rho_c))
        return result.scalars().all()
